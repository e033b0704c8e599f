#include "visbound/output.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "visbound/errors.hpp"

namespace visbound {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_header(const ConfigEntries& config) {
  std::string canonical;
  for (const auto& [key, value] : config) canonical += key + "=" + value + ";";
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(canonical)));
  std::string line = std::string("# ") + kToolName + " " + kToolVersion + " config=" + hash;
  for (const auto& [key, value] : config) line += " " + key + "=" + value;
  return line;
}

std::string format_number(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string bound_curves_csv(const std::string& header, const std::vector<BoundCurve>& curves) {
  std::string out = header + "\nx,bound,source\n";
  for (const auto& curve : curves) {
    for (std::size_t i = 0; i < curve.xs.size(); ++i) {
      out += format_number(curve.xs[i]) + "," + format_number(curve.ys[i]) + "," +
             source_tag(curve.source) + "\n";
    }
  }
  return out;
}

std::string bound_curves_svg(const std::vector<BoundCurve>& curves, const std::string& title) {
  constexpr double width = 640, height = 480, margin = 50;
  double ymax = 0.0;
  for (const auto& c : curves) {
    for (double y : c.ys) ymax = std::max(ymax, y);
  }
  ymax = ymax > 0.0 ? ymax * 1.05 : 1.0;
  auto px = [&](double x) { return margin + x * (width - 2 * margin); };
  auto py = [&](double y) { return height - margin - std::max(0.0, y) / ymax * (height - 2 * margin); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"14\">" << title << "</text>\n";
  svg << "<g stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1) << "\" y2=\"" << py(0) << "\"/>\n"
      << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(0) << "\" y2=\"" << py(ymax) << "\"/>\n"
      << "</g>\n";
  for (int k = 0; k <= 4; ++k) {
    const double x = k / 4.0;
    const double y = ymax * k / 4.0;
    svg << "<text x=\"" << px(x) << "\" y=\"" << py(0) + 16 << "\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"11\">" << format_number(x) << "</text>\n";
    char label[16];
    std::snprintf(label, sizeof label, "%.2f", y);
    svg << "<text x=\"" << px(0) - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\" "
        << "font-family=\"sans-serif\" font-size=\"11\">" << label << "</text>\n";
  }

  int legend = 0;
  for (const auto& c : curves) {
    std::string style;
    switch (c.source) {
      case BoundSource::LpLegendre: style = "stroke=\"black\" stroke-width=\"3\""; break;
      case BoundSource::Combined: style = "stroke=\"#444\" stroke-width=\"1\""; break;
      case BoundSource::Tt2a: style = "stroke=\"#1f5fa8\" stroke-width=\"1.5\" stroke-dasharray=\"8,5\""; break;
      case BoundSource::Tt2bAsymptotic: style = "stroke=\"#7a9cc6\" stroke-width=\"1\" stroke-dasharray=\"3,4\""; break;
      case BoundSource::PriorT2: style = "stroke=\"#b03030\" stroke-width=\"1.5\" stroke-dasharray=\"1,4\""; break;
      case BoundSource::Tt1: style = "stroke=\"#2e8b57\" stroke-width=\"1\""; break;
    }
    svg << "<polyline fill=\"none\" " << style << " points=\"";
    for (std::size_t i = 0; i < c.xs.size(); ++i) {
      if (c.ys[i] < 0.0) continue;
      svg << px(c.xs[i]) << "," << py(c.ys[i]) << " ";
    }
    svg << "\"/>\n";
    const double ly = margin + 14 * legend++;
    svg << "<line x1=\"" << px(0) + 10 << "\" y1=\"" << ly << "\" x2=\"" << px(0) + 40 << "\" y2=\"" << ly
        << "\" " << style << "/>\n";
    svg << "<text x=\"" << px(0) + 46 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" "
        << "font-size=\"11\">" << source_tag(c.source) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << content;
  out.close();
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace visbound
