#include <fstream>
#include <json.hpp>
#include <sstream>

#include "visbound/billiard.hpp"
#include "visbound/errors.hpp"

namespace visbound {
namespace {

double number(const nlohmann::json& j, const std::string& what) {
  if (!j.is_number()) throw InvalidInput("scene: " + what + " must be a number");
  return j.get<double>();
}

}  // namespace

Scene2D parse_scene(const std::string& text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(std::string("scene: malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw InvalidInput("scene: top level must be an object");

  std::vector<Polygon> polygons;
  if (root.contains("polygons")) {
    const auto& list = root["polygons"];
    if (!list.is_array()) throw InvalidInput("scene: polygons must be an array");
    for (const auto& poly : list) {
      if (!poly.is_array()) throw InvalidInput("scene: each polygon must be an array of points");
      Polygon p;
      for (const auto& pt : poly) {
        if (!pt.is_array() || pt.size() != 2) throw InvalidInput("scene: points must be [x, y]");
        p.vertices.push_back({number(pt[0], "x"), number(pt[1], "y")});
      }
      polygons.push_back(std::move(p));
    }
  }
  std::vector<Disc> discs;
  if (root.contains("discs")) {
    const auto& list = root["discs"];
    if (!list.is_array()) throw InvalidInput("scene: discs must be an array");
    for (const auto& d : list) {
      if (!d.is_object() || !d.contains("cx") || !d.contains("cy") || !d.contains("r")) {
        throw InvalidInput("scene: discs need cx, cy and r");
      }
      discs.push_back({{number(d["cx"], "cx"), number(d["cy"], "cy")}, number(d["r"], "r")});
    }
  }
  return make_scene(std::move(polygons), std::move(discs));
}

Scene2D load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scene file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("cannot read scene file " + path);
  return parse_scene(buffer.str());
}

}  // namespace visbound
