#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "visbound/bounds.hpp"

namespace visbound {

inline constexpr const char* kToolName = "visbound";
inline constexpr const char* kToolVersion = "0.1.0";

using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view text);

/// "# visbound 0.1.0 config=<16 hex digits> key=value ...", hash over the
/// entries in order.
std::string config_header(const ConfigEntries& config);

/// Shortest round-trip decimal text for a double.
std::string format_number(double value);

/// Header line, then "x,bound,source" rows for every curve in order.
std::string bound_curves_csv(const std::string& header, const std::vector<BoundCurve>& curves);

/// Line chart of the curves on [0,1] x [0, ymax]: prior dotted, tt2 dashed,
/// combined thin, LP thick.
std::string bound_curves_svg(const std::vector<BoundCurve>& curves, const std::string& title);

/// Throws IoError on failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace visbound
