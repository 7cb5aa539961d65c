#pragma once

#include <string>

#include "ternkey/csv.hpp"

namespace ternkey {

/// Self-contained SVG for a parsed experiment table. Error-rate axes are
/// logarithmic; zero values are drawn at the bottom of the axis.
std::string render_svg(const CsvTable& table);

/// Reads `csv_path`, renders, and writes `svg_path` only if rendering
/// succeeded.
void emit_plot(const std::string& csv_path, const std::string& svg_path);

}  // namespace ternkey
