#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace robustlm {

/// Minimal self-contained SVG charts for simulation output; no plotting
/// dependency.

struct BarSeries {
  std::string label;
  std::vector<double> values;  // one bar per category
};

void write_histogram_svg(const std::filesystem::path& path, const std::string& title,
                         const std::vector<std::string>& categories,
                         const std::vector<BarSeries>& series);

struct LineSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

void write_line_chart_svg(const std::filesystem::path& path, const std::string& title,
                          const std::vector<LineSeries>& series);

}  // namespace robustlm
