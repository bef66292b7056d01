#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace v2x {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  /// Base-10 logarithmic y axis; non-positive values are dropped.
  bool log_y = false;
  double y_min = 0.0;
  double y_max = 1.0;
};

std::string render_svg(const ChartSpec& spec, const std::vector<Series>& series);

/// Reads `prr.csv` and `ia_ccdf.csv` from `in_dir` and writes `prr.svg` and
/// `ia_ccdf.svg` to `out_dir`.
void plot_run(const std::filesystem::path& in_dir, const std::filesystem::path& out_dir);

}  // namespace v2x
