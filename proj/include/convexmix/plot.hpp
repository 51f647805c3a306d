#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "convexmix/signals.hpp"

namespace convexmix {

struct PlotSeries {
  std::vector<double> n;
  std::vector<double> norm_regret;
  std::vector<double> bound_norm;
};

struct PlotOptions {
  bool logx = false;
  std::size_t max_points = 2000;
  std::string title = "Time-normalized regret and bound";
};

/// Pulls t, norm_regret and bound_norm out of a trajectory CSV table.
PlotSeries plot_series_from_table(const CsvTable& table);

/// Deterministic SVG line chart; identical input gives identical bytes.
std::string render_plot_svg(const PlotSeries& series, const PlotOptions& options = {});

}  // namespace convexmix
