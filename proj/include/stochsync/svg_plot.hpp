#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stochsync/report.hpp"

namespace stochsync {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool scatter{false};
};

struct PlotSpec {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<PlotSeries> series;
  std::optional<std::pair<double, double>> y_range;
};

/// Minimal static SVG line/scatter chart. Non-finite points are skipped.
std::string render_svg(const PlotSpec& spec);

/// Traces of one state component for every node, from a trajectory CSV.
std::string trajectory_plot(const CsvTable& table, std::size_t component, const std::string& title);

/// Mean R per parameter value with per-seed scatter, from a sweep CSV.
std::string sweep_plot(const CsvTable& table, const std::string& title);

}  // namespace stochsync
