#pragma once

#include <optional>
#include <string>

#include "rg/io.hpp"

namespace rg {

enum class PlotKind { funding, density, depth, range };
const char* to_string(PlotKind k);
std::optional<PlotKind> parse_plot_kind(std::string_view s);

/// A static figure and the CSV twin of exactly the plotted series.
struct Figure {
  std::string svg;
  std::string csv;
};

/// Renders from a metrics report. The family a kind draws on must be
/// present, otherwise rg::Error(missing_series):
///   funding  cost.bars            rate_8h and annualized percent per bar
///   density  positioning.liquidation_density   liquidation heatmap: one
///            cell per evaluation-grid point, cell width = grid step,
///            colour by density; the peak cell is marked
///   depth    liquidity.snapshots  bid/ask 25th and 75th cumulative-depth
///            percentile prices over time (shelf migration)
///   range    structural.bars      closes with the rolling range overlay
Figure render_plot(const Json& report, PlotKind kind);

/// Peak cell of a density figure: [lower, upper) price bounds around the
/// grid maximum. Shared by the renderer and the tests.
struct DensityCell {
  double lower = 0.0;
  double price = 0.0;
  double upper = 0.0;
  double density = 0.0;
};
std::optional<DensityCell> density_peak_cell(const Json& report);

}  // namespace rg
