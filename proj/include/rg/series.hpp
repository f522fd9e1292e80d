#pragma once

#include <optional>
#include <vector>

#include "rg/config.hpp"
#include "rg/model.hpp"

namespace rg {

/// Every auxiliary series mapped onto the candle grid. A record stamped at
/// time t belongs to the bar whose (open, close] interval contains t.
struct BarSeries {
  std::size_t size = 0;

  /// Mean rate_8h across exchanges of the records settling in the bar,
  /// carried forward from the last settlement; zero before the first.
  std::vector<Decimal> funding;
  std::vector<bool> funding_observed;

  /// Last OI snapshot at or before the bar close, carried forward.
  std::vector<std::optional<double>> oi;
  std::vector<std::optional<double>> long_share;  // long / (long + short)

  /// Index into Panel::books of the latest snapshot in the bar; none if
  /// the bar has no snapshot.
  std::vector<std::optional<std::size_t>> book;

  /// (mark - index) / index averaged over the bar's funding records.
  std::vector<std::optional<double>> basis;

  /// Rolling realized volatility ending at each bar.
  std::vector<double> volatility;

  /// Bar index of the first OI observation, if any.
  std::optional<std::size_t> first_oi_bar;
};

BarSeries build_bar_series(const Panel& panel, const Config& cfg = {});

}  // namespace rg
