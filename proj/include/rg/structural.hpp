#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rg/config.hpp"
#include "rg/model.hpp"

namespace rg {

enum class SwingKind { high, low };

struct SwingPoint {
  std::size_t index = 0;
  SwingKind kind = SwingKind::high;
  Decimal price;
  bool operator==(const SwingPoint&) const = default;
};

/// Swing highs: high strictly above the `lookback` highs before it and at
/// least as high as the `lookback` highs after it, so a run of equal
/// highs yields only its earliest bar. Lows mirror this. Points closer than
/// `lookback` bars to either end are never returned. Output is ordered by
/// index, a high before a low at the same index.
/// Throws rg::Error when fewer than 2*lookback+1 candles are supplied.
std::vector<SwingPoint> map_swings(std::span<const Candle4H> candles, std::size_t lookback = 5);

/// Corridor from the swing extremes in the trailing `range_window` bars of
/// `candles`. Returns nullopt when either boundary has fewer than the
/// required touches or the corridor is too narrow.
std::optional<RangeDefinition> derive_range(std::span<const Candle4H> candles, std::span<const SwingPoint> swings,
                                            const Config& cfg = {});

/// Convenience: swings over the trailing window, then derive_range.
std::optional<RangeDefinition> detect_range(std::span<const Candle4H> candles, const Config& cfg = {});

/// Sample standard deviation of log returns over all of `candles`
/// (n - 1 returns). Fewer than 3 candles -> 0.
double realized_volatility(std::span<const Candle4H> candles);

/// One value per bar: volatility of the log returns ending at that bar over
/// the trailing `window` returns. Bars without a full window get the value
/// over whatever history exists (0 for the first two bars).
std::vector<double> rolling_volatility(std::span<const Candle4H> candles, std::size_t window);

struct WickRatios {
  double upper_pct = 0.0;
  double lower_pct = 0.0;
};

/// (wick / body) x 100 per side; nullopt for a doji (|c - o| below
/// doji_tolerance x open).
std::optional<WickRatios> wick_to_body(const Candle4H& c, double doji_tolerance = 1e-9);

/// Mean of the defined upper+lower ratios over the span; nullopt if every
/// candle is a doji.
std::optional<double> mean_wick_ratio(std::span<const Candle4H> candles, double doji_tolerance = 1e-9);
std::optional<double> mean_upper_wick_ratio(std::span<const Candle4H> candles, double doji_tolerance = 1e-9);

struct VolumeBin {
  double lower_edge = 0.0;
  double volume = 0.0;
};

struct VolumeProfile {
  double bin_width = 0.0;
  std::vector<VolumeBin> bins;  // contiguous, ascending
  [[nodiscard]] double total() const;
};

/// Bins are bin_width x the median close wide, anchored at the lowest low.
/// Each bar's volume is spread over the bins its [low, high] span overlaps
/// in proportion to the overlap (a zero-width bar lands in one bin).
VolumeProfile volume_nodes(std::span<const Candle4H> candles, double bin_width_fraction = 0.005);

struct ExecutedOrder {
  Timestamp time = 0;
  Decimal price;
  double size = 0.0;  // base quantity
};

struct AbsorptionEvent {
  Timestamp time = 0;
  double notional_usd = 0.0;
  bool proxy = false;  // true when derived from bar volume, not an order
  bool operator==(const AbsorptionEvent&) const = default;
};

/// Orders with price x size >= threshold (inclusive).
std::vector<AbsorptionEvent> absorption_footprints(std::span<const ExecutedOrder> orders, double threshold_usd = 500000);

/// Bar proxy: volume x typical price (h + l + c) / 3 >= threshold.
std::vector<AbsorptionEvent> absorption_footprints(std::span<const Candle4H> candles, double threshold_usd = 500000);

/// Longest suffix of bars whose closes lie inside [lower, upper].
std::size_t range_persistence(std::span<const Candle4H> candles, const RangeDefinition& range);

/// True when `closes_required` consecutive closes lie outside the range
/// anywhere in the span.
bool structural_shift(std::span<const Candle4H> candles, const RangeDefinition& range, std::size_t closes_required = 2);

/// Least-squares slope of y against 0..n-1. Zero for n < 2.
double ols_slope(std::span<const double> y);

}  // namespace rg
