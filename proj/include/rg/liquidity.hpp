#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rg/config.hpp"
#include "rg/model.hpp"

namespace rg {

enum class BookSide { bid, ask };

struct CumulativeLevel {
  Decimal price;
  double cumulative = 0.0;  // base size from the best price outward
};

struct DepthProfile {
  BookSide side = BookSide::bid;
  std::vector<CumulativeLevel> cumulative;
  Decimal p25;  // first level where cumulative share >= 0.25
  Decimal p75;  // first level where cumulative share >= 0.75
};

struct DepthPercentiles {
  DepthProfile bid;
  DepthProfile ask;
};

DepthProfile depth_profile(std::span<const BookLevel> levels, BookSide side, double p_low = 0.25, double p_high = 0.75);
DepthPercentiles depth_percentiles(const BookSnapshot& snap, double p_low = 0.25, double p_high = 0.75);

struct ShelfMigration {
  double ask_share_above_upper = 0.0;  // upside breakout side
  double bid_share_below_lower = 0.0;  // downside breakout side
  double share = 0.0;                  // the breakout side's share
  bool signal = false;                 // share > threshold (strict)
};

/// Share of one side's size resting beyond the prior boundary: asks above
/// upper for an upside break, bids below lower for a downside break.
/// `upside` chooses which side drives the signal; both are reported.
ShelfMigration shelf_migration(const BookSnapshot& snap, const RangeDefinition& prior, bool upside,
                               double threshold = 0.20);

struct BoundaryDepth {
  double lower_usd = 0.0;  // bid + ask notional within zone of lower
  double upper_usd = 0.0;
  [[nodiscard]] double total() const { return lower_usd + upper_usd; }
};

/// Notional (price x size) resting within `zone` (inclusive) of either
/// boundary, both sides of the book combined. Zone edges are compared in
/// fixed point so the inclusive boundary is exact.
BoundaryDepth depth_at_extremes(const BookSnapshot& snap, const RangeDefinition& range, double zone = 0.005);

struct SlippageResult {
  double slippage = 0.0;  // (VWAP - mid) / mid for buys, (mid - VWAP) / mid for sells
  double filled_usd = 0.0;
  bool insufficient_depth = false;
};

/// Walks the opposite side from the best price until order_usd notional is
/// filled. A buy walks the asks.
SlippageResult fill_slippage(const BookSnapshot& snap, double order_usd = 1e6, bool buy = true);

struct Imbalance {
  double value = 0.0;  // bid depth / ask depth - 1
  bool extreme = false;
};

/// Depth over the top `levels` levels per side. The extreme flag uses
/// max(b/a, a/b) - 1 > threshold so it is symmetric under side swap.
Imbalance book_imbalance(const BookSnapshot& snap, std::size_t levels = 20, double threshold = 0.3);

struct ImpactRegression {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// OLS of |dp|/p on volume with an intercept. nullopt when the volume has
/// zero variance or fewer than two points.
std::optional<ImpactRegression> market_impact_coefficient(std::span<const double> abs_returns,
                                                           std::span<const double> volumes);

/// Per bar: regression over the trailing `window` bars of |close-to-close
/// return| on traded notional in millions of USD (volume x close / 1e6),
/// so the slope is the price response per $1M. nullopt until the window
/// is full.
std::vector<std::optional<ImpactRegression>> rolling_market_impact(std::span<const Candle4H> candles,
                                                                   std::size_t window = 6);

struct SpreadReading {
  double value = 0.0;
  bool uncertainty = false;
};

/// (ask - bid) / mid; throws rg::Error on a crossed or empty book.
SpreadReading spread(const BookSnapshot& snap, double threshold = 0.001);

}  // namespace rg
