#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rg/decimal.hpp"
#include "rg/time.hpp"

namespace rg {

// Domain records are plain aggregates. They are never mutated after a Panel
// is assembled, so a Panel can be shared across worker threads freely.

/// One UTC-aligned 4-hour OHLCV bar.
struct Candle4H {
  Timestamp open_time = 0;
  Decimal open;
  Decimal high;
  Decimal low;
  Decimal close;
  double volume = 0.0;  // base-asset quantity
  int exchange_count = 1;

  [[nodiscard]] Timestamp close_time() const { return open_time + kBarSeconds; }
  bool operator==(const Candle4H&) const = default;
};

/// One funding settlement, normalized to an 8-hour basis at ingest.
struct FundingRecord {
  Timestamp settle_time = 0;
  Decimal rate_8h;  // fraction per 8h, 0.0005 = 0.05%
  int source_interval_hours = 8;
  std::string exchange_id;
  Decimal mark_price;
  Decimal index_price;
  bool operator==(const FundingRecord&) const = default;
};

struct OpenInterestRecord {
  Timestamp time = 0;
  double oi_usd = 0.0;
  std::optional<double> long_oi_usd;
  std::optional<double> short_oi_usd;
  std::map<std::string, double> leverage_histogram;  // bucket label ("10x") -> USD notional
  std::vector<double> holder_shares;
  bool operator==(const OpenInterestRecord&) const = default;
};

struct BookLevel {
  Decimal price;
  double size = 0.0;  // base-asset quantity
  bool operator==(const BookLevel&) const = default;
};

/// Level-2 snapshot. Bids descend from the best bid, asks ascend from the best ask.
struct BookSnapshot {
  Timestamp time = 0;
  std::vector<BookLevel> bids;
  std::vector<BookLevel> asks;

  [[nodiscard]] Decimal best_bid() const { return bids.empty() ? Decimal{} : bids.front().price; }
  [[nodiscard]] Decimal best_ask() const { return asks.empty() ? Decimal{} : asks.front().price; }
  [[nodiscard]] double mid() const { return (best_bid().to_double() + best_ask().to_double()) / 2.0; }
  bool operator==(const BookSnapshot&) const = default;
};

enum class LiquidationSide { long_liquidated, short_liquidated };

struct LiquidationEvent {
  Timestamp time = 0;
  Decimal price;
  double size_usd = 0.0;
  LiquidationSide side = LiquidationSide::long_liquidated;
  bool operator==(const LiquidationEvent&) const = default;
};

struct TimedValue {
  Timestamp time = 0;
  double value = 0.0;
  bool operator==(const TimedValue&) const = default;
};

/// Free-form panel attachments. Text notes hold things the engine carries
/// but never computes (gamma exposure, collateral elasticity remarks);
/// series hold auxiliary numeric inputs such as borrowing rates, hourly
/// closes ("close_1h") or daily net trade flow ("trade_flow_usd").
struct Annotations {
  std::map<std::string, std::string> notes;
  std::map<std::string, std::vector<TimedValue>> series;
  bool operator==(const Annotations&) const = default;
};

/// Time-aligned join of every series for one instrument.
struct Panel {
  std::string instrument;
  std::vector<Candle4H> candles;
  std::vector<FundingRecord> funding;
  std::vector<OpenInterestRecord> oi;
  std::vector<BookSnapshot> books;
  std::vector<LiquidationEvent> liquidations;
  Annotations annotations;

  [[nodiscard]] bool empty() const { return candles.empty(); }
  [[nodiscard]] Timestamp start_time() const { return candles.empty() ? 0 : candles.front().open_time; }
  [[nodiscard]] Timestamp end_time() const { return candles.empty() ? 0 : candles.back().close_time(); }

  /// Index of the bar whose interval (open, close] contains t, clamped to
  /// the panel. Records stamped at a bar's close describe that bar.
  [[nodiscard]] std::size_t bar_index_at(Timestamp t) const;

  bool operator==(const Panel&) const = default;
};

/// A price corridor. Construct through make_range so invariants hold.
struct RangeDefinition {
  Decimal lower;
  Decimal upper;
  Timestamp established_at = 0;
  int touch_count_lower = 0;
  int touch_count_upper = 0;
  Decimal midpoint;

  [[nodiscard]] double width_fraction() const { return upper.to_double() / lower.to_double() - 1.0; }
  bool operator==(const RangeDefinition&) const = default;
};

/// Throws rg::Error if lower >= upper or the corridor is narrower than min_width.
RangeDefinition make_range(Decimal lower, Decimal upper, Timestamp established_at, int touches_lower = 0,
                           int touches_upper = 0, double min_width = 0.001);

struct Violation {
  std::string field;
  std::string rule;
  bool operator==(const Violation&) const = default;
};

/// Hard bound on |rate_8h|: three times the 1.25%-per-period sanity cap.
inline constexpr double kFundingHardBound = 0.0375;
inline constexpr std::size_t kMinBookLevels = 20;

std::vector<Violation> validate_record(const Candle4H& c);
std::vector<Violation> validate_record(const FundingRecord& f);
std::vector<Violation> validate_record(const OpenInterestRecord& r);
std::vector<Violation> validate_record(const BookSnapshot& b, std::size_t min_levels = kMinBookLevels);
std::vector<Violation> validate_record(const LiquidationEvent& e);
std::vector<Violation> validate_record(const RangeDefinition& r);

/// Every record plus the panel-level rules (strict 4h spacing, auxiliary
/// series inside the candle span). Field names are prefixed with the
/// series and index, e.g. "candles[3].high".
std::vector<Violation> validate_panel(const Panel& p);

}  // namespace rg
