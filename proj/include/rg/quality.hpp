#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rg/config.hpp"
#include "rg/model.hpp"

namespace rg {

enum class Severity {
  reject,        // data unusable until an analyst intervenes
  flag,          // suspicious or excluded, pipeline continues
  interpolated,  // value synthesized by gap filling
  info,          // check skipped or not evaluated
};

std::string_view to_string(Severity s);

struct QualityFlag {
  std::string check;     // e.g. "missing_data"
  std::string location;  // "<series>@<UTC time>" or "<series>@<UTC time>/<exchange>"
  Severity severity = Severity::flag;
  std::string detail;
  bool operator==(const QualityFlag&) const = default;
  auto operator<=>(const QualityFlag& o) const {
    if (auto c = check <=> o.check; c != 0) return c;
    return location <=> o.location;
  }
};

struct QualityReport {
  std::size_t checks_run = 0;
  std::vector<QualityFlag> flags;

  /// True iff there are no reject-severity flags.
  [[nodiscard]] bool pass() const;
  [[nodiscard]] std::size_t count(Severity s) const;
  void add(std::vector<QualityFlag> more);
  /// Orders flags by check name then location (stable for equal keys).
  void finalize();
};

/// Flags records whose time is more than `tolerance_s` from the nearest
/// point of the grid origin + k * step. Detail records the resample action.
std::vector<QualityFlag> check_timestamps(std::span<const Timestamp> times, Timestamp grid_origin, Timestamp grid_step,
                                          std::string_view series, double tolerance_s = 30.0);

/// Closes for one bar across exchanges.
struct CrossExchangeBar {
  Timestamp time = 0;
  std::vector<std::pair<std::string, double>> closes;
};

/// Median / scaled-MAD outlier test per bar. Bars with fewer than three
/// sources are skipped with an info flag. When MAD is zero any value more
/// than mad_zero_tolerance (relative) from the median is flagged.
std::vector<QualityFlag> check_price_consistency(std::span<const CrossExchangeBar> bars, const Config& cfg = {});

struct DailyVolumes {
  Timestamp day = 0;
  std::vector<std::pair<std::string, double>> volumes;
};

/// Flags exchanges whose daily volume deviates more than volume_deviation
/// from the cross-exchange mean.
std::vector<QualityFlag> check_volume(std::span<const DailyVolumes> days, const Config& cfg = {});

/// |rate_8h| at or above the hard bound -> reject.
std::vector<QualityFlag> check_funding_bounds(const Panel& panel, const Config& cfg = {});

/// Daily OI change versus (net trade flow - liquidations). Needs the
/// "trade_flow_usd" annotation series; otherwise one info flag.
std::vector<QualityFlag> check_oi_sanity(const Panel& panel, const Config& cfg = {});

/// Snapshots with relative spread above max_spread, or that break the book
/// invariants, are flagged for exclusion.
std::vector<QualityFlag> check_book_integrity(const Panel& panel, const Config& cfg = {});

/// Heuristic: volume above wash_volume_multiple x the prior rolling median
/// with an almost flat body. Flagged, never removed.
std::vector<QualityFlag> check_wash_trading(std::span<const Candle4H> candles, const Config& cfg = {});

/// Closes deviating more than price_spike from the mean of the prior bars.
std::vector<QualityFlag> check_price_spikes(std::span<const Candle4H> candles, const Config& cfg = {});

struct GapFillResult {
  std::vector<Candle4H> candles;
  std::vector<QualityFlag> flags;
};

/// Gaps of at most max_fill_gap bars are filled by linear interpolation of
/// the close (o = h = l = c, zero volume); longer gaps stay open and are
/// flagged reject. Existing candles pass through unchanged.
GapFillResult fill_gaps(std::span<const Candle4H> candles, const Config& cfg = {});

struct QualityResult {
  Panel panel;  // cleaned: resampled, excluded snapshots removed, gaps filled
  QualityReport report;
};

/// Full validation pipeline. Repairs run first (resampling, exclusions,
/// gap filling) and detection checks run on the repaired data, so running
/// the pipeline on its own output produces no new flags.
QualityResult run_quality_pipeline(const Panel& panel, const Config& cfg = {});

}  // namespace rg
