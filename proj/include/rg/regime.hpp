#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rg/config.hpp"
#include "rg/cost.hpp"
#include "rg/hypothesis.hpp"
#include "rg/model.hpp"
#include "rg/series.hpp"

namespace rg {

enum class RegimeKind { accumulation, distribution, trending, unclassified };
const char* to_string(RegimeKind r);
std::optional<RegimeKind> parse_regime(std::string_view s);

struct Criterion {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool met = false;
};

struct RegimeLabel {
  RegimeKind label = RegimeKind::unclassified;
  Window window;
  std::vector<Criterion> evidence;  // grouped by regime: "accumulation.*", ...
};

/// Classifies the `regime.lookback_bars` bars ending at `end_bar`.
/// Precedence when several fire: trending > distribution > accumulation.
RegimeLabel classify_regime(const Panel& panel, const BarSeries& s, std::size_t end_bar, const Config& cfg = {});
RegimeLabel classify_regime(const Panel& panel, const Config& cfg = {});

enum class MetricState { aligned, divergent, neutral };
enum class Conviction { low, medium, high };
enum class ProbabilityBand { baseline, elevated };
const char* to_string(MetricState m);
const char* to_string(Conviction c);
const char* to_string(ProbabilityBand b);

struct TriggerEntry {
  std::string name;
  MetricState state = MetricState::neutral;
  std::string detail;
};

struct TriggerMatrix {
  std::vector<TriggerEntry> entries;
  Conviction conviction = Conviction::low;
  ProbabilityBand band = ProbabilityBand::baseline;
};

/// The core entries are "funding", "shelf_migration" and "oi_rotation".
/// Any core entry divergent -> low; all three aligned -> high with the
/// elevated band; otherwise medium. Throws rg::Error with fewer than
/// min_trigger_metrics entries or a missing core entry.
TriggerMatrix build_trigger_matrix(std::vector<TriggerEntry> entries, const Config& cfg = {});

/// Derives trigger entries from the panel state at `bar`.
std::vector<TriggerEntry> trigger_entries(const Panel& panel, const BarSeries& s,
                                          const std::optional<RangeDefinition>& range, std::size_t bar,
                                          const Config& cfg = {});

enum class TradeScenario {
  fade_extremes,
  breakout_validation,
  range_midpoint,
  liquidation_cascade,
  accumulation_phase,
  distribution_phase,
  no_signal,
};
const char* to_string(TradeScenario t);

struct MarketContext {
  RegimeKind regime = RegimeKind::unclassified;
  std::optional<RangeDefinition> range;
  Decimal last_close;
  FundingState funding;
  bool structure_shift = false;
  bool shelf_migrated = false;
  bool funding_spike = false;
  bool absorption_both_boundaries = false;
  double average_bar_range = 0.0;  // mean (high - low) / close over recent bars
  std::vector<HypothesisVerdict> verdicts;
};

struct Advisory {
  TradeScenario scenario = TradeScenario::no_signal;
  std::string action;
  std::string risk_management;
  double stop_min = 0.0;  // stop distance band as a fraction of price
  double stop_max = 0.0;
  std::string stop_reference;
  double volatility_stop_min = 0.0;  // 1.5x and 2x the average 4H range
  double volatility_stop_max = 0.0;
  std::string sizing_note;
  double holding_days = 0.0;
  Decimal funding_drag;  // |rate_8h| x 3 x holding_days
  std::string supporting_verdicts;
  bool advisory_only = true;
};

/// |rate_8h| summed over 3 x holding_days periods.
Decimal funding_drag(Decimal rate_8h, double holding_days);

Advisory recommend_action(const MarketContext& ctx, const Config& cfg = {});

/// Builds the context for the last bar of a panel.
MarketContext market_context(const Panel& panel, const BarSeries& s, const Config& cfg = {});

struct PlatformAdvisory {
  double current_volatility = 0.0;
  double margin_percentile = 0.0;  // rank within the margin window
  double max_leverage = 0.0;
  double liquidation_threshold = 0.0;  // 80th percentile of the long window
  bool aggressive = false;
  std::string liquidation_mode;  // "aggressive" | "gradual"
  std::size_t margin_samples = 0;
  std::size_t liquidation_samples = 0;
  bool advisory_only = true;
};

/// Percentile rank of x within values: count(v < x) / (n - 1); 0 for n < 2.
double percentile_rank(std::span<const double> values, double x);

/// Linear-interpolation quantile (R type 7) of values, p in [0, 1].
double quantile_type7(std::vector<double> values, double p);

/// The last element of `volatility_history` is the current reading. The
/// margin window and liquidation window are the trailing margin_window_days
/// and liquidation_window_days of bars (current included).
PlatformAdvisory advise_platform_parameters(std::span<const double> volatility_history, const Config& cfg = {});

struct NarrativeDimension {
  std::string name;  // collateral, funding, liquidity, structure
  std::optional<double> before;
  std::optional<double> after;
  bool changed = false;
  std::string detail;
};

struct NarrativeAssessment {
  Timestamp event_time = 0;
  std::size_t bars = 0;
  std::vector<NarrativeDimension> dimensions;
  bool structurally_relevant = false;
  std::string verdict;
};

/// Compares structural metrics over `bars` bars before and after the
/// event. The event is relevant only if some dimension changed.
NarrativeAssessment narrative_filter(const Panel& panel, const BarSeries& s, Timestamp event_time, std::size_t bars = 6,
                                     const Config& cfg = {});

}  // namespace rg
