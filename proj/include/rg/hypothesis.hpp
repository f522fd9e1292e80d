#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rg/config.hpp"
#include "rg/model.hpp"
#include "rg/series.hpp"

namespace rg {

enum class Hypothesis { h1, h2, h3, h4 };
inline constexpr std::array kAllHypotheses{Hypothesis::h1, Hypothesis::h2, Hypothesis::h3, Hypothesis::h4};

/// confirmed / falsified / not_evaluable follow the hypothesis tables.
/// inconclusive covers a met condition where neither every signal nor the
/// falsification criterion is observed.
enum class Outcome { confirmed, falsified, not_evaluable, inconclusive };

const char* to_string(Hypothesis h);
const char* to_string(Outcome o);
std::optional<Hypothesis> parse_hypothesis(std::string_view s);  // "h1".."h4" or "1".."4"
std::optional<Outcome> parse_outcome(std::string_view s);

/// How `measured` relates to `threshold` when the signal is met.
enum class Relation { lt, le, gt, ge, eq };
const char* to_string(Relation r);

struct Signal {
  std::string name;
  std::optional<bool> met;  // nullopt: not measured (does not block)
  std::optional<double> measured;
  double threshold = 0.0;
  Relation relation = Relation::gt;
  bool required = true;
};

/// Inclusive bar-index window.
struct Window {
  std::size_t start = 0;
  std::size_t end = 0;
  bool operator==(const Window&) const = default;
};

struct HypothesisVerdict {
  Hypothesis hypothesis = Hypothesis::h1;
  Window window;
  bool condition_met = false;
  std::vector<Signal> signals;
  Outcome outcome = Outcome::not_evaluable;
  std::vector<std::string> notes;
  std::map<std::string, double> metrics;  // supporting numbers, e.g. tap counts
  std::optional<RangeDefinition> range;
};

/// Range for a window: derived from the range-window bars that precede
/// window.start (nullopt if there are not enough bars or no range forms).
std::optional<RangeDefinition> range_before(const Panel& panel, Window window, const Config& cfg = {});

/// The evaluators take the panel, its aligned series, the range in force
/// and the evaluation window. A missing range yields not_evaluable.
HypothesisVerdict evaluate_h1(const Panel& panel, const BarSeries& s, const std::optional<RangeDefinition>& range,
                              Window w, const Config& cfg = {});
HypothesisVerdict evaluate_h2(const Panel& panel, const BarSeries& s, const std::optional<RangeDefinition>& range,
                              Window w, const Config& cfg = {});
HypothesisVerdict evaluate_h3(const Panel& panel, const BarSeries& s, const std::optional<RangeDefinition>& range,
                              Window w, const Config& cfg = {});
HypothesisVerdict evaluate_h4(const Panel& panel, const BarSeries& s, const std::optional<RangeDefinition>& range,
                              Window w, const Config& cfg = {});

HypothesisVerdict evaluate(Hypothesis h, const Panel& panel, const BarSeries& s,
                           const std::optional<RangeDefinition>& range, Window w, const Config& cfg = {});

/// Convenience: builds the series and the range itself.
HypothesisVerdict evaluate(Hypothesis h, const Panel& panel, Window w, const Config& cfg = {});

/// The trailing backtest-window bars of the panel (the whole panel when it
/// is shorter).
Window default_window(const Panel& panel, const Config& cfg = {});

/// True when a signal's measured value satisfies its relation; used to
/// re-check confirmed verdicts from the record alone.
bool relation_holds(double measured, Relation r, double threshold);

}  // namespace rg
