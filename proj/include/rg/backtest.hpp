#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rg/config.hpp"
#include "rg/hypothesis.hpp"
#include "rg/model.hpp"
#include "rg/regime.hpp"

namespace rg {

struct NamedPanel {
  std::string name;
  Panel panel;
};

/// One evaluated window: every hypothesis plus the regime label at the
/// window's last bar, and the ground truth when the panel carries it.
struct WindowResult {
  std::string panel;
  std::optional<std::size_t> segment;  // script segment, when from ground truth
  Window window;
  std::map<Hypothesis, Outcome> outcomes;
  RegimeKind regime = RegimeKind::unclassified;
  std::map<Hypothesis, Outcome> expected;
  std::optional<RegimeKind> expected_regime;
  int h4_taps = 0;
  int h4_tap_hits = 0;
};

/// Rows are expected labels, columns predicted labels.
struct ConfusionMatrix {
  std::map<std::string, std::map<std::string, std::size_t>> cells;
  std::size_t total = 0;
  std::size_t correct = 0;
  [[nodiscard]] double diagonal_rate() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
  void add(const std::string& expected, const std::string& predicted);
};

using OutcomeCounts = std::array<std::size_t, 4>;  // indexed by Outcome

struct BacktestSummary {
  std::size_t panels = 0;
  std::vector<WindowResult> windows;
  std::map<Hypothesis, OutcomeCounts> counts;
  std::map<RegimeKind, std::size_t> regime_counts;
  std::size_t h4_taps = 0;
  std::size_t h4_tap_hits = 0;
  bool has_truth = false;
  std::map<Hypothesis, ConfusionMatrix> confusion;  // only hypotheses with ground truth
  std::optional<ConfusionMatrix> regime_confusion;

  [[nodiscard]] std::optional<double> h4_hit_rate() const {
    if (h4_taps == 0) return std::nullopt;
    return static_cast<double>(h4_tap_hits) / static_cast<double>(h4_taps);
  }
};

/// Windows for one panel. A panel carrying ground truth is evaluated on
/// each segment that has an expectation; otherwise consecutive
/// backtest.window_bars windows are used, starting once a full range
/// window of history exists.
std::vector<Window> backtest_windows(const Panel& panel, const Config& cfg = {});

std::vector<WindowResult> backtest_panel(const NamedPanel& panel, const Config& cfg = {});

/// Evaluates panels in parallel (one task per panel, at most `threads`
/// at a time; 0 = hardware concurrency) and aggregates in input order, so
/// the summary does not depend on scheduling. Counts are the plain sums of
/// the per-window verdicts.
BacktestSummary backtest(std::span<const NamedPanel> panels, const Config& cfg = {}, unsigned threads = 0);

}  // namespace rg
