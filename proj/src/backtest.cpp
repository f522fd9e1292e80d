#include "rg/backtest.hpp"

#include <algorithm>
#include <future>
#include <thread>

#include "rg/series.hpp"
#include "rg/synth.hpp"

namespace rg {

void ConfusionMatrix::add(const std::string& expected, const std::string& predicted) {
  ++cells[expected][predicted];
  ++total;
  correct += expected == predicted;
}

std::vector<Window> backtest_windows(const Panel& panel, const Config& cfg) {
  std::vector<Window> out;
  auto truth = truth_from_notes(panel);
  if (!truth.empty()) {
    for (const auto& tw : truth)
      if ((!tw.expect.verdicts.empty() || tw.expect.regime) && tw.window.end < panel.candles.size())
        out.push_back(tw.window);
    return out;
  }
  const auto len = static_cast<std::size_t>(std::max(1, as_count(cfg.backtest_window)));
  const auto warmup = static_cast<std::size_t>(std::max(0, as_count(cfg.range_window)));
  for (std::size_t s = warmup; s + len <= panel.candles.size(); s += len) out.push_back({s, s + len - 1});
  return out;
}

std::vector<WindowResult> backtest_panel(const NamedPanel& np, const Config& cfg) {
  std::vector<WindowResult> out;
  const Panel& panel = np.panel;
  if (panel.candles.empty()) return out;
  const auto series = build_bar_series(panel, cfg);
  auto truth = truth_from_notes(panel);
  for (const auto& w : backtest_windows(panel, cfg)) {
    WindowResult r;
    r.panel = np.name;
    r.window = w;
    for (const auto& tw : truth) {
      if (tw.window == w) {
        r.segment = tw.segment;
        r.expected = tw.expect.verdicts;
        r.expected_regime = tw.expect.regime;
        break;
      }
    }
    const auto range = range_before(panel, w, cfg);
    for (auto h : kAllHypotheses) {
      auto v = evaluate(h, panel, series, range, w, cfg);
      r.outcomes[h] = v.outcome;
      if (h == Hypothesis::h4 && v.metrics.contains("taps")) {
        r.h4_taps = static_cast<int>(v.metrics.at("taps"));
        r.h4_tap_hits = static_cast<int>(v.metrics.at("tap_hits"));
      }
    }
    r.regime = classify_regime(panel, series, w.end, cfg).label;
    out.push_back(std::move(r));
  }
  return out;
}

BacktestSummary backtest(std::span<const NamedPanel> panels, const Config& cfg, unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::vector<WindowResult>> per_panel(panels.size());
  for (std::size_t base = 0; base < panels.size(); base += threads) {
    std::vector<std::future<std::vector<WindowResult>>> batch;
    for (std::size_t i = base; i < std::min(panels.size(), base + threads); ++i)
      batch.push_back(std::async(std::launch::async, [&, i] { return backtest_panel(panels[i], cfg); }));
    for (std::size_t k = 0; k < batch.size(); ++k) per_panel[base + k] = batch[k].get();
  }

  BacktestSummary s;
  s.panels = panels.size();
  for (auto h : kAllHypotheses) s.counts[h] = {0, 0, 0, 0};
  for (auto& results : per_panel) {
    for (auto& r : results) {
      for (const auto& [h, o] : r.outcomes) ++s.counts[h][static_cast<std::size_t>(o)];
      ++s.regime_counts[r.regime];
      s.h4_taps += static_cast<std::size_t>(r.h4_taps);
      s.h4_tap_hits += static_cast<std::size_t>(r.h4_tap_hits);
      for (const auto& [h, expected] : r.expected) {
        s.has_truth = true;
        s.confusion[h].add(to_string(expected), to_string(r.outcomes.at(h)));
      }
      if (r.expected_regime) {
        s.has_truth = true;
        if (!s.regime_confusion) s.regime_confusion.emplace();
        s.regime_confusion->add(to_string(*r.expected_regime), to_string(r.regime));
      }
      s.windows.push_back(std::move(r));
    }
  }
  return s;
}

}  // namespace rg
