#include "rg/regime.hpp"

#include <algorithm>
#include <cmath>

#include "rg/error.hpp"
#include "rg/liquidity.hpp"
#include "rg/positioning.hpp"
#include "rg/structural.hpp"

namespace rg {

const char* to_string(RegimeKind r) {
  switch (r) {
    case RegimeKind::accumulation: return "accumulation";
    case RegimeKind::distribution: return "distribution";
    case RegimeKind::trending: return "trending";
    case RegimeKind::unclassified: return "unclassified";
  }
  return "unclassified";
}

std::optional<RegimeKind> parse_regime(std::string_view s) {
  for (auto r : {RegimeKind::accumulation, RegimeKind::distribution, RegimeKind::trending, RegimeKind::unclassified})
    if (s == to_string(r)) return r;
  return std::nullopt;
}

const char* to_string(MetricState m) {
  switch (m) {
    case MetricState::aligned: return "aligned";
    case MetricState::divergent: return "divergent";
    case MetricState::neutral: return "neutral";
  }
  return "neutral";
}

const char* to_string(Conviction c) {
  switch (c) {
    case Conviction::low: return "low";
    case Conviction::medium: return "medium";
    case Conviction::high: return "high";
  }
  return "low";
}

const char* to_string(ProbabilityBand b) { return b == ProbabilityBand::elevated ? "elevated" : "baseline"; }

const char* to_string(TradeScenario t) {
  switch (t) {
    case TradeScenario::fade_extremes: return "fade_extremes";
    case TradeScenario::breakout_validation: return "breakout_validation";
    case TradeScenario::range_midpoint: return "range_midpoint";
    case TradeScenario::liquidation_cascade: return "liquidation_cascade";
    case TradeScenario::accumulation_phase: return "accumulation_phase";
    case TradeScenario::distribution_phase: return "distribution_phase";
    case TradeScenario::no_signal: return "no_signal";
  }
  return "no_signal";
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

double relative_slope(std::span<const double> y) {
  if (y.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : y) mean += std::fabs(v);
  mean /= static_cast<double>(y.size());
  if (!(mean > 0.0)) return 0.0;
  double s = ols_slope(y) / mean;
  return std::fabs(s) < 1e-9 ? 0.0 : s;
}

Criterion crit(std::string name, double value, double threshold, bool met) {
  return {std::move(name), value, threshold, met};
}

}  // namespace

RegimeLabel classify_regime(const Panel& panel, const BarSeries& s, std::size_t end_bar, const Config& cfg) {
  RegimeLabel out;
  const auto& C = panel.candles;
  auto n = static_cast<std::size_t>(as_count(cfg.regime_lookback));
  if (C.empty() || n < 6 || end_bar >= C.size() || end_bar + 1 < n) {
    out.window = {0, C.empty() ? 0 : std::min(end_bar, C.size() - 1)};
    return out;
  }
  const std::size_t a = end_bar + 1 - n;
  out.window = {a, end_bar};
  auto win = std::span<const Candle4H>(C).subspan(a, n);

  // --- accumulation: compression, contracting width, volume at the lows
  std::vector<double> vol(s.volatility.begin() + static_cast<std::ptrdiff_t>(a),
                          s.volatility.begin() + static_cast<std::ptrdiff_t>(end_bar) + 1);
  std::vector<double> width, volume;
  for (const auto& c : win) {
    width.push_back((c.high - c.low).to_double() / c.close.to_double());
    volume.push_back(c.volume);
  }
  double vol_slope = relative_slope(vol);
  double width_slope = relative_slope(width);
  Decimal lo = win.front().low, hi = win.front().high;
  for (const auto& c : win) {
    lo = std::min(lo, c.low);
    hi = std::max(hi, c.high);
  }
  // Absorption at the lows: heavy bars that fail to displace price. A bar
  // counts when it is a bar-proxy footprint (absorption_footprints) whose
  // notional also stands out against the median over the window and the
  // lookback before it, whose high-low range is no wider than the window's
  // median bar, and which closes in the lower third of the window's span.
  const Decimal third = lo + (hi - lo).mul_ratio(1, 3);
  std::vector<double> notional;
  for (std::size_t t = a >= n ? a - n : 0; t <= end_bar; ++t)
    notional.push_back(C[t].volume * (C[t].high.to_double() + C[t].low.to_double() + C[t].close.to_double()) / 3.0);
  const double floor_usd = std::max(cfg.absorption_usd, cfg.absorption_multiple * median(notional));
  const double median_width = median(width);
  double low_events = 0.0;
  for (const auto& e : absorption_footprints(win, floor_usd)) {
    const auto idx = static_cast<std::size_t>((e.time - win.front().open_time) / kBarSeconds);
    if (idx < n && win[idx].close <= third && width[idx] <= median_width) low_events += 1.0;
  }
  out.evidence.push_back(crit("accumulation.volatility_slope", vol_slope, 0.0, vol_slope < 0.0));
  out.evidence.push_back(crit("accumulation.width_slope", width_slope, 0.0, width_slope < 0.0));
  out.evidence.push_back(crit("accumulation.lower_third_absorption_events", low_events, 1.0, low_events >= 1.0));
  bool accumulation = vol_slope < 0.0 && width_slope < 0.0 && low_events >= 1.0;

  // --- distribution: higher highs on falling volume and OI, rising upper wicks
  const std::size_t tail = 5;
  Decimal early_high = win.front().high, late_high = win[n - tail].high;
  for (std::size_t i = 0; i < n - tail; ++i) early_high = std::max(early_high, win[i].high);
  for (std::size_t i = n - tail; i < n; ++i) late_high = std::max(late_high, win[i].high);
  double new_high = late_high.to_double() / early_high.to_double() - 1.0;
  bool higher_highs = late_high > early_high;
  double volume_slope = relative_slope(volume);
  auto first_half = win.first(n / 2), second_half = win.subspan(n / 2);
  auto wick_a = mean_upper_wick_ratio(first_half, cfg.doji_tolerance);
  auto wick_b = mean_upper_wick_ratio(second_half, cfg.doji_tolerance);
  double wick_change = wick_a && wick_b ? *wick_b - *wick_a : 0.0;
  bool wick_rising = wick_a && wick_b && *wick_b > *wick_a;
  std::vector<double> oi;
  for (std::size_t t = a; t <= end_bar; ++t)
    if (s.oi[t]) oi.push_back(*s.oi[t]);
  double oi_slope = oi.size() >= 2 ? relative_slope(oi) : 0.0;
  out.evidence.push_back(crit("distribution.new_high", new_high, 0.0, higher_highs));
  out.evidence.push_back(crit("distribution.volume_slope", volume_slope, 0.0, volume_slope < 0.0));
  out.evidence.push_back(crit("distribution.upper_wick_change", wick_change, 0.0, wick_rising));
  out.evidence.push_back(crit("distribution.oi_slope", oi_slope, 0.0, oi.size() >= 2 && oi_slope < 0.0));
  bool distribution = higher_highs && volume_slope < 0.0 && wick_rising && oi.size() >= 2 && oi_slope < 0.0;

  // --- trending: directional closes with rotating open interest
  const Candle4H& prev = a > 0 ? C[a - 1] : C[a];
  int net = (win.back().close > prev.close) - (win.back().close < prev.close);
  int directional = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Decimal& before = i == 0 ? prev.close : win[i - 1].close;
    int step = (win[i].close > before) - (win[i].close < before);
    directional += net != 0 && step == net;
  }
  double share = static_cast<double>(directional) / static_cast<double>(n);
  std::vector<double> oi_w;
  std::vector<std::optional<double>> ls_w;
  for (std::size_t t = a; t <= end_bar; ++t) {
    if (!s.oi[t]) continue;
    oi_w.push_back(*s.oi[t]);
    ls_w.push_back(s.long_share[t]);
  }
  bool rotation = false;
  double mix = 0.0;
  if (oi_w.size() >= 2) {
    auto cls = classify_oi_event(oi_w, ls_w, cfg.h2_oi_collapse, cfg.h2_oi_mix_shift);
    rotation = cls.event == OiEvent::rotation;
    mix = cls.long_share_shift.value_or(0.0);
  }
  out.evidence.push_back(crit("trending.directional_share", share, cfg.trending_share, share >= cfg.trending_share));
  out.evidence.push_back(crit("trending.oi_mix_shift", std::fabs(mix), cfg.h2_oi_mix_shift, rotation));
  bool trending = share >= cfg.trending_share && rotation;

  if (trending) out.label = RegimeKind::trending;
  else if (distribution) out.label = RegimeKind::distribution;
  else if (accumulation) out.label = RegimeKind::accumulation;
  return out;
}

RegimeLabel classify_regime(const Panel& panel, const Config& cfg) {
  auto s = build_bar_series(panel, cfg);
  return classify_regime(panel, s, panel.candles.empty() ? 0 : panel.candles.size() - 1, cfg);
}

TriggerMatrix build_trigger_matrix(std::vector<TriggerEntry> entries, const Config& cfg) {
  if (entries.size() < static_cast<std::size_t>(as_count(cfg.min_trigger_metrics)))
    throw Error(ErrorKind::invalid_input, "trigger matrix needs at least " + std::to_string(as_count(cfg.min_trigger_metrics)) +
                                              " metrics, got " + std::to_string(entries.size()));
  TriggerMatrix m;
  int aligned = 0, divergent = 0;
  for (const char* core : {"funding", "shelf_migration", "oi_rotation"}) {
    auto it = std::find_if(entries.begin(), entries.end(), [&](const TriggerEntry& e) { return e.name == core; });
    if (it == entries.end()) throw Error(ErrorKind::invalid_input, std::string("trigger matrix missing core metric ") + core);
    aligned += it->state == MetricState::aligned;
    divergent += it->state == MetricState::divergent;
  }
  if (divergent > 0) m.conviction = Conviction::low;
  else if (aligned == 3) m.conviction = Conviction::high;
  else m.conviction = Conviction::medium;
  m.band = m.conviction == Conviction::high ? ProbabilityBand::elevated : ProbabilityBand::baseline;
  m.entries = std::move(entries);
  return m;
}

std::vector<TriggerEntry> trigger_entries(const Panel& panel, const BarSeries& s,
                                          const std::optional<RangeDefinition>& range, std::size_t bar,
                                          const Config& cfg) {
  std::vector<TriggerEntry> out;
  if (panel.candles.empty()) return out;
  bar = std::min(bar, panel.candles.size() - 1);

  {
    TriggerEntry e{"funding", MetricState::neutral, ""};
    auto cls = classify_magnitude(s.funding[bar], cfg);
    if (cls == MagnitudeClass::neutral) e.state = MetricState::aligned;
    else if (cls == MagnitudeClass::elevated) e.state = MetricState::divergent;
    e.detail = "rate_8h " + s.funding[bar].to_string() + " (" + to_string(cls) + ")";
    out.push_back(e);
  }
  {
    TriggerEntry e{"shelf_migration", MetricState::neutral, "not measured"};
    std::optional<std::size_t> book;
    for (std::size_t t = 0; t <= bar; ++t)
      if (s.book[t]) book = s.book[t];
    if (book && range) {
      const auto& snap = panel.books[*book];
      auto up = shelf_migration(snap, *range, true, cfg.h2_shelf_share);
      double beyond = std::max(up.ask_share_above_upper, up.bid_share_below_lower);
      if (beyond > cfg.h2_shelf_share) e.state = MetricState::aligned;
      else if (beyond < cfg.shelf_clustered_share) e.state = MetricState::divergent;
      e.detail = "depth share beyond boundaries " + std::to_string(beyond);
    }
    out.push_back(e);
  }
  {
    TriggerEntry e{"oi_rotation", MetricState::neutral, "not measured"};
    auto w = static_cast<std::size_t>(as_count(cfg.h2_oi_window_bars));
    std::vector<double> oi;
    std::vector<std::optional<double>> ls;
    for (std::size_t t = bar >= w ? bar - w : 0; t <= bar; ++t) {
      if (!s.oi[t]) continue;
      oi.push_back(*s.oi[t]);
      ls.push_back(s.long_share[t]);
    }
    if (oi.size() >= 2) {
      auto cls = classify_oi_event(oi, ls, cfg.h2_oi_collapse, cfg.h2_oi_mix_shift);
      if (cls.event == OiEvent::rotation) e.state = MetricState::aligned;
      else if (cls.event == OiEvent::collapse) e.state = MetricState::divergent;
      e.detail = std::string(to_string(cls.event)) + (cls.partial ? " (partial)" : "");
    }
    out.push_back(e);
  }
  {
    TriggerEntry e{"basis", MetricState::neutral, "not measured"};
    if (s.basis[bar]) {
      bool dislocated = std::fabs(*s.basis[bar]) > cfg.basis_dislocation;
      e.state = dislocated ? MetricState::divergent : MetricState::neutral;
      e.detail = "basis " + std::to_string(*s.basis[bar]);
    }
    out.push_back(e);
  }
  {
    TriggerEntry e{"realized_volatility", MetricState::neutral, ""};
    auto n = static_cast<std::size_t>(as_count(cfg.regime_lookback));
    std::size_t from = bar + 1 > n ? bar + 1 - n : 0;
    std::vector<double> vol(s.volatility.begin() + static_cast<std::ptrdiff_t>(from),
                            s.volatility.begin() + static_cast<std::ptrdiff_t>(bar) + 1);
    double slope = relative_slope(vol);
    e.state = slope > 0.0 ? MetricState::aligned : MetricState::neutral;
    e.detail = "relative slope " + std::to_string(slope);
    out.push_back(e);
  }
  {
    TriggerEntry e{"long_short_ratio", MetricState::neutral, "not measured"};
    if (s.long_share[bar] && *s.long_share[bar] < 1.0) {
      double l = *s.long_share[bar];
      auto r = long_short_ratio(l, 1.0 - l, cfg.ls_ratio_high, cfg.ls_ratio_low);
      e.state = r.extreme ? MetricState::divergent : MetricState::neutral;
      e.detail = "ratio " + std::to_string(r.ratio);
    }
    out.push_back(e);
  }
  return out;
}

Decimal funding_drag(Decimal rate_8h, double holding_days) {
  // Whole periods only: 3 settlements a day.
  auto periods = static_cast<std::int64_t>(std::llround(holding_days * 3.0));
  return rate_8h.abs() * periods;
}

Advisory recommend_action(const MarketContext& ctx, const Config& cfg) {
  Advisory a;
  a.stop_min = cfg.stop_min;
  a.stop_max = cfg.stop_max;
  a.volatility_stop_min = 1.5 * ctx.average_bar_range;
  a.volatility_stop_max = 2.0 * ctx.average_bar_range;
  a.holding_days = cfg.holding_days;
  a.funding_drag = funding_drag(ctx.funding.rate_8h, cfg.holding_days);
  for (const auto& v : ctx.verdicts) {
    if (!a.supporting_verdicts.empty()) a.supporting_verdicts += ", ";
    a.supporting_verdicts += std::string(to_string(v.hypothesis)) + "=" + to_string(v.outcome);
  }

  const bool neutral_funding = ctx.funding.magnitude_class == MagnitudeClass::neutral;
  const bool elevated = ctx.funding.magnitude_class == MagnitudeClass::elevated;
  const int rate_sign = ctx.funding.rate_8h.sign();
  bool near_upper = false, near_lower = false;
  if (ctx.range) {
    const Decimal tol = Decimal::from_double(cfg.h4_cluster_distance);
    near_upper = (ctx.range->upper - ctx.last_close).abs() <= ctx.range->upper * tol;
    near_lower = (ctx.last_close - ctx.range->lower).abs() <= ctx.range->lower * tol;
  }

  if (ctx.structure_shift && ctx.shelf_migrated && neutral_funding) {
    a.scenario = TradeScenario::breakout_validation;
    a.action = "Wait for confirmation, then follow";
    a.risk_management = "Initial stop inside range; trail rapidly";
    a.stop_reference = "inside the prior range, prior boundary plus buffer";
    a.sizing_note = "enter only after 2-3 confirming signals";
  } else if (ctx.funding_spike && (near_upper || near_lower) && !ctx.structure_shift) {
    a.scenario = TradeScenario::liquidation_cascade;
    a.action = "Fade if 4H structure unchanged";
    a.risk_management = "Quick profit-taking; tight stops";
    a.stop_reference = "beyond the cascade extreme";
    a.sizing_note = "small size; exit into the return toward the midpoint";
  } else if (!ctx.structure_shift && ((near_upper && rate_sign > 0) || (near_lower && rate_sign < 0))) {
    a.scenario = TradeScenario::fade_extremes;
    a.action = "Enter counter-directional position";
    a.risk_management = "Stop-loss beyond boundary; size for multiple attempts";
    a.stop_reference = "beyond the tested boundary";
    a.sizing_note = "expect 2-3 failed attempts before range integrity breaks";
  } else if (ctx.regime == RegimeKind::accumulation && !elevated) {
    a.scenario = TradeScenario::accumulation_phase;
    a.action = "Prepare for eventual expansion";
    a.risk_management = "Position in advance; size smaller";
    a.stop_reference = "below the accumulation lows";
    a.sizing_note = "reduced size until expansion confirms";
  } else if (ctx.regime == RegimeKind::distribution && rate_sign > 0) {
    a.scenario = TradeScenario::distribution_phase;
    a.action = "Reduce longs; consider shorts";
    a.risk_management = "Exit in tranches; preserve capital";
    a.stop_reference = "above the distribution highs";
    a.sizing_note = "scale out rather than reverse at once";
  } else if (ctx.absorption_both_boundaries && elevated) {
    a.scenario = TradeScenario::range_midpoint;
    a.action = "Avoid directional bias; consider spreads";
    a.risk_management = "Reduce position size; hedge with options";
    a.stop_reference = "outside both boundaries";
    a.sizing_note = "reduced size";
  } else {
    a.scenario = TradeScenario::no_signal;
    a.action = "Remain neutral";
    a.risk_management = "No position";
    a.stop_reference = "n/a";
    a.sizing_note = "n/a";
  }
  return a;
}

MarketContext market_context(const Panel& panel, const BarSeries& s, const Config& cfg) {
  MarketContext ctx;
  if (panel.candles.empty()) return ctx;
  const auto& C = panel.candles;
  const std::size_t last = C.size() - 1;
  Window w = default_window(panel, cfg);
  ctx.regime = classify_regime(panel, s, last, cfg).label;
  ctx.range = range_before(panel, w, cfg);
  ctx.last_close = C[last].close;
  auto states = funding_states(s.funding, cfg);
  ctx.funding = states[last];
  auto span = std::span<const Candle4H>(C).subspan(w.start, w.end - w.start + 1);
  if (ctx.range) ctx.structure_shift = structural_shift(span, *ctx.range, static_cast<std::size_t>(as_count(cfg.h3_shift_closes)));

  for (std::size_t t = last + 1; t-- > 0;) {
    if (!s.book[t] || !ctx.range) continue;
    auto m = shelf_migration(panel.books[*s.book[t]], *ctx.range, true, cfg.h2_shelf_share);
    ctx.shelf_migrated = std::max(m.ask_share_above_upper, m.bid_share_below_lower) > cfg.h2_shelf_share;
    break;
  }
  auto spikes = funding_spike(s.funding, static_cast<std::size_t>(as_count(cfg.h3_spike_lookback)), cfg.h3_spike_sigma,
                              cfg.h3_spike_sigma_floor);
  for (std::size_t t = last >= 5 ? last - 5 : 0; t <= last; ++t) ctx.funding_spike = ctx.funding_spike || spikes[t].value_or(false);

  if (ctx.range) {
    auto events = absorption_footprints(span, cfg.absorption_usd);
    const Decimal zone = Decimal::from_double(cfg.range_touch_tolerance);
    bool at_low = false, at_high = false;
    for (const auto& e : events) {
      const auto& c = C[panel.bar_index_at(e.time + kBarSeconds)];
      at_low = at_low || c.low <= ctx.range->lower + ctx.range->lower * zone;
      at_high = at_high || c.high >= ctx.range->upper - ctx.range->upper * zone;
    }
    ctx.absorption_both_boundaries = at_low && at_high;
  }
  auto n = static_cast<std::size_t>(as_count(cfg.regime_lookback));
  double acc = 0.0;
  std::size_t cnt = 0;
  for (std::size_t t = last + 1 > n ? last + 1 - n : 0; t <= last; ++t, ++cnt)
    acc += (C[t].high - C[t].low).to_double() / C[t].close.to_double();
  ctx.average_bar_range = cnt ? acc / static_cast<double>(cnt) : 0.0;
  for (auto h : kAllHypotheses) ctx.verdicts.push_back(evaluate(h, panel, s, ctx.range, w, cfg));
  return ctx;
}

double percentile_rank(std::span<const double> values, double x) {
  if (values.size() < 2) return 0.0;
  std::size_t below = 0;
  for (double v : values) below += v < x;
  return static_cast<double>(below) / static_cast<double>(values.size() - 1);
}

double quantile_type7(std::vector<double> values, double p) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  double h = (static_cast<double>(values.size()) - 1.0) * p;
  auto lo = static_cast<std::size_t>(std::floor(h));
  std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

PlatformAdvisory advise_platform_parameters(std::span<const double> history, const Config& cfg) {
  PlatformAdvisory a;
  if (history.empty()) throw Error(ErrorKind::invalid_input, "volatility history is empty");
  a.current_volatility = history.back();
  auto margin_n = static_cast<std::size_t>(as_count(cfg.margin_window_days)) * kBarsPerDay;
  auto liq_n = static_cast<std::size_t>(as_count(cfg.liquidation_window_days)) * kBarsPerDay;
  auto margin = history.size() > margin_n ? history.last(margin_n) : history;
  auto liq = history.size() > liq_n ? history.last(liq_n) : history;
  a.margin_samples = margin.size();
  a.liquidation_samples = liq.size();
  a.margin_percentile = percentile_rank(margin, a.current_volatility);
  a.max_leverage = cfg.leverage_max - (cfg.leverage_max - cfg.leverage_min) * a.margin_percentile;
  a.liquidation_threshold = quantile_type7(std::vector<double>(liq.begin(), liq.end()), cfg.aggressive_percentile);
  a.aggressive = a.current_volatility > a.liquidation_threshold;
  a.liquidation_mode = a.aggressive ? "aggressive" : "gradual";
  return a;
}

NarrativeAssessment narrative_filter(const Panel& panel, const BarSeries& s, Timestamp event_time, std::size_t bars,
                                     const Config& cfg) {
  NarrativeAssessment out;
  out.event_time = event_time;
  out.bars = bars;
  const auto& C = panel.candles;
  if (C.empty() || bars == 0) {
    out.verdict = "not evaluated: empty panel";
    return out;
  }
  // Bars strictly before the event and bars from the event onward.
  std::size_t e = panel.bar_index_at(event_time);
  if (event_time <= C.front().open_time) e = 0;
  std::size_t b0 = e >= bars ? e - bars : 0;
  std::size_t a1 = std::min(e + bars, C.size());
  auto mean_of = [](auto&& range, auto&& f) -> std::optional<double> {
    double acc = 0.0;
    std::size_t n = 0;
    for (auto i : range) {
      if (auto v = f(i)) {
        acc += *v;
        ++n;
      }
    }
    if (n == 0) return std::nullopt;
    return acc / static_cast<double>(n);
  };
  auto idx = [](std::size_t from, std::size_t to) {
    std::vector<std::size_t> v;
    for (std::size_t i = from; i < to; ++i) v.push_back(i);
    return v;
  };
  auto before = idx(b0, e), after = idx(e, a1);

  // Collateral availability: borrowing-rate annotation when supplied.
  {
    NarrativeDimension d{"collateral", std::nullopt, std::nullopt, false, "no borrowing-rate series"};
    if (auto it = panel.annotations.series.find("borrow_rate"); it != panel.annotations.series.end()) {
      auto avg = [&](Timestamp lo, Timestamp hi) -> std::optional<double> {
        double acc = 0.0;
        std::size_t n = 0;
        for (const auto& tv : it->second)
          if (tv.time > lo && tv.time <= hi) {
            acc += tv.value;
            ++n;
          }
        if (n == 0) return std::nullopt;
        return acc / static_cast<double>(n);
      };
      Timestamp te = C[e].open_time;
      d.before = avg(te - static_cast<Timestamp>(bars) * kBarSeconds, te);
      d.after = avg(te, te + static_cast<Timestamp>(bars) * kBarSeconds);
      if (d.before && d.after) d.changed = std::fabs(*d.after - *d.before) > 0.5 * std::max(std::fabs(*d.before), 1e-12);
      d.detail = "mean borrowing rate";
    }
    out.dimensions.push_back(d);
  }
  // Funding costs: magnitude class or a >50% move in mean |rate|.
  {
    NarrativeDimension d{"funding", std::nullopt, std::nullopt, false, "mean |rate_8h|"};
    auto f = [&](std::size_t i) -> std::optional<double> { return s.funding[i].abs().to_double(); };
    d.before = mean_of(before, f);
    d.after = mean_of(after, f);
    if (d.before && d.after) {
      auto cls_b = classify_magnitude(Decimal::from_double(*d.before), cfg);
      auto cls_a = classify_magnitude(Decimal::from_double(*d.after), cfg);
      d.changed = cls_a != cls_b;
    }
    out.dimensions.push_back(d);
  }
  // Liquidity positioning: bid/ask imbalance crossing the extreme band.
  {
    NarrativeDimension d{"liquidity", std::nullopt, std::nullopt, false, "mean order-book imbalance"};
    auto f = [&](std::size_t i) -> std::optional<double> {
      if (!s.book[i]) return std::nullopt;
      return book_imbalance(panel.books[*s.book[i]], static_cast<std::size_t>(as_count(cfg.imbalance_levels)),
                            cfg.imbalance_extreme)
          .value;
    };
    d.before = mean_of(before, f);
    d.after = mean_of(after, f);
    if (d.before && d.after) {
      auto extreme = [&](double v) { return std::fabs(v) > cfg.imbalance_extreme; };
      d.changed = extreme(*d.before) != extreme(*d.after);
    }
    out.dimensions.push_back(d);
  }
  // 4H structure: closes leaving the range in force before the event.
  {
    NarrativeDimension d{"structure", std::nullopt, std::nullopt, false, "closes outside the prior range"};
    auto range = e > 0 ? detect_range(std::span<const Candle4H>(C).first(e), cfg) : std::nullopt;
    if (range && a1 > e) {
      auto span = std::span<const Candle4H>(C).subspan(e, a1 - e);
      double outside = 0.0;
      for (const auto& c : span) outside += c.close < range->lower || c.close > range->upper;
      d.before = 0.0;
      d.after = outside;
      d.changed = structural_shift(span, *range, static_cast<std::size_t>(as_count(cfg.h3_shift_closes)));
    } else {
      d.detail = "no established range before the event";
    }
    out.dimensions.push_back(d);
  }
  out.structurally_relevant =
      std::any_of(out.dimensions.begin(), out.dimensions.end(), [](const NarrativeDimension& d) { return d.changed; });
  out.verdict = out.structurally_relevant ? "structurally relevant" : "structurally irrelevant";
  return out;
}

}  // namespace rg
