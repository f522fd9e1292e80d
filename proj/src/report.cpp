#include "rg/report.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "rg/cost.hpp"
#include "rg/error.hpp"
#include "rg/ingestion.hpp"
#include "rg/liquidity.hpp"
#include "rg/positioning.hpp"
#include "rg/regime.hpp"
#include "rg/series.hpp"
#include "rg/structural.hpp"

namespace rg {

const char* to_string(MetricFamily f) {
  switch (f) {
    case MetricFamily::structural: return "structural";
    case MetricFamily::cost: return "cost";
    case MetricFamily::positioning: return "positioning";
    case MetricFamily::liquidity: return "liquidity";
  }
  return "?";
}

std::optional<MetricFamily> parse_family(std::string_view s) {
  for (auto f : kAllFamilies)
    if (s == to_string(f)) return f;
  return std::nullopt;
}

Json json_number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

namespace {

Json opt_number(const std::optional<double>& v) { return v ? json_number(*v) : Json(nullptr); }

Json envelope(const char* kind, const std::string& instrument, const Config& cfg, const ReportOptions& opt) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["report"] = kind;
  j["instrument"] = instrument;
  Json overrides = Json::object();
  const Config defaults;
  for (const auto& p : Config::params())
    if (cfg.get(p.key) != defaults.get(p.key)) overrides[std::string(p.key)] = cfg.get(p.key);
  j["config_overrides"] = std::move(overrides);
  if (opt.stamp) j["generated_at"] = *opt.stamp;
  return j;
}

Json range_json(const std::optional<RangeDefinition>& r) {
  if (!r) return nullptr;
  return {{"lower", r->lower.to_string()},
          {"upper", r->upper.to_string()},
          {"midpoint", r->midpoint.to_string()},
          {"established_at", format_utc(r->established_at)},
          {"touch_count_lower", r->touch_count_lower},
          {"touch_count_upper", r->touch_count_upper},
          {"width_fraction", json_number(r->width_fraction())}};
}

Json window_json(const Panel& p, Window w) {
  Json j{{"start", w.start}, {"end", w.end}};
  if (w.end < p.candles.size()) {
    j["start_time"] = format_utc(p.candles[w.start].open_time);
    j["end_time"] = format_utc(p.candles[w.end].close_time());
  }
  return j;
}

/// Range in force at each bar: derived from the range-window bars ending
/// at that bar (nullopt until enough history exists or when none forms).
std::vector<std::optional<RangeDefinition>> rolling_ranges(const Panel& panel, const Config& cfg) {
  const auto& C = panel.candles;
  const auto n = static_cast<std::size_t>(std::max(1, as_count(cfg.range_window)));
  std::vector<std::optional<RangeDefinition>> out(C.size());
  for (std::size_t t = 0; t < C.size(); ++t) {
    if (t + 1 < n) continue;
    try {
      out[t] = detect_range(std::span<const Candle4H>(C).subspan(t + 1 - n, n), cfg);
    } catch (const Error&) {
      out[t] = std::nullopt;
    }
  }
  return out;
}

Json structural_family(const Panel& panel, const BarSeries& s, const std::vector<std::optional<RangeDefinition>>& ranges,
                       const Config& cfg) {
  const auto& C = panel.candles;
  Json fam;
  fam["reporting_cadence"] = "Weekly assessment";
  Json bars = Json::array();
  for (std::size_t t = 0; t < C.size(); ++t) {
    const auto& c = C[t];
    Json b{{"time", format_utc(c.open_time)},
           {"open", c.open.to_string()},
           {"high", c.high.to_string()},
           {"low", c.low.to_string()},
           {"close", c.close.to_string()},
           {"volume", json_number(c.volume)},
           {"volatility", json_number(s.volatility[t])}};
    auto w = wick_to_body(c, cfg.doji_tolerance);
    b["upper_wick_pct"] = w ? json_number(w->upper_pct) : Json(nullptr);
    b["lower_wick_pct"] = w ? json_number(w->lower_pct) : Json(nullptr);
    double typical = (c.high + c.low + c.close).to_double() / 3.0;
    b["absorption_proxy"] = c.volume * typical >= cfg.absorption_usd;
    b["range_lower"] = ranges[t] ? Json(ranges[t]->lower.to_string()) : Json(nullptr);
    b["range_upper"] = ranges[t] ? Json(ranges[t]->upper.to_string()) : Json(nullptr);
    bars.push_back(std::move(b));
  }
  fam["bars"] = std::move(bars);

  Json swings = Json::array();
  const auto lookback = static_cast<std::size_t>(std::max(1, as_count(cfg.swing_lookback)));
  if (C.size() >= 2 * lookback + 1) {
    for (const auto& sp : map_swings(C, lookback))
      swings.push_back({{"index", sp.index},
                        {"time", format_utc(C[sp.index].open_time)},
                        {"kind", sp.kind == SwingKind::high ? "high" : "low"},
                        {"price", sp.price.to_string()}});
  }
  fam["swings"] = std::move(swings);

  const std::optional<RangeDefinition> current = C.empty() ? std::nullopt : ranges.back();
  fam["range"] = range_json(current);
  if (current) {
    fam["range_persistence_bars"] = range_persistence(C, *current);
    fam["structural_shift"] = structural_shift(std::span<const Candle4H>(C).last(std::min<std::size_t>(C.size(), 6)),
                                               *current, static_cast<std::size_t>(as_count(cfg.h3_shift_closes)));
  } else {
    fam["range_persistence_bars"] = nullptr;
    fam["structural_shift"] = nullptr;
  }
  Json profile = nullptr;
  if (!C.empty()) {
    auto vp = volume_nodes(C, cfg.volume_bin_width);
    Json bins = Json::array();
    for (const auto& bin : vp.bins) bins.push_back({json_number(bin.lower_edge), json_number(bin.volume)});
    profile = {{"bin_width", json_number(vp.bin_width)}, {"total", json_number(vp.total())}, {"bins", std::move(bins)}};
  }
  fam["volume_profile"] = std::move(profile);
  return fam;
}

Json cost_family(const Panel& panel, const BarSeries& s, const Config& cfg) {
  const auto& C = panel.candles;
  Json fam;
  fam["reporting_cadence"] = "Per funding period";
  auto states = funding_states(s.funding, cfg);
  auto spikes = funding_spike(s.funding, static_cast<std::size_t>(as_count(cfg.h3_spike_lookback)), cfg.h3_spike_sigma,
                              cfg.h3_spike_sigma_floor);
  Json bars = Json::array();
  for (std::size_t t = 0; t < C.size(); ++t) {
    const auto& st = states[t];
    Json b{{"time", format_utc(C[t].open_time)},
           {"rate_8h", st.rate_8h.to_string()},
           {"observed", static_cast<bool>(s.funding_observed[t])},
           {"bias_sign", to_string(st.bias_sign)},
           {"bias_duration", st.bias_duration},
           {"magnitude", to_string(st.magnitude_class)},
           {"annualized_pct", st.annualized_pct.to_string()},
           {"overextended", st.annualized_pct.abs().to_double() > cfg.annualized_overextension},
           {"cumulative_7d", st.cumulative_7d ? Json(st.cumulative_7d->to_string()) : Json(nullptr)},
           {"cumulative_30d", st.cumulative_30d ? Json(st.cumulative_30d->to_string()) : Json(nullptr)},
           {"spike", spikes[t] ? Json(*spikes[t]) : Json(nullptr)},
           {"basis", opt_number(s.basis[t])}};
    b["basis_dislocation"] = s.basis[t] ? Json(std::fabs(*s.basis[t]) > cfg.basis_dislocation) : Json(nullptr);
    bars.push_back(std::move(b));
  }
  fam["bars"] = std::move(bars);

  // Worked carry figures at the published example rates, so readers can
  // check the arithmetic the per-bar columns use.
  const Decimal r05 = Decimal::parse("0.0005"), r08 = Decimal::parse("0.0008");
  std::vector<Decimal> month05(90, r05), month08(30, r08);
  fam["annualization"] = {
      {"method", "simple: rate_8h x 3 x 365 x 100"},
      {"rate_0.0005_annualized_pct", annualize_funding(r05).to_string()},
      {"rate_0.0008_annualized_pct", annualize_funding(r08).to_string()},
      {"rate_0.0005_30d_cumulative_pct", (cumulative_funding(month05, 90) * 100).to_string()},
      {"rate_0.0008_30_periods_cumulative_pct", (cumulative_funding(month08, 30) * 100).to_string()},
      {"note",
       "30 days at 0.05% per 8h is 90 settlement periods and accumulates 4.5%. A figure of about 5.5% "
       "is sometimes quoted for this case; it does not follow from the formula and is not used."}};
  if (!C.empty()) {
    Decimal drag = funding_drag(s.funding.back(), cfg.holding_days);
    fam["funding_drag"] = {{"holding_days", json_number(cfg.holding_days)},
                           {"rate_8h", s.funding.back().to_string()},
                           {"drag", drag.to_string()}};
  } else {
    fam["funding_drag"] = nullptr;
  }
  return fam;
}

Json density_json(const LiquidationDensity& d) {
  Json grid = Json::array();
  for (const auto& p : d.grid) grid.push_back({json_number(p.price), json_number(p.density)});
  return {{"bandwidth", json_number(d.bandwidth)},
          {"total_usd", json_number(d.total_usd)},
          {"empty", d.empty},
          {"peak_price", opt_number(density_peak(d))},
          {"integral", d.empty ? Json(nullptr) : json_number(integrate(d))},
          {"grid", std::move(grid)}};
}

Json positioning_family(const Panel& panel, const BarSeries& s, const Config& cfg) {
  const auto& C = panel.candles;
  Json fam;
  fam["reporting_cadence"] = "Weekly deep-dive";
  std::vector<double> oi(C.size(), 0.0);
  for (std::size_t t = 0; t < C.size(); ++t) oi[t] = s.oi[t].value_or(0.0);
  auto rot = oi_rotation(oi, s.volatility, cfg.rotation_vol_floor);
  // Latest OI record at or before each bar close, for histogram/holders.
  std::vector<const OpenInterestRecord*> rec(C.size(), nullptr);
  {
    std::size_t k = 0;
    const OpenInterestRecord* cur = nullptr;
    for (std::size_t t = 0; t < C.size(); ++t) {
      while (k < panel.oi.size() && panel.oi[k].time <= C[t].close_time()) cur = &panel.oi[k++];
      rec[t] = cur;
    }
  }
  Json bars = Json::array();
  for (std::size_t t = 0; t < C.size(); ++t) {
    Json b{{"time", format_utc(C[t].open_time)},
           {"oi_usd", opt_number(s.oi[t])},
           {"oi_rotation_score", s.oi[t] ? opt_number(rot[t]) : Json(nullptr)},
           {"long_share", opt_number(s.long_share[t])}};
    if (s.long_share[t] && *s.long_share[t] < 1.0) {
      auto r = long_short_ratio(*s.long_share[t], 1.0 - *s.long_share[t], cfg.ls_ratio_high, cfg.ls_ratio_low);
      b["long_short_ratio"] = json_number(r.ratio);
      b["long_short_extreme"] = r.extreme;
    } else {
      b["long_short_ratio"] = nullptr;
      b["long_short_extreme"] = nullptr;
    }
    const OpenInterestRecord* r = rec[t];
    if (r && !r->holder_shares.empty()) {
      auto g = concentration_gini(r->holder_shares, cfg.gini_risk);
      b["gini"] = json_number(g.gini);
      b["concentration_risk"] = g.risk;
    } else {
      b["gini"] = nullptr;
      b["concentration_risk"] = nullptr;
    }
    auto lev = r ? leverage_summary(r->leverage_histogram) : LeverageSummary{};
    b["leverage_weighted_mean"] = lev.available ? json_number(lev.weighted_mean) : Json(nullptr);
    b["leverage_max"] = lev.available ? json_number(lev.max_leverage) : Json(nullptr);
    b["leverage_share_above_50x"] = lev.available ? json_number(lev.share_above_50x) : Json(nullptr);
    bars.push_back(std::move(b));
  }
  fam["bars"] = std::move(bars);

  // Liquidation heatmap over the trailing evaluation window.
  Window w = default_window(panel, cfg);
  fam["density_window"] = window_json(panel, w);
  std::vector<LiquidationEvent> events;
  if (!C.empty()) {
    const Timestamp from = C[w.start].open_time, to = C[w.end].close_time();
    for (const auto& e : panel.liquidations)
      if (e.time > from && e.time <= to) events.push_back(e);
  }
  auto kernel = as_count(cfg.kde_kernel) == 1 ? Kernel::epanechnikov : Kernel::gaussian;
  auto d = liquidation_density(events, {}, cfg.kde_bandwidth, kernel);
  fam["liquidation_density"] = density_json(d);
  fam["liquidation_events"] = events.size();
  const auto range = C.empty() ? std::nullopt : range_before(panel, w, cfg);
  fam["cluster_range"] = range_json(range);
  if (range) {
    auto cs = boundary_cluster_share(events, *range, cfg.h4_cluster_distance, cfg.h4_cluster_share);
    fam["boundary_cluster"] = {{"share", json_number(cs.share)}, {"clustered", cs.clustered}};
  } else {
    fam["boundary_cluster"] = nullptr;
  }
  if (!C.empty()) {
    std::vector<double> win_oi;
    std::vector<std::optional<double>> win_ls;
    for (std::size_t t = w.start; t <= w.end; ++t)
      if (s.oi[t]) {
        win_oi.push_back(*s.oi[t]);
        win_ls.push_back(s.long_share[t]);
      }
    if (win_oi.size() >= 2) {
      auto cls = classify_oi_event(win_oi, win_ls, cfg.h2_oi_collapse, cfg.h2_oi_mix_shift);
      fam["oi_event"] = {{"event", to_string(cls.event)},
                         {"oi_change", json_number(cls.oi_change)},
                         {"long_share_shift", opt_number(cls.long_share_shift)},
                         {"partial", cls.partial}};
    } else {
      fam["oi_event"] = nullptr;
    }
  } else {
    fam["oi_event"] = nullptr;
  }
  return fam;
}

Json liquidity_family(const Panel& panel, const BarSeries& s, const std::vector<std::optional<RangeDefinition>>& ranges,
                      const Config& cfg) {
  const auto& C = panel.candles;
  Json fam;
  fam["reporting_cadence"] = "Daily updates";
  Json snaps = Json::array();
  std::vector<double> extreme_depth;
  for (std::size_t t = 0; t < C.size(); ++t) {
    if (!s.book[t]) continue;
    const auto& b = panel.books[*s.book[t]];
    Json j{{"time", format_utc(b.time)}, {"bar", t}};
    if (b.bids.empty() || b.asks.empty()) {
      j["empty_side"] = true;
      snaps.push_back(std::move(j));
      continue;
    }
    auto dp = depth_percentiles(b, cfg.depth_p_low, cfg.depth_p_high);
    j["bid_p25"] = dp.bid.p25.to_string();
    j["bid_p75"] = dp.bid.p75.to_string();
    j["ask_p25"] = dp.ask.p25.to_string();
    j["ask_p75"] = dp.ask.p75.to_string();
    auto im = book_imbalance(b, static_cast<std::size_t>(as_count(cfg.imbalance_levels)), cfg.imbalance_extreme);
    j["imbalance"] = json_number(im.value);
    j["imbalance_extreme"] = im.extreme;
    try {
      auto sp = spread(b, cfg.spread_uncertainty);
      j["spread"] = json_number(sp.value);
      j["spread_uncertainty"] = sp.uncertainty;
    } catch (const Error&) {
      j["spread"] = nullptr;
      j["spread_uncertainty"] = nullptr;
    }
    auto buy = fill_slippage(b, cfg.slippage_order_usd, true);
    auto sell = fill_slippage(b, cfg.slippage_order_usd, false);
    j["slippage_buy"] = json_number(buy.slippage);
    j["slippage_sell"] = json_number(sell.slippage);
    j["insufficient_depth"] = buy.insufficient_depth || sell.insufficient_depth;
    if (ranges[t]) {
      auto de = depth_at_extremes(b, *ranges[t], cfg.extreme_zone);
      j["depth_lower_usd"] = json_number(de.lower_usd);
      j["depth_upper_usd"] = json_number(de.upper_usd);
      extreme_depth.push_back(de.total());
      auto sm = shelf_migration(b, *ranges[t], true, cfg.h2_shelf_share);
      j["shelf_ask_share_above_upper"] = json_number(sm.ask_share_above_upper);
      j["shelf_bid_share_below_lower"] = json_number(sm.bid_share_below_lower);
    } else {
      j["depth_lower_usd"] = nullptr;
      j["depth_upper_usd"] = nullptr;
      j["shelf_ask_share_above_upper"] = nullptr;
      j["shelf_bid_share_below_lower"] = nullptr;
    }
    snaps.push_back(std::move(j));
  }
  fam["snapshots"] = std::move(snaps);
  const auto n = static_cast<std::size_t>(std::max(2, as_count(cfg.h2_depth_snapshots)));
  if (extreme_depth.size() >= 2) {
    auto tail = std::span<const double>(extreme_depth).last(std::min(n, extreme_depth.size()));
    fam["depth_at_extremes_trend_slope"] = json_number(ols_slope(tail));
  } else {
    fam["depth_at_extremes_trend_slope"] = nullptr;
  }
  const auto window = static_cast<std::size_t>(std::max(2, as_count(cfg.impact_window_hours / 4.0)));
  auto impact = rolling_market_impact(C, window);
  Json imp = Json::array();
  for (std::size_t t = 0; t < C.size(); ++t) {
    if (!impact[t]) {
      imp.push_back(nullptr);
      continue;
    }
    imp.push_back({{"slope", json_number(impact[t]->slope)},
                   {"intercept", json_number(impact[t]->intercept)},
                   {"r_squared", json_number(impact[t]->r_squared)}});
  }
  fam["market_impact"] = std::move(imp);
  fam["market_impact_window_bars"] = window;
  return fam;
}

Json verdict_json(const Panel& panel, const HypothesisVerdict& v) {
  Json sig = Json::array();
  for (const auto& s : v.signals)
    sig.push_back({{"name", s.name},
                   {"met", s.met ? Json(*s.met) : Json(nullptr)},
                   {"measured", opt_number(s.measured)},
                   {"threshold", json_number(s.threshold)},
                   {"relation", to_string(s.relation)},
                   {"required", s.required}});
  Json metrics = Json::object();
  for (const auto& [k, x] : v.metrics) metrics[k] = json_number(x);
  return {{"hypothesis", to_string(v.hypothesis)},
          {"outcome", to_string(v.outcome)},
          {"condition_met", v.condition_met},
          {"window", window_json(panel, v.window)},
          {"signals", std::move(sig)},
          {"notes", v.notes},
          {"metrics", std::move(metrics)},
          {"range", range_json(v.range)}};
}

Json outcome_counts_json(const OutcomeCounts& c) {
  Json j;
  for (auto o : {Outcome::confirmed, Outcome::falsified, Outcome::not_evaluable, Outcome::inconclusive})
    j[to_string(o)] = c[static_cast<std::size_t>(o)];
  return j;
}

Json confusion_json(const ConfusionMatrix& m) {
  Json cells = Json::object();
  for (const auto& [e, row] : m.cells)
    for (const auto& [p, n] : row) cells[e][p] = n;
  return {{"cells", std::move(cells)},
          {"total", m.total},
          {"correct", m.correct},
          {"diagonal_rate", json_number(m.diagonal_rate())}};
}

Json regime_body(const Panel& panel, const BarSeries& s, const Config& cfg) {
  Json j;
  const auto& C = panel.candles;
  if (C.empty()) throw Error(ErrorKind::missing_series, "panel has no candles");
  const std::size_t last = C.size() - 1;
  auto label = classify_regime(panel, s, last, cfg);
  Json ev = Json::array();
  for (const auto& c : label.evidence)
    ev.push_back({{"name", c.name}, {"value", json_number(c.value)}, {"threshold", json_number(c.threshold)}, {"met", c.met}});
  j["regime"] = {{"label", to_string(label.label)},
                 {"window", window_json(panel, label.window)},
                 {"evidence", std::move(ev)},
                 {"reporting_cadence", "Weekly assessment"}};

  auto ctx = market_context(panel, s, cfg);
  auto entries = trigger_entries(panel, s, ctx.range, last, cfg);
  Json tm;
  Json ent = Json::array();
  for (const auto& e : entries) ent.push_back({{"name", e.name}, {"state", to_string(e.state)}, {"detail", e.detail}});
  tm["entries"] = std::move(ent);
  tm["reporting_cadence"] = "Pre-market daily";
  try {
    auto m = build_trigger_matrix(entries, cfg);
    tm["conviction"] = to_string(m.conviction);
    tm["probability_band"] = to_string(m.band);
    tm["error"] = nullptr;
  } catch (const Error& e) {
    tm["conviction"] = nullptr;
    tm["probability_band"] = nullptr;
    tm["error"] = e.what();
  }
  j["trigger_matrix"] = std::move(tm);

  auto a = recommend_action(ctx, cfg);
  j["advisory"] = {{"scenario", to_string(a.scenario)},
                   {"action", a.action},
                   {"risk_management", a.risk_management},
                   {"stop_min", json_number(a.stop_min)},
                   {"stop_max", json_number(a.stop_max)},
                   {"stop_reference", a.stop_reference},
                   {"volatility_stop_min", json_number(a.volatility_stop_min)},
                   {"volatility_stop_max", json_number(a.volatility_stop_max)},
                   {"sizing_note", a.sizing_note},
                   {"holding_days", json_number(a.holding_days)},
                   {"funding_drag", a.funding_drag.to_string()},
                   {"supporting_verdicts", a.supporting_verdicts},
                   {"range", range_json(ctx.range)},
                   {"advisory_only", a.advisory_only}};

  auto pa = advise_platform_parameters(s.volatility, cfg);
  j["platform"] = {{"current_volatility", json_number(pa.current_volatility)},
                   {"margin_percentile", json_number(pa.margin_percentile)},
                   {"max_leverage", json_number(pa.max_leverage)},
                   {"liquidation_threshold", json_number(pa.liquidation_threshold)},
                   {"aggressive", pa.aggressive},
                   {"liquidation_mode", pa.liquidation_mode},
                   {"margin_samples", pa.margin_samples},
                   {"liquidation_samples", pa.liquidation_samples},
                   {"advisory_only", pa.advisory_only}};

  Json narr = Json::array();
  const std::string prefix = "event.";
  for (auto it = panel.annotations.notes.lower_bound(prefix); it != panel.annotations.notes.end(); ++it) {
    if (it->first.compare(0, prefix.size(), prefix) != 0) break;
    Timestamp t = 0;
    try {
      t = parse_utc(it->second);
    } catch (const Error&) {
      narr.push_back({{"event", it->first.substr(prefix.size())}, {"error", "unparseable time '" + it->second + "'"}});
      continue;
    }
    auto na = narrative_filter(panel, s, t, 6, cfg);
    Json dims = Json::array();
    for (const auto& d : na.dimensions)
      dims.push_back({{"name", d.name},
                      {"before", opt_number(d.before)},
                      {"after", opt_number(d.after)},
                      {"changed", d.changed},
                      {"detail", d.detail}});
    narr.push_back({{"event", it->first.substr(prefix.size())},
                    {"time", format_utc(na.event_time)},
                    {"bars", na.bars},
                    {"dimensions", std::move(dims)},
                    {"structurally_relevant", na.structurally_relevant},
                    {"verdict", na.verdict}});
  }
  j["narrative"] = std::move(narr);
  j["advisory_only"] = true;
  j["disclaimer"] = "Advisory only. Not financial advice; no orders are placed.";
  return j;
}

}  // namespace

Json quality_report(const std::string& instrument, const QualityReport& q, const Config& cfg, const ReportOptions& opt) {
  Json j = envelope("quality", instrument, cfg, opt);
  Json flags = Json::array();
  for (const auto& f : q.flags)
    flags.push_back({{"check", f.check}, {"location", f.location}, {"severity", to_string(f.severity)}, {"detail", f.detail}});
  Json counts;
  for (auto s : {Severity::reject, Severity::flag, Severity::interpolated, Severity::info})
    counts[std::string(to_string(s))] = q.count(s);
  j["quality"] = {{"checks_run", q.checks_run}, {"pass", q.pass()}, {"counts", std::move(counts)}, {"flags", std::move(flags)}};
  return j;
}

Json metrics_report(const Panel& panel, const std::vector<MetricFamily>& families, const Config& cfg,
                    const ReportOptions& opt) {
  if (panel.candles.empty()) throw Error(ErrorKind::missing_series, "panel has no candles");
  Json j = envelope("metrics", panel.instrument, cfg, opt);
  std::set<MetricFamily> want(families.begin(), families.end());
  if (want.empty()) want.insert(std::begin(kAllFamilies), std::end(kAllFamilies));
  const auto s = build_bar_series(panel, cfg);
  const auto ranges = rolling_ranges(panel, cfg);
  Json fams = Json::object();
  if (want.contains(MetricFamily::structural)) fams["structural"] = structural_family(panel, s, ranges, cfg);
  if (want.contains(MetricFamily::cost)) fams["cost"] = cost_family(panel, s, cfg);
  if (want.contains(MetricFamily::positioning)) fams["positioning"] = positioning_family(panel, s, cfg);
  if (want.contains(MetricFamily::liquidity)) fams["liquidity"] = liquidity_family(panel, s, ranges, cfg);
  j["bars"] = panel.candles.size();
  j["families"] = std::move(fams);
  return j;
}

Json hypotheses_report(const Panel& panel, const std::vector<Hypothesis>& which, std::optional<Window> window,
                       const Config& cfg, const ReportOptions& opt) {
  if (panel.candles.empty()) throw Error(ErrorKind::missing_series, "panel has no candles");
  Json j = envelope("hypotheses", panel.instrument, cfg, opt);
  Window w = window.value_or(default_window(panel, cfg));
  if (w.start > w.end || w.end >= panel.candles.size())
    throw Error(ErrorKind::invalid_input, "window " + std::to_string(w.start) + ".." + std::to_string(w.end) +
                                              " is outside the panel's " + std::to_string(panel.candles.size()) + " bars");
  const auto s = build_bar_series(panel, cfg);
  const auto range = range_before(panel, w, cfg);
  std::vector<Hypothesis> hs = which.empty() ? std::vector<Hypothesis>(kAllHypotheses.begin(), kAllHypotheses.end()) : which;
  std::sort(hs.begin(), hs.end());
  hs.erase(std::unique(hs.begin(), hs.end()), hs.end());
  Json verdicts = Json::array();
  OutcomeCounts counts{0, 0, 0, 0};
  for (auto h : hs) {
    auto v = evaluate(h, panel, s, range, w, cfg);
    ++counts[static_cast<std::size_t>(v.outcome)];
    verdicts.push_back(verdict_json(panel, v));
  }
  j["window"] = window_json(panel, w);
  j["range"] = range_json(range);
  j["verdicts"] = std::move(verdicts);
  j["counts"] = outcome_counts_json(counts);
  return j;
}

Json regime_report(const Panel& panel, const Config& cfg, const ReportOptions& opt) {
  Json j = envelope("regime", panel.instrument, cfg, opt);
  const auto s = build_bar_series(panel, cfg);
  j.update(regime_body(panel, s, cfg));
  return j;
}

Json backtest_report(const BacktestSummary& sum, const Config& cfg, const ReportOptions& opt) {
  Json j = envelope("backtest", "", cfg, opt);
  j["panels"] = sum.panels;
  Json windows = Json::array();
  for (const auto& w : sum.windows) {
    Json o = Json::object();
    for (const auto& [h, out] : w.outcomes) o[to_string(h)] = to_string(out);
    Json row{{"panel", w.panel},
             {"start", w.window.start},
             {"end", w.window.end},
             {"outcomes", std::move(o)},
             {"regime", to_string(w.regime)},
             {"h4_taps", w.h4_taps},
             {"h4_tap_hits", w.h4_tap_hits}};
    if (sum.has_truth) {
      row["segment"] = w.segment ? Json(*w.segment) : Json(nullptr);
      Json e = Json::object();
      for (const auto& [h, out] : w.expected) e[to_string(h)] = to_string(out);
      row["expected"] = std::move(e);
      row["expected_regime"] = w.expected_regime ? Json(to_string(*w.expected_regime)) : Json(nullptr);
    }
    windows.push_back(std::move(row));
  }
  j["windows"] = std::move(windows);
  Json counts = Json::object();
  for (const auto& [h, c] : sum.counts) counts[to_string(h)] = outcome_counts_json(c);
  j["counts"] = std::move(counts);
  Json regimes = Json::object();
  for (const auto& [r, n] : sum.regime_counts) regimes[to_string(r)] = n;
  j["regime_counts"] = std::move(regimes);
  j["h4_taps"] = sum.h4_taps;
  j["h4_tap_hits"] = sum.h4_tap_hits;
  j["h4_hit_rate"] = opt_number(sum.h4_hit_rate());
  if (sum.has_truth) {
    Json conf = Json::object();
    for (const auto& [h, m] : sum.confusion) conf[to_string(h)] = confusion_json(m);
    j["ground_truth"] = {{"confusion", std::move(conf)},
                         {"regime_confusion", sum.regime_confusion ? confusion_json(*sum.regime_confusion) : Json(nullptr)}};
  }
  return j;
}

Json analyst_report(const Panel& panel, const QualityReport& q, const Config& cfg, const ReportOptions& opt) {
  if (panel.candles.empty()) throw Error(ErrorKind::missing_series, "panel has no candles");
  Json j = envelope("analyst", panel.instrument, cfg, opt);
  const auto s = build_bar_series(panel, cfg);
  const auto& C = panel.candles;
  const std::size_t last = C.size() - 1;
  j["as_of"] = format_utc(C[last].close_time());
  j["quality"] = quality_report(panel.instrument, q, cfg)["quality"];

  Json body = regime_body(panel, s, cfg);
  j["regime_identification"] = body["regime"];
  j["structural_triggers"] = body["trigger_matrix"];
  j["advisory"] = body["advisory"];
  j["platform"] = body["platform"];
  j["narrative_filtering"] = {{"reporting_cadence", "Event-driven"}, {"events", body["narrative"]}};
  j["advisory_only"] = true;
  j["disclaimer"] = body["disclaimer"];

  auto st = funding_states(s.funding, cfg)[last];
  j["funding_analysis"] = {
      {"reporting_cadence", "Per funding period"},
      {"rate_8h", st.rate_8h.to_string()},
      {"bias_sign", to_string(st.bias_sign)},
      {"bias_duration", st.bias_duration},
      {"magnitude", to_string(st.magnitude_class)},
      {"annualized_pct", st.annualized_pct.to_string()},
      {"cumulative_7d", st.cumulative_7d ? Json(st.cumulative_7d->to_string()) : Json(nullptr)},
      {"cumulative_30d", st.cumulative_30d ? Json(st.cumulative_30d->to_string()) : Json(nullptr)},
      {"basis", opt_number(s.basis[last])}};

  Json liq = {{"reporting_cadence", "Daily updates"}};
  std::optional<std::size_t> book;
  for (std::size_t t = last + 1; t-- > 0;)
    if (s.book[t]) {
      book = s.book[t];
      break;
    }
  if (book && !panel.books[*book].bids.empty() && !panel.books[*book].asks.empty()) {
    const auto& b = panel.books[*book];
    auto dp = depth_percentiles(b, cfg.depth_p_low, cfg.depth_p_high);
    auto im = book_imbalance(b, static_cast<std::size_t>(as_count(cfg.imbalance_levels)), cfg.imbalance_extreme);
    liq["snapshot_time"] = format_utc(b.time);
    liq["bid_p25"] = dp.bid.p25.to_string();
    liq["ask_p25"] = dp.ask.p25.to_string();
    liq["imbalance"] = json_number(im.value);
    liq["imbalance_extreme"] = im.extreme;
    liq["slippage_buy"] = json_number(fill_slippage(b, cfg.slippage_order_usd, true).slippage);
  } else {
    liq["snapshot_time"] = nullptr;
  }
  j["liquidity_assessment"] = std::move(liq);

  Json pos = positioning_family(panel, s, cfg);
  Json risk = {{"reporting_cadence", "Weekly deep-dive"},
               {"density_window", pos["density_window"]},
               {"liquidation_events", pos["liquidation_events"]},
               {"density_peak_price", pos["liquidation_density"]["peak_price"]},
               {"boundary_cluster", pos["boundary_cluster"]},
               {"oi_event", pos["oi_event"]}};
  const Json& lastbar = pos["bars"].back();
  risk["leverage_weighted_mean"] = lastbar["leverage_weighted_mean"];
  risk["gini"] = lastbar["gini"];
  risk["concentration_risk"] = lastbar["concentration_risk"];
  j["risk_environment"] = std::move(risk);

  Window w = default_window(panel, cfg);
  const auto range = range_before(panel, w, cfg);
  Json verdicts = Json::array();
  for (auto h : kAllHypotheses) verdicts.push_back(verdict_json(panel, evaluate(h, panel, s, range, w, cfg)));
  j["hypotheses"] = {{"window", window_json(panel, w)}, {"verdicts", std::move(verdicts)}};
  return j;
}

std::string dump_report(const Json& report) { return report.dump(2) + "\n"; }

void check_report_envelope(const Json& r) {
  static const std::set<std::string> kinds{"quality", "metrics", "hypotheses", "regime", "backtest", "analyst"};
  if (!r.is_object()) throw Error(ErrorKind::schema, "report is not an object");
  if (!r.contains("schema_version") || !r["schema_version"].is_number_integer() ||
      r["schema_version"].get<int>() != kSchemaVersion)
    throw Error(ErrorKind::schema, "report schema_version must be " + std::to_string(kSchemaVersion));
  if (!r.contains("report") || !r["report"].is_string() || !kinds.contains(r["report"].get<std::string>()))
    throw Error(ErrorKind::schema, "report kind missing or unknown");
  if (!r.contains("instrument") || !r["instrument"].is_string())
    throw Error(ErrorKind::schema, "report instrument must be a string");
  if (!r.contains("config_overrides") || !r["config_overrides"].is_object())
    throw Error(ErrorKind::schema, "report config_overrides must be an object");
  if (r.contains("generated_at") && !r["generated_at"].is_string())
    throw Error(ErrorKind::schema, "report generated_at must be a string");
}

}  // namespace rg
