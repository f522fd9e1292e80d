#include "rg/hypothesis.hpp"

#include <algorithm>
#include <cmath>

#include "rg/cost.hpp"
#include "rg/liquidity.hpp"
#include "rg/positioning.hpp"
#include "rg/structural.hpp"

namespace rg {

const char* to_string(Hypothesis h) {
  switch (h) {
    case Hypothesis::h1: return "h1";
    case Hypothesis::h2: return "h2";
    case Hypothesis::h3: return "h3";
    case Hypothesis::h4: return "h4";
  }
  return "h1";
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::confirmed: return "confirmed";
    case Outcome::falsified: return "falsified";
    case Outcome::not_evaluable: return "not_evaluable";
    case Outcome::inconclusive: return "inconclusive";
  }
  return "not_evaluable";
}

const char* to_string(Relation r) {
  switch (r) {
    case Relation::lt: return "<";
    case Relation::le: return "<=";
    case Relation::gt: return ">";
    case Relation::ge: return ">=";
    case Relation::eq: return "==";
  }
  return ">";
}

std::optional<Hypothesis> parse_hypothesis(std::string_view s) {
  if (s.size() == 2 && (s[0] == 'h' || s[0] == 'H')) s.remove_prefix(1);
  if (s == "1") return Hypothesis::h1;
  if (s == "2") return Hypothesis::h2;
  if (s == "3") return Hypothesis::h3;
  if (s == "4") return Hypothesis::h4;
  return std::nullopt;
}

std::optional<Outcome> parse_outcome(std::string_view s) {
  for (auto o : {Outcome::confirmed, Outcome::falsified, Outcome::not_evaluable, Outcome::inconclusive}) {
    if (s == to_string(o)) return o;
  }
  if (s == "not-evaluable") return Outcome::not_evaluable;
  return std::nullopt;
}

bool relation_holds(double m, Relation r, double t) {
  switch (r) {
    case Relation::lt: return m < t;
    case Relation::le: return m <= t;
    case Relation::gt: return m > t;
    case Relation::ge: return m >= t;
    case Relation::eq: return m == t;
  }
  return false;
}

namespace {

/// Slope per bar relative to the mean level, snapped to zero below 1e-9 so
/// that verdicts do not depend on rounding noise or on price scale.
double relative_slope(std::span<const double> y) {
  if (y.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : y) mean += std::fabs(v);
  mean /= static_cast<double>(y.size());
  if (!(mean > 0.0)) return 0.0;
  double s = ols_slope(y) / mean;
  return std::fabs(s) < 1e-9 ? 0.0 : s;
}

Signal make_signal(std::string name, std::optional<double> measured, double threshold, Relation rel,
                   bool required = true) {
  Signal s;
  s.name = std::move(name);
  s.measured = measured;
  s.threshold = threshold;
  s.relation = rel;
  s.required = required;
  if (measured) s.met = relation_holds(*measured, rel, threshold);
  return s;
}

bool required_met(const std::vector<Signal>& signals) {
  return std::all_of(signals.begin(), signals.end(),
                     [](const Signal& s) { return !s.required || s.met.value_or(false); });
}

/// +1 above upper, -1 below lower, 0 inside (boundaries count as inside).
int close_side(const Candle4H& c, const RangeDefinition& r) {
  if (c.close > r.upper) return 1;
  if (c.close < r.lower) return -1;
  return 0;
}

HypothesisVerdict start(Hypothesis h, const Panel& panel, const std::optional<RangeDefinition>& range, Window& w) {
  HypothesisVerdict v;
  v.hypothesis = h;
  if (!panel.candles.empty()) w.end = std::min(w.end, panel.candles.size() - 1);
  v.window = w;
  v.range = range;
  if (panel.candles.empty() || w.start > w.end) v.notes.push_back("empty window");
  else if (!range) v.notes.push_back("no established range before the window");
  return v;
}

bool ready(const HypothesisVerdict& v) { return v.notes.empty(); }

}  // namespace

std::optional<RangeDefinition> range_before(const Panel& panel, Window window, const Config& cfg) {
  if (window.start == 0 || window.start > panel.candles.size()) return std::nullopt;
  return detect_range(std::span<const Candle4H>(panel.candles).first(window.start), cfg);
}

Window default_window(const Panel& panel, const Config& cfg) {
  const std::size_t n = panel.candles.size();
  auto len = static_cast<std::size_t>(as_count(cfg.backtest_window));
  if (n == 0) return {0, 0};
  return {n > len ? n - len : 0, n - 1};
}

// ---------------------------------------------------------------------------
// Range persistence under sustained funding pressure

HypothesisVerdict evaluate_h1(const Panel& panel, const BarSeries& s, const std::optional<RangeDefinition>& range,
                              Window w, const Config& cfg) {
  auto v = start(Hypothesis::h1, panel, range, w);
  if (!ready(v)) return v;
  const auto& C = panel.candles;
  const RangeDefinition& R = *range;

  const auto ma_bars = static_cast<std::size_t>(as_count(cfg.h1_oi_ma_days)) * kBarsPerDay;
  auto bias = funding_bias_duration(s.funding, as_count(cfg.bias_flip_tolerance));

  // Prefix sums over carried-forward OI for the moving average.
  std::vector<double> prefix(s.size + 1, 0.0);
  for (std::size_t i = 0; i < s.size; ++i) prefix[i + 1] = prefix[i] + s.oi[i].value_or(0.0);

  std::optional<std::size_t> cond;
  bool baseline = false;
  for (std::size_t t = w.start; t <= w.end; ++t) {
    if (!s.first_oi_bar || !s.oi[t] || t + 1 < *s.first_oi_bar + ma_bars) continue;
    baseline = true;
    double ma = (prefix[t + 1] - prefix[t + 1 - ma_bars]) / static_cast<double>(ma_bars);
    if (bias[t] >= as_count(cfg.h1_bias_periods) && *s.oi[t] > ma) {
      cond = t;
      v.metrics["condition_bar"] = static_cast<double>(t);
      v.metrics["bias_duration"] = bias[t];
      v.metrics["oi_vs_moving_average"] = *s.oi[t] / ma - 1.0;
      break;
    }
  }
  if (!baseline) {
    v.notes.push_back("fewer than " + std::to_string(ma_bars) + " bars of open interest for the moving-average baseline");
    return v;
  }
  if (!cond) {
    v.notes.push_back("condition unmet: no biased funding run with open interest above its moving average");
    return v;
  }
  v.condition_met = true;
  const std::size_t c = *cond;

  // (1) declining realized volatility over the condition window
  std::vector<double> vol(s.volatility.begin() + static_cast<std::ptrdiff_t>(c),
                          s.volatility.begin() + static_cast<std::ptrdiff_t>(w.end) + 1);
  v.signals.push_back(make_signal("volatility_slope", relative_slope(vol), 0.0, Relation::lt));

  // (2) recent wick-to-body mean above the prior baseline
  auto recent_n = static_cast<std::size_t>(as_count(cfg.h1_wick_recent_bars));
  auto prior_n = static_cast<std::size_t>(as_count(cfg.h1_wick_prior_bars));
  std::optional<double> wick_delta;
  if (w.end + 1 >= recent_n + prior_n) {
    std::span<const Candle4H> all(C);
    auto recent = mean_wick_ratio(all.subspan(w.end + 1 - recent_n, recent_n), cfg.doji_tolerance);
    auto prior = mean_wick_ratio(all.subspan(w.end + 1 - recent_n - prior_n, prior_n), cfg.doji_tolerance);
    if (recent && prior) {
      wick_delta = *recent - *prior;
      v.metrics["wick_ratio_recent"] = *recent;
      v.metrics["wick_ratio_prior"] = *prior;
    }
  }
  v.signals.push_back(make_signal("wick_ratio_change", wick_delta, 0.0, Relation::gt));

  // (3) failed taps with open interest holding
  int taps = 0;
  std::optional<double> worst_drop;
  for (std::size_t t = c; t <= w.end; ++t) {
    bool touched = C[t].high >= R.upper || C[t].low <= R.lower;
    if (!touched || close_side(C[t], R) != 0) continue;
    ++taps;
    if (t > 0 && s.oi[t] && s.oi[t - 1] && *s.oi[t - 1] > 0.0) {
      double drop = (*s.oi[t - 1] - *s.oi[t]) / *s.oi[t - 1];
      worst_drop = worst_drop ? std::max(*worst_drop, drop) : drop;
    }
  }
  v.signals.push_back(make_signal("failed_boundary_taps", taps, 1.0, Relation::ge));
  v.signals.push_back(make_signal("tap_oi_drop", worst_drop, cfg.h1_tap_oi_drop, Relation::lt));

  // Falsification: consecutive closes beyond a boundary with volatility
  // above its level when the condition began.
  auto need = static_cast<std::size_t>(as_count(cfg.h1_breakout_closes));
  std::size_t run = 0;
  int side = 0;
  for (std::size_t t = c; t <= w.end; ++t) {
    int cs = close_side(C[t], R);
    run = (cs != 0 && cs == side) ? run + 1 : (cs != 0 ? 1 : 0);
    side = cs;
    if (need > 0 && run >= need) {
      v.metrics["breakout_bar"] = static_cast<double>(t);
      v.metrics["volatility_at_breakout"] = s.volatility[t];
      v.metrics["volatility_at_condition"] = s.volatility[c];
      if (s.volatility[t] > s.volatility[c]) {
        v.outcome = Outcome::falsified;
        v.notes.push_back("sustained expansion with rising volatility despite funding bias");
        return v;
      }
      break;
    }
  }

  // Signal groups: volatility, wick, taps (count and OI together).
  int groups = 0;
  groups += v.signals[0].met.value_or(false);
  groups += v.signals[1].met.value_or(false);
  groups += v.signals[2].met.value_or(false) && v.signals[3].met.value_or(false);
  v.metrics["signal_groups_met"] = groups;
  if (groups >= as_count(cfg.h1_signals_required)) {
    if (groups < 3) {
      // Relaxed mode: mark the unmet group optional so the record stays
      // self-consistent.
      for (auto& sig : v.signals)
        if (!sig.met.value_or(false)) sig.required = false;
    }
    v.outcome = Outcome::confirmed;
  } else {
    v.outcome = Outcome::inconclusive;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Expansion requires funding-structure alignment

HypothesisVerdict evaluate_h2(const Panel& panel, const BarSeries& s, const std::optional<RangeDefinition>& range,
                              Window w, const Config& cfg) {
  auto v = start(Hypothesis::h2, panel, range, w);
  if (!ready(v)) return v;
  const auto& C = panel.candles;
  const RangeDefinition& R = *range;

  std::optional<std::size_t> brk;
  for (std::size_t t = w.start; t <= w.end; ++t) {
    if (close_side(C[t], R) != 0) {
      brk = t;
      break;
    }
  }
  if (!brk) {
    v.notes.push_back("no breakout close in the window");
    return v;
  }
  const std::size_t b = *brk;
  const int side = close_side(C[b], R);
  const bool upside = side > 0;
  v.metrics["breakout_bar"] = static_cast<double>(b);
  v.metrics["breakout_direction"] = side;

  // Condition: funding neutral in at least one of the bars before the break.
  auto pre = static_cast<std::size_t>(as_count(cfg.h2_pre_break_periods));
  std::optional<double> min_abs;
  const Decimal neutral = Decimal::from_double(cfg.h2_neutral_rate);
  bool neutral_seen = false;
  for (std::size_t j = b >= pre ? b - pre : 0; j < b; ++j) {
    double a = s.funding[j].abs().to_double();
    min_abs = min_abs ? std::min(*min_abs, a) : a;
    neutral_seen = neutral_seen || s.funding[j].abs() < neutral;
  }
  v.metrics["pre_break_min_abs_funding"] = min_abs.value_or(0.0);
  if (!neutral_seen) {
    v.notes.push_back("condition unmet: funding not neutral before the break");
    return v;
  }
  v.condition_met = true;

  // Books at or before the close of the bar preceding the break.
  const Timestamp cutoff = b > 0 ? C[b - 1].close_time() : C[b].open_time;
  std::vector<std::size_t> prior_books;
  for (std::size_t k = 0; k < panel.books.size(); ++k)
    if (panel.books[k].time <= cutoff) prior_books.push_back(k);

  std::optional<double> shelf;
  if (!prior_books.empty()) {
    auto m = shelf_migration(panel.books[prior_books.back()], R, upside, cfg.h2_shelf_share);
    shelf = m.share;
    v.metrics["shelf_share_opposite_side"] = upside ? m.bid_share_below_lower : m.ask_share_above_upper;
  }
  v.signals.push_back(make_signal("shelf_migration_share", shelf, cfg.h2_shelf_share, Relation::gt));

  auto n_snap = static_cast<std::size_t>(as_count(cfg.h2_depth_snapshots));
  std::optional<double> depth_slope;
  if (prior_books.size() >= 3) {
    std::size_t from = prior_books.size() > n_snap ? prior_books.size() - n_snap : 0;
    std::vector<double> depth;
    for (std::size_t i = from; i < prior_books.size(); ++i) {
      auto d = depth_at_extremes(panel.books[prior_books[i]], R, cfg.extreme_zone);
      depth.push_back(upside ? d.upper_usd : d.lower_usd);
    }
    depth_slope = relative_slope(depth);
    v.metrics["boundary_depth_first"] = depth.front();
    v.metrics["boundary_depth_last"] = depth.back();
  }
  v.signals.push_back(make_signal("boundary_depth_slope", depth_slope, 0.0, Relation::lt));

  auto oi_bars = static_cast<std::size_t>(as_count(cfg.h2_oi_window_bars));
  std::vector<double> oi;
  std::vector<std::optional<double>> share;
  for (std::size_t j = b >= oi_bars ? b - oi_bars : 0; j <= b; ++j) {
    if (!s.oi[j]) continue;
    oi.push_back(*s.oi[j]);
    share.push_back(s.long_share[j]);
  }
  std::optional<double> mix, decline;
  if (oi.size() >= 2) {
    auto cls = classify_oi_event(oi, share, cfg.h2_oi_collapse, cfg.h2_oi_mix_shift);
    if (cls.long_share_shift) mix = std::fabs(*cls.long_share_shift);
    double worst = 0.0;
    for (double x : oi) worst = std::max(worst, (oi.front() - x) / oi.front());
    decline = worst;
    v.metrics["oi_change"] = cls.oi_change;
    v.notes.push_back(std::string("open interest event: ") + to_string(cls.event) + (cls.partial ? " (partial)" : ""));
  }
  v.signals.push_back(make_signal("oi_mix_shift", mix, cfg.h2_oi_mix_shift, Relation::ge));
  v.signals.push_back(make_signal("oi_max_decline", decline, cfg.h2_oi_collapse, Relation::le));

  // Validation: consecutive closes beyond the broken boundary after b.
  auto need = static_cast<std::size_t>(as_count(cfg.h2_sustained_closes));
  std::size_t sustained = 0;
  bool reverted = false;
  for (std::size_t j = b + 1; j < C.size() && sustained < need; ++j) {
    if (close_side(C[j], R) == side) {
      ++sustained;
    } else {
      reverted = true;
      break;
    }
  }
  v.metrics["sustained_closes"] = static_cast<double>(sustained);
  const bool held = sustained >= need;
  const bool aligned = required_met(v.signals);
  if (!held && !reverted) {
    v.outcome = Outcome::inconclusive;
    v.notes.push_back("breakout too close to the panel end to validate");
  } else if (aligned && held) {
    v.outcome = Outcome::confirmed;
  } else if (aligned && !held) {
    v.outcome = Outcome::falsified;
    v.notes.push_back("aligned breakout failed to hold");
  } else if (!aligned && held) {
    v.outcome = Outcome::falsified;
    v.notes.push_back("sustained expansion without structural alignment");
  } else {
    v.outcome = Outcome::inconclusive;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Funding as governor rather than catalyst

HypothesisVerdict evaluate_h3(const Panel& panel, const BarSeries& s, const std::optional<RangeDefinition>& range,
                              Window w, const Config& cfg) {
  auto v = start(Hypothesis::h3, panel, range, w);
  if (!ready(v)) return v;
  const auto& C = panel.candles;
  const RangeDefinition& R = *range;

  auto lookback = static_cast<std::size_t>(as_count(cfg.h3_spike_lookback));
  std::optional<std::size_t> spike;
  double best = 0.0;
  bool history = false;
  for (std::size_t t = w.start; t <= w.end; ++t) {
    auto z = funding_spike_z(s.funding, t, lookback, cfg.h3_spike_sigma_floor);
    if (!z) continue;
    history = true;
    if (std::fabs(*z) > cfg.h3_spike_sigma && std::fabs(*z) > best) {
      best = std::fabs(*z);
      spike = t;
    }
  }
  if (!history) {
    v.notes.push_back("fewer than " + std::to_string(lookback) + " funding periods before the window");
    return v;
  }
  if (!spike) {
    v.notes.push_back("condition unmet: no funding spike");
    return v;
  }
  const std::size_t k = *spike;
  v.metrics["spike_bar"] = static_cast<double>(k);
  v.metrics["spike_z"] = best;

  auto shift_closes = static_cast<std::size_t>(as_count(cfg.h3_shift_closes));
  if (structural_shift(std::span<const Candle4H>(C).subspan(k, w.end - k + 1), R, shift_closes)) {
    v.notes.push_back("condition unmet: structural shift after the spike");
    return v;
  }
  v.condition_met = true;

  const double mid = R.midpoint.to_double();
  const double tol = cfg.h3_reversion_sigma * s.volatility[k];
  v.metrics["volatility_at_spike"] = s.volatility[k];
  auto max_bars = static_cast<std::size_t>(as_count(cfg.h3_reversion_bars));
  std::optional<double> closest;
  std::optional<std::size_t> returned_at;
  std::size_t last = std::min(k + max_bars, C.size() - 1);
  for (std::size_t j = k + 1; j <= last; ++j) {
    double d = std::fabs(C[j].close.to_double() - mid) / mid;
    closest = closest ? std::min(*closest, d) : d;
    if (!returned_at && d <= tol) returned_at = j;
  }
  if (returned_at) v.metrics["bars_to_reversion"] = static_cast<double>(*returned_at - k);

  // Optional 1H burst: hourly volatility around the spike versus 4H.
  std::optional<double> burst;
  if (auto it = panel.annotations.series.find("close_1h"); it != panel.annotations.series.end()) {
    Timestamp lo = C[k].open_time - kBarSeconds, hi = C[k].close_time() + kBarSeconds;
    std::vector<double> px;
    for (const auto& tv : it->second)
      if (tv.time >= lo && tv.time <= hi && tv.value > 0.0) px.push_back(tv.value);
    if (px.size() >= 3 && s.volatility[k] > 0.0) {
      double mean = 0.0, m2 = 0.0;
      std::size_t n = 0;
      for (std::size_t i = 1; i < px.size(); ++i) {
        double r = std::log(px[i] / px[i - 1]);
        ++n;
        double d = r - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (r - mean);
      }
      double hourly = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0;
      burst = hourly * 2.0 / s.volatility[k];  // sqrt(4) scales hourly to 4H
    }
  }
  v.signals.push_back(make_signal("intrabar_volatility_burst", burst, 1.0, Relation::gt, false));

  int outside = 0;
  for (std::size_t t = k; t <= w.end; ++t) outside += close_side(C[t], R) != 0;
  v.signals.push_back(make_signal("closes_outside_corridor", outside, 0.0, Relation::eq));

  std::optional<double> basis_min;
  auto basis_bars = static_cast<std::size_t>(as_count(cfg.h3_basis_revert_bars));
  for (std::size_t j = k + 1; j <= std::min(k + basis_bars, C.size() - 1); ++j)
    if (s.basis[j]) basis_min = basis_min ? std::min(*basis_min, std::fabs(*s.basis[j])) : std::fabs(*s.basis[j]);
  if (s.basis[k]) v.metrics["basis_at_spike"] = *s.basis[k];
  v.signals.push_back(make_signal("basis_after_spike", basis_min, cfg.basis_dislocation, Relation::lt, basis_min.has_value()));

  v.signals.push_back(make_signal("distance_to_midpoint", closest, tol, Relation::le));

  if (returned_at) {
    v.outcome = required_met(v.signals) ? Outcome::confirmed : Outcome::inconclusive;
  } else if (k + max_bars < C.size()) {
    v.outcome = Outcome::falsified;
    v.notes.push_back("price did not return toward the midpoint after the spike");
  } else {
    v.outcome = Outcome::inconclusive;
    v.notes.push_back("spike too close to the panel end to judge reversion");
  }
  return v;
}

// ---------------------------------------------------------------------------
// Power-policed boundaries

HypothesisVerdict evaluate_h4(const Panel& panel, const BarSeries& s, const std::optional<RangeDefinition>& range,
                              Window w, const Config& cfg) {
  auto v = start(Hypothesis::h4, panel, range, w);
  if (!ready(v)) return v;
  const auto& C = panel.candles;
  const RangeDefinition& R = *range;

  const Timestamp t0 = C[w.start].open_time, t1 = C[w.end].close_time();
  std::vector<LiquidationEvent> events;
  for (const auto& e : panel.liquidations)
    if (e.time > t0 && e.time <= t1) events.push_back(e);
  if (events.empty()) {
    v.notes.push_back("no liquidation events in the window");
    return v;
  }
  auto cluster = boundary_cluster_share(events, R, cfg.h4_cluster_distance, cfg.h4_cluster_share);
  v.metrics["cluster_share"] = cluster.share;
  if (!cluster.clustered) {
    v.notes.push_back("condition unmet: liquidations not clustered at the boundaries");
    return v;
  }
  v.condition_met = true;

  auto recoil_bars = static_cast<std::size_t>(as_count(cfg.h4_recoil_bars));
  auto funding_bars = static_cast<std::size_t>(as_count(cfg.h4_funding_decline_bars));
  int taps = 0, recoils = 0, declines = 0, dips = 0, hits = 0;
  for (std::size_t t = w.start; t <= w.end; ++t) {
    Decimal up = C[t].high - R.upper;
    Decimal down = R.lower - C[t].low;
    if (up.sign() <= 0 && down.sign() <= 0) continue;
    ++taps;
    const bool upper = up > down;
    const double excursion = (upper ? up : down).to_double();
    const double extreme = (upper ? C[t].high : C[t].low).to_double();
    double retrace = 0.0;
    for (std::size_t j = t; j <= std::min(t + recoil_bars, C.size() - 1); ++j) {
      double back = upper ? extreme - C[j].close.to_double() : C[j].close.to_double() - extreme;
      retrace = std::max(retrace, back / excursion);
    }
    bool recoil = retrace > cfg.h4_recoil_fraction;

    bool decline = false;
    double f0 = s.funding[t].abs().to_double();
    if (f0 > 0.0 && t + 1 < C.size()) {
      double lowest = f0;
      for (std::size_t j = t + 1; j <= std::min(t + funding_bars, C.size() - 1); ++j)
        lowest = std::min(lowest, s.funding[j].abs().to_double());
      decline = (f0 - lowest) / f0 >= cfg.h4_funding_decline;
    }

    bool dip = t > 0 && s.oi[t] && s.oi[t - 1] && *s.oi[t] < *s.oi[t - 1];

    recoils += recoil;
    declines += decline;
    dips += dip;
    hits += recoil && decline && dip;
  }
  if (taps == 0) {
    v.notes.push_back("no boundary taps in the window");
    v.outcome = Outcome::not_evaluable;
    return v;
  }
  const double n = taps;
  v.metrics["taps"] = taps;
  v.metrics["tap_hits"] = hits;
  v.metrics["hit_rate"] = hits / n;
  v.signals.push_back(make_signal("recoil_hit_rate", recoils / n, cfg.h4_tap_majority, Relation::gt));
  v.signals.push_back(make_signal("funding_decline_hit_rate", declines / n, cfg.h4_tap_majority, Relation::gt));
  v.signals.push_back(make_signal("oi_dip_hit_rate", dips / n, cfg.h4_tap_majority, Relation::gt));
  v.notes.push_back("excursion measured from the boundary");

  if (required_met(v.signals)) v.outcome = Outcome::confirmed;
  else if (!v.signals[0].met.value_or(false)) v.outcome = Outcome::falsified;
  else v.outcome = Outcome::inconclusive;
  return v;
}

HypothesisVerdict evaluate(Hypothesis h, const Panel& panel, const BarSeries& s,
                           const std::optional<RangeDefinition>& range, Window w, const Config& cfg) {
  switch (h) {
    case Hypothesis::h1: return evaluate_h1(panel, s, range, w, cfg);
    case Hypothesis::h2: return evaluate_h2(panel, s, range, w, cfg);
    case Hypothesis::h3: return evaluate_h3(panel, s, range, w, cfg);
    case Hypothesis::h4: return evaluate_h4(panel, s, range, w, cfg);
  }
  return {};
}

HypothesisVerdict evaluate(Hypothesis h, const Panel& panel, Window w, const Config& cfg) {
  auto s = build_bar_series(panel, cfg);
  return evaluate(h, panel, s, range_before(panel, w, cfg), w, cfg);
}

}  // namespace rg
