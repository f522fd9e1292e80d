#include "rg/quality.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace rg {

namespace {

std::string at(std::string_view series, Timestamp t) { return std::string(series) + "@" + format_utc(t); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  if (n == 0) return 0.0;
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

/// Distance in seconds to the nearest grid point and that grid point.
std::pair<Timestamp, Timestamp> grid_offset(Timestamp t, Timestamp origin, Timestamp step) {
  Timestamp r = (t - origin) % step;
  if (r < 0) r += step;
  if (r <= step - r) return {r, t - r};
  return {step - r, t + (step - r)};
}

}  // namespace

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::reject: return "reject";
    case Severity::flag: return "flag";
    case Severity::interpolated: return "interpolated";
    case Severity::info: return "info";
  }
  return "flag";
}

bool QualityReport::pass() const { return count(Severity::reject) == 0; }

std::size_t QualityReport::count(Severity s) const {
  return static_cast<std::size_t>(
      std::count_if(flags.begin(), flags.end(), [s](const QualityFlag& f) { return f.severity == s; }));
}

void QualityReport::add(std::vector<QualityFlag> more) {
  ++checks_run;
  for (auto& f : more) flags.push_back(std::move(f));
}

void QualityReport::finalize() { std::stable_sort(flags.begin(), flags.end()); }

std::vector<QualityFlag> check_timestamps(std::span<const Timestamp> times, Timestamp grid_origin, Timestamp grid_step,
                                          std::string_view series, double tolerance_s) {
  std::vector<QualityFlag> out;
  for (Timestamp t : times) {
    auto [off, nearest] = grid_offset(t, grid_origin, grid_step);
    if (static_cast<double>(off) > tolerance_s) {
      out.push_back({"timestamp_accuracy", at(series, t), Severity::flag,
                     "off grid by " + std::to_string(off) + " s; resample to " + format_utc(nearest)});
    }
  }
  return out;
}

std::vector<QualityFlag> check_price_consistency(std::span<const CrossExchangeBar> bars, const Config& cfg) {
  std::vector<QualityFlag> out;
  for (const auto& bar : bars) {
    if (bar.closes.size() < 3) {
      out.push_back({"price_consistency", at("candles", bar.time), Severity::info,
                     "skipped: " + std::to_string(bar.closes.size()) + " sources (need 3)"});
      continue;
    }
    std::vector<double> v;
    for (const auto& [ex, c] : bar.closes) v.push_back(c);
    double med = median_of(v);
    std::vector<double> dev;
    for (double c : v) dev.push_back(std::fabs(c - med));
    double mad = median_of(dev) * cfg.mad_scale;
    for (const auto& [ex, c] : bar.closes) {
      double d = std::fabs(c - med);
      bool outlier = mad > 0.0 ? d > cfg.price_outlier_sigma * mad : d > cfg.mad_zero_tolerance * std::fabs(med);
      if (outlier) {
        out.push_back({"price_consistency", at("candles", bar.time) + "/" + ex, Severity::flag,
                       "close " + fmt(c) + " vs median " + fmt(med) + (mad > 0.0 ? " (scaled MAD " + fmt(mad) + ")" : " (MAD 0)")});
      }
    }
  }
  return out;
}

std::vector<QualityFlag> check_volume(std::span<const DailyVolumes> days, const Config& cfg) {
  std::vector<QualityFlag> out;
  for (const auto& d : days) {
    if (d.volumes.empty()) continue;
    double mean = 0.0;
    for (const auto& [ex, v] : d.volumes) mean += v;
    mean /= static_cast<double>(d.volumes.size());
    if (!(mean > 0.0)) continue;
    for (const auto& [ex, v] : d.volumes) {
      double rel = std::fabs(v - mean) / mean;
      if (rel > cfg.volume_deviation) {
        out.push_back({"volume_validation", at("volume", d.day) + "/" + ex, Severity::flag,
                       "deviation " + fmt(rel) + " from cross-exchange mean; exclude suspect exchange data"});
      }
    }
  }
  return out;
}

std::vector<QualityFlag> check_funding_bounds(const Panel& panel, const Config& cfg) {
  std::vector<QualityFlag> out;
  for (const auto& f : panel.funding) {
    if (!(std::fabs(f.rate_8h.to_double()) < cfg.funding_hard_bound)) {
      out.push_back({"funding_bounds", at("funding", f.settle_time) + "/" + f.exchange_id, Severity::reject,
                     "impossible rate_8h " + f.rate_8h.to_string()});
    }
  }
  return out;
}

std::vector<QualityFlag> check_oi_sanity(const Panel& panel, const Config& cfg) {
  auto it = panel.annotations.series.find("trade_flow_usd");
  if (it == panel.annotations.series.end()) {
    return {{"open_interest_sanity", "oi", Severity::info, "not evaluated: no trade flow data"}};
  }
  // Last OI snapshot per UTC day, liquidated notional per day.
  std::map<Timestamp, double> oi_by_day;
  for (const auto& r : panel.oi) oi_by_day[floor_to_day(r.time)] = r.oi_usd;
  std::map<Timestamp, double> liq_by_day;
  for (const auto& e : panel.liquidations) liq_by_day[floor_to_day(e.time)] += e.size_usd;

  std::vector<QualityFlag> out;
  for (const auto& flow : it->second) {
    Timestamp day = floor_to_day(flow.time);
    auto cur = oi_by_day.find(day);
    auto prev = oi_by_day.find(day - kDaySeconds);
    if (cur == oi_by_day.end() || prev == oi_by_day.end()) continue;
    double delta = cur->second - prev->second;
    double liq = liq_by_day.count(day) ? liq_by_day[day] : 0.0;
    double expected = flow.value - liq;
    double denom = std::max(std::fabs(expected), 1e-9 * std::max(prev->second, 1.0));
    double rel = std::fabs(delta - expected) / denom;
    if (rel > cfg.oi_discrepancy) {
      out.push_back({"open_interest_sanity", at("oi", day), Severity::flag,
                     "OI change " + fmt(delta) + " vs flow - liquidations " + fmt(expected) + "; investigate"});
    }
  }
  return out;
}

std::vector<QualityFlag> check_book_integrity(const Panel& panel, const Config& cfg) {
  std::vector<QualityFlag> out;
  auto levels = static_cast<std::size_t>(as_count(cfg.min_book_levels));
  for (const auto& b : panel.books) {
    auto viol = validate_record(b, levels);
    if (!viol.empty()) {
      out.push_back({"order_book_integrity", at("books", b.time), Severity::flag, "excluded: " + viol.front().rule});
      continue;
    }
    double mid = b.mid();
    double spread = (b.best_ask() - b.best_bid()).to_double() / mid;
    if (spread > cfg.max_spread) {
      out.push_back({"order_book_integrity", at("books", b.time), Severity::flag, "excluded: spread " + fmt(spread)});
    }
  }
  return out;
}

std::vector<QualityFlag> check_wash_trading(std::span<const Candle4H> candles, const Config& cfg) {
  std::vector<QualityFlag> out;
  auto w = static_cast<std::size_t>(as_count(cfg.wash_median_bars));
  for (std::size_t i = w; i < candles.size(); ++i) {
    std::vector<double> prior;
    for (std::size_t j = i - w; j < i; ++j) prior.push_back(candles[j].volume);
    double med = median_of(std::move(prior));
    const auto& c = candles[i];
    double body = (c.close - c.open).abs().to_double() / c.open.to_double();
    if (med > 0.0 && c.volume > cfg.wash_volume_multiple * med && body < cfg.wash_body_max) {
      out.push_back({"wash_trading", at("candles", c.open_time), Severity::flag,
                     "volume " + fmt(c.volume / med) + "x rolling median with flat body"});
    }
  }
  return out;
}

std::vector<QualityFlag> check_price_spikes(std::span<const Candle4H> candles, const Config& cfg) {
  std::vector<QualityFlag> out;
  auto w = static_cast<std::size_t>(as_count(cfg.price_spike_bars));
  if (w == 0) return out;
  for (std::size_t i = w; i < candles.size(); ++i) {
    double mean = 0.0;
    for (std::size_t j = i - w; j < i; ++j) mean += candles[j].close.to_double();
    mean /= static_cast<double>(w);
    double rel = std::fabs(candles[i].close.to_double() - mean) / mean;
    if (rel > cfg.price_spike) {
      out.push_back({"price_spike", at("candles", candles[i].open_time), Severity::flag,
                     "close deviates " + fmt(rel) + " from recent average; verify across sources"});
    }
  }
  return out;
}

GapFillResult fill_gaps(std::span<const Candle4H> candles, const Config& cfg) {
  GapFillResult r;
  const auto max_fill = static_cast<Timestamp>(as_count(cfg.max_fill_gap));
  for (std::size_t i = 0; i < candles.size(); ++i) {
    if (i > 0) {
      const Candle4H& prev = candles[i - 1];
      const Candle4H& next = candles[i];
      Timestamp diff = next.open_time - prev.open_time;
      if (diff > kBarSeconds && diff % kBarSeconds == 0) {
        Timestamp missing = diff / kBarSeconds - 1;
        if (missing <= max_fill) {
          for (Timestamp k = 1; k <= missing; ++k) {
            Candle4H f;
            f.open_time = prev.open_time + k * kBarSeconds;
            // Linear interpolation on the raw fixed-point close.
            int128_t span = next.close.raw() - prev.close.raw();
            int128_t num = span * k;
            int128_t den = missing + 1;
            int128_t q = num / den;
            int128_t rem = num % den;
            if (2 * (rem < 0 ? -rem : rem) >= den) q += num < 0 ? -1 : 1;
            f.open = f.high = f.low = f.close = Decimal::from_raw(prev.close.raw() + q);
            f.volume = 0.0;
            f.exchange_count = prev.exchange_count;
            r.candles.push_back(f);
            r.flags.push_back({"missing_data", at("candles", f.open_time), Severity::interpolated,
                               "single-bar gap filled by linear interpolation"});
          }
        } else {
          r.flags.push_back({"missing_data", at("candles", prev.open_time + kBarSeconds), Severity::reject,
                             "gap of " + std::to_string(missing) + " bars left open for review"});
        }
      }
    }
    r.candles.push_back(candles[i]);
  }
  return r;
}

QualityResult run_quality_pipeline(const Panel& input, const Config& cfg) {
  QualityResult res;
  Panel& p = res.panel;
  p = input;
  QualityReport& rep = res.report;

  // --- repairs -------------------------------------------------------------
  // Candle schema problems cannot be repaired; everything else downstream
  // still runs so the analyst sees the full picture.
  {
    std::vector<QualityFlag> f;
    for (const auto& c : p.candles) {
      for (const auto& v : validate_record(c))
        f.push_back({"candle_schema", at("candles", c.open_time), Severity::reject, v.field + ": " + v.rule});
    }
    for (std::size_t i = 1; i < p.candles.size(); ++i) {
      Timestamp d = p.candles[i].open_time - p.candles[i - 1].open_time;
      if (d <= 0 || d % kBarSeconds != 0)
        f.push_back({"candle_schema", at("candles", p.candles[i].open_time), Severity::reject,
                     "candles out of order or off the 4h spacing"});
    }
    rep.add(std::move(f));
  }

  auto gaps = fill_gaps(p.candles, cfg);
  p.candles = std::move(gaps.candles);
  rep.add(std::move(gaps.flags));

  // Auxiliary series: snap to the reference grid (4h for funding and OI,
  // hourly for books). Liquidations are event-stamped and not gridded.
  const auto tol = cfg.timestamp_tolerance;
  auto snap_series = [&](auto& series, auto time_of, Timestamp step, std::string_view name) {
    std::vector<Timestamp> times;
    for (auto& r : series) times.push_back(time_of(r));
    auto flags = check_timestamps(times, 0, step, name, tol);
    for (auto& r : series) {
      auto [off, nearest] = grid_offset(time_of(r), 0, step);
      if (static_cast<double>(off) > tol) time_of(r) = nearest;
    }
    rep.add(std::move(flags));
  };
  snap_series(p.funding, [](auto& r) -> Timestamp& { return r.settle_time; }, kBarSeconds, "funding");
  snap_series(p.oi, [](auto& r) -> Timestamp& { return r.time; }, kBarSeconds, "oi");
  snap_series(p.books, [](auto& r) -> Timestamp& { return r.time; }, 3600, "books");

  {
    auto flags = check_funding_bounds(p, cfg);
    std::vector<FundingRecord> kept;
    std::vector<QualityFlag> extra;
    for (const auto& f : p.funding) {
      auto v = validate_record(f);
      bool bound = !(std::fabs(f.rate_8h.to_double()) < cfg.funding_hard_bound);
      if (!bound && v.empty()) {
        kept.push_back(f);
      } else if (!bound) {
        extra.push_back({"funding_bounds", at("funding", f.settle_time) + "/" + f.exchange_id, Severity::reject,
                         v.front().field + ": " + v.front().rule});
      }
    }
    p.funding = std::move(kept);
    for (auto& e : extra) flags.push_back(std::move(e));
    rep.add(std::move(flags));
  }

  {
    auto flags = check_book_integrity(p, cfg);
    std::vector<BookSnapshot> kept;
    auto levels = static_cast<std::size_t>(as_count(cfg.min_book_levels));
    for (const auto& b : p.books) {
      if (!validate_record(b, levels).empty()) continue;
      if ((b.best_ask() - b.best_bid()).to_double() / b.mid() > cfg.max_spread) continue;
      kept.push_back(b);
    }
    p.books = std::move(kept);
    rep.add(std::move(flags));
  }

  {
    std::vector<QualityFlag> f;
    std::vector<OpenInterestRecord> oi;
    for (const auto& r : p.oi) {
      auto v = validate_record(r);
      if (v.empty()) oi.push_back(r);
      else f.push_back({"open_interest_schema", at("oi", r.time), Severity::flag, "excluded: " + v.front().rule});
    }
    p.oi = std::move(oi);
    std::vector<LiquidationEvent> liq;
    for (const auto& e : p.liquidations) {
      auto v = validate_record(e);
      if (v.empty()) liq.push_back(e);
      else f.push_back({"liquidation_schema", at("liquidations", e.time), Severity::flag, "excluded: " + v.front().rule});
    }
    p.liquidations = std::move(liq);
    rep.add(std::move(f));
  }

  // Records outside the candle span cannot be attributed to a bar.
  if (!p.candles.empty()) {
    std::vector<QualityFlag> f;
    Timestamp lo = p.start_time(), hi = p.end_time();
    auto trim = [&](auto& series, auto time_of, std::string_view name) {
      std::erase_if(series, [&](const auto& r) {
        Timestamp t = time_of(r);
        bool out = t < lo || t > hi;
        if (out) f.push_back({"series_span", at(name, t), Severity::flag, "excluded: outside candle span"});
        return out;
      });
    };
    trim(p.funding, [](const auto& r) { return r.settle_time; }, "funding");
    trim(p.oi, [](const auto& r) { return r.time; }, "oi");
    trim(p.books, [](const auto& r) { return r.time; }, "books");
    trim(p.liquidations, [](const auto& r) { return r.time; }, "liquidations");
    rep.add(std::move(f));
  }

  // --- detection on the repaired data --------------------------------------
  rep.add(check_oi_sanity(p, cfg));
  rep.add(check_wash_trading(p.candles, cfg));
  rep.add(check_price_spikes(p.candles, cfg));

  rep.finalize();
  return res;
}

}  // namespace rg
