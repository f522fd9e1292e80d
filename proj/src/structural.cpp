#include "rg/structural.hpp"

#include <algorithm>
#include <cmath>

#include "rg/error.hpp"

namespace rg {

std::vector<SwingPoint> map_swings(std::span<const Candle4H> candles, std::size_t k) {
  const std::size_t n = candles.size();
  if (n < 2 * k + 1)
    throw Error(ErrorKind::invalid_input, "map_swings needs at least " + std::to_string(2 * k + 1) + " candles, got " +
                                              std::to_string(n));
  std::vector<SwingPoint> out;
  for (std::size_t i = k; i + k < n; ++i) {
    bool is_high = true;
    bool is_low = true;
    for (std::size_t j = i - k; j < i; ++j) {
      is_high = is_high && candles[i].high > candles[j].high;
      is_low = is_low && candles[i].low < candles[j].low;
    }
    for (std::size_t j = i + 1; j <= i + k; ++j) {
      is_high = is_high && candles[i].high >= candles[j].high;
      is_low = is_low && candles[i].low <= candles[j].low;
    }
    if (is_high) out.push_back({i, SwingKind::high, candles[i].high});
    if (is_low) out.push_back({i, SwingKind::low, candles[i].low});
  }
  return out;
}

std::optional<RangeDefinition> derive_range(std::span<const Candle4H> candles, std::span<const SwingPoint> swings,
                                            const Config& cfg) {
  if (candles.empty()) return std::nullopt;
  auto window = static_cast<std::size_t>(as_count(cfg.range_window));
  std::size_t first = candles.size() > window ? candles.size() - window : 0;

  std::optional<Decimal> upper, lower;
  for (const auto& s : swings) {
    if (s.index < first || s.index >= candles.size()) continue;
    if (s.kind == SwingKind::high) upper = upper ? std::max(*upper, s.price) : s.price;
    else lower = lower ? std::min(*lower, s.price) : s.price;
  }
  if (!upper || !lower || !(*lower < *upper)) return std::nullopt;

  // A touch is a bar whose extreme comes within the tolerance of the
  // boundary, measured relative to the boundary itself.
  const bool closes = cfg.range_touch_closes >= 0.5;
  const Decimal tol = Decimal::from_double(cfg.range_touch_tolerance);
  const Decimal upper_zone = *upper - *upper * tol;
  const Decimal lower_zone = *lower + *lower * tol;
  int touch_upper = 0, touch_lower = 0;
  for (std::size_t i = first; i < candles.size(); ++i) {
    const Candle4H& c = candles[i];
    if ((closes ? c.close : c.high) >= upper_zone) ++touch_upper;
    if ((closes ? c.close : c.low) <= lower_zone) ++touch_lower;
  }
  auto need = as_count(cfg.range_min_touches);
  if (touch_upper < need || touch_lower < need) return std::nullopt;
  if (!(upper->to_double() / lower->to_double() - 1.0 > cfg.range_min_width)) return std::nullopt;
  return make_range(*lower, *upper, candles.back().close_time(), touch_lower, touch_upper, cfg.range_min_width);
}

std::optional<RangeDefinition> detect_range(std::span<const Candle4H> candles, const Config& cfg) {
  auto window = static_cast<std::size_t>(as_count(cfg.range_window));
  auto k = static_cast<std::size_t>(as_count(cfg.swing_lookback));
  auto tail = candles.size() > window ? candles.subspan(candles.size() - window) : candles;
  if (tail.size() < 2 * k + 1) return std::nullopt;
  auto swings = map_swings(tail, k);
  return derive_range(tail, swings, cfg);
}

namespace {

/// Welford over log returns in [from, to) of the return index space, where
/// return r_i = log(c_i / c_{i-1}) for i >= 1.
double log_return(std::span<const Candle4H> c, std::size_t i) {
  return std::log(c[i].close.to_double() / c[i - 1].close.to_double());
}

}  // namespace

double realized_volatility(std::span<const Candle4H> candles) {
  if (candles.size() < 3) return 0.0;
  double mean = 0.0, m2 = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 1; i < candles.size(); ++i) {
    double r = log_return(candles, i);
    ++n;
    double d = r - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (r - mean);
  }
  return std::sqrt(std::max(m2, 0.0) / static_cast<double>(n - 1));
}

std::vector<double> rolling_volatility(std::span<const Candle4H> candles, std::size_t window) {
  std::vector<double> out(candles.size(), 0.0);
  for (std::size_t t = 0; t < candles.size(); ++t) {
    std::size_t from = t >= window ? t - window : 0;  // candle index where the window starts
    out[t] = realized_volatility(candles.subspan(from, t - from + 1));
  }
  return out;
}

std::optional<WickRatios> wick_to_body(const Candle4H& c, double doji_tolerance) {
  Decimal body = (c.close - c.open).abs();
  if (body.to_double() < doji_tolerance * c.open.to_double() || body.is_zero()) return std::nullopt;
  Decimal top = std::max(c.open, c.close);
  Decimal bottom = std::min(c.open, c.close);
  double b = body.to_double();
  return WickRatios{(c.high - top).to_double() / b * 100.0, (bottom - c.low).to_double() / b * 100.0};
}

std::optional<double> mean_wick_ratio(std::span<const Candle4H> candles, double doji_tolerance) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& c : candles) {
    if (auto w = wick_to_body(c, doji_tolerance)) {
      sum += w->upper_pct + w->lower_pct;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::optional<double> mean_upper_wick_ratio(std::span<const Candle4H> candles, double doji_tolerance) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& c : candles) {
    if (auto w = wick_to_body(c, doji_tolerance)) {
      sum += w->upper_pct;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

double VolumeProfile::total() const {
  double s = 0.0;
  for (const auto& b : bins) s += b.volume;
  return s;
}

VolumeProfile volume_nodes(std::span<const Candle4H> candles, double bin_width_fraction) {
  VolumeProfile p;
  if (candles.empty()) return p;
  std::vector<double> closes;
  double lo = candles.front().low.to_double();
  double hi = candles.front().high.to_double();
  for (const auto& c : candles) {
    closes.push_back(c.close.to_double());
    lo = std::min(lo, c.low.to_double());
    hi = std::max(hi, c.high.to_double());
  }
  std::sort(closes.begin(), closes.end());
  std::size_t m = closes.size();
  double median = m % 2 ? closes[m / 2] : (closes[m / 2 - 1] + closes[m / 2]) / 2.0;
  const double w = bin_width_fraction * median;
  p.bin_width = w;
  auto bin_of = [&](double x) {
    auto k = static_cast<long long>(std::floor((x - lo) / w));
    return static_cast<std::size_t>(std::max(0LL, k));
  };
  std::size_t nbins = bin_of(hi) + 1;
  p.bins.resize(nbins);
  for (std::size_t k = 0; k < nbins; ++k) p.bins[k].lower_edge = lo + static_cast<double>(k) * w;

  std::vector<double> share;
  for (const auto& c : candles) {
    double l = c.low.to_double();
    double h = c.high.to_double();
    std::size_t kl = std::min(bin_of(l), nbins - 1);
    std::size_t kh = std::min(bin_of(h), nbins - 1);
    if (!(h > l) || kl == kh) {
      p.bins[kl].volume += c.volume;
      continue;
    }
    share.assign(kh - kl + 1, 0.0);
    double sum = 0.0;
    for (std::size_t k = kl; k <= kh; ++k) {
      double a = std::max(l, lo + static_cast<double>(k) * w);
      double b = std::min(h, lo + static_cast<double>(k + 1) * w);
      share[k - kl] = std::max(0.0, b - a);
      sum += share[k - kl];
    }
    // Normalize by the summed overlaps so each bar's volume is conserved
    // regardless of floating-point edge placement.
    for (std::size_t k = kl; k <= kh; ++k) p.bins[k].volume += c.volume * share[k - kl] / sum;
  }
  return p;
}

std::vector<AbsorptionEvent> absorption_footprints(std::span<const ExecutedOrder> orders, double threshold_usd) {
  std::vector<AbsorptionEvent> out;
  for (const auto& o : orders) {
    double usd = o.price.to_double() * o.size;
    if (usd >= threshold_usd) out.push_back({o.time, usd, false});
  }
  return out;
}

std::vector<AbsorptionEvent> absorption_footprints(std::span<const Candle4H> candles, double threshold_usd) {
  std::vector<AbsorptionEvent> out;
  for (const auto& c : candles) {
    double typical = (c.high.to_double() + c.low.to_double() + c.close.to_double()) / 3.0;
    double usd = c.volume * typical;
    if (usd >= threshold_usd) out.push_back({c.open_time, usd, true});
  }
  return out;
}

std::size_t range_persistence(std::span<const Candle4H> candles, const RangeDefinition& range) {
  std::size_t n = 0;
  for (auto it = candles.rbegin(); it != candles.rend(); ++it) {
    if (it->close < range.lower || it->close > range.upper) break;
    ++n;
  }
  return n;
}

bool structural_shift(std::span<const Candle4H> candles, const RangeDefinition& range, std::size_t closes_required) {
  std::size_t run = 0;
  for (const auto& c : candles) {
    bool outside = c.close < range.lower || c.close > range.upper;
    run = outside ? run + 1 : 0;
    if (closes_required > 0 && run >= closes_required) return true;
  }
  return false;
}

double ols_slope(std::span<const double> y) {
  const std::size_t n = y.size();
  if (n < 2) return 0.0;
  double xm = (static_cast<double>(n) - 1.0) / 2.0;
  double ym = 0.0;
  for (double v : y) ym += v;
  ym /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = static_cast<double>(i) - xm;
    sxy += dx * (y[i] - ym);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace rg
