#pragma once

// Brute-force reference implementations and random instance generators.
// Each oracle is written from the definition, deliberately naive (direct
// sums, full scans, no shared helpers with the library) so that agreement
// with the library is evidence rather than tautology.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rg/ingestion.hpp"
#include "rg/model.hpp"
#include "rg/structural.hpp"

namespace oracle {

using rg::BookLevel;
using rg::BookSnapshot;
using rg::Candle4H;
using rg::Decimal;
using rg::LiquidationEvent;
using rg::RawTick;
using rg::Timestamp;

/// Relative closeness with an absolute floor for values near zero.
inline bool close_rel(double a, double b, double rel = 1e-9, double abs_floor = 1e-12) {
  if (a == b) return true;
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  return std::fabs(a - b) <= std::max(rel * std::max(std::fabs(a), std::fabs(b)), abs_floor);
}

// ---------------------------------------------------------------------------
// Random generators (std::mt19937_64 engine output is fully specified, and
// only the raw engine is used so instances are identical across toolchains)

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(eng_() >> 11) * 0x1.0p-53);
  }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {  // inclusive
    return lo + static_cast<std::int64_t>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  bool chance(double p) { return uniform(0.0, 1.0) < p; }
  /// Decimal with `digits` fractional digits.
  Decimal decimal(double lo, double hi, int digits = 2) {
    double scale = std::pow(10.0, digits);
    auto v = static_cast<std::int64_t>(std::llround(uniform(lo, hi) * scale));
    return Decimal::from_raw(static_cast<rg::int128_t>(v) * (Decimal::kScale / static_cast<std::int64_t>(scale)));
  }

 private:
  std::mt19937_64 eng_;
};

inline constexpr Timestamp kOrigin = 1704067200;  // 2024-01-01T00:00:00Z

/// Valid contiguous 4H candles following a random walk.
inline std::vector<Candle4H> random_candles(Gen& g, std::size_t n, double start = 30000.0, double vol = 0.01) {
  std::vector<Candle4H> out;
  double px = start;
  for (std::size_t i = 0; i < n; ++i) {
    Candle4H c;
    c.open_time = kOrigin + static_cast<Timestamp>(i) * rg::kBarSeconds;
    c.open = Decimal::from_double(std::round(px * 100) / 100);
    px *= std::exp(vol * g.uniform(-1.7, 1.7));
    c.close = Decimal::from_double(std::round(px * 100) / 100);
    Decimal top = std::max(c.open, c.close), bottom = std::min(c.open, c.close);
    c.high = top + g.decimal(0.0, px * vol * 0.8);
    c.low = bottom - g.decimal(0.0, px * vol * 0.8);
    c.volume = std::round(g.uniform(100.0, 2000.0) * 1e3) / 1e3;
    out.push_back(c);
  }
  return out;
}

inline std::vector<LiquidationEvent> random_liquidations(Gen& g, std::size_t n, double lo = 28000.0,
                                                         double hi = 32000.0) {
  std::vector<LiquidationEvent> out;
  for (std::size_t i = 0; i < n; ++i) {
    LiquidationEvent e;
    e.time = kOrigin + static_cast<Timestamp>(i) * 60;
    e.price = g.decimal(lo, hi);
    e.size_usd = std::round(g.uniform(1e3, 5e5));
    e.side = g.chance(0.5) ? rg::LiquidationSide::long_liquidated : rg::LiquidationSide::short_liquidated;
    out.push_back(e);
  }
  return out;
}

/// A valid book around `mid` with integer level sizes.
inline BookSnapshot random_book(Gen& g, std::size_t levels, double mid = 30000.0, double tick = 0.5) {
  BookSnapshot b;
  b.time = kOrigin;
  Decimal m = Decimal::from_double(mid);
  Decimal t = Decimal::from_double(tick);
  Decimal bid = m - t * g.integer(1, 4), ask = m + t * g.integer(1, 4);
  for (std::size_t i = 0; i < levels; ++i) {
    b.bids.push_back({bid, static_cast<double>(g.integer(1, 40))});
    b.asks.push_back({ask, static_cast<double>(g.integer(1, 40))});
    bid -= t * g.integer(1, 6);
    ask += t * g.integer(1, 6);
  }
  return b;
}

// ---------------------------------------------------------------------------
// align_4h: for every distinct bucket, scan the whole tick list.

inline std::vector<Candle4H> align_4h(const std::vector<RawTick>& ticks) {
  std::vector<Timestamp> buckets;
  for (const auto& t : ticks) {
    Timestamp b = t.time - ((t.time % rg::kBarSeconds) + rg::kBarSeconds) % rg::kBarSeconds;
    if (std::find(buckets.begin(), buckets.end(), b) == buckets.end()) buckets.push_back(b);
  }
  std::sort(buckets.begin(), buckets.end());
  std::vector<Candle4H> out;
  for (Timestamp b : buckets) {
    Candle4H c;
    c.open_time = b;
    bool first = true;
    for (const auto& t : ticks) {
      if (t.time < b || t.time >= b + rg::kBarSeconds) continue;
      if (first) {
        c.open = c.high = c.low = t.price;
        c.volume = 0.0;
        first = false;
      }
      c.high = std::max(c.high, t.price);
      c.low = std::min(c.low, t.price);
      c.close = t.price;
      c.volume += t.volume;
    }
    out.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// vwap_merge: per-bar weighted mean of each price field.

struct MergedBar {
  double open, high, low, close, volume;
};

inline std::vector<MergedBar> vwap_merge(const std::vector<std::vector<Candle4H>>& ex) {
  std::vector<MergedBar> out;
  for (std::size_t i = 0; i < ex.front().size(); ++i) {
    long double w = 0, o = 0, h = 0, l = 0, c = 0;
    for (const auto& e : ex) w += e[i].volume;
    for (const auto& e : ex) {
      long double wi = w > 0 ? e[i].volume / w : 1.0L / ex.size();
      o += wi * e[i].open.to_double();
      h += wi * e[i].high.to_double();
      l += wi * e[i].low.to_double();
      c += wi * e[i].close.to_double();
    }
    out.push_back({double(o), double(h), double(l), double(c), double(w)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Swings: O(n k) window scan straight from the definition.

struct Swing {
  std::size_t index;
  bool high;
  bool operator==(const Swing&) const = default;
};

inline std::vector<Swing> swings(const std::vector<Candle4H>& c, std::size_t k) {
  std::vector<Swing> out;
  const std::size_t n = c.size();
  for (std::size_t i = k; i + k < n; ++i) {
    bool hi = true, lo = true;
    for (std::size_t j = i - k; j < i; ++j) {
      hi = hi && c[i].high > c[j].high;
      lo = lo && c[i].low < c[j].low;
    }
    for (std::size_t j = i + 1; j <= i + k; ++j) {
      hi = hi && c[i].high >= c[j].high;
      lo = lo && c[i].low <= c[j].low;
    }
    if (hi) out.push_back({i, true});
    if (lo) out.push_back({i, false});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Volume profile: every bar against every bin, by interval overlap.

inline std::vector<double> volume_nodes(const std::vector<Candle4H>& c, double fraction) {
  std::vector<double> closes;
  double lo = 1e300, hi = -1e300;
  for (const auto& x : c) {
    closes.push_back(x.close.to_double());
    lo = std::min(lo, x.low.to_double());
    hi = std::max(hi, x.high.to_double());
  }
  std::sort(closes.begin(), closes.end());
  double med = closes.size() % 2 ? closes[closes.size() / 2]
                                 : 0.5 * (closes[closes.size() / 2 - 1] + closes[closes.size() / 2]);
  double w = fraction * med;
  auto nbins = static_cast<std::size_t>(std::floor((hi - lo) / w)) + 1;
  std::vector<double> bins(nbins, 0.0);
  for (const auto& x : c) {
    double l = x.low.to_double(), h = x.high.to_double();
    if (h == l) {
      bins[std::min(nbins - 1, static_cast<std::size_t>(std::floor((l - lo) / w)))] += x.volume;
      continue;
    }
    for (std::size_t k = 0; k < nbins; ++k) {
      double a = lo + w * double(k), b = (k + 1 == nbins) ? std::max(h, lo + w * double(k + 1)) : lo + w * double(k + 1);
      double ov = std::max(0.0, std::min(h, b) - std::max(l, a));
      bins[k] += x.volume * ov / (h - l);
    }
  }
  return bins;
}

// ---------------------------------------------------------------------------
// Gaussian KDE by direct summation.

inline double kde_at(const std::vector<LiquidationEvent>& ev, double x, double fraction = 0.01) {
  long double tot = 0, wp = 0;
  for (const auto& e : ev) {
    tot += e.size_usd;
    wp += e.size_usd * e.price.to_double();
  }
  const long double h = fraction * wp / tot;
  const long double pi = 3.141592653589793238462643383279502884L;
  long double s = 0;
  for (const auto& e : ev) {
    long double u = (x - e.price.to_double()) / h;
    s += e.size_usd * std::exp(-0.5L * u * u) / (h * std::sqrt(2.0L * pi));
  }
  return double(s / tot);
}

/// Integral of the oracle density by a fine trapezoid over +-8 bandwidths.
inline double kde_integral(const std::vector<LiquidationEvent>& ev, double fraction = 0.01, int steps = 20000) {
  double lo = 1e300, hi = -1e300, tot = 0, wp = 0;
  for (const auto& e : ev) {
    lo = std::min(lo, e.price.to_double());
    hi = std::max(hi, e.price.to_double());
    tot += e.size_usd;
    wp += e.size_usd * e.price.to_double();
  }
  double h = fraction * wp / tot;
  lo -= 8 * h;
  hi += 8 * h;
  double dx = (hi - lo) / steps, s = 0;
  for (int i = 0; i <= steps; ++i) s += (i == 0 || i == steps ? 0.5 : 1.0) * kde_at(ev, lo + dx * i, fraction);
  return s * dx;
}

// ---------------------------------------------------------------------------
// Gini as the mean absolute difference over twice the mean.

inline double gini(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double sum = std::accumulate(x.begin(), x.end(), 0.0);
  if (x.empty() || sum == 0.0) return 0.0;
  long double mad = 0;
  for (double a : x)
    for (double b : x) mad += std::fabs(a - b);
  return double(mad / (2.0L * n * n * (sum / n)));
}

// ---------------------------------------------------------------------------
// Depth percentiles with integer sizes: exact prefix sums, exact compares.

inline Decimal depth_percentile(const std::vector<BookLevel>& side, int num, int den) {
  std::int64_t total = 0;
  for (const auto& l : side) total += static_cast<std::int64_t>(l.size);
  std::int64_t cum = 0;
  for (const auto& l : side) {
    cum += static_cast<std::int64_t>(l.size);
    if (cum * den >= total * num) return l.price;
  }
  return side.back().price;
}

// ---------------------------------------------------------------------------
// Slippage from the cumulative-notional curve: find the crossing level k,
// then qty = full levels before k + the remainder at level k's price.

struct Slip {
  double slippage;
  bool insufficient;
};

inline Slip slippage(const BookSnapshot& b, double order, bool buy) {
  const auto& side = buy ? b.asks : b.bids;
  double mid = (b.bids.front().price.to_double() + b.asks.front().price.to_double()) / 2;
  std::vector<double> cum_usd{0.0}, cum_qty{0.0};
  for (const auto& l : side) {
    cum_usd.push_back(cum_usd.back() + l.price.to_double() * l.size);
    cum_qty.push_back(cum_qty.back() + l.size);
  }
  if (cum_usd.back() < order) {
    double vwap = cum_usd.back() / cum_qty.back();
    return {buy ? (vwap - mid) / mid : (mid - vwap) / mid, true};
  }
  std::size_t k = 1;
  while (cum_usd[k] < order) ++k;
  double qty = cum_qty[k - 1] + (order - cum_usd[k - 1]) / side[k - 1].price.to_double();
  double vwap = order / qty;
  return {buy ? (vwap - mid) / mid : (mid - vwap) / mid, false};
}

// ---------------------------------------------------------------------------
// OLS via the uncentred normal equations, solved by Cramer's rule.

struct Ols {
  double slope, intercept, r2;
};

inline std::optional<Ols> ols(const std::vector<double>& y, const std::vector<double>& x) {
  long double n = x.size(), sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += (long double)x[i] * x[i];
    sxy += (long double)x[i] * y[i];
    syy += (long double)y[i] * y[i];
  }
  long double det = n * sxx - sx * sx;
  if (x.size() < 2 || det <= 0) return std::nullopt;
  long double b = (n * sxy - sx * sy) / det;
  long double a = (sy * sxx - sx * sxy) / det;
  long double ss_tot = syy - sy * sy / n, ss_res = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    long double e = y[i] - (a + b * x[i]);
    ss_res += e * e;
  }
  return Ols{double(b), double(a), ss_tot > 0 ? double(1 - ss_res / ss_tot) : 1.0};
}

}  // namespace oracle
