#include "rg/liquidity.hpp"

#include <algorithm>
#include <cmath>

#include "rg/error.hpp"

namespace rg {

DepthProfile depth_profile(std::span<const BookLevel> levels, BookSide side, double p_low, double p_high) {
  DepthProfile p;
  p.side = side;
  double total = 0.0;
  for (const auto& l : levels) total += l.size;
  double cum = 0.0;
  bool have_low = false, have_high = false;
  for (const auto& l : levels) {
    cum += l.size;
    p.cumulative.push_back({l.price, cum});
    double share = total > 0.0 ? cum / total : 0.0;
    if (!have_low && share >= p_low) {
      p.p25 = l.price;
      have_low = true;
    }
    if (!have_high && share >= p_high) {
      p.p75 = l.price;
      have_high = true;
    }
  }
  // Rounding can leave the last share a hair under 1; the last level then
  // holds any percentile not yet reached.
  if (!levels.empty()) {
    if (!have_low) p.p25 = levels.back().price;
    if (!have_high) p.p75 = levels.back().price;
  }
  return p;
}

DepthPercentiles depth_percentiles(const BookSnapshot& snap, double p_low, double p_high) {
  return {depth_profile(snap.bids, BookSide::bid, p_low, p_high), depth_profile(snap.asks, BookSide::ask, p_low, p_high)};
}

ShelfMigration shelf_migration(const BookSnapshot& snap, const RangeDefinition& prior, bool upside, double threshold) {
  ShelfMigration m;
  double ask_total = 0.0, ask_beyond = 0.0;
  for (const auto& l : snap.asks) {
    ask_total += l.size;
    if (l.price > prior.upper) ask_beyond += l.size;
  }
  double bid_total = 0.0, bid_beyond = 0.0;
  for (const auto& l : snap.bids) {
    bid_total += l.size;
    if (l.price < prior.lower) bid_beyond += l.size;
  }
  m.ask_share_above_upper = ask_total > 0.0 ? ask_beyond / ask_total : 0.0;
  m.bid_share_below_lower = bid_total > 0.0 ? bid_beyond / bid_total : 0.0;
  m.share = upside ? m.ask_share_above_upper : m.bid_share_below_lower;
  m.signal = m.share > threshold;
  return m;
}

BoundaryDepth depth_at_extremes(const BookSnapshot& snap, const RangeDefinition& range, double zone) {
  BoundaryDepth d;
  const Decimal z = Decimal::from_double(zone);
  const Decimal lower_tol = range.lower * z;
  const Decimal upper_tol = range.upper * z;
  auto add = [&](const BookLevel& l) {
    double usd = l.price.to_double() * l.size;
    if ((l.price - range.lower).abs() <= lower_tol) d.lower_usd += usd;
    if ((l.price - range.upper).abs() <= upper_tol) d.upper_usd += usd;
  };
  for (const auto& l : snap.bids) add(l);
  for (const auto& l : snap.asks) add(l);
  return d;
}

SlippageResult fill_slippage(const BookSnapshot& snap, double order_usd, bool buy) {
  SlippageResult r;
  const auto& side = buy ? snap.asks : snap.bids;
  double mid = snap.mid();
  double usd = 0.0, qty = 0.0;
  for (const auto& l : side) {
    if (usd >= order_usd) break;
    double price = l.price.to_double();
    double take_usd = std::min(price * l.size, order_usd - usd);
    usd += take_usd;
    qty += take_usd / price;
  }
  r.filled_usd = usd;
  r.insufficient_depth = usd < order_usd * (1.0 - 1e-12);
  if (qty > 0.0) {
    double vwap = usd / qty;
    r.slippage = buy ? (vwap - mid) / mid : (mid - vwap) / mid;
  }
  return r;
}

Imbalance book_imbalance(const BookSnapshot& snap, std::size_t levels, double threshold) {
  Imbalance im;
  double b = 0.0, a = 0.0;
  for (std::size_t i = 0; i < snap.bids.size() && i < levels; ++i) b += snap.bids[i].size;
  for (std::size_t i = 0; i < snap.asks.size() && i < levels; ++i) a += snap.asks[i].size;
  if (!(a > 0.0) || !(b > 0.0)) {
    im.value = a > 0.0 ? -1.0 : 0.0;
    im.extreme = a > 0.0 || b > 0.0;
    return im;
  }
  im.value = b / a - 1.0;
  im.extreme = std::max(b / a, a / b) - 1.0 > threshold;
  return im;
}

std::optional<ImpactRegression> market_impact_coefficient(std::span<const double> y, std::span<const double> x) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return std::nullopt;
  double xm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= static_cast<double>(n);
  ym /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
    syy += (y[i] - ym) * (y[i] - ym);
  }
  if (!(sxx > 0.0) || sxx <= 1e-24 * xm * xm * static_cast<double>(n)) return std::nullopt;
  ImpactRegression r;
  r.slope = sxy / sxx;
  r.intercept = ym - r.slope * xm;
  r.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return r;
}

std::vector<std::optional<ImpactRegression>> rolling_market_impact(std::span<const Candle4H> candles,
                                                                   std::size_t window) {
  std::vector<std::optional<ImpactRegression>> out(candles.size());
  if (window == 0) return out;
  std::vector<double> y, x;
  for (std::size_t t = window; t < candles.size(); ++t) {
    y.clear();
    x.clear();
    for (std::size_t i = t + 1 - window; i <= t; ++i) {
      double prev = candles[i - 1].close.to_double();
      y.push_back(std::fabs(candles[i].close.to_double() - prev) / prev);
      x.push_back(candles[i].volume * candles[i].close.to_double() / 1e6);
    }
    out[t] = market_impact_coefficient(y, x);
  }
  return out;
}

SpreadReading spread(const BookSnapshot& snap, double threshold) {
  if (snap.bids.empty() || snap.asks.empty()) throw Error(ErrorKind::invalid_input, "spread: empty book side");
  Decimal bid = snap.best_bid(), ask = snap.best_ask();
  if (!(bid < ask)) throw Error(ErrorKind::invalid_input, "spread: crossed book");
  SpreadReading s;
  s.value = (ask - bid).to_double() / snap.mid();
  // (ask - bid) > t x (ask + bid) / 2, evaluated in fixed point so that
  // exact-threshold books are not flagged by rounding.
  s.uncertainty = (ask - bid) * 2 > (ask + bid) * Decimal::from_double(threshold);
  return s;
}

}  // namespace rg
