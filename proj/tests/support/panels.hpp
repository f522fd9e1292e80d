#pragma once

// Random raw panels carrying the defects the quality pipeline repairs or
// flags: short and long candle gaps, off-grid auxiliary timestamps,
// impossible funding, wide-spread and thin books, malformed OI, records
// outside the candle span, volume and price spikes.

#include "oracles.hpp"
#include "rg/model.hpp"

namespace oracle {

inline rg::Panel random_raw_panel(std::uint64_t seed, std::size_t bars = 120) {
  Gen g(seed);
  rg::Panel p;
  p.instrument = "RAND-" + std::to_string(seed);
  auto all = random_candles(g, bars, g.uniform(100.0, 50000.0), g.uniform(0.002, 0.02));
  for (std::size_t i = 0; i < all.size(); ++i) {
    // Drop single bars and occasional pairs; keep both ends.
    if (i > 0 && i + 2 < all.size() && g.chance(0.04)) {
      if (g.chance(0.3)) ++i;
      continue;
    }
    p.candles.push_back(all[i]);
  }
  if (g.chance(0.5)) {  // a wash-like bar: huge volume, flat body
    auto& c = p.candles[p.candles.size() / 2];
    c.close = c.open;
    c.volume *= 50;
  }
  if (g.chance(0.5)) {  // a price spike
    auto& c = p.candles[p.candles.size() / 3];
    c.close = c.close.mul_ratio(125, 100);
    c.high = std::max(c.high, c.close);
  }

  const Timestamp t0 = p.candles.front().open_time, t1 = p.candles.back().close_time();
  auto jitter = [&] { return g.chance(0.15) ? g.integer(-600, 600) : g.integer(-20, 20); };
  for (Timestamp t = t0 + rg::kBarSeconds * 2; t <= t1; t += rg::kBarSeconds * 2) {
    rg::FundingRecord f;
    f.settle_time = t + jitter();
    f.rate_8h = g.chance(0.03) ? Decimal::parse("0.05") : g.decimal(-0.0008, 0.0012, 6);
    f.exchange_id = "ex-a";
    f.mark_price = p.candles.front().close;
    f.index_price = p.candles.front().close;
    p.funding.push_back(f);
  }
  {
    rg::FundingRecord late = p.funding.back();
    late.settle_time = t1 + 10 * rg::kBarSeconds;
    p.funding.push_back(late);
  }

  double oi = g.uniform(1e8, 1e9);
  for (Timestamp t = t0 + rg::kBarSeconds; t <= t1; t += rg::kBarSeconds) {
    rg::OpenInterestRecord r;
    r.time = t + jitter();
    oi *= 1.0 + g.uniform(-0.02, 0.02);
    r.oi_usd = g.chance(0.02) ? -oi : oi;
    double ls = g.uniform(0.4, 0.6);
    r.long_oi_usd = oi * ls;
    r.short_oi_usd = oi * (1 - ls);
    p.oi.push_back(r);
  }

  for (Timestamp t = t0 + 3600; t < t1; t += 4 * 3600) {
    double mid = p.candles[std::min(p.candles.size() - 1, static_cast<std::size_t>((t - t0) / rg::kBarSeconds))]
                     .close.to_double();
    auto b = random_book(g, g.chance(0.05) ? 10 : 20, mid, mid * 1e-4);
    b.time = t + jitter();
    if (g.chance(0.1)) {  // 1.2% spread
      Decimal half = Decimal::from_double(mid * 0.006);
      Decimal m = Decimal::from_double(mid);
      Decimal shift_bid = b.bids.front().price - (m - half);
      Decimal shift_ask = (m + half) - b.asks.front().price;
      for (auto& l : b.bids) l.price -= shift_bid;
      for (auto& l : b.asks) l.price += shift_ask;
    }
    p.books.push_back(b);
  }

  for (auto e : random_liquidations(g, 40, p.candles.front().low.to_double(), p.candles.front().high.to_double())) {
    e.time = t0 + g.integer(0, t1 - t0 + 3 * rg::kBarSeconds);
    if (g.chance(0.03)) e.size_usd = -1;
    p.liquidations.push_back(e);
  }
  std::sort(p.liquidations.begin(), p.liquidations.end(), [](auto& a, auto& b) { return a.time < b.time; });

  if (g.chance(0.5)) {
    auto& flow = p.annotations.series["trade_flow_usd"];
    for (Timestamp d = rg::floor_to_day(t0) + rg::kDaySeconds; d <= t1; d += rg::kDaySeconds)
      flow.push_back({d, g.uniform(-1e7, 1e7)});
  }
  return p;
}

}  // namespace oracle
