#include "rg/model.hpp"

#include <algorithm>
#include <cmath>

#include "rg/error.hpp"

namespace rg {

std::size_t Panel::bar_index_at(Timestamp t) const {
  if (candles.empty()) return 0;
  Timestamp rel = t - candles.front().open_time;
  if (rel <= 0) return 0;
  auto idx = static_cast<std::size_t>((rel + kBarSeconds - 1) / kBarSeconds) - 1;
  return std::min(idx, candles.size() - 1);
}

RangeDefinition make_range(Decimal lower, Decimal upper, Timestamp established_at, int touches_lower,
                           int touches_upper, double min_width) {
  if (!(lower < upper)) throw Error(ErrorKind::invalid_input, "range lower must be below upper");
  if (lower.sign() <= 0) throw Error(ErrorKind::invalid_input, "range lower must be positive");
  RangeDefinition r;
  r.lower = lower;
  r.upper = upper;
  r.established_at = established_at;
  r.touch_count_lower = touches_lower;
  r.touch_count_upper = touches_upper;
  r.midpoint = Decimal::from_raw((lower.raw() + upper.raw()) / 2);
  if (!(r.width_fraction() > min_width)) throw Error(ErrorKind::invalid_input, "degenerate range: width too small");
  return r;
}

std::vector<Violation> validate_record(const Candle4H& c) {
  std::vector<Violation> v;
  if (c.high < std::max(c.open, c.close)) v.push_back({"high", "high < max(open,close)"});
  if (c.low > std::min(c.open, c.close)) v.push_back({"low", "low > min(open,close)"});
  if (c.low.sign() <= 0) v.push_back({"low", "price <= 0"});
  if (!on_bar_grid(c.open_time)) v.push_back({"open_time", "open_time not on 4h UTC grid"});
  if (!(c.volume >= 0.0) || !std::isfinite(c.volume)) v.push_back({"volume", "volume < 0"});
  if (c.exchange_count < 1) v.push_back({"exchange_count", "exchange_count < 1"});
  return v;
}

std::vector<Violation> validate_record(const FundingRecord& f) {
  std::vector<Violation> v;
  if (!(std::fabs(f.rate_8h.to_double()) < kFundingHardBound))
    v.push_back({"rate_8h", "|rate_8h| >= hard bound 0.0375"});
  if (f.source_interval_hours != 4 && f.source_interval_hours != 8 && f.source_interval_hours != 12)
    v.push_back({"source_interval_hours", "interval not in {4,8,12}"});
  if (f.mark_price.sign() < 0) v.push_back({"mark_price", "price < 0"});
  if (f.index_price.sign() < 0) v.push_back({"index_price", "price < 0"});
  return v;
}

std::vector<Violation> validate_record(const OpenInterestRecord& r) {
  std::vector<Violation> v;
  if (!(r.oi_usd >= 0.0) || !std::isfinite(r.oi_usd)) v.push_back({"oi_usd", "oi_usd < 0"});
  if (r.long_oi_usd && *r.long_oi_usd < 0.0) v.push_back({"long_oi_usd", "long_oi_usd < 0"});
  if (r.short_oi_usd && *r.short_oi_usd < 0.0) v.push_back({"short_oi_usd", "short_oi_usd < 0"});
  if (r.long_oi_usd && r.short_oi_usd) {
    double sum = *r.long_oi_usd + *r.short_oi_usd;
    if (std::fabs(sum - r.oi_usd) > 0.001 * std::max(r.oi_usd, 1e-12))
      v.push_back({"long_oi_usd", "long + short != oi_usd (0.1% tolerance)"});
  }
  for (const auto& [bucket, usd] : r.leverage_histogram) {
    if (usd < 0.0) v.push_back({"leverage_histogram", "negative notional in bucket " + bucket});
  }
  if (!r.holder_shares.empty()) {
    double sum = 0.0;
    bool negative = false;
    for (double s : r.holder_shares) {
      sum += s;
      negative = negative || s < 0.0;
    }
    if (negative) v.push_back({"holder_shares", "negative share"});
    if (std::fabs(sum - 1.0) > 1e-6) v.push_back({"holder_shares", "shares do not sum to 1"});
  }
  return v;
}

std::vector<Violation> validate_record(const BookSnapshot& b, std::size_t min_levels) {
  std::vector<Violation> v;
  if (b.bids.size() < min_levels) v.push_back({"bids", "fewer than " + std::to_string(min_levels) + " levels"});
  if (b.asks.size() < min_levels) v.push_back({"asks", "fewer than " + std::to_string(min_levels) + " levels"});
  for (std::size_t i = 1; i < b.bids.size(); ++i) {
    if (!(b.bids[i].price < b.bids[i - 1].price)) {
      v.push_back({"bids", "bids not strictly descending"});
      break;
    }
  }
  for (std::size_t i = 1; i < b.asks.size(); ++i) {
    if (!(b.asks[i].price > b.asks[i - 1].price)) {
      v.push_back({"asks", "asks not strictly ascending"});
      break;
    }
  }
  auto bad_size = [](const BookLevel& l) { return !(l.size > 0.0) || !std::isfinite(l.size); };
  if (std::any_of(b.bids.begin(), b.bids.end(), bad_size) || std::any_of(b.asks.begin(), b.asks.end(), bad_size))
    v.push_back({"size", "size <= 0"});
  if (!b.bids.empty() && !b.asks.empty() && !(b.best_bid() < b.best_ask()))
    v.push_back({"best_bid", "crossed book"});
  return v;
}

std::vector<Violation> validate_record(const LiquidationEvent& e) {
  std::vector<Violation> v;
  if (e.price.sign() <= 0) v.push_back({"price", "price <= 0"});
  if (!(e.size_usd > 0.0) || !std::isfinite(e.size_usd)) v.push_back({"size_usd", "size_usd <= 0"});
  return v;
}

std::vector<Violation> validate_record(const RangeDefinition& r) {
  std::vector<Violation> v;
  if (!(r.lower < r.upper)) {
    v.push_back({"upper", "lower >= upper"});
    return v;
  }
  if (r.lower.sign() <= 0) v.push_back({"lower", "price <= 0"});
  else if (!(r.width_fraction() > 0.001)) v.push_back({"upper", "upper/lower - 1 <= 0.001"});
  if (r.touch_count_lower < 0 || r.touch_count_upper < 0) v.push_back({"touch_count", "negative touch count"});
  if (r.midpoint != Decimal::from_raw((r.lower.raw() + r.upper.raw()) / 2)) v.push_back({"midpoint", "midpoint != (lower+upper)/2"});
  return v;
}

namespace {

template <class Rec>
void append(std::vector<Violation>& out, const std::string& series, std::size_t i, const Rec& rec) {
  for (auto& viol : validate_record(rec)) {
    out.push_back({series + "[" + std::to_string(i) + "]." + viol.field, viol.rule});
  }
}

}  // namespace

std::vector<Violation> validate_panel(const Panel& p) {
  std::vector<Violation> out;
  for (std::size_t i = 0; i < p.candles.size(); ++i) {
    append(out, "candles", i, p.candles[i]);
    if (i > 0 && p.candles[i].open_time - p.candles[i - 1].open_time != kBarSeconds)
      out.push_back({"candles[" + std::to_string(i) + "].open_time", "candles not spaced by exactly 4h"});
  }
  for (std::size_t i = 0; i < p.funding.size(); ++i) append(out, "funding", i, p.funding[i]);
  for (std::size_t i = 0; i < p.oi.size(); ++i) append(out, "oi", i, p.oi[i]);
  for (std::size_t i = 0; i < p.books.size(); ++i) append(out, "books", i, p.books[i]);
  for (std::size_t i = 0; i < p.liquidations.size(); ++i) append(out, "liquidations", i, p.liquidations[i]);

  if (!p.candles.empty()) {
    Timestamp lo = p.start_time();
    Timestamp hi = p.end_time();
    auto check_span = [&](const std::string& series, std::size_t i, Timestamp t) {
      if (t < lo || t > hi) out.push_back({series + "[" + std::to_string(i) + "].time", "outside candle span"});
    };
    for (std::size_t i = 0; i < p.funding.size(); ++i) check_span("funding", i, p.funding[i].settle_time);
    for (std::size_t i = 0; i < p.oi.size(); ++i) check_span("oi", i, p.oi[i].time);
    for (std::size_t i = 0; i < p.books.size(); ++i) check_span("books", i, p.books[i].time);
    for (std::size_t i = 0; i < p.liquidations.size(); ++i) check_span("liquidations", i, p.liquidations[i].time);
  }
  return out;
}

}  // namespace rg
