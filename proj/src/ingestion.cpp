#include "rg/ingestion.hpp"

#include <algorithm>
#include <cmath>

#include "rg/error.hpp"

namespace rg {

std::vector<Candle4H> align_4h(std::span<const RawTick> ticks) {
  std::vector<Candle4H> out;
  for (std::size_t i = 0; i < ticks.size(); ++i) {
    const RawTick& t = ticks[i];
    if (i > 0 && t.time < ticks[i - 1].time)
      throw Error(ErrorKind::invalid_input, "ticks not sorted by time at index " + std::to_string(i));
    if (t.price.sign() <= 0 || !(t.volume >= 0.0))
      throw Error(ErrorKind::invalid_input, "invalid tick at index " + std::to_string(i));

    Timestamp bucket = floor_to_bar(t.time);
    if (out.empty() || out.back().open_time != bucket) {
      Candle4H c;
      c.open_time = bucket;
      c.open = c.high = c.low = c.close = t.price;
      c.volume = t.volume;
      out.push_back(c);
      continue;
    }
    Candle4H& c = out.back();
    c.high = std::max(c.high, t.price);
    c.low = std::min(c.low, t.price);
    c.close = t.price;
    c.volume += t.volume;
  }
  return out;
}

std::vector<Candle4H> vwap_merge(std::span<const std::vector<Candle4H>> per_exchange) {
  if (per_exchange.empty()) return {};
  const auto& first = per_exchange.front();
  for (std::size_t e = 1; e < per_exchange.size(); ++e) {
    const auto& seq = per_exchange[e];
    std::size_t n = std::min(seq.size(), first.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (seq[i].open_time != first[i].open_time)
        throw Error(ErrorKind::invalid_input, "candle grids differ at " + format_utc(std::min(seq[i].open_time, first[i].open_time)));
    }
    if (seq.size() != first.size()) {
      const auto& longer = seq.size() > first.size() ? seq : first;
      throw Error(ErrorKind::invalid_input, "candle grids differ at " + format_utc(longer[n].open_time));
    }
  }

  // Accumulate in long double on the raw fixed-point values so that merging
  // identical candles reproduces them exactly.
  auto weighted = [](const std::vector<long double>& w, long double wsum, auto&& field) {
    long double acc = 0.0L;
    for (std::size_t e = 0; e < w.size(); ++e) acc += w[e] * static_cast<long double>(field(e).raw());
    return Decimal::from_raw(static_cast<int128_t>(std::roundl(acc / wsum)));
  };

  std::vector<Candle4H> out;
  out.reserve(first.size());
  std::vector<long double> w(per_exchange.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    long double wsum = 0.0L;
    double vol = 0.0;
    int count = 0;
    for (std::size_t e = 0; e < per_exchange.size(); ++e) {
      w[e] = per_exchange[e][i].volume;
      wsum += w[e];
      vol += per_exchange[e][i].volume;
      count += per_exchange[e][i].exchange_count;
    }
    if (wsum <= 0.0L) {
      std::fill(w.begin(), w.end(), 1.0L);
      wsum = static_cast<long double>(w.size());
    }
    Candle4H c;
    c.open_time = first[i].open_time;
    c.open = weighted(w, wsum, [&](std::size_t e) { return per_exchange[e][i].open; });
    c.high = weighted(w, wsum, [&](std::size_t e) { return per_exchange[e][i].high; });
    c.low = weighted(w, wsum, [&](std::size_t e) { return per_exchange[e][i].low; });
    c.close = weighted(w, wsum, [&](std::size_t e) { return per_exchange[e][i].close; });
    c.volume = vol;
    c.exchange_count = count;
    out.push_back(c);
  }
  return out;
}

Decimal normalize_funding(Decimal raw_rate, int source_interval_hours) {
  if (source_interval_hours != 4 && source_interval_hours != 8 && source_interval_hours != 12)
    throw Error(ErrorKind::unsupported, "unsupported funding interval: " + std::to_string(source_interval_hours) + "h");
  return raw_rate.mul_ratio(8, source_interval_hours);
}

Decimal annualize_funding(Decimal rate_8h) { return rate_8h * 109500; }

Decimal cumulative_funding(std::span<const Decimal> rates_8h, std::size_t window) {
  if (window > rates_8h.size())
    throw Error(ErrorKind::invalid_input, "cumulative window " + std::to_string(window) + " exceeds " +
                                              std::to_string(rates_8h.size()) + " periods");
  Decimal sum;
  for (std::size_t i = rates_8h.size() - window; i < rates_8h.size(); ++i) sum += rates_8h[i];
  return sum;
}

BasisReading basis_spread(Decimal perp_price, Decimal spot_price, double dislocation_threshold) {
  if (spot_price.sign() <= 0) throw Error(ErrorKind::invalid_input, "basis_spread: spot price must be positive");
  BasisReading r;
  Decimal diff = perp_price - spot_price;
  r.value = diff.to_double() / spot_price.to_double();
  r.dislocation = diff.abs() > Decimal::from_double(dislocation_threshold) * spot_price;
  return r;
}

std::vector<std::string> select_top_exchanges(std::vector<ExchangeVolume> volumes, std::size_t n) {
  std::sort(volumes.begin(), volumes.end(), [](const ExchangeVolume& a, const ExchangeVolume& b) {
    if (a.trailing_volume != b.trailing_volume) return a.trailing_volume > b.trailing_volume;
    return a.exchange_id < b.exchange_id;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < volumes.size() && i < n; ++i) out.push_back(volumes[i].exchange_id);
  return out;
}

}  // namespace rg
