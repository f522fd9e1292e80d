#pragma once

#include <span>
#include <string>
#include <vector>

#include "rg/decimal.hpp"
#include "rg/model.hpp"

namespace rg {

/// A spot trade or candle fragment before 4H aggregation.
struct RawTick {
  Timestamp time = 0;
  std::string exchange_id;
  Decimal price;
  double volume = 0.0;
};

/// Buckets time-ordered ticks into UTC 4H candles. Empty buckets are
/// omitted (gaps are left for the quality pipeline). Throws rg::Error
/// naming the first out-of-order index, or the first invalid tick.
std::vector<Candle4H> align_4h(std::span<const RawTick> ticks);

/// Volume-weighted merge of per-exchange candle sequences sharing one
/// open_time grid. Each price field is the per-bar volume-weighted mean
/// (equal weights when a bar has zero total volume); volume is summed.
/// Throws rg::Error naming the first mismatching timestamp.
std::vector<Candle4H> vwap_merge(std::span<const std::vector<Candle4H>> per_exchange);

/// raw_rate x 8 / source_interval_hours. Only 4, 8 and 12 hour intervals
/// are supported; anything else throws rg::Error(unsupported).
Decimal normalize_funding(Decimal raw_rate, int source_interval_hours);

/// Simple annualization in percent: rate_8h x 3 x 365 x 100.
Decimal annualize_funding(Decimal rate_8h);

/// Plain sum of the trailing `window` periods. Throws if window > size.
Decimal cumulative_funding(std::span<const Decimal> rates_8h, std::size_t window);

struct BasisReading {
  double value = 0.0;  // (perp - spot) / spot
  bool dislocation = false;
};

/// Throws rg::Error when spot <= 0. Dislocation is strict: |basis| > threshold.
BasisReading basis_spread(Decimal perp_price, Decimal spot_price, double dislocation_threshold = 0.005);

struct ExchangeVolume {
  std::string exchange_id;
  double trailing_volume = 0.0;  // e.g. 30-day sum supplied by the manifest
};

/// The n largest exchanges by trailing volume; ties break by id.
std::vector<std::string> select_top_exchanges(std::vector<ExchangeVolume> volumes, std::size_t n);

}  // namespace rg
