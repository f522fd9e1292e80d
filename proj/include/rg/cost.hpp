#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rg/config.hpp"
#include "rg/decimal.hpp"

namespace rg {

enum class BiasSign { positive, negative, neutral };
enum class MagnitudeClass { neutral, normal, elevated };

const char* to_string(BiasSign s);
const char* to_string(MagnitudeClass m);

/// Per-period run length of same-sign funding, including the period
/// itself. Zero rates are neutral and reset the run (duration 0).
/// With flip_tolerance > 0, up to that many consecutive opposite-sign
/// periods are absorbed into an ongoing run instead of resetting it.
std::vector<int> funding_bias_duration(std::span<const Decimal> rates_8h, int flip_tolerance = 0);

/// Sign of each period's bias after applying the same run logic.
std::vector<BiasSign> funding_bias_sign(std::span<const Decimal> rates_8h, int flip_tolerance = 0);

MagnitudeClass classify_magnitude(Decimal rate_8h, const Config& cfg = {});

/// Spike test for every period: nullopt until `lookback` prior periods
/// exist, then |r_t - mean| > sigma x max(std, floor) with the sample
/// mean and deviation taken over the `lookback` periods strictly before t.
std::vector<std::optional<bool>> funding_spike(std::span<const Decimal> rates_8h, std::size_t lookback = 30,
                                               double sigma = 2.0, double sigma_floor = 1e-6);

/// Standardized deviation of period t from its trailing baseline
/// (same definition as funding_spike); nullopt without enough history.
std::optional<double> funding_spike_z(std::span<const Decimal> rates_8h, std::size_t t, std::size_t lookback = 30,
                                      double sigma_floor = 1e-6);

struct FundingState {
  BiasSign bias_sign = BiasSign::neutral;
  int bias_duration = 0;
  MagnitudeClass magnitude_class = MagnitudeClass::neutral;
  Decimal rate_8h;
  Decimal annualized_pct;
  std::optional<Decimal> cumulative_7d;   // nullopt without 7 days of history
  std::optional<Decimal> cumulative_30d;  // nullopt without 30 days of history
};

/// Funding state at each 4H bar from a per-bar rate_8h series. Each bar
/// accrues half an 8-hour period, so the 7-day window is 42 bars of
/// rate x 0.5.
std::vector<FundingState> funding_states(std::span<const Decimal> bar_rates_8h, const Config& cfg = {});

}  // namespace rg
