#include "rg/cost.hpp"

#include <cmath>

#include "rg/ingestion.hpp"

namespace rg {

const char* to_string(BiasSign s) {
  switch (s) {
    case BiasSign::positive: return "positive";
    case BiasSign::negative: return "negative";
    case BiasSign::neutral: return "neutral";
  }
  return "neutral";
}

const char* to_string(MagnitudeClass m) {
  switch (m) {
    case MagnitudeClass::neutral: return "neutral";
    case MagnitudeClass::normal: return "normal";
    case MagnitudeClass::elevated: return "elevated";
  }
  return "neutral";
}

namespace {

struct Run {
  std::vector<int> duration;
  std::vector<BiasSign> sign;
};

Run bias_runs(std::span<const Decimal> rates, int flip_tolerance) {
  Run r;
  r.duration.reserve(rates.size());
  r.sign.reserve(rates.size());
  int cur_sign = 0;
  int dur = 0;
  int opposite = 0;  // length of the current opposite-sign streak
  for (const Decimal& rate : rates) {
    int s = rate.sign();
    if (s == 0) {
      cur_sign = 0;
      dur = 0;
      opposite = 0;
    } else if (s == cur_sign) {
      ++dur;
      opposite = 0;
    } else if (cur_sign != 0 && opposite < flip_tolerance) {
      ++opposite;
      ++dur;
    } else {
      // Either a fresh run or the tolerated streak ran out: the new run
      // counts the opposite periods it has already seen.
      dur = cur_sign != 0 ? opposite + 1 : 1;
      cur_sign = s;
      opposite = 0;
    }
    r.duration.push_back(dur);
    r.sign.push_back(cur_sign > 0 ? BiasSign::positive : cur_sign < 0 ? BiasSign::negative : BiasSign::neutral);
  }
  return r;
}

}  // namespace

std::vector<int> funding_bias_duration(std::span<const Decimal> rates_8h, int flip_tolerance) {
  return bias_runs(rates_8h, flip_tolerance).duration;
}

std::vector<BiasSign> funding_bias_sign(std::span<const Decimal> rates_8h, int flip_tolerance) {
  return bias_runs(rates_8h, flip_tolerance).sign;
}

MagnitudeClass classify_magnitude(Decimal rate_8h, const Config& cfg) {
  Decimal a = rate_8h.abs();
  if (a > Decimal::from_double(cfg.elevated_rate)) return MagnitudeClass::elevated;
  if (a < Decimal::from_double(cfg.neutral_rate)) return MagnitudeClass::neutral;
  return MagnitudeClass::normal;
}

std::optional<double> funding_spike_z(std::span<const Decimal> rates, std::size_t t, std::size_t lookback,
                                      double sigma_floor) {
  if (lookback < 2 || t < lookback || t >= rates.size()) return std::nullopt;
  double mean = 0.0;
  for (std::size_t i = t - lookback; i < t; ++i) mean += rates[i].to_double();
  mean /= static_cast<double>(lookback);
  double ss = 0.0;
  for (std::size_t i = t - lookback; i < t; ++i) {
    double d = rates[i].to_double() - mean;
    ss += d * d;
  }
  double sd = std::max(std::sqrt(ss / static_cast<double>(lookback - 1)), sigma_floor);
  return (rates[t].to_double() - mean) / sd;
}

std::vector<std::optional<bool>> funding_spike(std::span<const Decimal> rates, std::size_t lookback, double sigma,
                                               double sigma_floor) {
  std::vector<std::optional<bool>> out(rates.size());
  for (std::size_t t = 0; t < rates.size(); ++t) {
    if (auto z = funding_spike_z(rates, t, lookback, sigma_floor)) out[t] = std::fabs(*z) > sigma;
  }
  return out;
}

std::vector<FundingState> funding_states(std::span<const Decimal> bar_rates, const Config& cfg) {
  auto runs = bias_runs(bar_rates, as_count(cfg.bias_flip_tolerance));
  const auto short_bars = static_cast<std::size_t>(as_count(cfg.cumulative_short_days)) * static_cast<std::size_t>(kBarsPerDay);
  const auto long_bars = static_cast<std::size_t>(as_count(cfg.cumulative_long_days)) * static_cast<std::size_t>(kBarsPerDay);

  // Prefix sums of the per-bar accrual (half an 8-hour period per bar).
  std::vector<Decimal> prefix(bar_rates.size() + 1);
  for (std::size_t i = 0; i < bar_rates.size(); ++i) prefix[i + 1] = prefix[i] + bar_rates[i].mul_ratio(1, 2);

  std::vector<FundingState> out(bar_rates.size());
  for (std::size_t t = 0; t < bar_rates.size(); ++t) {
    FundingState& s = out[t];
    s.rate_8h = bar_rates[t];
    s.bias_sign = runs.sign[t];
    s.bias_duration = runs.duration[t];
    s.magnitude_class = classify_magnitude(bar_rates[t], cfg);
    s.annualized_pct = annualize_funding(bar_rates[t]);
    if (t + 1 >= short_bars) s.cumulative_7d = prefix[t + 1] - prefix[t + 1 - short_bars];
    if (t + 1 >= long_bars) s.cumulative_30d = prefix[t + 1] - prefix[t + 1 - long_bars];
  }
  return out;
}

}  // namespace rg
