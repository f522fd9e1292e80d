#include <catch2/catch_amalgamated.hpp>

#include "rg/cost.hpp"
#include "rg/synth.hpp"

using namespace rg;

namespace {

std::vector<Decimal> rates(std::initializer_list<const char*> r) {
  std::vector<Decimal> out;
  for (const char* x : r) out.push_back(Decimal::parse(x));
  return out;
}

}  // namespace

TEST_CASE("funding_bias_duration", "[bias]") {
  CHECK(funding_bias_duration(rates({"0.0001", "0", "0.0001"})) == std::vector<int>{1, 0, 1});
  CHECK(funding_bias_duration(rates({"0.0001", "0.0002", "0.0001", "-0.0001"})) == std::vector<int>{1, 2, 3, 1});
  CHECK(funding_bias_duration(rates({"0", "0", "0"})) == std::vector<int>{0, 0, 0});
  auto s = funding_bias_sign(rates({"0.0001", "0", "-0.0001"}));
  CHECK(s == std::vector<BiasSign>{BiasSign::positive, BiasSign::neutral, BiasSign::negative});
}

TEST_CASE("funding_bias_duration with flip tolerance", "[bias]") {
  auto r = rates({"0.0001", "0.0001", "-0.0001", "0.0001"});
  CHECK(funding_bias_duration(r, 0) == std::vector<int>{1, 2, 1, 1});
  CHECK(funding_bias_duration(r, 1) == std::vector<int>{1, 2, 3, 4});
}

TEST_CASE("classify_magnitude", "[magnitude]") {
  CHECK(classify_magnitude(Decimal::parse("0.0006")) == MagnitudeClass::elevated);
  CHECK(classify_magnitude(Decimal::parse("-0.0006")) == MagnitudeClass::elevated);
  CHECK(classify_magnitude(Decimal::parse("0.00005")) == MagnitudeClass::neutral);
  CHECK(classify_magnitude(Decimal::parse("0.0003")) == MagnitudeClass::normal);
  CHECK(classify_magnitude(Decimal::parse("0.0005")) == MagnitudeClass::normal);  // strict >
}

TEST_CASE("funding_spike", "[spike]") {
  std::vector<Decimal> r(40, Decimal::parse("0.0001"));
  r.push_back(Decimal::parse("0.0004"));
  auto s = funding_spike(r);
  REQUIRE(s.size() == r.size());
  for (std::size_t i = 0; i < 30; ++i) CHECK_FALSE(s[i].has_value());
  for (std::size_t i = 30; i < 40; ++i) CHECK(s[i] == false);
  CHECK(s.back() == true);
  CHECK(funding_spike_z(r, 10) == std::nullopt);
}

TEST_CASE("funding_spike flag rate on Gaussian noise", "[spike][property]") {
  // With the baseline mean and deviation estimated from 30 points, a fresh
  // draw exceeds 2 sample deviations with probability P(|t_29| > 2/sqrt(1 +
  // 1/30)) ~ 0.059 (0.0455 for known parameters).
  NamedRng rng(17, "spike-noise");
  std::vector<Decimal> r;
  for (int i = 0; i < 20000; ++i) r.push_back(Decimal::from_double(0.0001 + 0.00005 * rng.normal()));
  auto s = funding_spike(r);
  std::size_t n = 0, hits = 0;
  for (const auto& x : s) {
    if (!x) continue;
    ++n;
    hits += *x;
  }
  double rate = static_cast<double>(hits) / static_cast<double>(n);
  CHECK(rate > 0.045);
  CHECK(rate < 0.073);
}

TEST_CASE("funding_states per bar", "[states]") {
  std::vector<Decimal> bars(6 * 31, Decimal::parse("0.0008"));
  auto st = funding_states(bars);
  REQUIRE(st.size() == bars.size());
  CHECK_FALSE(st[40].cumulative_7d.has_value());
  REQUIRE(st[41].cumulative_7d.has_value());
  CHECK(*st[41].cumulative_7d == Decimal::parse("0.0168"));
  REQUIRE(st.back().cumulative_30d.has_value());
  CHECK(*st.back().cumulative_30d == Decimal::parse("0.072"));
  CHECK(st.back().annualized_pct == Decimal::parse("87.6"));
  CHECK(st.back().magnitude_class == MagnitudeClass::elevated);
  CHECK(st.back().bias_sign == BiasSign::positive);
}
