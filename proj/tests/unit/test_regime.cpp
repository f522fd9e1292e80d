#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "oracles.hpp"
#include "rg/error.hpp"
#include "rg/regime.hpp"
#include "rg/synth.hpp"

using namespace rg;
using Catch::Approx;

namespace {

Generated scripted(const std::string& name) {
  return generate(load_scenario(std::string(RG_SOURCE_DIR) + "/scenarios/" + name + ".scn"));
}

std::vector<TriggerEntry> entries(MetricState funding, MetricState shelf, MetricState oi, std::size_t neutral_extra) {
  std::vector<TriggerEntry> e{{"funding", funding, ""}, {"shelf_migration", shelf, ""}, {"oi_rotation", oi, ""}};
  for (std::size_t i = 0; i < neutral_extra; ++i) e.push_back({"extra" + std::to_string(i), MetricState::neutral, ""});
  return e;
}

MarketContext near_upper_context(Decimal rate) {
  MarketContext ctx;
  ctx.range = make_range(Decimal::from_int(28800), Decimal::from_int(31200), 0);
  ctx.last_close = Decimal::from_int(31100);
  ctx.funding.rate_8h = rate;
  ctx.funding.magnitude_class = classify_magnitude(rate);
  ctx.average_bar_range = 0.01;
  return ctx;
}

}  // namespace

TEST_CASE("scripted regimes are labelled", "[regime][synth]") {
  struct Case {
    const char* scenario;
    RegimeKind want;
  };
  for (auto c : {Case{"regime-accumulation", RegimeKind::accumulation}, Case{"regime-distribution", RegimeKind::distribution},
                 Case{"regime-trending", RegimeKind::trending}, Case{"regime-noise", RegimeKind::unclassified}}) {
    auto g = scripted(c.scenario);
    auto label = classify_regime(g.panel);
    INFO(c.scenario);
    CHECK(label.label == c.want);
    CHECK_FALSE(label.evidence.empty());
    REQUIRE_FALSE(g.truth.empty());
    CHECK(g.truth.back().expect.regime == c.want);
  }
}

TEST_CASE("regime names parse and print", "[regime]") {
  for (auto r : {RegimeKind::accumulation, RegimeKind::distribution, RegimeKind::trending, RegimeKind::unclassified})
    CHECK(parse_regime(to_string(r)) == r);
  CHECK_FALSE(parse_regime("sideways").has_value());
}

TEST_CASE("trigger matrix conviction", "[regime][trigger]") {
  auto high = build_trigger_matrix(entries(MetricState::aligned, MetricState::aligned, MetricState::aligned, 2));
  CHECK(high.conviction == Conviction::high);
  CHECK(high.band == ProbabilityBand::elevated);

  auto low = build_trigger_matrix(entries(MetricState::aligned, MetricState::divergent, MetricState::aligned, 2));
  CHECK(low.conviction == Conviction::low);
  CHECK(low.band == ProbabilityBand::baseline);

  auto mid = build_trigger_matrix(entries(MetricState::aligned, MetricState::neutral, MetricState::aligned, 1));
  CHECK(mid.conviction == Conviction::medium);

  CHECK_THROWS_AS(build_trigger_matrix(entries(MetricState::aligned, MetricState::aligned, MetricState::aligned, 0)), Error);
  std::vector<TriggerEntry> no_core{{"a", MetricState::aligned, ""}, {"b", MetricState::aligned, ""},
                                    {"c", MetricState::aligned, ""}, {"d", MetricState::aligned, ""}};
  CHECK_THROWS_AS(build_trigger_matrix(no_core), Error);
}

TEST_CASE("trigger entries from a panel cover the core metrics", "[regime][trigger]") {
  auto g = scripted("h2-confirm");
  auto s = build_bar_series(g.panel);
  auto w = default_window(g.panel);
  auto e = trigger_entries(g.panel, s, range_before(g.panel, w), g.panel.candles.size() - 1);
  CHECK(e.size() >= 4);
  for (const char* core : {"funding", "shelf_migration", "oi_rotation"})
    CHECK(std::any_of(e.begin(), e.end(), [&](const TriggerEntry& x) { return x.name == core; }));
  CHECK_NOTHROW(build_trigger_matrix(e));
}

TEST_CASE("funding_drag", "[advisor]") {
  CHECK(funding_drag(Decimal::parse("0.0008"), 10) == Decimal::parse("0.024"));
  CHECK(funding_drag(Decimal::parse("-0.0008"), 10) == Decimal::parse("0.024"));
  CHECK(funding_drag(Decimal::parse("0.0001"), 0) == Decimal{});
}

TEST_CASE("recommend_action scenarios", "[advisor]") {
  SECTION("elevated positive funding at the upper boundary fades the extreme") {
    auto a = recommend_action(near_upper_context(Decimal::parse("0.0008")));
    CHECK(a.scenario == TradeScenario::fade_extremes);
    CHECK(a.funding_drag == Decimal::parse("0.024"));
    CHECK(a.stop_min == Approx(0.01));
    CHECK(a.stop_max == Approx(0.02));
    CHECK(a.volatility_stop_min == Approx(0.015));
    CHECK(a.volatility_stop_max == Approx(0.02));
    CHECK(a.advisory_only);
  }
  SECTION("a structure shift with migrated shelves and neutral funding waits for validation") {
    auto ctx = near_upper_context(Decimal::parse("0.00005"));
    ctx.last_close = Decimal::from_int(31900);
    ctx.structure_shift = true;
    ctx.shelf_migrated = true;
    CHECK(recommend_action(ctx).scenario == TradeScenario::breakout_validation);
  }
  SECTION("a funding spike near a boundary without a shift is a cascade fade") {
    auto ctx = near_upper_context(Decimal::parse("-0.0008"));
    ctx.funding_spike = true;
    CHECK(recommend_action(ctx).scenario == TradeScenario::liquidation_cascade);
  }
  SECTION("accumulation and distribution phases") {
    auto ctx = near_upper_context(Decimal::parse("0.0001"));
    ctx.last_close = Decimal::from_int(30000);
    ctx.regime = RegimeKind::accumulation;
    CHECK(recommend_action(ctx).scenario == TradeScenario::accumulation_phase);
    ctx.regime = RegimeKind::distribution;
    CHECK(recommend_action(ctx).scenario == TradeScenario::distribution_phase);
  }
  SECTION("absorption at both boundaries with elevated funding stays at the midpoint") {
    auto ctx = near_upper_context(Decimal::parse("-0.0008"));
    ctx.last_close = Decimal::from_int(30000);
    ctx.absorption_both_boundaries = true;
    CHECK(recommend_action(ctx).scenario == TradeScenario::range_midpoint);
  }
  SECTION("nothing aligned") {
    MarketContext ctx;
    CHECK(recommend_action(ctx).scenario == TradeScenario::no_signal);
  }
}

TEST_CASE("percentile_rank and quantile_type7", "[advisor]") {
  std::vector<double> v{1, 2, 3, 4, 5};
  CHECK(percentile_rank(v, 1) == 0.0);
  CHECK(percentile_rank(v, 5) == 1.0);
  CHECK(percentile_rank(v, 3) == 0.5);
  std::vector<double> one{7};
  CHECK(percentile_rank(one, 7) == 0.0);
  CHECK(quantile_type7(v, 0.8) == Approx(4.2));
  CHECK(quantile_type7(v, 0.0) == 1.0);
  CHECK(quantile_type7(v, 1.0) == 5.0);
  CHECK(quantile_type7({10, 20}, 0.25) == Approx(12.5));

  oracle::Gen g(71);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> x;
    auto n = static_cast<std::size_t>(g.integer(2, 60));
    for (std::size_t i = 0; i < n; ++i) x.push_back(g.uniform(0, 1));
    double p = g.uniform(0, 1);
    // Brute force: the type-7 quantile interpolates between the
    // floor((n-1)p)-th and next order statistics.
    auto s = x;
    std::sort(s.begin(), s.end());
    double h = static_cast<double>(n - 1) * p;
    auto k = static_cast<std::size_t>(h);
    double want = k + 1 < n ? s[k] + (h - static_cast<double>(k)) * (s[k + 1] - s[k]) : s[k];
    CHECK(oracle::close_rel(quantile_type7(x, p), want, 1e-12));
  }
}

TEST_CASE("platform advisor endpoints", "[advisor]") {
  const std::size_t n = 90 * 6;
  std::vector<double> h;
  for (std::size_t i = 0; i < n; ++i) h.push_back(0.01 + 0.0001 * static_cast<double>(i % 97));

  auto lowest = h;
  lowest.back() = 0.0;
  auto a = advise_platform_parameters(lowest);
  CHECK(a.margin_percentile == 0.0);
  CHECK(a.max_leverage == Approx(100.0));
  CHECK_FALSE(a.aggressive);
  CHECK(a.liquidation_mode == "gradual");
  CHECK(a.margin_samples == 30 * 6);
  CHECK(a.liquidation_samples == 90 * 6);

  auto highest = h;
  highest.back() = 1.0;
  auto b = advise_platform_parameters(highest);
  CHECK(b.margin_percentile == 1.0);
  CHECK(b.max_leverage == Approx(20.0));
  CHECK(b.aggressive);
  CHECK(b.liquidation_mode == "aggressive");

  std::vector<double> empty;
  CHECK_THROWS_AS(advise_platform_parameters(empty), Error);
}

TEST_CASE("narrative_filter", "[narrative]") {
  auto g = scripted("regime-noise");
  const auto& C = g.panel.candles;
  const Timestamp event = C[C.size() / 2].open_time;

  auto quiet = narrative_filter(g.panel, build_bar_series(g.panel), event);
  CHECK(quiet.dimensions.size() == 4);

  for (auto& f : g.panel.funding)
    if (f.settle_time >= event) f.rate_8h = Decimal::parse("0.002");
  auto loud = narrative_filter(g.panel, build_bar_series(g.panel), event);
  auto it = std::find_if(loud.dimensions.begin(), loud.dimensions.end(), [](const auto& d) { return d.name == "funding"; });
  REQUIRE(it != loud.dimensions.end());
  CHECK(it->changed);
  CHECK(loud.structurally_relevant);

  Panel empty;
  CHECK_FALSE(narrative_filter(empty, build_bar_series(empty), event).structurally_relevant);
}
