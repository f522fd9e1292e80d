#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "rg/hypothesis.hpp"
#include "rg/synth.hpp"

using namespace rg;

namespace {

Generated scripted(const std::string& name) {
  return generate(load_scenario(std::string(RG_SOURCE_DIR) + "/scenarios/" + name + ".scn"));
}

Window scored_window(const Generated& g) {
  for (const auto& t : g.truth)
    if (!t.expect.verdicts.empty()) return t.window;
  FAIL("scenario has no scored segment");
  return {};
}

const Signal* find_signal(const HypothesisVerdict& v, const std::string& name) {
  for (const auto& s : v.signals)
    if (s.name == name) return &s;
  return nullptr;
}

bool condition_unmet_note(const HypothesisVerdict& v) {
  return std::any_of(v.notes.begin(), v.notes.end(), [](const std::string& n) { return n.starts_with("condition unmet"); });
}

}  // namespace

TEST_CASE("names parse and print", "[hypothesis]") {
  for (auto h : kAllHypotheses) CHECK(parse_hypothesis(to_string(h)) == h);
  CHECK(parse_hypothesis("3") == Hypothesis::h3);
  CHECK_FALSE(parse_hypothesis("h5").has_value());
  for (auto o : {Outcome::confirmed, Outcome::falsified, Outcome::not_evaluable, Outcome::inconclusive})
    CHECK(parse_outcome(to_string(o)) == o);
  CHECK_FALSE(parse_outcome("maybe").has_value());
}

TEST_CASE("relation_holds", "[hypothesis]") {
  CHECK(relation_holds(0.3, Relation::gt, 0.2));
  CHECK_FALSE(relation_holds(0.2, Relation::gt, 0.2));
  CHECK(relation_holds(0.2, Relation::ge, 0.2));
  CHECK(relation_holds(-1.0, Relation::lt, 0.0));
  CHECK(relation_holds(0.05, Relation::le, 0.05));
  CHECK(relation_holds(2.0, Relation::eq, 2.0));
  CHECK_FALSE(relation_holds(2.0, Relation::eq, 2.5));
}

TEST_CASE("scripted scenarios reach their verdicts", "[hypothesis][synth]") {
  struct Case {
    const char* scenario;
    Hypothesis h;
    Outcome want;
  };
  for (auto c : {Case{"h1-confirm", Hypothesis::h1, Outcome::confirmed}, Case{"h1-falsify", Hypothesis::h1, Outcome::falsified},
                 Case{"h2-confirm", Hypothesis::h2, Outcome::confirmed}, Case{"h2-falsify", Hypothesis::h2, Outcome::falsified},
                 Case{"h3-confirm", Hypothesis::h3, Outcome::confirmed}, Case{"h3-falsify", Hypothesis::h3, Outcome::falsified},
                 Case{"h4-confirm", Hypothesis::h4, Outcome::confirmed}, Case{"h4-falsify", Hypothesis::h4, Outcome::falsified}}) {
    auto g = scripted(c.scenario);
    auto v = evaluate(c.h, g.panel, scored_window(g));
    INFO(c.scenario);
    CHECK(v.outcome == c.want);
    CHECK(v.condition_met);
    if (v.outcome == Outcome::confirmed)
      for (const auto& s : v.signals)
        if (s.required && s.measured) CHECK(relation_holds(*s.measured, s.relation, s.threshold));
  }
}

TEST_CASE("a ten-day panel is not evaluable", "[hypothesis]") {
  auto g = generate(parse_scenario("scenario SHORT\nseed 3\nsegment range 60 width=0.08\n"));
  for (auto h : kAllHypotheses) {
    auto v = evaluate(h, g.panel, default_window(g.panel));
    CHECK(v.outcome == Outcome::not_evaluable);
    CHECK_FALSE(v.notes.empty());
  }
}

TEST_CASE("H2: open-interest collapse before the break fails the decline signal", "[hypothesis][h2]") {
  auto g = scripted("h2-confirm");
  auto w = scored_window(g);
  auto base = evaluate(Hypothesis::h2, g.panel, w);
  REQUIRE(base.outcome == Outcome::confirmed);
  const auto b = static_cast<std::size_t>(base.metrics.at("breakout_bar"));
  const Timestamp from = g.panel.candles[b - 6].open_time, to = g.panel.candles[b].close_time();
  // Scale OI down linearly to -8% across the six bars up to the break.
  for (auto& r : g.panel.oi) {
    if (r.time < from || r.time > to) continue;
    double f = 1.0 - 0.08 * static_cast<double>(r.time - from) / static_cast<double>(to - from);
    if (r.time >= g.panel.candles[b].open_time) f = 0.92;
    r.oi_usd *= f;
    if (r.long_oi_usd) *r.long_oi_usd *= f;
    if (r.short_oi_usd) *r.short_oi_usd *= f;
  }
  auto v = evaluate(Hypothesis::h2, g.panel, w);
  const auto* s = find_signal(v, "oi_max_decline");
  REQUIRE(s != nullptr);
  REQUIRE(s->measured.has_value());
  CHECK(*s->measured > 0.05);
  CHECK(s->met == false);
  CHECK(v.outcome != Outcome::confirmed);
}

TEST_CASE("H2: elevated funding before the break leaves the condition unmet", "[hypothesis][h2]") {
  auto g = scripted("h2-confirm");
  auto w = scored_window(g);
  auto base = evaluate(Hypothesis::h2, g.panel, w);
  const auto b = static_cast<std::size_t>(base.metrics.at("breakout_bar"));
  const Timestamp from = g.panel.candles[b - 6].open_time;
  for (auto& f : g.panel.funding)
    if (f.settle_time >= from) f.rate_8h = Decimal::parse("0.0008");
  auto v = evaluate(Hypothesis::h2, g.panel, w);
  CHECK_FALSE(v.condition_met);
  CHECK(v.outcome == Outcome::not_evaluable);
  CHECK(condition_unmet_note(v));
  CHECK(v.metrics.at("pre_break_min_abs_funding") == Catch::Approx(0.0008));
}

TEST_CASE("H3: two closes outside after the spike is a structural shift", "[hypothesis][h3]") {
  auto g = scripted("h3-confirm");
  auto w = scored_window(g);
  auto base = evaluate(Hypothesis::h3, g.panel, w);
  REQUIRE(base.outcome == Outcome::confirmed);
  REQUIRE(base.range.has_value());
  const auto k = static_cast<std::size_t>(base.metrics.at("spike_bar"));
  const Decimal outside = base.range->upper + base.range->upper.mul_ratio(1, 100);
  for (std::size_t j : {k + 1, k + 2}) {
    auto& c = g.panel.candles[j];
    c.close = outside;
    c.high = std::max(c.high, outside);
  }
  auto v = evaluate(Hypothesis::h3, g.panel, w);
  CHECK_FALSE(v.condition_met);
  CHECK(condition_unmet_note(v));
  CHECK(v.outcome == Outcome::not_evaluable);
}

TEST_CASE("H4: taps, recoils and the cluster condition", "[hypothesis][h4]") {
  auto g = scripted("h4-confirm");
  auto w = scored_window(g);
  auto base = evaluate(Hypothesis::h4, g.panel, w);
  REQUIRE(base.outcome == Outcome::confirmed);
  const double taps = base.metrics.at("taps");
  CHECK(taps >= 1.0);
  CHECK(base.metrics.at("tap_hits") == taps);
  REQUIRE(base.range.has_value());
  const auto& R = *base.range;

  SECTION("a tap retracing only 40% of its excursion does not recoil") {
    auto& C = g.panel.candles;
    std::size_t t = w.start;
    while (t <= w.end && C[t].high <= R.upper && C[t].low >= R.lower) ++t;
    REQUIRE(t <= w.end);
    const bool upper = C[t].high - R.upper > R.lower - C[t].low;
    const Decimal excursion = upper ? C[t].high - R.upper : R.lower - C[t].low;
    const Decimal held = upper ? C[t].high - excursion.mul_ratio(2, 5) : C[t].low + excursion.mul_ratio(2, 5);
    for (std::size_t j : {t, t + 1}) {
      C[j].close = held;
      C[j].high = std::max(C[j].high, held);
      C[j].low = std::min(C[j].low, held);
    }
    auto v = evaluate(Hypothesis::h4, g.panel, w);
    const auto* s = find_signal(v, "recoil_hit_rate");
    REQUIRE(s != nullptr);
    REQUIRE(s->measured.has_value());
    CHECK(*s->measured < 1.0);
    CHECK(v.metrics.at("tap_hits") < v.metrics.at("taps"));
  }

  SECTION("a large mid-range liquidation dilutes the cluster below 30%") {
    double total = 0.0;
    const Timestamp t0 = g.panel.candles[w.start].open_time, t1 = g.panel.candles[w.end].close_time();
    for (const auto& e : g.panel.liquidations)
      if (e.time > t0 && e.time <= t1) total += e.size_usd;
    // Near-boundary share s*total / (total + extra) = 0.10.
    const double near = base.metrics.at("cluster_share") * total;
    g.panel.liquidations.push_back(
        {g.panel.candles[w.start + 3].open_time, R.midpoint, near / 0.10 - total, LiquidationSide::long_liquidated});
    std::sort(g.panel.liquidations.begin(), g.panel.liquidations.end(),
              [](const auto& a, const auto& b) { return a.time < b.time; });
    auto v = evaluate(Hypothesis::h4, g.panel, w);
    CHECK(v.metrics.at("cluster_share") == Catch::Approx(0.10).epsilon(1e-9));
    CHECK_FALSE(v.condition_met);
    CHECK(condition_unmet_note(v));
    CHECK(v.outcome == Outcome::not_evaluable);
  }
}

TEST_CASE("verdicts are invariant under a x1000 price scaling", "[hypothesis][scaling]") {
  for (const char* name : {"h1-confirm", "h2-confirm", "h3-falsify", "h4-confirm"}) {
    auto g = scripted(name);
    auto w = scored_window(g);
    auto scaled = scale_panel_prices(g.panel, 1000);
    for (auto h : kAllHypotheses) {
      INFO(name << " " << to_string(h));
      auto a = evaluate(h, g.panel, w);
      auto b = evaluate(h, scaled, w);
      CHECK(a.outcome == b.outcome);
      CHECK(a.condition_met == b.condition_met);
    }
  }
}
