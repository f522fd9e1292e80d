#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "rg/error.hpp"
#include "rg/liquidity.hpp"
#include "rg/report.hpp"
#include "rg/synth.hpp"

using namespace rg;
using Catch::Approx;

namespace {

BookSnapshot book(std::vector<std::pair<double, double>> bids, std::vector<std::pair<double, double>> asks) {
  BookSnapshot b;
  for (auto [p, s] : bids) b.bids.push_back({Decimal::from_double(p), s});
  for (auto [p, s] : asks) b.asks.push_back({Decimal::from_double(p), s});
  return b;
}

}  // namespace

TEST_CASE("depth_percentiles examples", "[depth]") {
  auto b = book({{99, 5}, {98, 5}, {97, 5}, {96, 5}}, {{101, 5}, {102, 5}, {103, 5}, {104, 5}});
  auto d = depth_percentiles(b);
  CHECK(d.bid.p25 == Decimal::from_int(99));
  CHECK(d.bid.p75 == Decimal::from_int(97));
  CHECK(d.ask.p25 == Decimal::from_int(101));
  CHECK(d.ask.p75 == Decimal::from_int(103));

  auto one = book({{99, 1}, {98, 100}, {97, 1}}, {{101, 1}});
  auto e = depth_percentiles(one);
  CHECK(e.bid.p25 == Decimal::from_int(98));
  CHECK(e.bid.p75 == Decimal::from_int(98));
}

TEST_CASE("depth_percentiles match the prefix-sum oracle", "[depth][oracle]") {
  oracle::Gen g(40);
  for (int rep = 0; rep < 50; ++rep) {
    auto b = oracle::random_book(g, static_cast<std::size_t>(g.integer(1, 30)));
    auto d = depth_percentiles(b);
    CHECK(d.bid.p25 == oracle::depth_percentile(b.bids, 1, 4));
    CHECK(d.bid.p75 == oracle::depth_percentile(b.bids, 3, 4));
    CHECK(d.ask.p25 == oracle::depth_percentile(b.asks, 1, 4));
    CHECK(d.ask.p75 == oracle::depth_percentile(b.asks, 3, 4));
  }
}

TEST_CASE("shelf_migration", "[shelf]") {
  auto R = make_range(Decimal::from_int(100), Decimal::from_int(110), 0);
  auto a = book({{104, 10}}, {{106, 30}, {108, 45}, {111, 25}});
  auto sa = shelf_migration(a, R, true);
  CHECK(sa.ask_share_above_upper == Approx(0.25));
  CHECK(sa.signal);
  auto b = book({{104, 10}}, {{106, 40}, {108, 40}, {111, 20}});
  auto sb = shelf_migration(b, R, true);
  CHECK(sb.share == Approx(0.20));
  CHECK_FALSE(sb.signal);
  auto c = book({{104, 10}, {101, 5}}, {{106, 40}, {108, 40}});
  auto sc = shelf_migration(c, R, true);
  CHECK(sc.share == 0.0);
  CHECK_FALSE(sc.signal);
  auto d = book({{104, 10}, {99, 30}}, {{106, 40}});
  auto sd = shelf_migration(d, R, false);
  CHECK(sd.bid_share_below_lower == Approx(0.75));
  CHECK(sd.signal);
}

TEST_CASE("depth_at_extremes", "[extremes]") {
  auto R = make_range(Decimal::from_int(100), Decimal::from_int(110), 0);
  auto empty = book({{105, 10}}, {{106, 10}});
  CHECK(depth_at_extremes(empty, R).total() == 0.0);

  BookSnapshot edge;
  edge.bids.push_back({Decimal::parse("100.5"), 10.0});  // exactly lower x 1.005
  edge.asks.push_back({Decimal::parse("106"), 1.0});
  CHECK(depth_at_extremes(edge, R).lower_usd == Approx(1005.0));
  edge.bids[0].price = Decimal::parse("100.500000000001");
  CHECK(depth_at_extremes(edge, R).lower_usd == 0.0);

  oracle::Gen g(12);
  for (int rep = 0; rep < 50; ++rep) {
    auto b = oracle::random_book(g, 30, 105.0, 0.05);
    auto Rr = make_range(g.decimal(100, 103), g.decimal(107, 110), 0);
    double lo = 0, hi = 0;
    for (const auto* side : {&b.bids, &b.asks})
      for (const auto& l : *side) {
        // Exact fixed-point filter: |p - L| <= L * 0.005.
        if ((l.price - Rr.lower).abs() <= Rr.lower * Decimal::parse("0.005")) lo += l.price.to_double() * l.size;
        if ((l.price - Rr.upper).abs() <= Rr.upper * Decimal::parse("0.005")) hi += l.price.to_double() * l.size;
      }
    auto d = depth_at_extremes(b, Rr);
    CHECK(oracle::close_rel(d.lower_usd, lo));
    CHECK(oracle::close_rel(d.upper_usd, hi));
  }
}

TEST_CASE("fill_slippage", "[slippage]") {
  // Half-spread 0.05%: bid 99.95, ask 100.05, mid 100.
  auto a = book({{99.95, 1e9}}, {{100.05, 1e9}});
  auto s = fill_slippage(a, 1e6, true);
  CHECK(s.slippage == Approx(0.0005));
  CHECK_FALSE(s.insufficient_depth);

  // Two levels: $500k at 100.05 then the rest at 101.
  auto b = book({{99.95, 1e9}}, {{100.05, 500000.0 / 100.05}, {101, 1e9}});
  double qty = 500000.0 / 100.05 + 500000.0 / 101.0;
  CHECK(fill_slippage(b, 1e6, true).slippage == Approx((1e6 / qty - 100.0) / 100.0).epsilon(1e-12));

  auto deep = book({{99.9999995, 1e12}}, {{100.0000005, 1e12}});
  CHECK(fill_slippage(deep, 1e6, true).slippage == Approx(0.0).margin(1e-8));
  CHECK(fill_slippage(deep, 1e6, false).slippage == Approx(0.0).margin(1e-8));

  auto thin = book({{99, 1}}, {{101, 1}});
  CHECK(fill_slippage(thin, 1e6, true).insufficient_depth);

  oracle::Gen g(6);
  for (int rep = 0; rep < 50; ++rep) {
    auto r = oracle::random_book(g, 25, 30000.0, 0.5);
    for (bool buy : {true, false}) {
      double order = g.uniform(1e4, 3e7);
      auto got = fill_slippage(r, order, buy);
      auto want = oracle::slippage(r, order, buy);
      CHECK(got.insufficient_depth == want.insufficient);
      CHECK(oracle::close_rel(got.slippage, want.slippage, 1e-9, 1e-15));
    }
  }
}

TEST_CASE("book_imbalance", "[imbalance]") {
  auto a = book({{99, 150}}, {{101, 100}});
  CHECK(book_imbalance(a).value == Approx(0.5));
  CHECK(book_imbalance(a).extreme);
  auto b = book({{99, 100}}, {{101, 100}});
  CHECK(book_imbalance(b).value == 0.0);
  CHECK_FALSE(book_imbalance(b).extreme);
  auto c = book({{99, 120}}, {{101, 100}});
  CHECK(book_imbalance(c).value == Approx(0.2));
  CHECK_FALSE(book_imbalance(c).extreme);
  auto d = book({{99, 100}}, {{101, 150}});  // mirror of a: extreme too
  CHECK(book_imbalance(d).extreme);
}

TEST_CASE("market_impact_coefficient", "[impact]") {
  std::vector<double> v{1, 2, 3, 5, 8}, y;
  for (double x : v) y.push_back(0.0005 * x);
  auto r = market_impact_coefficient(y, v);
  REQUIRE(r.has_value());
  CHECK(r->slope == Approx(0.0005).epsilon(1e-12));
  CHECK(r->intercept == Approx(0.0).margin(1e-15));
  CHECK(r->r_squared == Approx(1.0).epsilon(1e-12));

  std::vector<double> flat(5, 3.0);
  CHECK_FALSE(market_impact_coefficient(y, flat).has_value());

  oracle::Gen g(99);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> x, z;
    for (int i = 0; i < 6; ++i) {
      x.push_back(g.uniform(1, 100));
      z.push_back(g.uniform(0, 0.02));
    }
    auto got = market_impact_coefficient(z, x);
    auto want = oracle::ols(z, x);
    REQUIRE(got.has_value());
    REQUIRE(want.has_value());
    CHECK(oracle::close_rel(got->slope, want->slope, 1e-9, 1e-15));
    CHECK(oracle::close_rel(got->intercept, want->intercept, 1e-9, 1e-15));
    CHECK(oracle::close_rel(got->r_squared, want->r2, 1e-9, 1e-12));
  }
}

TEST_CASE("impact slope of synthetic panels sits in the 1e-4..1e-3 band", "[impact][synth]") {
  auto gen = generate(load_scenario(std::string(RG_SOURCE_DIR) + "/scenarios/h1-confirm.scn"));
  const auto& C = gen.panel.candles;
  std::vector<double> y, x;
  for (std::size_t i = 1; i < C.size(); ++i) {
    double prev = C[i - 1].close.to_double();
    y.push_back(std::fabs(C[i].close.to_double() - prev) / prev);
    x.push_back(C[i].volume * C[i].close.to_double() / 1e6);
  }
  auto whole = market_impact_coefficient(y, x);
  REQUIRE(whole.has_value());
  CHECK(whole->slope > 1e-4);
  CHECK(whole->slope < 1e-3);

  auto roll = rolling_market_impact(C, 6);
  std::vector<double> slopes;
  for (const auto& r : roll)
    if (r) slopes.push_back(r->slope);
  std::nth_element(slopes.begin(), slopes.begin() + slopes.size() / 2, slopes.end());
  double med = slopes[slopes.size() / 2];
  CHECK(med > 1e-4);
  CHECK(med < 1e-3);
}

TEST_CASE("spread", "[spread]") {
  auto a = book({{99.95, 1}}, {{100.05, 1}});
  auto s = spread(a);
  CHECK(s.value == Approx(0.001));
  CHECK_FALSE(s.uncertainty);
  auto b = book({{99.999999, 1}}, {{100, 1}});
  CHECK(spread(b).value == Approx(0.0).margin(1e-7));
  auto c = book({{101, 1}}, {{100, 1}});
  CHECK_THROWS_AS(spread(c), Error);
}
