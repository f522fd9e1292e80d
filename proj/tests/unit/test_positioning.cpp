#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "rg/positioning.hpp"

using namespace rg;
using Catch::Approx;

namespace {

LiquidationEvent liq(double price, double usd) {
  return {0, Decimal::from_double(price), usd, LiquidationSide::long_liquidated};
}

}  // namespace

TEST_CASE("oi_rotation", "[rotation]") {
  std::vector<double> flat(10, 1e9), vol(10, 0.01);
  auto s = oi_rotation(flat, vol);
  CHECK_FALSE(s[0].has_value());
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i] == 0.0);

  std::vector<double> step{1e9, 1.01e9}, v{0.01, 0.01};
  CHECK(*oi_rotation(step, v)[1] == Approx(1.0));

  oracle::Gen g(31);
  std::vector<double> oi, vv;
  for (int i = 0; i < 200; ++i) {
    oi.push_back(g.uniform(1e8, 2e8));
    vv.push_back(g.chance(0.1) ? 0.0 : g.uniform(0.001, 0.05));
  }
  auto got = oi_rotation(oi, vv);
  for (std::size_t t = 1; t < oi.size(); ++t) {
    double want = (oi[t] - oi[t - 1]) / oi[t - 1] / std::max(vv[t], 1e-6);
    CHECK(oracle::close_rel(*got[t], want));
  }
}

TEST_CASE("classify_oi_event", "[rotation]") {
  std::vector<double> oi{1e9, 0.99e9, 0.98e9};
  std::vector<std::optional<double>> mix{0.55, 0.58, 0.62};
  auto r = classify_oi_event(oi, mix);
  CHECK(r.event == OiEvent::rotation);
  CHECK(r.oi_change == Approx(-0.02));
  CHECK(*r.long_share_shift == Approx(0.07));

  std::vector<double> crash{1e9, 0.95e9, 0.92e9};
  CHECK(classify_oi_event(crash, mix).event == OiEvent::collapse);

  std::vector<double> up{1e9, 1.01e9};
  std::vector<std::optional<double>> same{0.5, 0.5};
  CHECK(classify_oi_event(up, same).event == OiEvent::neither);

  std::vector<std::optional<double>> unknown{std::nullopt, std::nullopt, std::nullopt};
  auto p = classify_oi_event(oi, unknown);
  CHECK(p.partial);
  CHECK(p.event == OiEvent::neither);
}

TEST_CASE("liquidation_density matches the direct-sum oracle", "[kde][oracle]") {
  oracle::Gen g(500);
  for (int rep = 0; rep < 5; ++rep) {
    auto ev = oracle::random_liquidations(g, 500);
    auto d = liquidation_density(ev);
    CHECK(std::fabs(integrate(d) - 1.0) < 1e-3);
    CHECK(std::fabs(oracle::kde_integral(ev) - 1.0) < 1e-3);
    std::vector<double> probes;
    for (int i = 0; i < 10; ++i) probes.push_back(g.uniform(27000, 33000));
    auto at = liquidation_density(ev, probes);
    REQUIRE(at.grid.size() == 10);
    for (int i = 0; i < 10; ++i) CHECK(oracle::close_rel(at.grid[i].density, oracle::kde_at(ev, probes[i])));
  }
}

TEST_CASE("liquidation_density degenerate shapes", "[kde]") {
  std::vector<LiquidationEvent> one{liq(30000, 1e6), liq(30000, 2e6)};
  auto d = liquidation_density(one);
  CHECK(std::fabs(integrate(d) - 1.0) < 1e-3);
  REQUIRE(density_peak(d).has_value());
  CHECK(*density_peak(d) == Approx(30000).epsilon(1e-9));

  std::vector<LiquidationEvent> two{liq(29000, 1e6), liq(31000, 1e6)};
  std::vector<double> probes{29000, 31000, 29500, 30500};
  auto t = liquidation_density(two, probes);
  CHECK(t.grid[0].density == Approx(t.grid[1].density).epsilon(1e-12));
  CHECK(t.grid[2].density == Approx(t.grid[3].density).epsilon(1e-12));
  CHECK(t.grid[0].density > t.grid[2].density);

  auto e = liquidation_density(std::vector<LiquidationEvent>{});
  CHECK(e.empty);
  CHECK_FALSE(density_peak(e).has_value());

  auto ep = liquidation_density(two, {}, 0.01, Kernel::epanechnikov);
  CHECK(std::fabs(integrate(ep) - 1.0) < 1e-3);
}

TEST_CASE("boundary_cluster_share", "[cluster]") {
  auto R = make_range(Decimal::from_int(100), Decimal::from_int(110), 0);
  std::vector<LiquidationEvent> a{liq(99, 40), liq(105, 60)};
  auto ca = boundary_cluster_share(a, R);
  CHECK(ca.share == Approx(0.40));
  CHECK(ca.clustered);
  std::vector<LiquidationEvent> b{liq(111, 29), liq(105, 71)};
  auto cb = boundary_cluster_share(b, R);
  CHECK(cb.share == Approx(0.29));
  CHECK_FALSE(cb.clustered);
  std::vector<LiquidationEvent> c{liq(105, 10), liq(105, 20)};
  auto cc = boundary_cluster_share(c, R);
  CHECK(cc.share == 0.0);
  CHECK_FALSE(cc.clustered);
  std::vector<LiquidationEvent> d{liq(99, 30), liq(105, 70)};
  CHECK(boundary_cluster_share(d, R).clustered);  // >= is inclusive
}

TEST_CASE("long_short_ratio", "[ratio]") {
  auto a = long_short_ratio(200, 100);
  CHECK(a.ratio == 2.0);
  CHECK_FALSE(a.extreme);
  auto b = long_short_ratio(100, 100);
  CHECK(b.ratio == 1.0);
  CHECK_FALSE(b.extreme);
  auto c = long_short_ratio(49, 100);
  CHECK(c.ratio == Approx(0.49));
  CHECK(c.extreme);
  auto d = long_short_ratio(1, 0);
  CHECK(d.ratio == std::numeric_limits<double>::infinity());
  CHECK(d.extreme);
}

TEST_CASE("concentration_gini", "[gini]") {
  std::vector<double> one(100, 0.0);
  one[37] = 1.0;
  auto g1 = concentration_gini(one);
  CHECK(g1.gini == Approx(0.99));
  CHECK(g1.risk);
  std::vector<double> s{0.5, 0.3, 0.2};
  CHECK(oracle::close_rel(concentration_gini(s).gini, oracle::gini(s)));
  std::vector<double> eq(10, 0.1);
  CHECK(concentration_gini(eq).gini == Approx(0.0).margin(1e-15));
  CHECK(concentration_gini(std::vector<double>{}).gini == 0.0);

  oracle::Gen g(3);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> x;
    for (int i = 0; i < 30; ++i) x.push_back(g.uniform(0, 1));
    CHECK(oracle::close_rel(concentration_gini(x).gini, oracle::gini(x)));
  }
}

TEST_CASE("leverage_summary", "[leverage]") {
  auto s = leverage_summary({{"10x", 300}, {"100x", 100}, {"bogus", 5}});
  CHECK(s.available);
  CHECK(s.total_usd == 400.0);
  CHECK(s.weighted_mean == Approx(32.5));
  CHECK(s.max_leverage == 100.0);
  CHECK(s.share_above_50x == Approx(0.25));
  CHECK_FALSE(leverage_summary({}).available);
}
