#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "rg/error.hpp"
#include "rg/ingestion.hpp"

using namespace rg;
using Catch::Approx;

namespace {

const Timestamp k0400 = parse_utc("2024-01-01T04:00:00Z");

RawTick tick(Timestamp t, const char* px, double v = 1.0) { return {t, "ex", Decimal::parse(px), v}; }

std::vector<RawTick> random_ticks(oracle::Gen& g, std::size_t n, int buckets) {
  std::vector<RawTick> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back({oracle::kOrigin + g.integer(0, buckets * kBarSeconds - 1), "ex", g.decimal(90, 110),
                   std::round(g.uniform(0, 5) * 1000) / 1000});
  std::stable_sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.time < b.time; });
  return out;
}

}  // namespace

TEST_CASE("align_4h aggregates a bucket directly", "[align]") {
  std::vector<RawTick> t{tick(k0400, "5"), tick(k0400 + 60, "7"), tick(k0400 + 3600, "3"), tick(k0400 + 14399, "6")};
  auto c = align_4h(t);
  REQUIRE(c.size() == 1);
  CHECK(c[0].open_time == k0400);
  CHECK(c[0].open == Decimal::parse("5"));
  CHECK(c[0].high == Decimal::parse("7"));
  CHECK(c[0].low == Decimal::parse("3"));
  CHECK(c[0].close == Decimal::parse("6"));
  CHECK(c[0].volume == 4.0);
}

TEST_CASE("align_4h: single tick and boundaries", "[align]") {
  auto c = align_4h(std::vector<RawTick>{tick(k0400 + 5, "42.5")});
  REQUIRE(c.size() == 1);
  CHECK(c[0].open == c[0].close);
  CHECK(c[0].high == c[0].low);
  CHECK(c[0].open == Decimal::parse("42.5"));

  // 08:00:00 starts the next bucket.
  auto d = align_4h(std::vector<RawTick>{tick(k0400, "1"), tick(k0400 + kBarSeconds, "2")});
  CHECK(d.size() == 2);
  // Empty buckets are left as gaps.
  auto e = align_4h(std::vector<RawTick>{tick(k0400, "1"), tick(k0400 + 3 * kBarSeconds, "2")});
  REQUIRE(e.size() == 2);
  CHECK(e[1].open_time - e[0].open_time == 3 * kBarSeconds);
}

TEST_CASE("align_4h rejects unordered or invalid ticks", "[align]") {
  CHECK_THROWS_AS(align_4h(std::vector<RawTick>{tick(k0400 + 10, "1"), tick(k0400, "1")}), Error);
  CHECK_THROWS_AS(align_4h(std::vector<RawTick>{tick(k0400, "0")}), Error);
  CHECK_THROWS_AS(align_4h(std::vector<RawTick>{tick(k0400, "1", -1.0)}), Error);
}

TEST_CASE("align_4h matches the bucket-scan oracle", "[align][oracle]") {
  oracle::Gen g(2024);
  for (int rep = 0; rep < 20; ++rep) {
    auto ticks = random_ticks(g, 1000, 3);
    auto got = align_4h(ticks);
    auto want = oracle::align_4h(ticks);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].open_time == want[i].open_time);
      CHECK(got[i].open == want[i].open);
      CHECK(got[i].high == want[i].high);
      CHECK(got[i].low == want[i].low);
      CHECK(got[i].close == want[i].close);
      CHECK(oracle::close_rel(got[i].volume, want[i].volume));
    }
  }
}

TEST_CASE("vwap_merge examples", "[merge]") {
  oracle::Gen g(5);
  auto a = oracle::random_candles(g, 4);
  std::vector<std::vector<Candle4H>> same{a, a};
  auto m = vwap_merge(same);
  REQUIRE(m.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(m[i].close == a[i].close);
    CHECK(m[i].high == a[i].high);
    CHECK(m[i].volume == Approx(2 * a[i].volume));
  }

  Candle4H x{k0400, Decimal::from_int(100), Decimal::from_int(100), Decimal::from_int(100), Decimal::from_int(100), 1.0, 1};
  Candle4H y{k0400, Decimal::from_int(200), Decimal::from_int(200), Decimal::from_int(200), Decimal::from_int(200), 3.0, 1};
  std::vector<std::vector<Candle4H>> two{{x}, {y}};
  CHECK(vwap_merge(two)[0].close == Decimal::from_int(175));
  CHECK(vwap_merge(two)[0].exchange_count == 2);

  x.volume = y.volume = 0.0;  // zero total volume: equal weights
  std::vector<std::vector<Candle4H>> zero{{x}, {y}};
  CHECK(vwap_merge(zero)[0].close == Decimal::from_int(150));

  y.open_time += kBarSeconds;
  std::vector<std::vector<Candle4H>> bad{{x}, {y}};
  CHECK_THROWS_AS(vwap_merge(bad), Error);
}

TEST_CASE("vwap_merge matches the per-bar weighted-mean oracle", "[merge][oracle]") {
  oracle::Gen g(77);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<std::vector<Candle4H>> ex;
    for (int e = 0; e < 3; ++e) ex.push_back(oracle::random_candles(g, 50, 30000 + 50 * e));
    auto got = vwap_merge(ex);
    auto want = oracle::vwap_merge(ex);
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(oracle::close_rel(got[i].open.to_double(), want[i].open));
      CHECK(oracle::close_rel(got[i].high.to_double(), want[i].high));
      CHECK(oracle::close_rel(got[i].low.to_double(), want[i].low));
      CHECK(oracle::close_rel(got[i].close.to_double(), want[i].close));
      CHECK(oracle::close_rel(got[i].volume, want[i].volume));
    }
  }
}

TEST_CASE("normalize_funding to the 8h basis", "[funding]") {
  CHECK(normalize_funding(Decimal::parse("0.0005"), 8) == Decimal::parse("0.0005"));
  CHECK(normalize_funding(Decimal::parse("0.00025"), 4) == Decimal::parse("0.0005"));
  CHECK(normalize_funding(Decimal::parse("0.00075"), 12) == Decimal::parse("0.0005"));
  try {
    (void)normalize_funding(Decimal::parse("0.0001"), 1);
    FAIL("expected unsupported");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::unsupported);
  }
}

TEST_CASE("annualize_funding", "[funding]") {
  CHECK(annualize_funding(Decimal::parse("0.0005")) == Decimal::parse("54.75"));
  CHECK(annualize_funding(Decimal::parse("0.0008")) == Decimal::parse("87.6"));
  CHECK(annualize_funding(Decimal{}) == Decimal{});
}

TEST_CASE("cumulative_funding", "[funding]") {
  std::vector<Decimal> r30(30, Decimal::parse("0.0008"));
  CHECK(cumulative_funding(r30, 30) == Decimal::parse("0.024"));
  std::vector<Decimal> r90(90, Decimal::parse("0.0005"));
  CHECK(cumulative_funding(r90, 90) == Decimal::parse("0.045"));
  std::vector<Decimal> mixed{Decimal::parse("0.01"), {}, {}, {}};
  CHECK(cumulative_funding(mixed, 3) == Decimal{});
  CHECK_THROWS_AS(cumulative_funding(mixed, 5), Error);
}

TEST_CASE("basis_spread", "[basis]") {
  auto a = basis_spread(Decimal::from_int(30150), Decimal::from_int(30000));
  CHECK(a.value == Approx(0.005));
  CHECK_FALSE(a.dislocation);  // boundary is not a dislocation (strict >)
  CHECK(basis_spread(Decimal::from_int(123), Decimal::from_int(123)).value == 0.0);
  auto b = basis_spread(Decimal::from_int(29700), Decimal::from_int(30000));
  CHECK(b.value == Approx(-0.01));
  CHECK(b.dislocation);
  CHECK_THROWS_AS(basis_spread(Decimal::from_int(1), Decimal{}), Error);
}

TEST_CASE("select_top_exchanges keeps the largest, ties by id", "[select]") {
  std::vector<ExchangeVolume> v{{"d", 1}, {"b", 5}, {"a", 5}, {"c", 9}};
  CHECK(select_top_exchanges(v, 3) == std::vector<std::string>{"c", "a", "b"});
  CHECK(select_top_exchanges(v, 10).size() == 4);
}
