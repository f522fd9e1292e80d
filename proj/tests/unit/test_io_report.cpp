#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "rg/error.hpp"
#include "rg/io.hpp"
#include "rg/plot.hpp"
#include "rg/report.hpp"
#include "rg/synth.hpp"

using namespace rg;
namespace fs = std::filesystem;

namespace {

Generated scripted(const std::string& name) {
  return generate(load_scenario(std::string(RG_SOURCE_DIR) + "/scenarios/" + name + ".scn"));
}

fs::path temp_dir(const std::string& tag) {
  auto d = fs::temp_directory_path() / ("rg-io-" + tag);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::optional<ErrorKind> kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("CSV parsing", "[io][csv]") {
  auto t = parse_csv("time,price,note\n2024-01-01T00:00:00Z,1.5,\"a, \"\"b\"\"\"\n\n2024-01-01T00:01:00Z,2,x\n", "t.csv");
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][2] == "a, \"b\"");
  CHECK(t.lines == std::vector<std::size_t>{2, 4});
  CHECK(t.column("price") == 1);
  CHECK_FALSE(t.column("size").has_value());
  CHECK(kind_of([&] { (void)t.require("size"); }) == ErrorKind::schema);

  auto c = parse_candles_csv(parse_csv("time,open,high,low,close,volume\n2024-01-01T00:00:00Z,100,110,90,105,3.5\n", "c"));
  REQUIRE(c.size() == 1);
  CHECK(c[0].high == Decimal::from_int(110));
  CHECK(c[0].volume == 3.5);

  CHECK(kind_of([] { parse_candles_csv(parse_csv("time,open,high,low,close\n", "c")); }) == ErrorKind::schema);
  CHECK(kind_of([] {
          parse_candles_csv(parse_csv("time,open,high,low,close,volume\nyesterday,1,1,1,1,1\n", "c"));
        }) == ErrorKind::schema);
}

TEST_CASE("funding CSV is normalized to 8h", "[io][csv]") {
  auto f = parse_funding_csv(parse_csv("time,rate,interval_hours\n2024-01-01T00:00:00Z,0.0001,4\n", "f"), "x");
  REQUIRE(f.size() == 1);
  CHECK(f[0].rate_8h == Decimal::parse("0.0002"));
  CHECK(f[0].source_interval_hours == 4);
  CHECK(f[0].exchange_id == "x");
}

TEST_CASE("liquidation sides", "[io][csv]") {
  auto l = parse_liquidations_csv(
      parse_csv("time,price,size_usd,side\n2024-01-01T00:00:00Z,100,5,long\n2024-01-01T00:00:01Z,101,6,short\n", "l"));
  REQUIRE(l.size() == 2);
  CHECK(l[0].side == LiquidationSide::long_liquidated);
  CHECK(l[1].side == LiquidationSide::short_liquidated);
  CHECK(kind_of([] {
          parse_liquidations_csv(parse_csv("time,price,size_usd,side\n2024-01-01T00:00:00Z,100,5,both\n", "l"));
        }) == ErrorKind::schema);
}

TEST_CASE("book lines", "[io][books]") {
  auto b = parse_book_line("2024-01-01T01:00:00Z|99.5:2 99:3|100.5:1.5");
  CHECK(b.time == parse_utc("2024-01-01T01:00:00Z"));
  REQUIRE(b.bids.size() == 2);
  CHECK(b.bids[1].price == Decimal::from_int(99));
  CHECK(b.asks[0].size == 1.5);
  CHECK(parse_book_line(format_book_line(b)) == b);

  auto many = parse_books("# comment\n2024-01-01T01:00:00Z|99:1|101:1\n\n2024-01-01T05:00:00Z|99:1|101:1\n", "b");
  CHECK(many.size() == 2);
  CHECK(kind_of([] { parse_book_line("2024-01-01T01:00:00Z|99:1"); }) == ErrorKind::schema);
  CHECK(kind_of([] { parse_book_line("2024-01-01T01:00:00Z|99-1|101:1"); }) == ErrorKind::schema);
}

TEST_CASE("manifest validation", "[io][manifest]") {
  Json ok = {{"schema_version", kSchemaVersion},
             {"instrument", "BTC-PERP"},
             {"candles", Json::array({{{"exchange", "a"}, {"path", "a.csv"}, {"trailing_volume", 10}}})}};
  auto m = manifest_from_json(ok, "/data");
  CHECK(m.instrument == "BTC-PERP");
  REQUIRE(m.candles.size() == 1);
  CHECK(m.candles[0].format == "candles");
  CHECK(fs::path(m.candles[0].path) == fs::path("/data/a.csv"));
  CHECK(manifest_from_json(manifest_to_json(m), "/").candles[0].path == m.candles[0].path);

  auto bad_version = ok;
  bad_version["schema_version"] = 99;
  CHECK(kind_of([&] { manifest_from_json(bad_version, "."); }) == ErrorKind::schema);
  auto unknown = ok;
  unknown["extra"] = 1;
  CHECK(kind_of([&] { manifest_from_json(unknown, "."); }) == ErrorKind::schema);
  auto bad_format = ok;
  bad_format["candles"][0]["format"] = "ohlc";
  CHECK(kind_of([&] { manifest_from_json(bad_format, "."); }) == ErrorKind::schema);
  CHECK(kind_of([] { read_manifest("/nonexistent/manifest.json"); }) == ErrorKind::missing_series);
}

TEST_CASE("config overrides", "[io][config]") {
  Config cfg;
  apply_config_overrides(cfg, {{"h4.condition.cluster_share", 0.4}}, "test");
  CHECK(cfg.h4_cluster_share == 0.4);
  CHECK(kind_of([&] { apply_config_overrides(cfg, {{"no.such.key", 1}}, "test"); }) == ErrorKind::schema);
  CHECK(kind_of([&] { apply_config_overrides(cfg, {{"h4.condition.cluster_share", "x"}}, "test"); }) == ErrorKind::schema);
}

TEST_CASE("panel documents round-trip exactly", "[io][panel]") {
  auto p = scripted("h4-confirm").panel;
  CHECK(parse_panel(format_panel(p)) == p);
  CHECK(panel_from_json(panel_to_json(p)) == p);
  auto d = temp_dir("panel");
  write_panel((d / "p.json").string(), p);
  CHECK(read_panel((d / "p.json").string()) == p);
  CHECK(kind_of([] { parse_panel("{\"schema_version\": 1}"); }) == ErrorKind::schema);
  CHECK(kind_of([] { parse_panel("not json"); }) == ErrorKind::schema);
}

TEST_CASE("export_raw then ingest reproduces the panel", "[io][ingest]") {
  auto p = scripted("h1-confirm").panel;
  auto d = temp_dir("raw");
  export_raw(p, d.string());
  auto r = ingest(read_manifest((d / "manifest.json").string()));
  CHECK(r.report.pass());
  CHECK(r.selected_exchanges.size() == 3);
  REQUIRE(r.panel.candles.size() == p.candles.size());
  for (std::size_t i = 0; i < p.candles.size(); ++i) {
    CHECK(r.panel.candles[i].open_time == p.candles[i].open_time);
    CHECK(r.panel.candles[i].close == p.candles[i].close);
    CHECK(r.panel.candles[i].high == p.candles[i].high);
    CHECK(std::fabs(r.panel.candles[i].volume - p.candles[i].volume) <= 1e-6 * p.candles[i].volume);
  }
  REQUIRE(r.panel.funding.size() == p.funding.size());
  for (std::size_t i = 0; i < p.funding.size(); ++i) CHECK(r.panel.funding[i].rate_8h == p.funding[i].rate_8h);
  CHECK(r.panel.liquidations == p.liquidations);
  CHECK(r.panel.books == p.books);
}

TEST_CASE("report envelopes", "[report]") {
  auto g = scripted("h3-confirm");
  Config cfg;
  cfg.h3_spike_sigma = 2.5;
  auto m = metrics_report(g.panel, {}, cfg);
  auto h = hypotheses_report(g.panel, {}, std::nullopt, cfg);
  auto r = regime_report(g.panel, cfg);
  std::vector<NamedPanel> one{{"x", g.panel}};
  auto b = backtest_report(backtest(one, cfg), cfg);
  QualityReport q;
  auto a = analyst_report(g.panel, q, cfg);
  auto qr = quality_report(g.panel.instrument, q, cfg);
  for (const auto* j : {&m, &h, &r, &b, &a, &qr}) {
    CHECK_NOTHROW(check_report_envelope(*j));
    CHECK((*j)["schema_version"] == kSchemaVersion);
    CHECK((*j)["config_overrides"] == Json{{"h3.condition.spike_sigma", 2.5}});
    CHECK_FALSE(j->contains("generated_at"));
  }
  CHECK(m["report"] == "metrics");
  CHECK(a["report"] == "analyst");
  for (const char* fam : {"structural", "cost", "positioning", "liquidity"}) CHECK(m["families"].contains(fam));

  auto stamped = metrics_report(g.panel, {}, cfg, {"2024-06-01T00:00:00Z"});
  CHECK(stamped["generated_at"] == "2024-06-01T00:00:00Z");

  Json broken = m;
  broken.erase("schema_version");
  CHECK(kind_of([&] { check_report_envelope(broken); }) == ErrorKind::schema);
  Json unknown = m;
  unknown["report"] = "horoscope";
  CHECK(kind_of([&] { check_report_envelope(unknown); }) == ErrorKind::schema);
}

TEST_CASE("report dumps are deterministic", "[report]") {
  auto g1 = scripted("h2-confirm"), g2 = scripted("h2-confirm");
  CHECK(dump_report(metrics_report(g1.panel, {})) == dump_report(metrics_report(g2.panel, {})));
  CHECK(dump_report(regime_report(g1.panel)) == dump_report(regime_report(g2.panel)));
  auto s = dump_report(hypotheses_report(g1.panel, {}, std::nullopt));
  CHECK(s.back() == '\n');
  CHECK(json_number(std::nan("")).is_null());
  CHECK(json_number(1.5) == 1.5);
}

TEST_CASE("density plot peak cell contains the scripted cluster", "[plot]") {
  auto g = scripted("h4-confirm");
  auto it = g.panel.annotations.notes.find("truth.cluster_price");
  REQUIRE(it != g.panel.annotations.notes.end());
  const double cluster = Decimal::parse(it->second).to_double();
  auto m = metrics_report(g.panel, {MetricFamily::positioning});
  auto cell = density_peak_cell(m);
  REQUIRE(cell.has_value());
  CHECK(cell->lower <= cluster);
  CHECK(cluster < cell->upper);
  auto fig = render_plot(m, PlotKind::density);
  CHECK(fig.svg.find("<svg") != std::string::npos);
  CHECK_FALSE(fig.csv.empty());
}

TEST_CASE("plots need their metric family", "[plot]") {
  auto g = scripted("h1-confirm");
  auto cost_only = metrics_report(g.panel, {MetricFamily::cost});
  CHECK_NOTHROW(render_plot(cost_only, PlotKind::funding));
  CHECK(kind_of([&] { render_plot(cost_only, PlotKind::density); }) == ErrorKind::missing_series);
  CHECK(kind_of([&] { render_plot(cost_only, PlotKind::depth); }) == ErrorKind::missing_series);
  CHECK(kind_of([&] { render_plot(cost_only, PlotKind::range); }) == ErrorKind::missing_series);
  for (auto k : {PlotKind::funding, PlotKind::density, PlotKind::depth, PlotKind::range})
    CHECK(parse_plot_kind(to_string(k)) == k);
}
