// rg: batch command-line front end for the rangegov library.
//
// Exit codes (also listed in docs/cli.md):
//   0   success
//   1   data-quality failure (reject-severity flags; validate / ingest)
//   2   usage error: unknown subcommand or flag, bad flag value
//   3   schema violation in an input file
//   4   missing series or unreadable input file
//   5   invalid input (semantically wrong values, bad window, ...)
//   6   unsupported input (e.g. an unknown funding interval)
//   7   internal error
//   8+  hypotheses --verdict-exit: 8 + confirmed + 5 x falsified

#include <glob.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rg/backtest.hpp"
#include "rg/error.hpp"
#include "rg/io.hpp"
#include "rg/plot.hpp"
#include "rg/quality.hpp"
#include "rg/report.hpp"
#include "rg/synth.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit : int {
  kOk = 0,
  kQuality = 1,
  kUsage = 2,
  kSchema = 3,
  kMissing = 4,
  kInvalid = 5,
  kUnsupported = 6,
  kInternal = 7,
  kVerdictBase = 8,
};

int exit_for(rg::ErrorKind k) {
  switch (k) {
    case rg::ErrorKind::schema: return kSchema;
    case rg::ErrorKind::missing_series: return kMissing;
    case rg::ErrorKind::invalid_input: return kInvalid;
    case rg::ErrorKind::unsupported: return kUnsupported;
  }
  return kInternal;
}

struct Globals {
  std::string config_path;
  std::vector<std::string> sets;
  bool stamp = false;
  unsigned threads = 0;
};

rg::Config resolve_config(const Globals& g, const std::map<std::string, double>& manifest_config = {}) {
  rg::Config cfg;
  for (const auto& [k, v] : manifest_config) cfg.set(k, v);
  if (const char* env = std::getenv("RG_CONFIG"); env && *env) cfg = rg::load_config_file(env, cfg);
  if (!g.config_path.empty()) cfg = rg::load_config_file(g.config_path, cfg);
  for (const auto& s : g.sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw rg::Error(rg::ErrorKind::invalid_input, "--set expects key=value, got '" + s + "'");
    std::string key = s.substr(0, eq);
    if (!rg::Config::has(key)) throw rg::Error(rg::ErrorKind::schema, "--set: unknown config key '" + key + "'");
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(s.substr(eq + 1), &used);
      if (used != s.size() - eq - 1) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw rg::Error(rg::ErrorKind::invalid_input, "--set: '" + s.substr(eq + 1) + "' is not a number");
    }
    cfg.set(key, v);
  }
  return cfg;
}

rg::ReportOptions report_options(const Globals& g) {
  rg::ReportOptions o;
  if (g.stamp) {
    auto now = std::chrono::system_clock::now();
    o.stamp = rg::format_utc(std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count());
  }
  return o;
}

void write_report(const std::string& path, const rg::Json& r) {
  rg::check_report_envelope(r);
  if (path.empty() || path == "-") {
    std::cout << rg::dump_report(r);
  } else {
    rg::write_file(path, rg::dump_report(r));
  }
}

std::vector<std::string> expand_glob(const std::string& pattern) {
  glob_t g{};
  std::vector<std::string> out;
  int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
  if (rc == 0)
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  globfree(&g);
  std::sort(out.begin(), out.end());
  return out;
}

std::string summarize(const rg::QualityReport& q) {
  return "quality: " + std::to_string(q.checks_run) + " checks, " + std::to_string(q.count(rg::Severity::reject)) +
         " reject, " + std::to_string(q.count(rg::Severity::flag)) + " flag, " +
         std::to_string(q.count(rg::Severity::interpolated)) + " interpolated, " +
         std::to_string(q.count(rg::Severity::info)) + " info";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rg: perpetual-futures range-governance analytics (batch, advisory only)"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "JSON config file (overrides RG_CONFIG)");
  app.add_option("--set", g.sets, "config override key=value (repeatable; overrides files)");
  app.add_flag("--stamp", g.stamp, "embed the current UTC time in reports");
  app.add_option("--threads", g.threads, "worker threads for multi-panel commands (0 = all cores)");

  // ingest
  std::string manifest_path, out_path, quality_out;
  bool allow_flagged = false;
  auto* ingest = app.add_subcommand("ingest", "normalize raw files listed in a manifest into a panel");
  ingest->add_option("--manifest", manifest_path, "manifest.json")->required();
  ingest->add_option("--out", out_path, "panel output path")->required();
  ingest->add_flag("--allow-flagged", allow_flagged, "write the panel even with reject-severity flags");
  ingest->add_option("--quality-out", quality_out, "also write the quality report here");

  // validate
  std::string panel_path;
  auto* validate = app.add_subcommand("validate", "run the quality pipeline; exit 0 iff no reject flags");
  validate->add_option("--panel", panel_path, "panel file")->required();
  validate->add_option("--out", out_path, "quality report path (default: stdout summary only)");

  // metrics
  std::vector<std::string> families;
  auto* metrics = app.add_subcommand("metrics", "per-bar metric tables");
  metrics->add_option("--panel", panel_path, "panel file")->required();
  metrics->add_option("--family", families, "structural|cost|positioning|liquidity (repeatable; default all)")
      ->check(CLI::IsMember({"structural", "cost", "positioning", "liquidity"}));
  metrics->add_option("--out", out_path, "report path")->required();

  // hypotheses
  std::vector<int> hyps;
  std::optional<std::size_t> w_start, w_end;
  bool verdict_exit = false;
  auto* hypotheses = app.add_subcommand("hypotheses", "evaluate the range-governance hypotheses");
  hypotheses->set_help_flag("--help", "print this help message and exit");  // frees -h for --h
  hypotheses->add_option("--panel", panel_path, "panel file")->required();
  hypotheses->add_option("--h", hyps, "hypothesis 1..4 (repeatable; default all)")->check(CLI::Range(1, 4));
  hypotheses->add_option("--start", w_start, "first bar index of the window (default: trailing window)");
  hypotheses->add_option("--end", w_end, "last bar index of the window, inclusive");
  hypotheses->add_option("--out", out_path, "report path")->required();
  hypotheses->add_flag("--verdict-exit", verdict_exit, "exit 8 + confirmed + 5 x falsified");

  // regime
  auto* regime = app.add_subcommand("regime", "regime label, trigger matrix and advisories");
  regime->add_option("--panel", panel_path, "panel file")->required();
  regime->add_option("--out", out_path, "report path")->required();

  // report
  auto* report = app.add_subcommand("report", "combined analyst report by reporting cadence");
  report->add_option("--panel", panel_path, "panel file")->required();
  report->add_option("--out", out_path, "report path")->required();

  // synth
  std::string scenario_path, export_dir;
  std::optional<std::uint64_t> seed;
  std::int64_t scale = 1;
  auto* synth = app.add_subcommand("synth", "generate a synthetic panel from a scenario script");
  synth->add_option("--scenario", scenario_path, "scenario script")->required();
  synth->add_option("--seed", seed, "seed (overrides the script's seed directive)");
  synth->add_option("--out", out_path, "panel output path")->required();
  synth->add_option("--scale", scale, "multiply every price by this integer factor")->check(CLI::PositiveNumber);
  synth->add_option("--export-raw", export_dir, "also write raw input files plus manifest.json here");

  // backtest
  std::string panels_glob;
  auto* backtest = app.add_subcommand("backtest", "sliding-window evaluation over a set of panels");
  backtest->add_option("--panels", panels_glob, "glob of panel files")->required();
  backtest->add_option("--out", out_path, "summary report path")->required();

  // plot
  std::string report_path, kind;
  auto* plot = app.add_subcommand("plot", "static SVG figure plus CSV twin from a metrics report");
  plot->add_option("--report", report_path, "metrics report")->required();
  plot->add_option("--kind", kind, "funding|density|depth|range")
      ->required()
      ->check(CLI::IsMember({"funding", "density", "depth", "range"}));
  plot->add_option("--out", out_path, "SVG path; the CSV twin gets the same stem with .csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (ingest->parsed()) {
      auto m = rg::read_manifest(manifest_path);
      auto cfg = resolve_config(g, m.config);
      auto res = rg::ingest(m, cfg);
      std::cerr << "selected exchanges:";
      for (const auto& e : res.selected_exchanges) std::cerr << ' ' << e;
      std::cerr << "\n" << summarize(res.report) << "\n";
      if (!quality_out.empty()) write_report(quality_out, rg::quality_report(m.instrument, res.report, cfg, report_options(g)));
      if (!res.report.pass() && !allow_flagged) {
        for (const auto& f : res.report.flags)
          if (f.severity == rg::Severity::reject) std::cerr << "reject: " << f.check << " " << f.location << ": " << f.detail << "\n";
        std::cerr << "panel not written (use --allow-flagged to override)\n";
        return kQuality;
      }
      rg::write_panel(out_path, res.panel);
      return kOk;
    }
    if (validate->parsed()) {
      auto cfg = resolve_config(g);
      auto panel = rg::read_panel(panel_path);
      auto q = rg::run_quality_pipeline(panel, cfg);
      std::cerr << summarize(q.report) << "\n";
      if (!out_path.empty()) write_report(out_path, rg::quality_report(panel.instrument, q.report, cfg, report_options(g)));
      return q.report.pass() ? kOk : kQuality;
    }
    if (metrics->parsed()) {
      auto cfg = resolve_config(g);
      auto panel = rg::read_panel(panel_path);
      std::vector<rg::MetricFamily> fams;
      for (const auto& f : families) fams.push_back(*rg::parse_family(f));
      write_report(out_path, rg::metrics_report(panel, fams, cfg, report_options(g)));
      return kOk;
    }
    if (hypotheses->parsed()) {
      auto cfg = resolve_config(g);
      auto panel = rg::read_panel(panel_path);
      std::vector<rg::Hypothesis> which;
      for (int h : hyps) which.push_back(static_cast<rg::Hypothesis>(h - 1));
      std::optional<rg::Window> w;
      if (w_start || w_end) {
        if (!w_start || !w_end) throw rg::Error(rg::ErrorKind::invalid_input, "--start and --end go together");
        w = rg::Window{*w_start, *w_end};
      }
      auto r = rg::hypotheses_report(panel, which, w, cfg, report_options(g));
      write_report(out_path, r);
      for (const auto& v : r["verdicts"]) std::cerr << v["hypothesis"].get<std::string>() << ": " << v["outcome"].get<std::string>() << "\n";
      if (!verdict_exit) return kOk;
      const auto& c = r["counts"];
      return kVerdictBase + c["confirmed"].get<int>() + 5 * c["falsified"].get<int>();
    }
    if (regime->parsed()) {
      auto cfg = resolve_config(g);
      auto panel = rg::read_panel(panel_path);
      auto r = rg::regime_report(panel, cfg, report_options(g));
      write_report(out_path, r);
      std::cerr << "regime: " << r["regime"]["label"].get<std::string>() << " (advisory only)\n";
      return kOk;
    }
    if (report->parsed()) {
      auto cfg = resolve_config(g);
      auto panel = rg::read_panel(panel_path);
      auto q = rg::run_quality_pipeline(panel, cfg);
      write_report(out_path, rg::analyst_report(q.panel, q.report, cfg, report_options(g)));
      return kOk;
    }
    if (synth->parsed()) {
      auto sc = rg::load_scenario(scenario_path);
      if (seed) sc.seed = *seed;
      auto gen = rg::generate(sc);
      rg::Panel p = scale == 1 ? std::move(gen.panel) : rg::scale_panel_prices(gen.panel, scale);
      rg::write_panel(out_path, p);
      if (!export_dir.empty()) rg::export_raw(p, export_dir);
      std::cerr << "synth: " << p.candles.size() << " bars, " << gen.truth.size() << " segments\n";
      return kOk;
    }
    if (backtest->parsed()) {
      auto cfg = resolve_config(g);
      std::vector<rg::NamedPanel> panels;
      for (const auto& path : expand_glob(panels_glob)) panels.push_back({fs::path(path).filename().string(), rg::read_panel(path)});
      // Report assembly is ordered by instrument, then file name.
      std::stable_sort(panels.begin(), panels.end(), [](const rg::NamedPanel& a, const rg::NamedPanel& b) {
        return std::tie(a.panel.instrument, a.name) < std::tie(b.panel.instrument, b.name);
      });
      auto sum = rg::backtest(panels, cfg, g.threads);
      write_report(out_path, rg::backtest_report(sum, cfg, report_options(g)));
      std::cerr << "backtest: " << sum.panels << " panels, " << sum.windows.size() << " windows\n";
      return kOk;
    }
    if (plot->parsed()) {
      rg::Json r;
      try {
        r = rg::Json::parse(rg::read_file(report_path));
      } catch (const rg::Json::parse_error& e) {
        throw rg::Error(rg::ErrorKind::schema, report_path + ": malformed JSON: " + e.what());
      }
      rg::check_report_envelope(r);
      auto fig = rg::render_plot(r, *rg::parse_plot_kind(kind));
      fs::path svg(out_path);
      if (svg.extension() != ".svg") svg += ".svg";
      fs::path csv = svg;
      csv.replace_extension(".csv");
      rg::write_file(svg.string(), fig.svg);
      rg::write_file(csv.string(), fig.csv);
      return kOk;
    }
  } catch (const rg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
