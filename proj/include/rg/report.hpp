#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rg/backtest.hpp"
#include "rg/config.hpp"
#include "rg/hypothesis.hpp"
#include "rg/io.hpp"
#include "rg/model.hpp"
#include "rg/quality.hpp"

namespace rg {

// Every report is a JSON object with sorted keys and these envelope fields:
//   schema_version  integer, kSchemaVersion
//   report          "quality" | "metrics" | "hypotheses" | "regime" |
//                   "backtest" | "analyst"
//   instrument      string ("" for multi-panel reports)
//   config_overrides  {key: value} for every parameter not at its default
//   generated_at    ISO time, present only when a stamp is requested
// Reports contain no wall-clock data otherwise, so identical inputs give
// byte-identical files.

enum class MetricFamily { structural, cost, positioning, liquidity };
inline constexpr MetricFamily kAllFamilies[] = {MetricFamily::structural, MetricFamily::cost,
                                                MetricFamily::positioning, MetricFamily::liquidity};
const char* to_string(MetricFamily f);
std::optional<MetricFamily> parse_family(std::string_view s);

struct ReportOptions {
  std::optional<std::string> stamp;  // ISO time written as generated_at
};

Json quality_report(const std::string& instrument, const QualityReport& q, const Config& cfg = {},
                    const ReportOptions& opt = {});

/// Per-bar metric tables for the requested families (all when empty).
Json metrics_report(const Panel& panel, const std::vector<MetricFamily>& families, const Config& cfg = {},
                    const ReportOptions& opt = {});

/// Verdicts for the requested hypotheses (all when empty) over `window`
/// (the default trailing window when nullopt).
Json hypotheses_report(const Panel& panel, const std::vector<Hypothesis>& which, std::optional<Window> window,
                       const Config& cfg = {}, const ReportOptions& opt = {});

/// Regime label, trigger matrix, trade advisory, platform advisory and
/// narrative assessments for notes named "event.<name>" = ISO time.
Json regime_report(const Panel& panel, const Config& cfg = {}, const ReportOptions& opt = {});

Json backtest_report(const BacktestSummary& s, const Config& cfg = {}, const ReportOptions& opt = {});

/// Combined analyst report organized by reporting cadence: regime
/// (weekly), funding (per funding period), liquidity (daily), structural
/// triggers (pre-market daily), risk environment (weekly deep-dive),
/// narrative filtering (event-driven), plus quality and verdicts.
Json analyst_report(const Panel& panel, const QualityReport& q, const Config& cfg = {}, const ReportOptions& opt = {});

/// Pretty-printed (two-space indent) with a trailing newline.
std::string dump_report(const Json& report);

/// Structural check used after writing and by the round-trip tests:
/// envelope fields present and well typed, known report kind. Throws
/// rg::Error(schema) describing the first problem.
void check_report_envelope(const Json& report);

/// Finite doubles as numbers, non-finite as null.
Json json_number(double v);

}  // namespace rg
