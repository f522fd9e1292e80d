#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rg/config.hpp"
#include "rg/ingestion.hpp"
#include "rg/model.hpp"
#include "rg/quality.hpp"

namespace rg {

using Json = nlohmann::json;

/// Version stamped into every panel, manifest and report document.
inline constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Files

/// Reads a whole file. Throws rg::Error(missing_series) when it cannot be opened.
std::string read_file(const std::string& path);
/// Writes atomically enough for batch use (truncate + write). Throws on failure.
void write_file(const std::string& path, std::string_view content);

// ---------------------------------------------------------------------------
// Normalized panel documents
//
// Prices and rates are strings in plain decimal notation so they survive
// the round trip exactly; times are ISO-8601 UTC strings.

Json panel_to_json(const Panel& p);
Panel panel_from_json(const Json& j);
/// One record per line inside each series array: diffable and stable.
std::string format_panel(const Panel& p);
Panel parse_panel(std::string_view text);
void write_panel(const std::string& path, const Panel& p);
Panel read_panel(const std::string& path);

// ---------------------------------------------------------------------------
// Raw input formats

/// Headered comma-separated table. Quoted fields may contain commas and
/// doubled quotes. Blank lines are skipped.
struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;  // 1-based source line of each row

  [[nodiscard]] std::optional<std::size_t> column(std::string_view name) const;
  /// Throws rg::Error(schema) naming the file when the column is absent.
  [[nodiscard]] std::size_t require(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text, const std::string& source);

/// time,open,high,low,close,volume
std::vector<Candle4H> parse_candles_csv(const CsvTable& t);
/// time,price,volume (raw trades; aggregated with align_4h)
std::vector<RawTick> parse_trades_csv(const CsvTable& t, const std::string& exchange);
/// time,rate,interval_hours[,mark_price,index_price][,exchange]; the rate
/// is per source interval and is normalized to 8h here.
std::vector<FundingRecord> parse_funding_csv(const CsvTable& t, const std::string& exchange);
/// time,oi_usd|oi_contracts[,long_oi_usd,short_oi_usd,leverage,holder_shares].
/// Contract counts are converted with contract_value_usd.
std::vector<OpenInterestRecord> parse_oi_csv(const CsvTable& t, std::optional<double> contract_value_usd);
/// time,price,size_usd,side (side: long | short)
std::vector<LiquidationEvent> parse_liquidations_csv(const CsvTable& t);
/// time,value
std::vector<TimedValue> parse_series_csv(const CsvTable& t);

/// Book snapshot lines: "<time>|<bids>|<asks>" where each side is a
/// space-separated list of price:size pairs, best level first. Lines
/// starting with '#' are comments.
BookSnapshot parse_book_line(std::string_view line, std::size_t line_no = 0, const std::string& source = "");
std::string format_book_line(const BookSnapshot& b);
std::vector<BookSnapshot> parse_books(std::string_view text, const std::string& source);

std::string format_candles_csv(const std::vector<Candle4H>& c, double volume_share = 1.0);
std::string format_funding_csv(const std::vector<FundingRecord>& f, int interval_hours);
std::string format_oi_csv(const std::vector<OpenInterestRecord>& r);
std::string format_liquidations_csv(const std::vector<LiquidationEvent>& e);
std::string format_series_csv(const std::vector<TimedValue>& v);

// ---------------------------------------------------------------------------
// Manifest

struct ManifestSource {
  std::string id;        // exchange or source identifier
  std::string path;      // resolved against the manifest directory
  std::string format;    // candles: "candles" | "trades"
  double trailing_volume = 0.0;
  bool authoritative = false;
};

struct Manifest {
  std::string instrument;
  std::vector<ManifestSource> candles;
  std::vector<ManifestSource> funding;
  std::optional<ManifestSource> open_interest;
  std::optional<double> contract_value_usd;
  std::optional<ManifestSource> books;
  std::vector<ManifestSource> liquidations;
  std::map<std::string, std::string> annotation_series;  // name -> path
  std::map<std::string, std::string> notes;
  std::map<std::string, double> config;
};

Manifest manifest_from_json(const Json& j, const std::string& base_dir);
Json manifest_to_json(const Manifest& m);
Manifest read_manifest(const std::string& path);

/// Applies {"key": number, ...} overrides; unknown keys throw rg::Error(schema).
void apply_config_overrides(Config& cfg, const Json& overrides, const std::string& source);
Config load_config_file(const std::string& path, Config base);

struct IngestResult {
  Panel panel;
  QualityReport report;
  std::vector<std::string> selected_exchanges;
};

/// Parses every file (candle files in parallel), keeps the top exchanges by
/// trailing volume, checks cross-exchange consistency, merges candles by
/// volume weighting, then runs the quality pipeline.
IngestResult ingest(const Manifest& m, const Config& cfg = {});

/// Writes a panel as raw input files plus manifest.json into `dir`: candles
/// split evenly across three exchanges (and a fourth low-volume exchange
/// that top-3 selection drops), funding at a 4h source interval, and the
/// remaining series as-is.
void export_raw(const Panel& p, const std::string& dir);

}  // namespace rg
