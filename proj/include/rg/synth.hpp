#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rg/hypothesis.hpp"
#include "rg/model.hpp"
#include "rg/regime.hpp"

namespace rg {

/// Deterministic random stream. Each stream is keyed by the scenario seed
/// and a name, so adding a stream never shifts the draws of another and
/// worker scheduling never changes output. Uniform and normal draws are
/// computed here rather than through <random> distributions, whose output
/// is implementation-defined.
class NamedRng {
 public:
  NamedRng(std::uint64_t seed, std::string_view name);

  std::uint64_t next_u64();
  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);   // [lo, hi)
  double normal();                        // standard normal (Box-Muller)

  /// SplitMix64 finalizer, exposed for the stream-key derivation.
  static std::uint64_t mix(std::uint64_t x);

 private:
  std::uint64_t state_;
  std::optional<double> spare_;
};

enum class SegmentTemplate { range, compression, breakout, spike_revert, cascade, trend, noise };
const char* to_string(SegmentTemplate t);
std::optional<SegmentTemplate> parse_template(std::string_view s);

struct SegmentTruth {
  std::map<Hypothesis, Outcome> verdicts;
  std::optional<RegimeKind> regime;
  bool operator==(const SegmentTruth&) const = default;
};

struct Segment {
  SegmentTemplate kind = SegmentTemplate::range;
  std::size_t bars = 0;
  std::map<std::string, std::string> params;  // template parameter overrides
  SegmentTruth expect;
  bool operator==(const Segment&) const = default;
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  std::string instrument = "SYNTH-PERP";
  Timestamp start = 1704067200;  // 2024-01-01T00:00:00Z
  double price = 30000.0;
  std::vector<Segment> script;
  bool operator==(const Scenario&) const = default;
};

/// Parses the line-oriented scenario format:
///
///   # comment
///   scenario H1-confirm
///   seed 7
///   instrument BTC-PERP
///   start 2024-01-01T00:00:00Z
///   price 30000
///   segment range 560 width=0.08
///   segment compression 36 outcome=confirm
///   expect h1 confirmed
///   expect regime accumulation
///
/// `expect` lines attach ground truth to the most recent segment.
/// Throws rg::Error(schema) with the offending line number.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);
std::string format_scenario(const Scenario& s);

/// Ground truth for one segment, resolved to bar indices.
struct TruthWindow {
  std::size_t segment = 0;
  SegmentTemplate kind = SegmentTemplate::range;
  Window window;
  SegmentTruth expect;
  bool operator==(const TruthWindow&) const = default;
};

struct Generated {
  Panel panel;
  std::vector<TruthWindow> truth;
};

/// Builds the panel for a scenario. The ground truth is also written to
/// panel.annotations.notes under "truth.segment.NNN" so a saved panel
/// carries it. Throws rg::Error(invalid_input) for unusable parameters.
Generated generate(const Scenario& scenario);

/// Reads the ground truth back from panel notes (empty when absent).
std::vector<TruthWindow> truth_from_notes(const Panel& panel);

/// Multiplies every price in the panel by an integer factor: candles,
/// mark/index prices, book levels and liquidation prices. Quantities,
/// USD notionals and rates are left alone.
Panel scale_panel_prices(const Panel& panel, std::int64_t factor);

}  // namespace rg
