#include "rg/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "rg/error.hpp"

namespace rg {

// ---------------------------------------------------------------------------
// Random streams

std::uint64_t NamedRng::mix(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

NamedRng::NamedRng(std::uint64_t seed, std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the stream name
  for (unsigned char ch : name) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  state_ = mix(seed + 0x9e3779b97f4a7c15ULL) ^ mix(h);
}

std::uint64_t NamedRng::next_u64() {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix(state_);
}

double NamedRng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double NamedRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double NamedRng::normal() {
  if (spare_) {
    double v = *spare_;
    spare_.reset();
    return v;
  }
  double u1 = 0.0;
  while (u1 <= 0.0) u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

// ---------------------------------------------------------------------------
// Scenario text format

const char* to_string(SegmentTemplate t) {
  switch (t) {
    case SegmentTemplate::range: return "range";
    case SegmentTemplate::compression: return "compression";
    case SegmentTemplate::breakout: return "breakout";
    case SegmentTemplate::spike_revert: return "spike-revert";
    case SegmentTemplate::cascade: return "cascade";
    case SegmentTemplate::trend: return "trend";
    case SegmentTemplate::noise: return "noise";
  }
  return "range";
}

std::optional<SegmentTemplate> parse_template(std::string_view s) {
  for (auto t : {SegmentTemplate::range, SegmentTemplate::compression, SegmentTemplate::breakout,
                 SegmentTemplate::spike_revert, SegmentTemplate::cascade, SegmentTemplate::trend, SegmentTemplate::noise})
    if (s == to_string(t)) return t;
  return std::nullopt;
}

namespace {

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::optional<double> to_number(std::string_view s) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> to_unsigned(std::string_view s) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

const std::map<SegmentTemplate, std::set<std::string>>& allowed_params() {
  static const std::map<SegmentTemplate, std::set<std::string>> m{
      {SegmentTemplate::range, {"width", "period", "amplitude", "noise", "wall"}},
      {SegmentTemplate::compression, {"outcome", "variant"}},
      {SegmentTemplate::breakout, {"outcome"}},
      {SegmentTemplate::spike_revert, {"outcome"}},
      {SegmentTemplate::cascade, {"outcome"}},
      {SegmentTemplate::trend, {"drift", "vol", "variant"}},
      {SegmentTemplate::noise, {"vol"}},
  };
  return m;
}

[[noreturn]] void schema_error(std::size_t line, const std::string& msg) {
  throw Error(ErrorKind::schema, "scenario line " + std::to_string(line) + ": " + msg);
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  Scenario sc;
  bool named = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    const std::string& key = tok[0];
    auto need = [&](std::size_t n) {
      if (tok.size() != n) schema_error(line_no, "'" + key + "' expects " + std::to_string(n - 1) + " argument(s)");
    };
    if (key == "scenario") {
      need(2);
      sc.name = tok[1];
      named = true;
    } else if (key == "seed") {
      need(2);
      auto v = to_unsigned(tok[1]);
      if (!v) schema_error(line_no, "seed must be a non-negative integer");
      sc.seed = *v;
    } else if (key == "instrument") {
      need(2);
      sc.instrument = tok[1];
    } else if (key == "start") {
      need(2);
      try {
        sc.start = parse_utc(tok[1]);
      } catch (const Error& e) {
        schema_error(line_no, e.what());
      }
      if (!on_bar_grid(sc.start)) schema_error(line_no, "start must lie on the 4H grid");
    } else if (key == "price") {
      need(2);
      auto v = to_number(tok[1]);
      if (!v || !(*v > 0.0)) schema_error(line_no, "price must be positive");
      sc.price = *v;
    } else if (key == "segment") {
      if (tok.size() < 3) schema_error(line_no, "segment expects a template and a bar count");
      auto kind = parse_template(tok[1]);
      if (!kind) schema_error(line_no, "unknown template '" + tok[1] + "'");
      auto bars = to_unsigned(tok[2]);
      if (!bars || *bars == 0) schema_error(line_no, "bar count must be a positive integer");
      Segment seg;
      seg.kind = *kind;
      seg.bars = static_cast<std::size_t>(*bars);
      for (std::size_t i = 3; i < tok.size(); ++i) {
        auto eq = tok[i].find('=');
        if (eq == std::string::npos || eq == 0) schema_error(line_no, "parameter '" + tok[i] + "' is not key=value");
        std::string k = tok[i].substr(0, eq);
        if (!allowed_params().at(*kind).contains(k))
          schema_error(line_no, "template '" + tok[1] + "' has no parameter '" + k + "'");
        seg.params[k] = tok[i].substr(eq + 1);
      }
      sc.script.push_back(std::move(seg));
    } else if (key == "expect") {
      need(3);
      if (sc.script.empty()) schema_error(line_no, "expect before any segment");
      auto& truth = sc.script.back().expect;
      if (tok[1] == "regime") {
        auto r = parse_regime(tok[2]);
        if (!r) schema_error(line_no, "unknown regime '" + tok[2] + "'");
        truth.regime = *r;
      } else {
        auto h = parse_hypothesis(tok[1]);
        auto o = parse_outcome(tok[2]);
        if (!h) schema_error(line_no, "unknown hypothesis '" + tok[1] + "'");
        if (!o) schema_error(line_no, "unknown outcome '" + tok[2] + "'");
        truth.verdicts[*h] = *o;
      }
    } else {
      schema_error(line_no, "unknown directive '" + key + "'");
    }
  }
  if (!named) throw Error(ErrorKind::schema, "scenario has no 'scenario <name>' line");
  if (sc.script.empty()) throw Error(ErrorKind::schema, "scenario '" + sc.name + "' has no segments");
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::missing_series, "cannot open scenario " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string format_scenario(const Scenario& s) {
  std::ostringstream out;
  out << "scenario " << s.name << "\nseed " << s.seed << "\ninstrument " << s.instrument << "\nstart "
      << format_utc(s.start) << "\nprice " << Decimal::from_double(s.price).to_string() << "\n";
  for (const auto& seg : s.script) {
    out << "segment " << to_string(seg.kind) << " " << seg.bars;
    for (const auto& [k, v] : seg.params) out << " " << k << "=" << v;
    out << "\n";
    for (const auto& [h, o] : seg.expect.verdicts) out << "expect " << to_string(h) << " " << to_string(o) << "\n";
    if (seg.expect.regime) out << "expect regime " << to_string(*seg.expect.regime) << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Generator

namespace {

// Price response per million USD traded, inside the 0.0001-0.001 band
// quoted for major pairs.
constexpr double kImpactPerMillion = 5e-4;

/// Prices are generated on a 1e-4 grid so that boundaries and scripted
/// extremes compare exactly.
Decimal quantize(Decimal d) {
  constexpr int128_t q = 100'000'000;  // 1e-4 in raw units
  int128_t r = d.raw();
  int128_t rem = r % q;
  r -= rem;
  if (2 * (rem < 0 ? -rem : rem) >= q) r += rem < 0 ? -q : q;
  return Decimal::from_raw(r);
}

Decimal at(Decimal base, double factor) { return quantize(base * Decimal::from_double(factor)); }

struct Liq {
  Decimal price;
  double size_usd = 0.0;
  LiquidationSide side = LiquidationSide::long_liquidated;
  double frac = 0.5;  // position inside the bar
};

struct BarPlan {
  Decimal open, high, low, close;
  double volume = 0.0;
  Decimal funding;
  double basis = 0.0;
  double oi = 0.0;
  double long_share = 0.5;
  double wall_upper = 0.0, wall_lower = 0.0;
  double shelf_up = 0.0, shelf_down = 0.0;
  std::optional<Decimal> wall_upper_price, wall_lower_price;
  std::vector<Liq> liqs;
  std::vector<double> hourly;  // four hourly closes when present
};

struct ActiveRange {
  Decimal lower, upper, mid;
};

class Builder {
 public:
  explicit Builder(const Scenario& sc) : sc_(sc), price_(quantize(Decimal::from_double(sc.price))) {
    if (!(sc.price > 0.0)) throw Error(ErrorKind::invalid_input, "scenario price must be positive");
    oi_ = 1e9;
  }

  Generated run() {
    for (std::size_t i = 0; i < sc_.script.size(); ++i) {
      const Segment& seg = sc_.script[i];
      std::size_t first = bars_.size();
      seg_ = i;
      switch (seg.kind) {
        case SegmentTemplate::range: gen_range(seg); break;
        case SegmentTemplate::compression: gen_compression(seg); break;
        case SegmentTemplate::breakout: gen_breakout(seg); break;
        case SegmentTemplate::spike_revert: gen_spike(seg); break;
        case SegmentTemplate::cascade: gen_cascade(seg); break;
        case SegmentTemplate::trend: gen_trend(seg); break;
        case SegmentTemplate::noise: gen_noise(seg); break;
      }
      truth_.push_back({i, seg.kind, Window{first, bars_.size() - 1}, seg.expect});
    }
    return {materialize(), truth_};
  }

 private:
  const Scenario& sc_;
  std::vector<BarPlan> bars_;
  std::vector<TruthWindow> truth_;
  std::map<std::string, std::string> extra_notes_;
  Decimal price_;
  std::optional<ActiveRange> range_;
  double oi_ = 1e9;
  double long_share_ = 0.5;
  std::size_t seg_ = 0;

  NamedRng rng(std::string_view what) const {
    return NamedRng(sc_.seed, "segment." + std::to_string(seg_) + "." + std::string(what));
  }

  static double param(const Segment& s, const std::string& k, double def) {
    auto it = s.params.find(k);
    if (it == s.params.end()) return def;
    auto v = to_number(it->second);
    if (!v) throw Error(ErrorKind::invalid_input, "parameter " + k + "=" + it->second + " is not a number");
    return *v;
  }

  static std::string text_param(const Segment& s, const std::string& k, const std::string& def) {
    auto it = s.params.find(k);
    return it == s.params.end() ? def : it->second;
  }

  static bool falsify(const Segment& s) {
    auto o = text_param(s, "outcome", "confirm");
    if (o != "confirm" && o != "falsify")
      throw Error(ErrorKind::invalid_input, "outcome must be confirm or falsify, got " + o);
    return o == "falsify";
  }

  const ActiveRange& need_range(const Segment& s) const {
    if (!range_)
      throw Error(ErrorKind::invalid_input,
                  std::string("template ") + to_string(s.kind) + " needs a preceding range segment");
    return *range_;
  }

  /// Appends a bar with the default auxiliary series. Wicks are fractions
  /// of the body; a zero body is nudged open so no bar is a doji.
  BarPlan& push(Decimal open, Decimal close, double up_frac, double down_frac, NamedRng& r) {
    BarPlan b;
    if (open == close) open = at(close, 0.9995);
    b.open = open;
    b.close = close;
    Decimal body = (close - open).abs();
    Decimal top = std::max(open, close), bottom = std::min(open, close);
    b.high = quantize(top + body * Decimal::from_double(up_frac));
    b.low = quantize(bottom - body * Decimal::from_double(down_frac));
    if (range_) {
      b.high = std::max(top, std::min(b.high, at(range_->upper, 0.994)));
      b.low = std::min(bottom, std::max(b.low, at(range_->lower, 1.006)));
    }
    // Base flow plus an impact component: a move of |r| trades |r| / kImpact
    // million USD, so |r| regressed on notional has a slope just under kImpact.
    b.volume = 1000.0 * (1.0 + 0.2 * r.uniform()) +
               std::fabs(close.to_double() / open.to_double() - 1.0) / kImpactPerMillion * 1e6 / close.to_double();
    b.funding = quantize_rate(1.5e-4 + r.uniform(-3e-5, 3e-5));
    b.basis = 0.0005 + r.uniform(-3e-4, 3e-4);
    oi_ *= 1.0 + 0.0002 + 0.00005 * r.normal();
    b.oi = oi_;
    b.long_share = long_share_;
    if (range_) {
      b.wall_upper = b.wall_lower = 200.0;
      b.wall_upper_price = range_->upper;
      b.wall_lower_price = range_->lower;
    }
    for (int k = 0; k < 2; ++k) {
      Liq l;
      l.price = quantize(b.low + (b.high - b.low) * Decimal::from_double(r.uniform()));
      l.size_usd = std::round(r.uniform(20000.0, 80000.0));
      l.side = r.uniform() < 0.5 ? LiquidationSide::long_liquidated : LiquidationSide::short_liquidated;
      l.frac = r.uniform(0.01, 1.0);
      b.liqs.push_back(l);
    }
    bars_.push_back(std::move(b));
    price_ = close;
    return bars_.back();
  }

  static Decimal quantize_rate(double v) {
    // Rates on a 1e-8 grid.
    return Decimal::from_raw(static_cast<int128_t>(std::llround(v * 1e8)) * 10'000);
  }

  void gen_range(const Segment& s) {
    const double width = param(s, "width", 0.08);
    const auto period = static_cast<std::size_t>(param(s, "period", 12));
    const double amp = param(s, "amplitude", width * 0.375);
    const double noise = param(s, "noise", 0.0005);
    const double wall = param(s, "wall", 200.0);
    if (!(width > 0.01 && width < 0.5)) throw Error(ErrorKind::invalid_input, "range width must lie in (0.01, 0.5)");
    if (period < 12 || period % 4 != 0) throw Error(ErrorKind::invalid_input, "range period must be a multiple of 4, >= 12");
    if (!(amp > 0.0 && amp < width * 0.45)) throw Error(ErrorKind::invalid_input, "range amplitude must stay inside the corridor");
    const Decimal mid = price_;
    range_ = ActiveRange{at(mid, 1.0 - width / 2), at(mid, 1.0 + width / 2), mid};
    auto r = rng("range");
    for (std::size_t i = 0; i < s.bars; ++i) {
      double phase = 2.0 * std::numbers::pi * static_cast<double>(i % period) / static_cast<double>(period);
      double n = std::clamp(noise * r.normal(), -3 * noise, 3 * noise);
      Decimal close = at(mid, 1.0 + amp * std::sin(phase) + n);
      auto& b = push(price_, close, r.uniform(0.1, 0.5), r.uniform(0.1, 0.5), r);
      if (i % period == period / 4) b.high = range_->upper;
      if (i % period == 3 * period / 4) b.low = range_->lower;
      b.wall_upper = b.wall_lower = wall;
    }
  }

  void gen_compression(const Segment& s) {
    const std::string variant = text_param(s, "variant", "h1");
    auto r = rng("compression");
    const std::size_t n = s.bars;
    if (variant == "accumulation") {
      // A decline into the lows, then tight bars absorbing supply.
      range_.reset();
      const std::size_t decline = std::max<std::size_t>(2, std::min<std::size_t>(6, n / 3));
      Decimal bottom = price_;
      for (std::size_t i = 0; i < n; ++i) {
        Decimal close;
        if (i < decline) {
          close = at(price_, 0.99 + 0.0005 * std::clamp(r.normal(), -1.0, 1.0));
          bottom = close;
        } else {
          close = at(bottom, 1.0 + std::clamp(0.0008 * r.normal(), -0.0015, 0.0015));
        }
        auto& b = push(price_, close, r.uniform(0.2, 0.4), r.uniform(0.2, 0.4), r);
        b.volume *= i < decline ? 1.0 : 4.0;
      }
      return;
    }
    if (variant != "h1") throw Error(ErrorKind::invalid_input, "compression variant must be h1 or accumulation");
    const ActiveRange R = need_range(s);
    if (n < 30) throw Error(ErrorKind::invalid_input, "compression needs at least 30 bars");
    if (falsify(s)) {
      // Brief quiet, then two closes beyond the upper boundary and a trend.
      for (std::size_t i = 0; i < n; ++i) {
        Decimal close;
        if (i == 0) close = at(R.upper, 0.985);
        else if (i == 1) close = at(R.upper, 0.988);
        else if (i == 2) close = at(R.upper, 1.03);
        else if (i == 3) close = at(R.upper, 1.07);
        else close = at(price_, 1.01 + 0.003 * std::clamp(r.normal(), -2.0, 2.0));
        if (i == 2) range_.reset();  // broken: no further caps or walls
        auto& b = push(price_, close, r.uniform(0.1, 0.5), r.uniform(0.1, 0.5), r);
        b.funding = quantize_rate(3e-4 + r.uniform(-3e-5, 3e-5));
      }
      return;
    }
    // Decaying oscillation around the midpoint with growing wicks and two
    // failed taps of the upper boundary near the end.
    const double tau = static_cast<double>(n) / 3.5;
    for (std::size_t i = 0; i < n; ++i) {
      double amp = 0.03 * std::exp(-static_cast<double>(i) / tau);
      double phase = 2.0 * std::numbers::pi * static_cast<double>(i) / 12.0;
      Decimal close = at(R.mid, 1.0 + amp * std::sin(phase) + std::clamp(0.0002 * r.normal(), -0.0004, 0.0004));
      double frac = 0.1 + 1.4 * static_cast<double>(i) / static_cast<double>(n - 1);
      auto& b = push(price_, close, frac, frac, r);
      if (i == n - 5 || i == n - 2) b.high = R.upper;
      b.funding = quantize_rate(3e-4 + r.uniform(-3e-5, 3e-5));
    }
  }

  void gen_breakout(const Segment& s) {
    const ActiveRange R = need_range(s);
    const std::size_t n = s.bars;
    if (n < 24) throw Error(ErrorKind::invalid_input, "breakout needs at least 24 bars");
    const bool fail = falsify(s);
    const std::size_t b = n - 16;
    auto r = rng("breakout");
    for (std::size_t i = 0; i < n; ++i) {
      Decimal close;
      if (i < b) {
        double phase = 2.0 * std::numbers::pi * static_cast<double>(i) / 8.0;
        close = at(R.upper, 0.955 + 0.006 * std::sin(phase) + 0.0005 * std::clamp(r.normal(), -1.0, 1.0));
      } else if (i == b) {
        close = at(R.upper, 1.015);
      } else if (!fail) {
        if (i <= b + 3) close = at(R.upper, 1.01 + 0.01 * static_cast<double>(i - b));
        else close = at(price_, 1.004 + 0.002 * std::clamp(r.normal(), -1.0, 1.0));
      } else {
        if (i == b + 1) close = at(R.upper, 0.98);
        else close = at(R.upper, 0.97 + 0.003 * std::clamp(r.normal(), -1.5, 1.5));
      }
      if (i == b && !fail) range_.reset();
      auto& bar = push(price_, close, r.uniform(0.1, 0.5), r.uniform(0.1, 0.5), r);
      if (i < b) {
        bar.wall_upper = 200.0 - 180.0 * static_cast<double>(i) / static_cast<double>(b - 1);
        bar.wall_upper_price = R.upper;
        bar.wall_lower = 200.0;
        bar.wall_lower_price = R.lower;
      } else {
        bar.wall_upper = 20.0;
        bar.wall_upper_price = R.upper;
        bar.wall_lower_price = R.lower;
        bar.wall_lower = 200.0;
      }
      if (i >= b / 2) bar.shelf_up = 40.0;
      if (i + 3 >= b && i < b) bar.funding = quantize_rate(2e-5 + r.uniform(-5e-6, 5e-6));
      if (i + 6 >= b && i <= b) {
        // Rotation into the break: longs build while total OI eases 1%.
        double k = static_cast<double>(i + 6 - b);
        if (k > 0) bar.oi = oi_ = bars_[bars_.size() - 2].oi * (1.0 - 0.01 / 6.0);
        bar.long_share = long_share_ = 0.50 + 0.08 * k / 6.0;
      }
    }
  }

  void gen_spike(const Segment& s) {
    const ActiveRange R = need_range(s);
    const std::size_t n = s.bars;
    if (n < 20) throw Error(ErrorKind::invalid_input, "spike-revert needs at least 20 bars");
    const bool fail = falsify(s);
    const std::size_t k = n - 12;
    auto r = rng("spike");
    for (std::size_t i = 0; i < n; ++i) {
      Decimal close;
      if (i < k) close = at(R.mid, 1.0 + std::clamp(0.002 * r.normal(), -0.005, 0.005));
      else if (i == k) close = at(R.mid, 1.03);
      else if (fail) close = at(R.mid, 1.03 + std::clamp(0.0005 * r.normal(), -0.001, 0.001));
      else if (i == k + 1) close = at(R.mid, 1.015);
      else if (i == k + 2) close = R.mid;
      else close = at(R.mid, 1.0 + std::clamp(0.002 * r.normal(), -0.005, 0.005));
      Decimal open = price_;
      auto& b = push(open, close, r.uniform(0.1, 0.5), r.uniform(0.1, 0.5), r);
      if (i == k) {
        b.funding = quantize_rate(0.003);
        b.basis = 0.008;
      } else if (i == k + 1) {
        b.basis = 0.001;
      }
      // Hourly path from open to close; the spike bar whipsaws.
      double o = b.open.to_double(), c = b.close.to_double();
      for (int h = 1; h <= 4; ++h) {
        double v = o + (c - o) * h / 4.0;
        if (i == k && h < 4) v *= (h % 2 == 1) ? 1.012 : 0.992;
        b.hourly.push_back(v);
      }
    }
  }

  void gen_cascade(const Segment& s) {
    const ActiveRange R = need_range(s);
    const std::size_t n = s.bars;
    if (n < 30) throw Error(ErrorKind::invalid_input, "cascade needs at least 30 bars");
    const bool fail = falsify(s);
    auto r = rng("cascade");
    const std::set<std::size_t> taps{n * 8 / 36, n * 18 / 36, n * 28 / 36};
    const std::size_t brk = n - 10;
    // Centre of the scripted liquidation cluster (the five sizes are equal
    // in expectation and symmetric around U x 1.005).
    extra_notes_["truth.cluster_price"] = at(R.upper, 1.005).to_string();
    auto big_liqs = [&](BarPlan& b) {
      for (int j = 0; j < 5; ++j) {
        Liq l;
        l.price = at(R.upper, 1.003 + 0.001 * j);
        l.size_usd = std::round(r.uniform(2.0e6, 3.0e6));
        l.side = LiquidationSide::short_liquidated;
        l.frac = 0.2 + 0.15 * j;
        b.liqs.push_back(l);
      }
    };
    for (std::size_t i = 0; i < n; ++i) {
      double phase = 2.0 * std::numbers::pi * static_cast<double>(i) / 6.0;
      Decimal base = at(R.upper, 0.975 + 0.004 * std::sin(phase) + 0.001 * std::clamp(r.normal(), -1.5, 1.5));
      if (!fail && taps.contains(i)) {
        const Decimal open = price_;
        auto& b = push(open, at(R.upper, 0.992), 0.1, 0.3, r);
        b.high = at(R.upper, 1.012);
        b.funding = quantize_rate(4e-4);
        oi_ = b.oi = b.oi * 0.98;
        big_liqs(b);
        continue;
      }
      if (fail && i >= brk) {
        if (i == brk) range_.reset();
        Decimal prev = price_;
        Decimal close = at(R.upper, 1.01 + 0.01 * static_cast<double>(i - brk));
        auto& b = push(prev, close, 0.0, 0.1, r);
        b.high = at(close, 1.002);
        if (i > brk) b.low = at(prev, 0.999);
        b.wall_upper = 0.0;
        if (i < brk + 3) big_liqs(b);
        continue;
      }
      auto& b = push(price_, base, r.uniform(0.1, 0.5), r.uniform(0.1, 0.5), r);
      if (!fail && i > 0 && taps.contains(i - 1)) b.funding = quantize_rate(1e-4);
      if (!fail && i > 1 && taps.contains(i - 2)) b.funding = quantize_rate(1.2e-4);
    }
  }

  void gen_trend(const Segment& s) {
    range_.reset();
    auto r = rng("trend");
    const std::size_t n = s.bars;
    if (text_param(s, "variant", "trend") == "distribution") {
      const double drift = param(s, "drift", 0.003);
      const double vol = param(s, "vol", 0.0005);
      for (std::size_t i = 0; i < n; ++i) {
        double x = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
        Decimal close = at(price_, 1.0 + drift + std::clamp(vol * r.normal(), -2 * vol, 2 * vol));
        auto& b = push(price_, close, 0.1 + 1.9 * x, 0.1, r);
        b.volume = (2000.0 - 1400.0 * x) * (1.0 + 0.02 * r.uniform());
        oi_ = b.oi = b.oi / (1.0 + 0.0002) * (1.0 - 0.0015);
      }
      return;
    }
    if (text_param(s, "variant", "trend") != "trend")
      throw Error(ErrorKind::invalid_input, "trend variant must be trend or distribution");
    const double drift = param(s, "drift", 0.008);
    const double vol = param(s, "vol", 0.003);
    const double ls0 = long_share_;
    for (std::size_t i = 0; i < n; ++i) {
      Decimal close = at(price_, std::exp(drift + vol * r.normal()));
      auto& b = push(price_, close, r.uniform(0.1, 0.5), r.uniform(0.1, 0.5), r);
      b.long_share = long_share_ = ls0 + 0.12 * static_cast<double>(i + 1) / static_cast<double>(n);
      oi_ = b.oi = b.oi * 1.001;
    }
  }

  void gen_noise(const Segment& s) {
    range_.reset();
    auto r = rng("noise");
    const double vol = param(s, "vol", 0.01);
    for (std::size_t i = 0; i < s.bars; ++i) {
      Decimal close = at(price_, std::exp(vol * r.normal() - vol * vol / 2));
      push(price_, close, r.uniform(0.1, 0.5), r.uniform(0.1, 0.5), r);
    }
  }

  // -------------------------------------------------------------------------

  BookSnapshot make_book(const BarPlan& b, Timestamp t, NamedRng& r) const {
    std::map<Decimal, double> asks, bids;
    const Decimal c = b.close;
    for (int i = 0; i < 25; ++i) {
      double size = 5.0 * std::exp(-i / 6.0) * (1.0 + 0.1 * r.uniform());
      asks[at(c, 1.0002 + 0.001 * i)] += size;
      bids[at(c, 0.9998 - 0.001 * i)] += size;
    }
    const Decimal best_ask = asks.begin()->first, best_bid = bids.rbegin()->first;
    if (b.wall_upper_price && b.wall_upper > 0.0 && *b.wall_upper_price > best_ask) asks[*b.wall_upper_price] += b.wall_upper;
    if (b.wall_lower_price && b.wall_lower > 0.0 && *b.wall_lower_price < best_bid) bids[*b.wall_lower_price] += b.wall_lower;
    if (b.shelf_up > 0.0 && b.wall_upper_price)
      for (int j = 0; j < 5; ++j) {
        Decimal p = at(*b.wall_upper_price, 1.006 + 0.002 * j);
        if (p > best_ask) asks[p] += b.shelf_up / 5.0;
      }
    if (b.shelf_down > 0.0 && b.wall_lower_price)
      for (int j = 0; j < 5; ++j) {
        Decimal p = at(*b.wall_lower_price, 0.994 - 0.002 * j);
        if (p < best_bid) bids[p] += b.shelf_down / 5.0;
      }
    BookSnapshot snap;
    snap.time = t;
    for (const auto& [p, q] : asks) snap.asks.push_back({p, q});
    for (auto it = bids.rbegin(); it != bids.rend(); ++it) snap.bids.push_back({it->first, it->second});
    return snap;
  }

  Panel materialize() const {
    Panel p;
    p.instrument = sc_.instrument;
    NamedRng holders(sc_.seed, "holders");
    std::vector<double> shares(10);
    double tot = 0.0;
    for (auto& s : shares) tot += s = 0.5 + holders.uniform();
    for (auto& s : shares) s /= tot;
    NamedRng books(sc_.seed, "books");
    std::vector<TimedValue> hourly;
    for (std::size_t t = 0; t < bars_.size(); ++t) {
      const BarPlan& b = bars_[t];
      const Timestamp open = sc_.start + static_cast<Timestamp>(t) * kBarSeconds;
      const Timestamp close = open + kBarSeconds;
      p.candles.push_back({open, b.open, b.high, b.low, b.close, std::round(b.volume * 1e6) / 1e6, 3});

      FundingRecord f;
      f.settle_time = close;
      f.rate_8h = b.funding;
      f.source_interval_hours = 8;
      f.exchange_id = "synth";
      f.index_price = b.close;
      f.mark_price = at(b.close, 1.0 + b.basis);
      p.funding.push_back(f);

      OpenInterestRecord o;
      o.time = close;
      o.oi_usd = std::round(b.oi);
      o.long_oi_usd = std::round(o.oi_usd * b.long_share);
      o.short_oi_usd = o.oi_usd - *o.long_oi_usd;
      o.leverage_histogram = {{"5x", std::round(o.oi_usd * 0.20)},
                              {"10x", std::round(o.oi_usd * 0.35)},
                              {"25x", std::round(o.oi_usd * 0.30)},
                              {"50x", std::round(o.oi_usd * 0.10)},
                              {"100x", std::round(o.oi_usd * 0.05)}};
      o.holder_shares = shares;
      p.oi.push_back(std::move(o));

      p.books.push_back(make_book(b, close, books));

      for (const auto& l : b.liqs) {
        auto offset = std::clamp<Timestamp>(static_cast<Timestamp>(l.frac * kBarSeconds), 1, kBarSeconds);
        p.liquidations.push_back({open + offset, l.price, l.size_usd, l.side});
      }
      for (std::size_t h = 0; h < b.hourly.size(); ++h)
        hourly.push_back({open + static_cast<Timestamp>(h + 1) * 3600, std::round(b.hourly[h] * 1e4) / 1e4});
    }
    std::stable_sort(p.liquidations.begin(), p.liquidations.end(),
                     [](const LiquidationEvent& a, const LiquidationEvent& b) { return a.time < b.time; });
    if (!hourly.empty()) p.annotations.series["close_1h"] = std::move(hourly);
    p.annotations.notes["scenario"] = sc_.name;
    p.annotations.notes["seed"] = std::to_string(sc_.seed);
    for (const auto& [k, v] : extra_notes_) p.annotations.notes[k] = v;
    for (const auto& tw : truth_) {
      char key[32];
      std::snprintf(key, sizeof key, "truth.segment.%03zu", tw.segment);
      std::string v = std::string("template=") + to_string(tw.kind) + ";start=" + std::to_string(tw.window.start) +
                      ";end=" + std::to_string(tw.window.end);
      for (const auto& [h, o] : tw.expect.verdicts) v += std::string(";") + to_string(h) + "=" + to_string(o);
      if (tw.expect.regime) v += std::string(";regime=") + to_string(*tw.expect.regime);
      p.annotations.notes[key] = v;
    }
    return p;
  }
};

}  // namespace

Generated generate(const Scenario& scenario) { return Builder(scenario).run(); }

std::vector<TruthWindow> truth_from_notes(const Panel& panel) {
  std::vector<TruthWindow> out;
  const std::string prefix = "truth.segment.";
  for (auto it = panel.annotations.notes.lower_bound(prefix); it != panel.annotations.notes.end(); ++it) {
    if (it->first.compare(0, prefix.size(), prefix) != 0) break;
    TruthWindow tw;
    auto idx = to_unsigned(std::string_view(it->first).substr(prefix.size()));
    if (!idx) throw Error(ErrorKind::schema, "malformed truth key " + it->first);
    tw.segment = static_cast<std::size_t>(*idx);
    std::string_view v = it->second;
    while (!v.empty()) {
      auto semi = v.find(';');
      std::string_view field = v.substr(0, semi);
      v = semi == std::string_view::npos ? std::string_view{} : v.substr(semi + 1);
      auto eq = field.find('=');
      if (eq == std::string_view::npos) throw Error(ErrorKind::schema, "malformed truth entry " + it->second);
      auto k = field.substr(0, eq), val = field.substr(eq + 1);
      if (k == "template") {
        auto t = parse_template(val);
        if (!t) throw Error(ErrorKind::schema, "unknown template in truth entry " + it->second);
        tw.kind = *t;
      } else if (k == "start" || k == "end") {
        auto n = to_unsigned(val);
        if (!n) throw Error(ErrorKind::schema, "malformed bar index in truth entry " + it->second);
        (k == "start" ? tw.window.start : tw.window.end) = static_cast<std::size_t>(*n);
      } else if (k == "regime") {
        auto r = parse_regime(val);
        if (!r) throw Error(ErrorKind::schema, "unknown regime in truth entry " + it->second);
        tw.expect.regime = *r;
      } else {
        auto h = parse_hypothesis(k);
        auto o = parse_outcome(val);
        if (!h || !o) throw Error(ErrorKind::schema, "malformed verdict in truth entry " + it->second);
        tw.expect.verdicts[*h] = *o;
      }
    }
    out.push_back(tw);
  }
  return out;
}

Panel scale_panel_prices(const Panel& panel, std::int64_t factor) {
  if (factor <= 0) throw Error(ErrorKind::invalid_input, "scale factor must be positive");
  Panel p = panel;
  for (auto& c : p.candles) {
    c.open = c.open * factor;
    c.high = c.high * factor;
    c.low = c.low * factor;
    c.close = c.close * factor;
  }
  for (auto& f : p.funding) {
    f.mark_price = f.mark_price * factor;
    f.index_price = f.index_price * factor;
  }
  for (auto& b : p.books) {
    for (auto& l : b.bids) l.price = l.price * factor;
    for (auto& l : b.asks) l.price = l.price * factor;
  }
  for (auto& e : p.liquidations) e.price = e.price * factor;
  if (auto it = p.annotations.notes.find("truth.cluster_price"); it != p.annotations.notes.end())
    it->second = (Decimal::parse(it->second) * factor).to_string();
  if (auto it = p.annotations.series.find("close_1h"); it != p.annotations.series.end())
    for (auto& tv : it->second) tv.value *= static_cast<double>(factor);
  return p;
}

}  // namespace rg
