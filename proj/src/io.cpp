#include "rg/io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

#include "rg/error.hpp"

namespace rg {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::missing_series, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::invalid_input, "cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorKind::invalid_input, "failed writing " + path);
}

namespace {

[[noreturn]] void schema(const std::string& msg) { throw Error(ErrorKind::schema, msg); }

std::string where(const std::string& source, std::size_t line) {
  return source + (line ? ":" + std::to_string(line) : std::string{});
}

Decimal dec(const std::string& s, const std::string& ctx) {
  auto d = Decimal::try_parse(s);
  if (!d) schema(ctx + ": '" + s + "' is not a decimal number");
  return *d;
}

double num(const std::string& s, const std::string& ctx) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    schema(ctx + ": '" + s + "' is not a number");
  }
}

Timestamp when(const std::string& s, const std::string& ctx) {
  try {
    return parse_utc(s);
  } catch (const Error& e) {
    schema(ctx + ": " + e.what());
  }
}

// JSON accessors with schema errors instead of library exceptions.
const Json& field(const Json& j, const char* key, const std::string& ctx) {
  if (!j.is_object()) schema(ctx + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema(ctx + ": missing field '" + key + "'");
  return *it;
}

std::string jstr(const Json& j, const char* key, const std::string& ctx) {
  const Json& v = field(j, key, ctx);
  if (!v.is_string()) schema(ctx + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

double jnum(const Json& v, const std::string& ctx) {
  if (!v.is_number()) schema(ctx + ": expected a number");
  return v.get<double>();
}

double jnum(const Json& j, const char* key, const std::string& ctx) { return jnum(field(j, key, ctx), ctx + "." + key); }

Decimal jdec(const Json& j, const char* key, const std::string& ctx) { return dec(jstr(j, key, ctx), ctx + "." + key); }

Timestamp jtime(const Json& j, const char* key, const std::string& ctx) { return when(jstr(j, key, ctx), ctx); }

const char* side_name(LiquidationSide s) { return s == LiquidationSide::long_liquidated ? "long" : "short"; }

LiquidationSide parse_side(const std::string& s, const std::string& ctx) {
  if (s == "long" || s == "long_liquidated") return LiquidationSide::long_liquidated;
  if (s == "short" || s == "short_liquidated") return LiquidationSide::short_liquidated;
  schema(ctx + ": side must be long or short, got '" + s + "'");
}

Json levels_json(const std::vector<BookLevel>& levels) {
  Json a = Json::array();
  for (const auto& l : levels) a.push_back(Json::array({l.price.to_string(), l.size}));
  return a;
}

std::vector<BookLevel> levels_from(const Json& a, const std::string& ctx) {
  if (!a.is_array()) schema(ctx + ": expected an array of [price, size]");
  std::vector<BookLevel> out;
  for (const auto& l : a) {
    if (!l.is_array() || l.size() != 2 || !l[0].is_string()) schema(ctx + ": level must be [\"price\", size]");
    out.push_back({dec(l[0].get<std::string>(), ctx), jnum(l[1], ctx)});
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Panel documents

Json panel_to_json(const Panel& p) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["document"] = "panel";
  j["instrument"] = p.instrument;
  Json candles = Json::array();
  for (const auto& c : p.candles)
    candles.push_back({{"time", format_utc(c.open_time)},
                       {"open", c.open.to_string()},
                       {"high", c.high.to_string()},
                       {"low", c.low.to_string()},
                       {"close", c.close.to_string()},
                       {"volume", c.volume},
                       {"exchange_count", c.exchange_count}});
  j["candles"] = std::move(candles);
  Json funding = Json::array();
  for (const auto& f : p.funding)
    funding.push_back({{"settle_time", format_utc(f.settle_time)},
                       {"rate_8h", f.rate_8h.to_string()},
                       {"source_interval_hours", f.source_interval_hours},
                       {"exchange_id", f.exchange_id},
                       {"mark_price", f.mark_price.to_string()},
                       {"index_price", f.index_price.to_string()}});
  j["funding"] = std::move(funding);
  Json oi = Json::array();
  for (const auto& r : p.oi) {
    Json o{{"time", format_utc(r.time)}, {"oi_usd", r.oi_usd}};
    if (r.long_oi_usd) o["long_oi_usd"] = *r.long_oi_usd;
    if (r.short_oi_usd) o["short_oi_usd"] = *r.short_oi_usd;
    if (!r.leverage_histogram.empty()) o["leverage_histogram"] = r.leverage_histogram;
    if (!r.holder_shares.empty()) o["holder_shares"] = r.holder_shares;
    oi.push_back(std::move(o));
  }
  j["open_interest"] = std::move(oi);
  Json books = Json::array();
  for (const auto& b : p.books)
    books.push_back({{"time", format_utc(b.time)}, {"bids", levels_json(b.bids)}, {"asks", levels_json(b.asks)}});
  j["books"] = std::move(books);
  Json liq = Json::array();
  for (const auto& e : p.liquidations)
    liq.push_back({{"time", format_utc(e.time)},
                   {"price", e.price.to_string()},
                   {"size_usd", e.size_usd},
                   {"side", side_name(e.side)}});
  j["liquidations"] = std::move(liq);
  Json series = Json::object();
  for (const auto& [name, values] : p.annotations.series) {
    Json a = Json::array();
    for (const auto& tv : values) a.push_back(Json::array({format_utc(tv.time), tv.value}));
    series[name] = std::move(a);
  }
  j["annotations"] = {{"notes", p.annotations.notes}, {"series", std::move(series)}};
  return j;
}

Panel panel_from_json(const Json& j) {
  const std::string ctx = "panel";
  if (!j.is_object()) schema("panel: document is not an object");
  if (!j.contains("schema_version") || !j["schema_version"].is_number_integer())
    schema("panel: missing integer schema_version");
  if (j["schema_version"].get<int>() != kSchemaVersion)
    schema("panel: unsupported schema_version " + j["schema_version"].dump());
  if (j.contains("document") && j["document"] != "panel") schema("panel: document type is " + j["document"].dump());
  Panel p;
  p.instrument = jstr(j, "instrument", ctx);
  auto arr = [&](const char* key) -> const Json& {
    const Json& a = field(j, key, ctx);
    if (!a.is_array()) schema(ctx + ": '" + key + "' must be an array");
    return a;
  };
  std::size_t i = 0;
  for (const auto& c : arr("candles")) {
    std::string cx = "candles[" + std::to_string(i++) + "]";
    Candle4H k;
    k.open_time = jtime(c, "time", cx);
    k.open = jdec(c, "open", cx);
    k.high = jdec(c, "high", cx);
    k.low = jdec(c, "low", cx);
    k.close = jdec(c, "close", cx);
    k.volume = jnum(c, "volume", cx);
    k.exchange_count = static_cast<int>(jnum(c, "exchange_count", cx));
    p.candles.push_back(k);
  }
  i = 0;
  for (const auto& f : arr("funding")) {
    std::string cx = "funding[" + std::to_string(i++) + "]";
    FundingRecord r;
    r.settle_time = jtime(f, "settle_time", cx);
    r.rate_8h = jdec(f, "rate_8h", cx);
    r.source_interval_hours = static_cast<int>(jnum(f, "source_interval_hours", cx));
    r.exchange_id = jstr(f, "exchange_id", cx);
    r.mark_price = jdec(f, "mark_price", cx);
    r.index_price = jdec(f, "index_price", cx);
    p.funding.push_back(r);
  }
  i = 0;
  for (const auto& o : arr("open_interest")) {
    std::string cx = "open_interest[" + std::to_string(i++) + "]";
    OpenInterestRecord r;
    r.time = jtime(o, "time", cx);
    r.oi_usd = jnum(o, "oi_usd", cx);
    if (o.contains("long_oi_usd")) r.long_oi_usd = jnum(o, "long_oi_usd", cx);
    if (o.contains("short_oi_usd")) r.short_oi_usd = jnum(o, "short_oi_usd", cx);
    if (o.contains("leverage_histogram")) {
      const Json& h = o["leverage_histogram"];
      if (!h.is_object()) schema(cx + ": leverage_histogram must be an object");
      for (auto it = h.begin(); it != h.end(); ++it) r.leverage_histogram[it.key()] = jnum(it.value(), cx);
    }
    if (o.contains("holder_shares")) {
      const Json& h = o["holder_shares"];
      if (!h.is_array()) schema(cx + ": holder_shares must be an array");
      for (const auto& v : h) r.holder_shares.push_back(jnum(v, cx));
    }
    p.oi.push_back(std::move(r));
  }
  i = 0;
  for (const auto& b : arr("books")) {
    std::string cx = "books[" + std::to_string(i++) + "]";
    BookSnapshot s;
    s.time = jtime(b, "time", cx);
    s.bids = levels_from(field(b, "bids", cx), cx + ".bids");
    s.asks = levels_from(field(b, "asks", cx), cx + ".asks");
    p.books.push_back(std::move(s));
  }
  i = 0;
  for (const auto& e : arr("liquidations")) {
    std::string cx = "liquidations[" + std::to_string(i++) + "]";
    p.liquidations.push_back(
        {jtime(e, "time", cx), jdec(e, "price", cx), jnum(e, "size_usd", cx), parse_side(jstr(e, "side", cx), cx)});
  }
  if (j.contains("annotations")) {
    const Json& a = j["annotations"];
    if (!a.is_object()) schema("panel: annotations must be an object");
    if (a.contains("notes")) {
      if (!a["notes"].is_object()) schema("panel: annotations.notes must be an object");
      for (auto it = a["notes"].begin(); it != a["notes"].end(); ++it) {
        if (!it.value().is_string()) schema("panel: note '" + it.key() + "' must be a string");
        p.annotations.notes[it.key()] = it.value().get<std::string>();
      }
    }
    if (a.contains("series")) {
      if (!a["series"].is_object()) schema("panel: annotations.series must be an object");
      for (auto it = a["series"].begin(); it != a["series"].end(); ++it) {
        std::string cx = "annotations.series." + it.key();
        if (!it.value().is_array()) schema(cx + " must be an array");
        auto& out = p.annotations.series[it.key()];
        for (const auto& tv : it.value()) {
          if (!tv.is_array() || tv.size() != 2 || !tv[0].is_string()) schema(cx + ": entries are [\"time\", value]");
          out.push_back({when(tv[0].get<std::string>(), cx), jnum(tv[1], cx)});
        }
      }
    }
  }
  return p;
}

std::string format_panel(const Panel& p) {
  Json j = panel_to_json(p);
  std::string out = "{\n";
  bool first = true;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!first) out += ",\n";
    first = false;
    out += "  " + Json(it.key()).dump() + ": ";
    if (it.value().is_array() && !it.value().empty()) {
      out += "[\n";
      for (std::size_t k = 0; k < it.value().size(); ++k) {
        out += "    " + it.value()[k].dump();
        out += k + 1 < it.value().size() ? ",\n" : "\n";
      }
      out += "  ]";
    } else {
      out += it.value().dump();
    }
  }
  out += "\n}\n";
  return out;
}

Panel parse_panel(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    schema(std::string("panel: malformed JSON: ") + e.what());
  }
  return panel_from_json(j);
}

void write_panel(const std::string& path, const Panel& p) { write_file(path, format_panel(p)); }

Panel read_panel(const std::string& path) {
  try {
    return parse_panel(read_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::schema) throw Error(ErrorKind::schema, path + ": " + e.what());
    throw;
  }
}

// ---------------------------------------------------------------------------
// CSV

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  return std::nullopt;
}

std::size_t CsvTable::require(std::string_view name) const {
  auto c = column(name);
  if (!c) schema(source + ": missing column '" + std::string(name) + "'");
  return *c;
}

CsvTable parse_csv(std::string_view text, const std::string& source) {
  CsvTable t;
  t.source = source;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;  // UTF-8 byte-order mark
  while (pos < text.size()) {
    ++line_no;
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false, any = false;
    std::size_t start_line = line_no;
    while (pos < text.size()) {
      char ch = text[pos++];
      if (quoted) {
        if (ch == '"') {
          if (pos < text.size() && text[pos] == '"') {
            cur += '"';
            ++pos;
          } else {
            quoted = false;
          }
        } else {
          if (ch == '\n') ++line_no;
          cur += ch;
        }
        continue;
      }
      if (ch == '"') {
        quoted = true;
        any = true;
      } else if (ch == ',') {
        fields.push_back(std::move(cur));
        cur.clear();
        any = true;
      } else if (ch == '\n') {
        break;
      } else if (ch != '\r') {
        cur += ch;
        any = true;
      }
    }
    if (quoted) schema(where(source, start_line) + ": unterminated quoted field");
    if (!any && cur.empty() && fields.empty()) continue;  // blank line
    fields.push_back(std::move(cur));
    for (auto& f : fields) {
      auto b = f.find_first_not_of(" \t");
      auto e = f.find_last_not_of(" \t");
      f = b == std::string::npos ? std::string{} : f.substr(b, e - b + 1);
    }
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size())
      schema(where(source, start_line) + ": expected " + std::to_string(t.header.size()) + " fields, got " +
             std::to_string(fields.size()));
    t.rows.push_back(std::move(fields));
    t.lines.push_back(start_line);
  }
  if (t.header.empty()) schema(source + ": empty file (a header row is required)");
  return t;
}

std::vector<Candle4H> parse_candles_csv(const CsvTable& t) {
  auto ct = t.require("time"), co = t.require("open"), ch = t.require("high"), cl = t.require("low"),
       cc = t.require("close"), cv = t.require("volume");
  std::vector<Candle4H> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    std::string ctx = where(t.source, t.lines[i]);
    Candle4H c;
    c.open_time = when(r[ct], ctx);
    c.open = dec(r[co], ctx);
    c.high = dec(r[ch], ctx);
    c.low = dec(r[cl], ctx);
    c.close = dec(r[cc], ctx);
    c.volume = num(r[cv], ctx);
    out.push_back(c);
  }
  return out;
}

std::vector<RawTick> parse_trades_csv(const CsvTable& t, const std::string& exchange) {
  auto ct = t.require("time"), cp = t.require("price"), cv = t.require("volume");
  std::vector<RawTick> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    std::string ctx = where(t.source, t.lines[i]);
    out.push_back({when(r[ct], ctx), exchange, dec(r[cp], ctx), num(r[cv], ctx)});
  }
  return out;
}

std::vector<FundingRecord> parse_funding_csv(const CsvTable& t, const std::string& exchange) {
  auto ct = t.require("time"), cr = t.require("rate"), ci = t.require("interval_hours");
  auto cm = t.column("mark_price"), cx = t.column("index_price"), ce = t.column("exchange");
  std::vector<FundingRecord> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    std::string ctx = where(t.source, t.lines[i]);
    FundingRecord f;
    f.settle_time = when(r[ct], ctx);
    double interval = num(r[ci], ctx);
    if (interval != std::floor(interval)) schema(ctx + ": interval_hours must be an integer");
    f.source_interval_hours = static_cast<int>(interval);
    try {
      f.rate_8h = normalize_funding(dec(r[cr], ctx), f.source_interval_hours);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::unsupported) throw Error(ErrorKind::unsupported, ctx + ": " + e.what());
      throw;
    }
    f.exchange_id = ce && !r[*ce].empty() ? r[*ce] : exchange;
    if (cm && !r[*cm].empty()) f.mark_price = dec(r[*cm], ctx);
    if (cx && !r[*cx].empty()) f.index_price = dec(r[*cx], ctx);
    out.push_back(f);
  }
  return out;
}

std::vector<OpenInterestRecord> parse_oi_csv(const CsvTable& t, std::optional<double> contract_value_usd) {
  auto ct = t.require("time");
  auto cu = t.column("oi_usd"), cn = t.column("oi_contracts");
  auto cl = t.column("long_oi_usd"), cs = t.column("short_oi_usd"), cv = t.column("leverage"),
       ch = t.column("holder_shares");
  if (!cu && !cn) schema(t.source + ": needs an oi_usd or oi_contracts column");
  if (!cu && !contract_value_usd)
    schema(t.source + ": oi_contracts needs contract_value_usd in the manifest to convert to USD");
  std::vector<OpenInterestRecord> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    std::string ctx = where(t.source, t.lines[i]);
    OpenInterestRecord o;
    o.time = when(r[ct], ctx);
    o.oi_usd = cu ? num(r[*cu], ctx) : num(r[*cn], ctx) * *contract_value_usd;
    if (cl && !r[*cl].empty()) o.long_oi_usd = num(r[*cl], ctx);
    if (cs && !r[*cs].empty()) o.short_oi_usd = num(r[*cs], ctx);
    if (cv && !r[*cv].empty()) {
      std::string_view s = r[*cv];
      while (!s.empty()) {
        auto semi = s.find(';');
        std::string item(s.substr(0, semi));
        s = semi == std::string_view::npos ? std::string_view{} : s.substr(semi + 1);
        auto colon = item.find(':');
        if (colon == std::string::npos) schema(ctx + ": leverage entries are bucket:usd separated by ';'");
        o.leverage_histogram[item.substr(0, colon)] = num(item.substr(colon + 1), ctx);
      }
    }
    if (ch && !r[*ch].empty()) {
      std::string_view s = r[*ch];
      while (!s.empty()) {
        auto semi = s.find(';');
        o.holder_shares.push_back(num(std::string(s.substr(0, semi)), ctx));
        s = semi == std::string_view::npos ? std::string_view{} : s.substr(semi + 1);
      }
    }
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<LiquidationEvent> parse_liquidations_csv(const CsvTable& t) {
  auto ct = t.require("time"), cp = t.require("price"), cs = t.require("size_usd"), cd = t.require("side");
  std::vector<LiquidationEvent> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    std::string ctx = where(t.source, t.lines[i]);
    out.push_back({when(r[ct], ctx), dec(r[cp], ctx), num(r[cs], ctx), parse_side(r[cd], ctx)});
  }
  return out;
}

std::vector<TimedValue> parse_series_csv(const CsvTable& t) {
  auto ct = t.require("time"), cv = t.require("value");
  std::vector<TimedValue> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    std::string ctx = where(t.source, t.lines[i]);
    out.push_back({when(t.rows[i][ct], ctx), num(t.rows[i][cv], ctx)});
  }
  return out;
}

namespace {

std::vector<BookLevel> parse_side_levels(std::string_view text, const std::string& ctx) {
  std::vector<BookLevel> out;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) {
    auto colon = tok.find(':');
    if (colon == std::string::npos) schema(ctx + ": level '" + tok + "' is not price:size");
    out.push_back({dec(tok.substr(0, colon), ctx), num(tok.substr(colon + 1), ctx)});
  }
  return out;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt_double(double v) {
  // Shortest round-trip representation, shared with the JSON writer.
  return Json(v).dump();
}

}  // namespace

BookSnapshot parse_book_line(std::string_view line, std::size_t line_no, const std::string& source) {
  const std::string ctx = where(source.empty() ? "books" : source, line_no);
  auto p1 = line.find('|');
  auto p2 = p1 == std::string_view::npos ? p1 : line.find('|', p1 + 1);
  if (p2 == std::string_view::npos || line.find('|', p2 + 1) != std::string_view::npos)
    schema(ctx + ": expected '<time>|<bids>|<asks>'");
  BookSnapshot b;
  b.time = when(trim(line.substr(0, p1)), ctx);
  b.bids = parse_side_levels(line.substr(p1 + 1, p2 - p1 - 1), ctx);
  b.asks = parse_side_levels(line.substr(p2 + 1), ctx);
  return b;
}

std::string format_book_line(const BookSnapshot& b) {
  std::string out = format_utc(b.time) + "|";
  for (std::size_t i = 0; i < b.bids.size(); ++i)
    out += (i ? " " : "") + b.bids[i].price.to_string() + ":" + fmt_double(b.bids[i].size);
  out += "|";
  for (std::size_t i = 0; i < b.asks.size(); ++i)
    out += (i ? " " : "") + b.asks[i].price.to_string() + ":" + fmt_double(b.asks[i].size);
  return out;
}

std::vector<BookSnapshot> parse_books(std::string_view text, const std::string& source) {
  std::vector<BookSnapshot> out;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    out.push_back(parse_book_line(t, line_no, source));
  }
  return out;
}

std::string format_candles_csv(const std::vector<Candle4H>& c, double volume_share) {
  std::string out = "time,open,high,low,close,volume\n";
  for (const auto& k : c)
    out += format_utc(k.open_time) + "," + k.open.to_string() + "," + k.high.to_string() + "," + k.low.to_string() +
           "," + k.close.to_string() + "," + fmt_double(k.volume * volume_share) + "\n";
  return out;
}

std::string format_funding_csv(const std::vector<FundingRecord>& f, int interval_hours) {
  std::string out = "time,rate,interval_hours,mark_price,index_price,exchange\n";
  for (const auto& r : f) {
    Decimal raw = r.rate_8h.mul_ratio(interval_hours, 8);
    out += format_utc(r.settle_time) + "," + raw.to_string() + "," + std::to_string(interval_hours) + "," +
           r.mark_price.to_string() + "," + r.index_price.to_string() + "," + r.exchange_id + "\n";
  }
  return out;
}

std::string format_oi_csv(const std::vector<OpenInterestRecord>& recs) {
  std::string out = "time,oi_usd,long_oi_usd,short_oi_usd,leverage,holder_shares\n";
  for (const auto& r : recs) {
    out += format_utc(r.time) + "," + fmt_double(r.oi_usd) + ",";
    out += (r.long_oi_usd ? fmt_double(*r.long_oi_usd) : "") + ",";
    out += (r.short_oi_usd ? fmt_double(*r.short_oi_usd) : "") + ",";
    bool first = true;
    for (const auto& [k, v] : r.leverage_histogram) {
      out += (first ? "" : ";") + k + ":" + fmt_double(v);
      first = false;
    }
    out += ",";
    for (std::size_t i = 0; i < r.holder_shares.size(); ++i) out += (i ? ";" : "") + fmt_double(r.holder_shares[i]);
    out += "\n";
  }
  return out;
}

std::string format_liquidations_csv(const std::vector<LiquidationEvent>& e) {
  std::string out = "time,price,size_usd,side\n";
  for (const auto& l : e)
    out += format_utc(l.time) + "," + l.price.to_string() + "," + fmt_double(l.size_usd) + "," + side_name(l.side) + "\n";
  return out;
}

std::string format_series_csv(const std::vector<TimedValue>& v) {
  std::string out = "time,value\n";
  for (const auto& tv : v) out += format_utc(tv.time) + "," + fmt_double(tv.value) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Manifest and config

namespace {

ManifestSource source_from(const Json& j, const std::string& base, const std::string& ctx, const char* id_key) {
  ManifestSource s;
  s.path = jstr(j, "path", ctx);
  if (!fs::path(s.path).is_absolute() && !base.empty()) s.path = (fs::path(base) / s.path).string();
  if (id_key && j.contains(id_key)) s.id = jstr(j, id_key, ctx);
  if (j.contains("format")) s.format = jstr(j, "format", ctx);
  if (j.contains("trailing_volume")) s.trailing_volume = jnum(j, "trailing_volume", ctx);
  if (j.contains("authoritative")) {
    if (!j["authoritative"].is_boolean()) schema(ctx + ": authoritative must be true or false");
    s.authoritative = j["authoritative"].get<bool>();
  }
  return s;
}

Json source_json(const ManifestSource& s, const char* id_key) {
  Json j{{"path", s.path}};
  if (id_key) j[id_key] = s.id;
  if (!s.format.empty()) j["format"] = s.format;
  if (s.trailing_volume != 0.0) j["trailing_volume"] = s.trailing_volume;
  if (s.authoritative) j["authoritative"] = true;
  return j;
}

}  // namespace

Manifest manifest_from_json(const Json& j, const std::string& base) {
  const std::string ctx = "manifest";
  if (!j.is_object()) schema("manifest: document is not an object");
  if (!j.contains("schema_version") || !j["schema_version"].is_number_integer() ||
      j["schema_version"].get<int>() != kSchemaVersion)
    schema("manifest: schema_version must be " + std::to_string(kSchemaVersion));
  static const std::set<std::string> known{"schema_version", "document", "instrument", "candles", "funding",
                                           "open_interest", "contract_value_usd", "books", "liquidations",
                                           "annotations", "config"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.contains(it.key())) schema("manifest: unknown field '" + it.key() + "'");
  Manifest m;
  m.instrument = jstr(j, "instrument", ctx);
  auto list = [&](const char* key, const char* id_key, std::vector<ManifestSource>& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_array()) schema(ctx + ": '" + key + "' must be an array");
    std::size_t i = 0;
    for (const auto& e : j[key]) {
      std::string cx = ctx + "." + key + "[" + std::to_string(i++) + "]";
      out.push_back(source_from(e, base, cx, id_key));
      if (out.back().id.empty()) schema(cx + ": missing '" + id_key + "'");
    }
  };
  list("candles", "exchange", m.candles);
  list("funding", "exchange", m.funding);
  list("liquidations", "source", m.liquidations);
  for (auto& c : m.candles) {
    if (c.format.empty()) c.format = "candles";
    if (c.format != "candles" && c.format != "trades")
      schema(ctx + ": candle format must be candles or trades, got '" + c.format + "'");
  }
  if (j.contains("open_interest")) m.open_interest = source_from(j["open_interest"], base, ctx + ".open_interest", nullptr);
  if (j.contains("books")) m.books = source_from(j["books"], base, ctx + ".books", nullptr);
  if (j.contains("contract_value_usd")) m.contract_value_usd = jnum(j, "contract_value_usd", ctx);
  if (j.contains("annotations")) {
    const Json& a = j["annotations"];
    if (!a.is_object()) schema(ctx + ": annotations must be an object");
    if (a.contains("series")) {
      if (!a["series"].is_object()) schema(ctx + ": annotations.series must be an object of paths");
      for (auto it = a["series"].begin(); it != a["series"].end(); ++it) {
        if (!it.value().is_string()) schema(ctx + ": annotation series '" + it.key() + "' must be a path");
        std::string p = it.value().get<std::string>();
        if (!fs::path(p).is_absolute() && !base.empty()) p = (fs::path(base) / p).string();
        m.annotation_series[it.key()] = p;
      }
    }
    if (a.contains("notes")) {
      if (!a["notes"].is_object()) schema(ctx + ": annotations.notes must be an object");
      for (auto it = a["notes"].begin(); it != a["notes"].end(); ++it) {
        if (!it.value().is_string()) schema(ctx + ": note '" + it.key() + "' must be a string");
        m.notes[it.key()] = it.value().get<std::string>();
      }
    }
  }
  if (j.contains("config")) {
    Config probe;
    apply_config_overrides(probe, j["config"], "manifest.config");
    for (auto it = j["config"].begin(); it != j["config"].end(); ++it) m.config[it.key()] = it.value().get<double>();
  }
  return m;
}

Json manifest_to_json(const Manifest& m) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["document"] = "manifest";
  j["instrument"] = m.instrument;
  Json c = Json::array(), f = Json::array(), l = Json::array();
  for (const auto& s : m.candles) c.push_back(source_json(s, "exchange"));
  for (const auto& s : m.funding) f.push_back(source_json(s, "exchange"));
  for (const auto& s : m.liquidations) l.push_back(source_json(s, "source"));
  j["candles"] = c;
  j["funding"] = f;
  j["liquidations"] = l;
  if (m.open_interest) j["open_interest"] = source_json(*m.open_interest, nullptr);
  if (m.books) j["books"] = source_json(*m.books, nullptr);
  if (m.contract_value_usd) j["contract_value_usd"] = *m.contract_value_usd;
  j["annotations"] = {{"series", m.annotation_series}, {"notes", m.notes}};
  j["config"] = m.config;
  return j;
}

Manifest read_manifest(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    schema(path + ": malformed JSON: " + e.what());
  }
  try {
    return manifest_from_json(j, fs::path(path).parent_path().string());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::schema) throw Error(ErrorKind::schema, path + ": " + e.what());
    throw;
  }
}

void apply_config_overrides(Config& cfg, const Json& overrides, const std::string& source) {
  if (!overrides.is_object()) schema(source + ": config overrides must be an object of key: number");
  for (auto it = overrides.begin(); it != overrides.end(); ++it) {
    if (!Config::has(it.key())) schema(source + ": unknown config key '" + it.key() + "'");
    if (!it.value().is_number()) schema(source + ": config key '" + it.key() + "' must be a number");
    cfg.set(it.key(), it.value().get<double>());
  }
}

Config load_config_file(const std::string& path, Config base) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    schema(path + ": malformed JSON: " + e.what());
  }
  // Either a bare {key: value} object or a document with a "config" member.
  const Json& overrides = j.is_object() && j.contains("config") ? j["config"] : j;
  apply_config_overrides(base, overrides, path);
  return base;
}

// ---------------------------------------------------------------------------
// Ingestion

IngestResult ingest(const Manifest& m, const Config& cfg) {
  if (m.candles.empty()) throw Error(ErrorKind::missing_series, "manifest lists no candle files");
  IngestResult res;
  std::vector<ExchangeVolume> vols;
  for (const auto& c : m.candles) vols.push_back({c.id, c.trailing_volume});
  res.selected_exchanges = select_top_exchanges(vols, static_cast<std::size_t>(std::max(1, as_count(cfg.top_exchanges))));
  std::set<std::string> chosen(res.selected_exchanges.begin(), res.selected_exchanges.end());

  // Parse the selected exchanges' candle files in parallel; joined in
  // manifest order so the result does not depend on completion order.
  std::vector<std::pair<std::string, std::future<std::vector<Candle4H>>>> jobs;
  for (const auto& src : m.candles) {
    if (!chosen.contains(src.id)) continue;
    jobs.emplace_back(src.id, std::async(std::launch::async, [src] {
                        CsvTable t = parse_csv(read_file(src.path), src.path);
                        if (src.format == "trades") {
                          auto ticks = parse_trades_csv(t, src.id);
                          return align_4h(ticks);
                        }
                        return parse_candles_csv(t);
                      }));
  }
  std::map<Timestamp, std::vector<std::pair<std::string, Candle4H>>> by_time;
  std::map<Timestamp, std::map<std::string, double>> daily;
  for (auto& [id, fut] : jobs) {
    for (const auto& c : fut.get()) {
      by_time[c.open_time].emplace_back(id, c);
      daily[floor_to_day(c.open_time)][id] += c.volume;
    }
  }

  QualityReport pre;
  std::vector<Candle4H> merged;
  for (auto& [t, entries] : by_time) {
    std::set<std::string> excluded;
    if (entries.size() >= 3) {
      CrossExchangeBar bar{t, {}};
      for (const auto& [id, c] : entries) bar.closes.emplace_back(id, c.close.to_double());
      auto flags = check_price_consistency(std::span<const CrossExchangeBar>(&bar, 1), cfg);
      for (auto& f : flags) {
        if (f.severity == Severity::flag) {
          auto slash = f.location.rfind('/');
          if (slash != std::string::npos) excluded.insert(f.location.substr(slash + 1));
          f.detail += "; excluded from the merge";
        }
      }
      pre.add(std::move(flags));
    }
    std::vector<std::vector<Candle4H>> per;
    for (const auto& [id, c] : entries)
      if (!excluded.contains(id)) per.push_back({c});
    if (per.empty()) continue;
    merged.push_back(vwap_merge(per).front());
  }
  std::vector<DailyVolumes> days;
  for (const auto& [d, m2] : daily) {
    if (m2.size() < 2) continue;
    DailyVolumes dv{d, {}};
    for (const auto& [id, v] : m2) dv.volumes.emplace_back(id, v);
    days.push_back(std::move(dv));
  }
  pre.add(check_volume(days, cfg));

  Panel p;
  p.instrument = m.instrument;
  p.candles = std::move(merged);
  for (const auto& src : m.funding) {
    auto recs = parse_funding_csv(parse_csv(read_file(src.path), src.path), src.id);
    p.funding.insert(p.funding.end(), recs.begin(), recs.end());
  }
  std::stable_sort(p.funding.begin(), p.funding.end(),
                   [](const FundingRecord& a, const FundingRecord& b) { return a.settle_time < b.settle_time; });
  if (m.open_interest)
    p.oi = parse_oi_csv(parse_csv(read_file(m.open_interest->path), m.open_interest->path), m.contract_value_usd);
  if (m.books) p.books = parse_books(read_file(m.books->path), m.books->path);

  // Liquidations: the authoritative source when one is marked, else all.
  bool any_auth = std::any_of(m.liquidations.begin(), m.liquidations.end(), [](const auto& s) { return s.authoritative; });
  for (const auto& src : m.liquidations) {
    if (any_auth && !src.authoritative) continue;
    auto ev = parse_liquidations_csv(parse_csv(read_file(src.path), src.path));
    p.liquidations.insert(p.liquidations.end(), ev.begin(), ev.end());
  }
  std::stable_sort(p.liquidations.begin(), p.liquidations.end(),
                   [](const LiquidationEvent& a, const LiquidationEvent& b) { return a.time < b.time; });
  for (const auto& [name, path] : m.annotation_series)
    p.annotations.series[name] = parse_series_csv(parse_csv(read_file(path), path));
  p.annotations.notes = m.notes;

  auto q = run_quality_pipeline(p, cfg);
  res.panel = std::move(q.panel);
  res.report = std::move(q.report);
  res.report.checks_run += pre.checks_run;
  res.report.flags.insert(res.report.flags.end(), pre.flags.begin(), pre.flags.end());
  res.report.finalize();
  return res;
}

void export_raw(const Panel& p, const std::string& dir) {
  fs::create_directories(dir);
  Manifest m;
  m.instrument = p.instrument;
  const std::vector<std::pair<std::string, double>> exchanges{
      {"ex-a", 3.0e9}, {"ex-b", 2.5e9}, {"ex-c", 2.0e9}, {"ex-d", 0.1e9}};
  for (const auto& [id, trailing] : exchanges) {
    std::string file = "candles_" + id + ".csv";
    write_file((fs::path(dir) / file).string(), format_candles_csv(p.candles, 1.0 / 3.0));
    m.candles.push_back({id, file, "candles", trailing, false});
  }
  // Funding per exchange is kept as recorded; exported at a 4h interval to
  // exercise normalization on the way back in.
  write_file((fs::path(dir) / "funding.csv").string(), format_funding_csv(p.funding, 4));
  m.funding.push_back({"ex-a", "funding.csv", "", 0.0, false});
  write_file((fs::path(dir) / "open_interest.csv").string(), format_oi_csv(p.oi));
  m.open_interest = ManifestSource{"", "open_interest.csv", "", 0.0, false};
  std::string books;
  for (const auto& b : p.books) books += format_book_line(b) + "\n";
  write_file((fs::path(dir) / "books.txt").string(), books);
  m.books = ManifestSource{"", "books.txt", "", 0.0, false};
  write_file((fs::path(dir) / "liquidations.csv").string(), format_liquidations_csv(p.liquidations));
  m.liquidations.push_back({"primary", "liquidations.csv", "", 0.0, true});
  for (const auto& [name, series] : p.annotations.series) {
    std::string file = "series_" + name + ".csv";
    write_file((fs::path(dir) / file).string(), format_series_csv(series));
    m.annotation_series[name] = file;
  }
  m.notes = p.annotations.notes;
  write_file((fs::path(dir) / "manifest.json").string(), manifest_to_json(m).dump(2) + "\n");
}

}  // namespace rg
