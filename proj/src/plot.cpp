#include "rg/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "rg/error.hpp"

namespace rg {

const char* to_string(PlotKind k) {
  switch (k) {
    case PlotKind::funding: return "funding";
    case PlotKind::density: return "density";
    case PlotKind::depth: return "depth";
    case PlotKind::range: return "range";
  }
  return "?";
}

std::optional<PlotKind> parse_plot_kind(std::string_view s) {
  for (auto k : {PlotKind::funding, PlotKind::density, PlotKind::depth, PlotKind::range})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

namespace {

constexpr double kWidth = 900, kHeight = 420, kLeft = 80, kRight = 20, kTop = 40, kBottom = 50;

std::string fmt(double v, int prec = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

const Json& family(const Json& report, const char* name) {
  if (!report.is_object() || !report.contains("families") || !report["families"].contains(name))
    throw Error(ErrorKind::missing_series,
                std::string("report has no '") + name + "' metrics; run metrics with --family " + name);
  return report["families"][name];
}

double num_or_nan(const Json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return std::stod(v.get<std::string>());
    } catch (const std::exception&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

struct Series {
  std::string name;
  std::string colour;
  std::vector<double> y;
};

struct Axes {
  double x0, x1, y0, y1;
  [[nodiscard]] double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  [[nodiscard]] double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

Axes fit(double x0, double x1, double y0, double y1) {
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) {
    double pad = std::fabs(y0) > 0 ? std::fabs(y0) * 0.01 : 1.0;
    y0 -= pad;
    y1 += pad;
  }
  return {x0, x1, y0, y1};
}

std::string header(const std::string& title) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth, 0) + "\" height=\"" +
                  fmt(kHeight, 0) + "\" viewBox=\"0 0 " + fmt(kWidth, 0) + " " + fmt(kHeight, 0) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + fmt(kWidth / 2, 0) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
       title + "</text>\n";
  return s;
}

std::string frame(const Axes& a, const std::string& xlabel_lo, const std::string& xlabel_hi, const std::string& ylabel) {
  std::string s;
  s += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) + "\" width=\"" + fmt(kWidth - kLeft - kRight) + "\" height=\"" +
       fmt(kHeight - kTop - kBottom) + "\" fill=\"none\" stroke=\"#444\"/>\n";
  auto text = [&](double x, double y, const std::string& t, const char* anchor) {
    s += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" text-anchor=\"" + anchor +
         "\" font-family=\"sans-serif\" font-size=\"11\">" + t + "</text>\n";
  };
  text(kLeft - 6, a.py(a.y1) + 4, fmt_g(a.y1), "end");
  text(kLeft - 6, a.py(a.y0) + 4, fmt_g(a.y0), "end");
  text(kLeft, kHeight - kBottom + 16, xlabel_lo, "start");
  text(kWidth - kRight, kHeight - kBottom + 16, xlabel_hi, "end");
  text(kLeft + (kWidth - kLeft - kRight) / 2, kHeight - 10, ylabel, "middle");
  return s;
}

std::string polyline(const Axes& a, const Series& s) {
  std::string out;
  std::string pts;
  auto flush = [&] {
    if (!pts.empty())
      out += "<polyline fill=\"none\" stroke=\"" + s.colour + "\" stroke-width=\"1.2\" points=\"" + pts + "\"/>\n";
    pts.clear();
  };
  for (std::size_t i = 0; i < s.y.size(); ++i) {
    if (!std::isfinite(s.y[i])) {
      flush();  // gaps break the line
      continue;
    }
    if (!pts.empty()) pts += ' ';
    pts += fmt(a.px(static_cast<double>(i))) + "," + fmt(a.py(s.y[i]));
  }
  flush();
  return out;
}

std::string legend(const std::vector<Series>& ss) {
  std::string out;
  double x = kLeft + 10;
  for (const auto& s : ss) {
    out += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(kTop + 8) + "\" width=\"12\" height=\"3\" fill=\"" + s.colour + "\"/>\n";
    out += "<text x=\"" + fmt(x + 16) + "\" y=\"" + fmt(kTop + 13) + "\" font-family=\"sans-serif\" font-size=\"11\">" +
           s.name + "</text>\n";
    x += 20 + 7.0 * static_cast<double>(s.name.size()) + 12;
  }
  return out;
}

/// Line chart of several series sharing the time axis.
Figure line_chart(const std::string& title, const std::string& ylabel, const std::vector<std::string>& times,
                  const std::vector<Series>& series) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : series)
    for (double v : s.y)
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  if (!std::isfinite(lo)) lo = 0, hi = 1;
  Axes a = fit(0, static_cast<double>(std::max<std::size_t>(times.size(), 2) - 1), lo, hi);
  Figure f;
  f.svg = header(title);
  f.svg += frame(a, times.empty() ? "" : times.front(), times.empty() ? "" : times.back(), ylabel);
  for (const auto& s : series) f.svg += polyline(a, s);
  f.svg += legend(series);
  f.svg += "</svg>\n";

  f.csv = "time";
  for (const auto& s : series) f.csv += "," + s.name;
  f.csv += "\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    f.csv += times[i];
    for (const auto& s : series) f.csv += "," + (std::isfinite(s.y[i]) ? fmt_g(s.y[i]) : std::string{});
    f.csv += "\n";
  }
  return f;
}

Figure funding_plot(const Json& report) {
  const Json& bars = family(report, "cost")["bars"];
  std::vector<std::string> times;
  Series rate{"rate_8h_pct", "#1f77b4", {}};
  for (const auto& b : bars) {
    times.push_back(b["time"].get<std::string>());
    rate.y.push_back(num_or_nan(b["rate_8h"]) * 100.0);
  }
  return line_chart("Funding rate trajectory (per 8h, %)", "funding rate per 8h (%)", times, {rate});
}

Figure depth_plot(const Json& report) {
  const Json& snaps = family(report, "liquidity")["snapshots"];
  std::vector<std::string> times;
  std::vector<Series> s{{"bid_p75", "#2ca02c", {}}, {"bid_p25", "#98df8a", {}}, {"ask_p25", "#ff9896", {}},
                        {"ask_p75", "#d62728", {}}};
  for (const auto& j : snaps) {
    times.push_back(j["time"].get<std::string>());
    for (auto& ser : s) ser.y.push_back(j.contains(ser.name) ? num_or_nan(j[ser.name]) : std::nan(""));
  }
  return line_chart("Depth migration: cumulative-depth percentile prices", "price", times, s);
}

Figure range_plot(const Json& report) {
  const Json& bars = family(report, "structural")["bars"];
  std::vector<std::string> times;
  std::vector<Series> s{{"close", "#333333", {}}, {"range_upper", "#d62728", {}}, {"range_lower", "#2ca02c", {}}};
  for (const auto& b : bars) {
    times.push_back(b["time"].get<std::string>());
    for (auto& ser : s) ser.y.push_back(num_or_nan(b[ser.name]));
  }
  return line_chart("Closes with range overlay", "price", times, s);
}

std::string heat_colour(double t) {
  // White -> dark red.
  t = std::clamp(t, 0.0, 1.0);
  auto ch = [&](double from, double to) { return static_cast<int>(std::lround(from + (to - from) * t)); };
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", ch(255, 128), ch(255, 0), ch(255, 0));
  return buf;
}

struct Cells {
  std::vector<DensityCell> cells;
  std::optional<std::size_t> peak;
};

Cells density_cells(const Json& report) {
  const Json& d = family(report, "positioning")["liquidation_density"];
  Cells out;
  const Json& grid = d["grid"];
  const std::size_t n = grid.size();
  for (std::size_t i = 0; i < n; ++i) {
    double p = num_or_nan(grid[i][0]);
    double lo = i > 0 ? (p + num_or_nan(grid[i - 1][0])) / 2.0 : p - (n > 1 ? (num_or_nan(grid[1][0]) - p) / 2.0 : 0.5);
    double hi = i + 1 < n ? (p + num_or_nan(grid[i + 1][0])) / 2.0
                          : p + (n > 1 ? (p - num_or_nan(grid[n - 2][0])) / 2.0 : 0.5);
    out.cells.push_back({lo, p, hi, num_or_nan(grid[i][1])});
    if (!out.peak || out.cells.back().density > out.cells[*out.peak].density) out.peak = i;
  }
  return out;
}

Figure density_plot(const Json& report) {
  auto c = density_cells(report);
  Figure f;
  f.svg = header("Liquidation heatmap (size-weighted kernel density)");
  double lo = c.cells.empty() ? 0 : c.cells.front().lower, hi = c.cells.empty() ? 1 : c.cells.back().upper;
  double dmax = c.peak ? c.cells[*c.peak].density : 1.0;
  Axes a = fit(lo, hi, 0.0, dmax > 0 ? dmax : 1.0);
  f.svg += frame(a, fmt_g(lo), fmt_g(hi), "price");
  const double strip_top = kTop, strip_h = 30;
  for (std::size_t i = 0; i < c.cells.size(); ++i) {
    const auto& cell = c.cells[i];
    double x0 = a.px(cell.lower), x1 = a.px(cell.upper);
    f.svg += "<rect x=\"" + fmt(x0) + "\" y=\"" + fmt(strip_top) + "\" width=\"" + fmt(std::max(x1 - x0, 0.01)) +
             "\" height=\"" + fmt(strip_h) + "\" fill=\"" + heat_colour(dmax > 0 ? cell.density / dmax : 0.0) + "\"/>\n";
  }
  Series line{"density", "#8b0000", {}};
  std::string pts;
  for (const auto& cell : c.cells) {
    if (!pts.empty()) pts += ' ';
    pts += fmt(a.px(cell.price)) + "," + fmt(a.py(cell.density));
  }
  if (!pts.empty()) f.svg += "<polyline fill=\"none\" stroke=\"#8b0000\" stroke-width=\"1.2\" points=\"" + pts + "\"/>\n";
  if (c.peak) {
    const auto& p = c.cells[*c.peak];
    f.svg += "<line class=\"peak\" data-price=\"" + fmt_g(p.price) + "\" data-lower=\"" + fmt_g(p.lower) +
             "\" data-upper=\"" + fmt_g(p.upper) + "\" x1=\"" + fmt(a.px(p.price)) + "\" x2=\"" + fmt(a.px(p.price)) +
             "\" y1=\"" + fmt(kTop) + "\" y2=\"" + fmt(kHeight - kBottom) + "\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n";
    f.svg += "<text x=\"" + fmt(a.px(p.price) + 4) + "\" y=\"" + fmt(kTop + strip_h + 14) +
             "\" font-family=\"sans-serif\" font-size=\"11\">peak " + fmt_g(p.price) + "</text>\n";
  }
  f.svg += "</svg>\n";
  f.csv = "bin_lower,price,bin_upper,density,peak\n";
  for (std::size_t i = 0; i < c.cells.size(); ++i) {
    const auto& cell = c.cells[i];
    f.csv += fmt_g(cell.lower) + "," + fmt_g(cell.price) + "," + fmt_g(cell.upper) + "," + fmt_g(cell.density) + "," +
             (c.peak && *c.peak == i ? "1" : "0") + "\n";
  }
  return f;
}

}  // namespace

std::optional<DensityCell> density_peak_cell(const Json& report) {
  auto c = density_cells(report);
  if (!c.peak) return std::nullopt;
  return c.cells[*c.peak];
}

Figure render_plot(const Json& report, PlotKind kind) {
  switch (kind) {
    case PlotKind::funding: return funding_plot(report);
    case PlotKind::density: return density_plot(report);
    case PlotKind::depth: return depth_plot(report);
    case PlotKind::range: return range_plot(report);
  }
  throw Error(ErrorKind::unsupported, "unknown plot kind");
}

}  // namespace rg
