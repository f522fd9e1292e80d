#include "rg/positioning.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

namespace rg {

std::vector<std::optional<double>> oi_rotation(std::span<const double> oi, std::span<const double> volatility,
                                               double vol_floor) {
  std::vector<std::optional<double>> out(oi.size());
  for (std::size_t t = 1; t < oi.size(); ++t) {
    if (!(oi[t - 1] != 0.0) || !std::isfinite(oi[t - 1]) || !std::isfinite(oi[t])) continue;
    double vol = t < volatility.size() ? volatility[t] : 0.0;
    out[t] = (oi[t] - oi[t - 1]) / oi[t - 1] / std::max(vol, vol_floor);
  }
  return out;
}

const char* to_string(OiEvent e) {
  switch (e) {
    case OiEvent::rotation: return "rotation";
    case OiEvent::collapse: return "collapse";
    case OiEvent::neither: return "neither";
  }
  return "neither";
}

OiClassification classify_oi_event(std::span<const double> oi, std::span<const std::optional<double>> long_share,
                                   double collapse, double mix_shift) {
  OiClassification c;
  if (oi.size() < 2 || !(oi.front() > 0.0)) {
    c.partial = true;
    return c;
  }
  c.oi_change = (oi.back() - oi.front()) / oi.front();
  // Largest decline from the window start, so a dip that recovers by the
  // end of the window still counts as forced closure.
  double worst = 0.0;
  for (double v : oi) worst = std::min(worst, (v - oi.front()) / oi.front());
  bool collapsed = -worst > collapse;

  std::optional<double> first, last;
  if (!long_share.empty()) {
    first = long_share.front();
    last = long_share.back();
  }
  if (first && last) c.long_share_shift = *last - *first;
  c.partial = !c.long_share_shift.has_value();

  if (collapsed) c.event = OiEvent::collapse;
  else if (c.long_share_shift && std::fabs(*c.long_share_shift) >= mix_shift) c.event = OiEvent::rotation;
  else c.event = OiEvent::neither;
  return c;
}

double kernel_value(Kernel k, double x, double xi, double h) {
  double u = (x - xi) / h;
  if (k == Kernel::gaussian) return std::exp(-0.5 * u * u) / (h * std::sqrt(2.0 * std::numbers::pi));
  return std::fabs(u) <= 1.0 ? 0.75 * (1.0 - u * u) / h : 0.0;
}

namespace {

double weighted_mean_price(std::span<const LiquidationEvent> events, double& total) {
  total = 0.0;
  double acc = 0.0;
  for (const auto& e : events) {
    acc += e.price.to_double() * e.size_usd;
    total += e.size_usd;
  }
  return total > 0.0 ? acc / total : 0.0;
}

}  // namespace

std::vector<double> default_density_grid(std::span<const LiquidationEvent> events, double bandwidth_fraction,
                                         Kernel kernel) {
  if (events.empty()) return {};
  double total = 0.0;
  double h = bandwidth_fraction * weighted_mean_price(events, total);
  double lo = events.front().price.to_double(), hi = lo;
  for (const auto& e : events) {
    lo = std::min(lo, e.price.to_double());
    hi = std::max(hi, e.price.to_double());
  }
  lo -= 6.0 * h;
  hi += 6.0 * h;
  const double per_bandwidth = kernel == Kernel::gaussian ? 8.0 : 32.0;
  auto steps = static_cast<std::size_t>(std::ceil((hi - lo) / (h / per_bandwidth)));
  steps = std::max<std::size_t>(steps, 2);
  std::vector<double> g(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps);
  return g;
}

LiquidationDensity liquidation_density(std::span<const LiquidationEvent> events, std::span<const double> eval_grid,
                                       double bandwidth_fraction, Kernel kernel) {
  LiquidationDensity d;
  if (events.empty()) return d;
  double total = 0.0;
  double h = bandwidth_fraction * weighted_mean_price(events, total);
  d.bandwidth = h;
  d.total_usd = total;
  d.empty = false;
  std::vector<double> grid;
  if (eval_grid.empty()) {
    grid = default_density_grid(events, bandwidth_fraction, kernel);
    eval_grid = grid;
  }
  d.grid.reserve(eval_grid.size());
  for (double x : eval_grid) {
    double s = 0.0;
    for (const auto& e : events) s += e.size_usd * kernel_value(kernel, x, e.price.to_double(), h);
    d.grid.push_back({x, s / total});
  }
  return d;
}

double integrate(const LiquidationDensity& d) {
  double s = 0.0;
  for (std::size_t i = 1; i < d.grid.size(); ++i)
    s += 0.5 * (d.grid[i].density + d.grid[i - 1].density) * (d.grid[i].price - d.grid[i - 1].price);
  return s;
}

std::optional<double> density_peak(const LiquidationDensity& d) {
  if (d.grid.empty()) return std::nullopt;
  auto it = std::max_element(d.grid.begin(), d.grid.end(),
                             [](const DensityPoint& a, const DensityPoint& b) { return a.density < b.density; });
  return it->price;
}

ClusterShare boundary_cluster_share(std::span<const LiquidationEvent> events, const RangeDefinition& range,
                                    double tolerance, double min_share) {
  ClusterShare c;
  double total = 0.0, near = 0.0;
  double lo = range.lower.to_double(), hi = range.upper.to_double();
  for (const auto& e : events) {
    double p = e.price.to_double();
    total += e.size_usd;
    if (std::min(std::fabs(p - lo), std::fabs(p - hi)) / p <= tolerance) near += e.size_usd;
  }
  c.share = total > 0.0 ? near / total : 0.0;
  c.clustered = total > 0.0 && c.share >= min_share;
  return c;
}

LongShortRatio long_short_ratio(double long_oi, double short_oi, double extreme_high, double extreme_low) {
  LongShortRatio r;
  if (short_oi == 0.0) {
    r.ratio = std::numeric_limits<double>::infinity();
    r.extreme = true;
    return r;
  }
  r.ratio = long_oi / short_oi;
  r.extreme = r.ratio > extreme_high || r.ratio < extreme_low;
  return r;
}

Concentration concentration_gini(std::span<const double> shares, double risk_threshold) {
  Concentration c;
  const std::size_t n = shares.size();
  std::vector<double> x(shares.begin(), shares.end());
  std::sort(x.begin(), x.end());
  double sum = 0.0, acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += x[i];
    acc += (2.0 * static_cast<double>(i + 1) - static_cast<double>(n) - 1.0) * x[i];
  }
  if (n == 0 || !(sum > 0.0)) return c;
  c.gini = acc / (static_cast<double>(n) * sum);
  c.risk = c.gini > risk_threshold;
  return c;
}

LeverageSummary leverage_summary(const std::map<std::string, double>& histogram) {
  LeverageSummary s;
  double acc = 0.0, above = 0.0;
  for (const auto& [label, usd] : histogram) {
    double lev = 0.0;
    std::string_view v = label;
    if (!v.empty() && (v.back() == 'x' || v.back() == 'X')) v.remove_suffix(1);
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), lev);
    if (ec != std::errc{} || ptr != v.data() + v.size()) continue;
    s.total_usd += usd;
    acc += lev * usd;
    if (lev > 50.0) above += usd;
    s.max_leverage = std::max(s.max_leverage, lev);
    s.available = true;
  }
  if (s.total_usd > 0.0) {
    s.weighted_mean = acc / s.total_usd;
    s.share_above_50x = above / s.total_usd;
  }
  return s;
}

}  // namespace rg
