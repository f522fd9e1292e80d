#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rg/config.hpp"
#include "rg/model.hpp"

namespace rg {

/// score_t = (oi_t - oi_{t-1}) / oi_{t-1} / max(vol_t, vol_floor).
/// The first element and any step from zero OI are nullopt.
std::vector<std::optional<double>> oi_rotation(std::span<const double> oi, std::span<const double> volatility,
                                               double vol_floor = 1e-6);

enum class OiEvent { rotation, collapse, neither };
const char* to_string(OiEvent e);

struct OiClassification {
  OiEvent event = OiEvent::neither;
  double oi_change = 0.0;                  // (last - first) / first
  std::optional<double> long_share_shift;  // last - first long share, in share units
  bool partial = false;                    // long/short split unavailable
};

/// `oi` spans the window; `long_share` is the long fraction of OI at each
/// point (nullopt where the split is unknown). Rotation needs the mix to
/// move by at least `mix_shift` while OI declines no more than `collapse`.
OiClassification classify_oi_event(std::span<const double> oi, std::span<const std::optional<double>> long_share,
                                   double collapse = 0.05, double mix_shift = 0.05);

enum class Kernel { gaussian, epanechnikov };

struct DensityPoint {
  double price = 0.0;
  double density = 0.0;
};

struct LiquidationDensity {
  std::vector<DensityPoint> grid;
  double bandwidth = 0.0;
  double total_usd = 0.0;
  bool empty = true;  // no events; grid is empty
};

/// Kernel value at u = (x - xi) / h, already divided by h.
double kernel_value(Kernel k, double x, double xi, double h);

/// Default evaluation grid: from min price - 6h to max price + 6h with a
/// step no wider than h / 8 (h = bandwidth_fraction x weighted mean price),
/// or h / 32 for the Epanechnikov kernel, whose curvature and kinks at +-h
/// need the finer step to integrate to 1 within 1e-3.
std::vector<double> default_density_grid(std::span<const LiquidationEvent> events, double bandwidth_fraction = 0.01,
                                         Kernel kernel = Kernel::gaussian);

/// Size-weighted KDE normalized by total USD, so the analytic integral is
/// 1. An empty eval_grid selects default_density_grid.
LiquidationDensity liquidation_density(std::span<const LiquidationEvent> events, std::span<const double> eval_grid = {},
                                       double bandwidth_fraction = 0.01, Kernel kernel = Kernel::gaussian);

/// Trapezoidal integral of a density grid.
double integrate(const LiquidationDensity& d);

/// Price of the grid maximum (first on ties); nullopt for an empty density.
std::optional<double> density_peak(const LiquidationDensity& d);

struct ClusterShare {
  double share = 0.0;
  bool clustered = false;
};

/// USD share of events with min distance to either boundary, divided by
/// the event price, at most `tolerance`; clustered when share >= min_share.
ClusterShare boundary_cluster_share(std::span<const LiquidationEvent> events, const RangeDefinition& range,
                                    double tolerance = 0.02, double min_share = 0.30);

struct LongShortRatio {
  double ratio = 0.0;  // +infinity when short OI is zero
  bool extreme = false;
};

LongShortRatio long_short_ratio(double long_oi, double short_oi, double extreme_high = 2.0, double extreme_low = 0.5);

struct Concentration {
  double gini = 0.0;
  bool risk = false;
};

/// Gini over holder shares via the sorted form
/// G = sum_i (2i - n - 1) x_(i) / (n sum x). Empty or all-zero -> 0.
Concentration concentration_gini(std::span<const double> shares, double risk_threshold = 0.7);

struct LeverageSummary {
  double total_usd = 0.0;
  double weighted_mean = 0.0;  // notional-weighted mean leverage
  double max_leverage = 0.0;
  double share_above_50x = 0.0;
  bool available = false;
};

/// Bucket labels are "<number>x"; unparseable labels are skipped.
LeverageSummary leverage_summary(const std::map<std::string, double>& histogram);

}  // namespace rg
