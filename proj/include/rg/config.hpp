#pragma once

#include <span>
#include <string>
#include <string_view>

namespace rg {

// Every tunable threshold lives here under a dotted key named after the
// metric or hypothesis row it belongs to. Defaults are the published values;
// the few constants that have no published value (range construction,
// degenerate-case floors) are marked "invented" in their description.
//
//  X(member, "key", default, "description")
#define RG_CONFIG_PARAMS(X)                                                                                        \
  /* Range persistence under funding pressure */                                                                 \
  X(h1_bias_periods, "h1.condition.funding_bias_periods", 3, "consecutive same-sign 4H funding periods")           \
  X(h1_oi_ma_days, "h1.condition.oi_moving_average_days", 90, "elevated OI = above this moving average")          \
  X(h1_wick_recent_bars, "h1.signal.wick_recent_bars", 5, "recent wick-to-body mean window")                      \
  X(h1_wick_prior_bars, "h1.signal.wick_prior_bars", 20, "prior wick-to-body baseline window")                    \
  X(h1_tap_oi_drop, "h1.signal.tap_oi_drop_max", 0.05, "OI drop on a boundary tap that counts as clearing")       \
  X(h1_breakout_closes, "h1.falsification.breakout_closes", 2, "consecutive closes beyond a boundary")           \
  X(h1_signals_required, "h1.signals_required", 3, "signals required for confirmation (3 = all)")                 \
  /* Expansion requires funding-structure alignment */                                                           \
  X(h2_neutral_rate, "h2.condition.funding_neutral_rate", 0.0001, "|rate_8h| below this is neutral")             \
  X(h2_pre_break_periods, "h2.condition.pre_break_periods", 3, "bars before the break searched for neutrality")  \
  X(h2_shelf_share, "h2.signal.shelf_migration_share", 0.20, "depth share beyond the prior boundary")            \
  X(h2_depth_snapshots, "h2.signal.depth_trend_snapshots", 20, "snapshots in the boundary-depth trend")          \
  X(h2_oi_collapse, "h2.signal.oi_collapse_decline", 0.05, "OI decline above this is a collapse")                \
  X(h2_oi_mix_shift, "h2.signal.oi_mix_shift", 0.05, "long/short share shift that counts as rotation")           \
  X(h2_oi_window_bars, "h2.signal.oi_window_bars", 6, "bars of OI examined up to the breakout bar")              \
  X(h2_sustained_closes, "h2.validation.sustained_closes", 3, "closes beyond after the break that validate it")   \
  /* Funding as governor rather than catalyst */                                                                 \
  X(h3_spike_sigma, "h3.condition.spike_sigma", 2, "spike = deviation above this many standard deviations")       \
  X(h3_spike_lookback, "h3.condition.spike_lookback", 30, "periods in the spike baseline")                       \
  X(h3_spike_sigma_floor, "h3.condition.spike_sigma_floor", 1e-6, "invented: floor on the baseline deviation")    \
  X(h3_shift_closes, "h3.condition.structural_shift_closes", 2, "consecutive closes outside = structural shift") \
  X(h3_reversion_sigma, "h3.outcome.reversion_sigma", 1, "return to within this many volatility units of mid")   \
  X(h3_reversion_bars, "h3.outcome.reversion_max_bars", 4, "bars after the spike allowed for the return")        \
  X(h3_basis_revert_bars, "h3.signal.basis_revert_bars", 2, "bars for |basis| to fall back under dislocation")    \
  /* Power-policed boundaries */                                                                                 \
  X(h4_cluster_share, "h4.condition.cluster_share", 0.30, "liquidation volume share near boundaries")            \
  X(h4_cluster_distance, "h4.condition.cluster_distance", 0.02, "price distance counted as near a boundary")     \
  X(h4_recoil_fraction, "h4.signal.recoil_fraction", 0.50, "share of the excursion retraced")                    \
  X(h4_recoil_bars, "h4.signal.recoil_bars", 1, "bars after the tap allowed for the recoil")                     \
  X(h4_funding_decline, "h4.signal.funding_decline", 0.20, "relative |funding| decline after a tap")             \
  X(h4_funding_decline_bars, "h4.signal.funding_decline_bars", 2, "bars allowed for the funding decline")         \
  X(h4_tap_majority, "h4.signal.tap_majority", 0.5, "invented: per-tap hit rate must exceed this")               \
  /* Structural metrics */                                                                                       \
  X(swing_lookback, "structural.swing_mapping.lookback", 5, "candles on each side of a swing point")             \
  X(volume_bin_width, "structural.volume_nodes.bin_width", 0.005, "bin width as a fraction of median price")    \
  X(absorption_usd, "structural.absorption_footprints.min_usd", 500000, "order size that counts as absorption")  \
  X(range_window, "structural.range.window_bars", 30, "invented: trailing bars used to derive a range")          \
  X(range_min_touches, "structural.range.min_touches", 2, "invented: touches required on each boundary")         \
  X(range_touch_tolerance, "structural.range.touch_tolerance", 0.005, "invented: touch distance from boundary")  \
  X(range_min_width, "structural.range.min_width", 0.001, "invented: minimum upper/lower - 1")                   \
  X(range_touch_closes, "structural.range.touch_uses_closes", 0, "1 = touches use closes instead of wicks")      \
  X(volatility_window, "structural.realized_volatility.window", 20, "invented: rolling 4H return window")        \
  X(doji_tolerance, "structural.wick_to_body.doji_tolerance", 1e-9, "|close-open| below this x price is a doji") \
  /* Cost metrics */                                                                                             \
  X(bias_min_periods, "cost.funding_bias_duration.min_periods", 3, "critical same-sign run length")             \
  X(elevated_rate, "cost.funding_rate_magnitude.elevated", 0.0005, "|rate_8h| above this is elevated")           \
  X(neutral_rate, "cost.funding_rate_magnitude.neutral", 0.0001, "|rate_8h| below this is neutral")              \
  X(annualized_overextension, "cost.annualized_funding.overextension_pct", 50, "annualized percent threshold")   \
  X(basis_dislocation, "cost.basis_spread.dislocation", 0.005, "|basis| above this is a dislocation")           \
  X(cumulative_short_days, "cost.cumulative_funding.short_days", 7, "short cumulative window")                  \
  X(cumulative_long_days, "cost.cumulative_funding.long_days", 30, "long cumulative window")                    \
  X(bias_flip_tolerance, "cost.funding_bias_duration.flip_tolerance", 0, "opposite periods tolerated in a run")  \
  /* Positioning metrics */                                                                                      \
  X(kde_bandwidth, "positioning.liquidation_density.bandwidth", 0.01, "bandwidth as a fraction of price")        \
  X(kde_kernel, "positioning.liquidation_density.kernel", 0, "0 = gaussian, 1 = epanechnikov")                   \
  X(ls_ratio_high, "positioning.long_short_ratio.extreme_high", 2.0, "ratio above this is extreme")              \
  X(ls_ratio_low, "positioning.long_short_ratio.extreme_low", 0.5, "ratio below this is extreme")                \
  X(gini_risk, "positioning.position_concentration.gini_risk", 0.7, "Gini above this flags concentration")       \
  X(rotation_vol_floor, "positioning.oi_rotation.volatility_floor", 1e-6, "floor on the volatility divisor")      \
  /* Liquidity metrics */                                                                                        \
  X(depth_p_low, "liquidity.shelf_migration.percentile_low", 0.25, "lower cumulative-depth percentile")          \
  X(depth_p_high, "liquidity.shelf_migration.percentile_high", 0.75, "upper cumulative-depth percentile")        \
  X(extreme_zone, "liquidity.depth_at_extremes.zone", 0.005, "distance from a boundary, inclusive")             \
  X(slippage_order_usd, "liquidity.fill_slippage.order_usd", 1000000, "simulated market order notional")        \
  X(imbalance_extreme, "liquidity.order_book_imbalance.extreme", 0.3, "|imbalance| above this is extreme")       \
  X(imbalance_levels, "liquidity.order_book_imbalance.levels", 20, "levels per side in the depth sum")           \
  X(impact_window_hours, "liquidity.market_impact.window_hours", 24, "rolling regression window")               \
  X(spread_uncertainty, "liquidity.spread.uncertainty", 0.001, "relative spread above this is uncertainty")      \
  /* Data quality */                                                                                             \
  X(timestamp_tolerance, "quality.timestamp.tolerance_seconds", 30, "allowed deviation from the UTC grid")       \
  X(price_outlier_sigma, "quality.price_consistency.sigma", 2, "outlier distance in scaled-MAD units")           \
  X(mad_scale, "quality.price_consistency.mad_scale", 1.4826, "MAD to sigma scaling")                           \
  X(mad_zero_tolerance, "quality.price_consistency.mad_zero_tolerance", 0.001, "invented: rule when MAD = 0")    \
  X(volume_deviation, "quality.volume.deviation", 0.30, "deviation from the cross-exchange mean")                \
  X(oi_discrepancy, "quality.open_interest.discrepancy", 0.05, "OI change vs flow discrepancy")                  \
  X(max_spread, "quality.order_book.max_spread", 0.01, "snapshots with wider spreads are excluded")             \
  X(max_fill_gap, "quality.missing_data.max_interpolated_bars", 1, "gaps up to this many bars are interpolated") \
  X(funding_hard_bound, "quality.funding.hard_bound", 0.0375, "|rate_8h| at or above this is impossible")        \
  X(price_spike, "quality.price_spike.threshold", 0.10, "close deviation from recent average")                  \
  X(price_spike_bars, "quality.price_spike.average_bars", 6, "invented: bars in the recent average")             \
  X(wash_volume_multiple, "quality.wash_trading.volume_multiple", 5, "invented: volume vs rolling median")        \
  X(wash_body_max, "quality.wash_trading.body_max", 0.0005, "invented: |close-open|/open below this")            \
  X(wash_median_bars, "quality.wash_trading.median_bars", 20, "invented: rolling median window")                \
  X(min_book_levels, "quality.order_book.min_levels", 20, "levels required per side")                           \
  /* Ingestion */                                                                                                \
  X(top_exchanges, "ingest.top_exchanges", 3, "exchanges kept by trailing volume")                               \
  /* Regime and advisory */                                                                                      \
  X(regime_lookback, "regime.lookback_bars", 20, "accumulation/distribution lookback")                           \
  X(trending_share, "regime.trending.directional_share", 0.60, "invented: share of directional closes")          \
  X(absorption_multiple, "regime.accumulation.absorption_volume_multiple", 1.5, "invented: vs 2x-lookback median") \
  X(min_trigger_metrics, "regime.trigger_matrix.min_metrics", 4, "metrics needed for a conviction rating")        \
  X(shelf_clustered_share, "regime.trigger_matrix.shelf_clustered_share", 0.05, "invented: depth still inside") \
  X(leverage_max, "advisor.margin.leverage_max", 100, "leverage at the lowest volatility percentile")           \
  X(leverage_min, "advisor.margin.leverage_min", 20, "leverage at the highest volatility percentile")           \
  X(margin_window_days, "advisor.margin.window_days", 30, "volatility distribution window for margins")          \
  X(aggressive_percentile, "advisor.liquidation.aggressive_percentile", 0.80, "switch above this percentile")    \
  X(liquidation_window_days, "advisor.liquidation.window_days", 90, "volatility distribution window")           \
  X(stop_min, "advisor.stop.min", 0.01, "lower stop-distance band")                                              \
  X(stop_max, "advisor.stop.max", 0.02, "upper stop-distance band")                                              \
  X(holding_days, "advisor.carry.holding_days", 10, "holding window for the funding-drag estimate")              \
  X(backtest_window, "backtest.window_bars", 36, "sliding window length when no script is attached")

struct ParamSpec {
  std::string_view key;
  double default_value;
  std::string_view description;
};

struct Config {
#define RG_DECLARE_PARAM(member, key, def, desc) double member = def;
  RG_CONFIG_PARAMS(RG_DECLARE_PARAM)
#undef RG_DECLARE_PARAM

  static std::span<const ParamSpec> params();

  /// Throws rg::Error for unknown keys.
  [[nodiscard]] double get(std::string_view key) const;
  void set(std::string_view key, double value);
  [[nodiscard]] static bool has(std::string_view key);

  bool operator==(const Config&) const = default;
};

/// Integer view of a count-valued parameter.
[[nodiscard]] inline int as_count(double v) { return static_cast<int>(v + 0.5); }

}  // namespace rg
