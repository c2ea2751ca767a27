#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sep/metrics/estimators.hpp"

namespace sep::metrics {

inline constexpr const char* kFitMethod =
    "OLS of log(estimate) on log(t); half-width = 1.96 x delta-method stderr, "
    "propagating per-point stderr/estimate through the regression weights";

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  double half_width = 0.0;
  std::vector<double> used_times;
  std::vector<double> dropped_times;  // in the window but nonpositive estimate (or t <= 0)
  std::string method = kFitMethod;
};

/// Power-law fit y ~ c t^slope on points with t in [t_lo, t_hi].
/// Throws std::invalid_argument if fewer than 4 usable points remain.
DecayFit fit_power_law(std::span<const double> times, std::span<const double> values,
                       std::span<const double> stderrs, double t_lo, double t_hi);

DecayFit fit_decay_exponent(const EstimateSeries& series, double t_lo = 0.0,
                            double t_hi = std::numeric_limits<double>::infinity());

/// Fit of the envelope ratio column; a slope near 0 means no trend.
DecayFit fit_ratio_trend(const EstimateSeries& series);

}  // namespace sep::metrics
