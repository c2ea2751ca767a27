#include "sep/metrics/fit.hpp"

#include <cmath>
#include <stdexcept>

namespace sep::metrics {

DecayFit fit_power_law(std::span<const double> times, std::span<const double> values,
                       std::span<const double> stderrs, double t_lo, double t_hi) {
  if (times.size() != values.size() || times.size() != stderrs.size())
    throw std::invalid_argument("fit inputs differ in length");
  DecayFit fit;
  std::vector<double> x, y, rel;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    if (t < t_lo || t > t_hi) continue;
    if (!(t > 0.0) || !(values[i] > 0.0)) {
      fit.dropped_times.push_back(t);
      continue;
    }
    fit.used_times.push_back(t);
    x.push_back(std::log(t));
    y.push_back(std::log(values[i]));
    rel.push_back(stderrs[i] / values[i]);
  }
  const std::size_t n = x.size();
  if (n < 4) throw std::invalid_argument("decay fit needs at least 4 points with positive estimates");

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("decay fit needs distinct times");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = (x[i] - mx) / sxx;
    var += w * w * rel[i] * rel[i];
  }
  fit.half_width = 1.96 * std::sqrt(var);
  return fit;
}

DecayFit fit_decay_exponent(const EstimateSeries& s, double t_lo, double t_hi) {
  return fit_power_law(s.times, s.estimate, s.stderr_, t_lo, t_hi);
}

DecayFit fit_ratio_trend(const EstimateSeries& s) {
  if (s.ratio.size() != s.times.size()) throw std::invalid_argument("series has no envelope ratio column");
  return fit_power_law(s.times, s.ratio, s.ratio_stderr, 0.0, std::numeric_limits<double>::infinity());
}

}  // namespace sep::metrics
