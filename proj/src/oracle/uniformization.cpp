#include "sep/oracle/uniformization.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include <omp.h>

namespace sep::oracle {

std::vector<double> poisson_weights(double mean, double tail) {
  std::vector<double> w;
  if (mean <= 0.0) return {1.0};
  double cumulative = 0.0;
  const double log_mean = std::log(mean);
  for (std::size_t k = 0;; ++k) {
    const double lw = -mean + static_cast<double>(k) * log_mean - std::lgamma(static_cast<double>(k) + 1.0);
    w.push_back(std::exp(lw));
    cumulative += w.back();
    if (static_cast<double>(k) >= mean && cumulative >= 1.0 - tail) break;
    if (k > 100000 + 20 * static_cast<std::size_t>(mean)) throw std::runtime_error("poisson weights failed to converge");
  }
  return w;
}

namespace {

// One step of the uniformized chain, v P with P = I + Q / rate, for target
// state j: v_j (1 - exit_j / rate) + sum_{i -> j} v_i q_ij / rate.
inline double step_entry(const GeneratorMatrix& Q, std::span<const double> v, std::size_t j, double rate) {
  double acc = v[j] * (1.0 - Q.exit_rate(j) / rate);
  for (const auto& tr : Q.incoming(j)) acc += v[tr.target] * (tr.rate / rate);
  return acc;
}

template <bool Parallel>
Distribution evolve(const GeneratorMatrix& Q, std::span<const double> d0, double t, int workers) {
  if (d0.size() != Q.size()) throw std::invalid_argument("distribution size does not match generator");
  if (!(t >= 0.0)) throw std::invalid_argument("evolution time must be >= 0");
  const double rate = Q.max_exit_rate();
  Distribution result(d0.begin(), d0.end());
  if (t == 0.0 || rate == 0.0) return result;

  const auto weights = poisson_weights(rate * t, kUniformizationTail);
  const std::size_t n = Q.size();
  Distribution v(d0.begin(), d0.end()), next(n);
  for (std::size_t j = 0; j < n; ++j) result[j] = weights[0] * v[j];

  const int threads = workers > 0 ? workers : omp_get_max_threads();
  for (std::size_t k = 1; k < weights.size(); ++k) {
    const double wk = weights[k];
    if constexpr (Parallel) {
#pragma omp parallel for schedule(static) num_threads(threads)
      for (std::size_t j = 0; j < n; ++j) {
        next[j] = step_entry(Q, v, j, rate);
        result[j] += wk * next[j];
      }
    } else {
      (void)threads;
      for (std::size_t j = 0; j < n; ++j) {
        next[j] = step_entry(Q, v, j, rate);
        result[j] += wk * next[j];
      }
    }
    v.swap(next);
  }
  return result;
}

}  // namespace

Distribution evolve_exact(const GeneratorMatrix& Q, std::span<const double> d0, double t, int workers) {
  return evolve<true>(Q, d0, t, workers);
}

Distribution evolve_exact_serial(const GeneratorMatrix& Q, std::span<const double> d0, double t) {
  return evolve<false>(Q, d0, t, 1);
}

Distribution point_mass(std::size_t size, std::size_t state) {
  if (state >= size) throw std::out_of_range("point mass state out of range");
  Distribution d(size, 0.0);
  d[state] = 1.0;
  return d;
}

double total_variation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("total variation of distributions of different size");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

}  // namespace sep::oracle
