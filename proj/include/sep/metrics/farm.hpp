#pragma once

#include <cmath>
#include <cstddef>
#include <exception>
#include <type_traits>
#include <vector>

#include <omp.h>

namespace sep::metrics {

struct FarmOptions {
  int workers = 0;      // <= 0: OpenMP runtime default
  bool serial = false;  // use the single-threaded reference loop
};

/// Runs fn(i) for i in [0, n) on an OpenMP team. Results are stored by index,
/// so the output never depends on the worker count or scheduling.
template <class Fn>
auto run_replicas(std::size_t n, int workers, Fn&& fn) -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
  std::vector<std::invoke_result_t<Fn&, std::size_t>> out(n);
  std::exception_ptr error;
  const int team = workers > 0 ? workers : omp_get_max_threads();
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(team)
  for (long long i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(sep_farm_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

/// Reference loop for run_replicas.
template <class Fn>
auto run_replicas_serial(std::size_t n, Fn&& fn) -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
  std::vector<std::invoke_result_t<Fn&, std::size_t>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(fn(i));
  return out;
}

template <class Fn>
auto farm(std::size_t n, const FarmOptions& opts, Fn&& fn) {
  return opts.serial ? run_replicas_serial(n, fn) : run_replicas(n, opts.workers, fn);
}

/// Welford accumulator.
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double stderr_of_mean() const { return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace sep::metrics
