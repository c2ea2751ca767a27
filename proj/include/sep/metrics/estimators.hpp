#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sep/core/lattice.hpp"
#include "sep/core/rng.hpp"
#include "sep/dynamics/engine.hpp"
#include "sep/ensembles/measure.hpp"
#include "sep/metrics/farm.hpp"

namespace sep::metrics {

using dynamics::Engine;
using ensembles::DiffLawSpec;

/// gamma(d) = d/4 for d <= 4, 1 beyond.
double theoretical_exponent(int d);

/// t0 * 2^k for k = 0..kmax.
std::vector<double> dyadic_times(double t0, int kmax);

struct EstimateSeries {
  std::string label = "discrepancy_density";
  std::vector<double> times;
  std::vector<double> estimate;
  std::vector<double> stderr_;
  std::size_t replicas = 0;
  Seed seed = 0;
  std::string lattice;
  std::string measure;
  double rho = 0.0;
  std::string engine;

  // Filled by dbar_bound_series.
  double A = std::numeric_limits<double>::quiet_NaN();
  double B = std::numeric_limits<double>::quiet_NaN();
  double gamma = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> ratio;  // estimate * t^gamma / sqrt(A)
  std::vector<double> ratio_stderr;
};

/// Per-replica output: spatial average of |xi_x(t)| at each observation time.
struct ReplicaTrace {
  std::vector<double> density;
  long long charge = 0;  // count(+1) - count(-1), constant along the replica
};

/// One annihilation replica from xi ~ diff law; throws std::logic_error if the
/// charge ever changes.
ReplicaTrace discrepancy_replica(const DiffLawSpec& diff, const TorusLattice& lattice, std::span<const double> times,
                                 Seed replica, Engine engine);

/// Estimate of E|xi_0(t)| under the annihilation dynamics from the
/// discrepancy law, averaged over sites and replicas. Errors come from the
/// replica means only.
EstimateSeries estimate_discrepancy_density(const DiffLawSpec& diff, const TorusLattice& lattice,
                                            std::span<const double> times, std::size_t replicas, Seed seed,
                                            Engine engine, const FarmOptions& farm = {});

/// Same numbers, labelled as an upper bound on dbar(mu P_t, pi_rho), with
/// A(mu), B and the envelope ratio attached.
EstimateSeries dbar_bound_series(const DiffLawSpec& diff, const TorusLattice& lattice, std::span<const double> times,
                                 std::size_t replicas, Seed seed, Engine engine = Engine::stirring,
                                 const FarmOptions& farm = {});

/// Adds A, B, gamma and the ratio column to a series.
void attach_envelope(EstimateSeries& series, const DiffLawSpec& diff, int dimension);

}  // namespace sep::metrics
