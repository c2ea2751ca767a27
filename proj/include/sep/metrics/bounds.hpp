#pragma once

#include <span>
#include <string>
#include <vector>

#include "sep/core/lattice.hpp"
#include "sep/core/rng.hpp"
#include "sep/ensembles/measure.hpp"
#include "sep/metrics/farm.hpp"

namespace sep::metrics {

struct VarianceBoundReport {
  double t = 0.0;
  std::size_t box_sites = 0;
  std::size_t replicas = 0;
  double second_moment = 0.0;  // E (N_plus - N_minus)^2 over the box
  double stderr_ = 0.0;
  double B = 0.0;
  double bound = 0.0;  // 2 |box| B
  double ratio = 0.0;  // second_moment / bound (0 when both vanish)
  bool pass = false;
};

/// Second moment of the net charge in `box` under the free two-species
/// dynamics started from the discrepancy law, against 2 |box| B.
/// Passes iff estimate <= bound * (1 + 4 * relative stderr).
VarianceBoundReport variance_bound_check(const ensembles::DiffLawSpec& diff, const TorusLattice& lattice,
                                         std::span<const Site> box, double t, std::size_t replicas, Seed seed,
                                         const FarmOptions& farm = {});

struct DualityReport {
  std::string mode;  // "exact" or "monte_carlo"
  double lhs = 0.0;  // (mu P_t)(eta_x = 1, eta_y = 1)
  double rhs = 0.0;  // sum_{u,v} P_{(x,y)}[(X_t, Y_t) = (u, v)] mu(eta_u = 1, eta_v = 1)
  double lhs_stderr = 0.0;
  double rhs_stderr = 0.0;
  double discrepancy = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline constexpr double kDualityExactTolerance = 1e-8;
inline constexpr std::size_t kDualityExactMaxSites = 12;

/// Both sides computed exactly (lattice of at most 12 sites).
DualityReport duality_check(const ensembles::MeasureSpec& mu, Site x, Site y, double t, const TorusLattice& lattice);

/// Both sides estimated from independent replicas; pass within 4 joint stderr.
DualityReport duality_check_monte_carlo(const ensembles::MeasureSpec& mu, Site x, Site y, double t,
                                        const TorusLattice& lattice, std::size_t replicas, Seed seed,
                                        const FarmOptions& farm = {});

}  // namespace sep::metrics
