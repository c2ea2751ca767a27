#pragma once

#include <span>
#include <string>
#include <vector>

#include "sep/core/lattice.hpp"
#include "sep/core/rng.hpp"
#include "sep/dynamics/engine.hpp"
#include "sep/ensembles/measure.hpp"
#include "sep/metrics/farm.hpp"
#include "sep/oracle/generator.hpp"
#include "sep/oracle/report.hpp"

namespace sep::metrics {

using oracle::CheckReport;

/// Coupled process projected by difference vs the annihilation process, in
/// total variation, over every initial pair of the lattice. One report per t.
std::vector<CheckReport> check_coupling_projection(const TorusLattice& lattice, std::span<const double> times,
                                       const oracle::GeneratorOptions& opts = {}, double tolerance = 1e-9);

/// Worst normalised per-state deviation of the empirical law at time t from
/// evolve_exact; passes iff every state is within 4 sqrt(p(1-p)/n).
CheckReport check_mc_vs_oracle(dynamics::Process p, dynamics::Engine engine, const TorusLattice& lattice,
                               const dynamics::AnyState& init, double t, std::size_t replicas, Seed seed,
                               const FarmOptions& farm = {}, const oracle::GeneratorOptions& opts = {});

/// Fixed non-trivial start used by the oracle comparisons.
dynamics::AnyState reference_state(dynamics::Process p, const TorusLattice& lattice);

CheckReport check_variance_bound(const ensembles::DiffLawSpec& diff, const TorusLattice& lattice, int box_side,
                                 double t, std::size_t replicas, Seed seed, const FarmOptions& farm = {});

/// Two reports: negative correlation of same-channel stirring from random
/// product laws, and cross-channel factorisation. The labelled entrywise
/// maximum of p^{a,a} - p p is attached to the first as a detail.
std::vector<CheckReport> check_liggett(const TorusLattice& lattice, double t, Seed seed, double tolerance = 1e-10);

CheckReport check_duality(const ensembles::MeasureSpec& mu, const TorusLattice& lattice, Site x, Site y, double t);

/// Metric axioms of exact_wasserstein on random triples of laws over {0,1}^sites.
CheckReport check_wasserstein_axioms(int sites, std::size_t triples, Seed seed, double tolerance = 1e-12);

/// W over [0,b) >= W over [0,a) + W over [a,b) for 1 <= a < b <= max_side,
/// with the box marginals of two translation-invariant laws on Z.
CheckReport check_superadditivity(const ensembles::MeasureSpec& mu, const ensembles::MeasureSpec& nu, int max_side,
                                  double tolerance = 1e-12);

/// E|xi_0(t)| from evolve_exact(annihilation) started from the exact
/// discrepancy law on the torus is non-increasing along `times`.
CheckReport check_annihilation_monotone(const ensembles::DiffLawSpec& diff, const TorusLattice& lattice,
                                        std::span<const double> times, double tolerance = 1e-12);

struct ValidationOptions {
  int side = 3;
  double annihilation_rate = 2.0;
  std::size_t mc_replicas = 100000;
  std::size_t variance_replicas = 10000;
  Seed seed = 20240611;
  FarmOptions farm;
};

/// The pinned property suite behind `validate`.
std::vector<CheckReport> run_validation_suite(const ValidationOptions& opts);

}  // namespace sep::metrics
