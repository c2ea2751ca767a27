#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sep/core/lattice.hpp"

namespace sep::oracle {

/// Row-major square matrix.
struct DenseMatrix {
  std::size_t n = 0;
  std::vector<double> a;

  double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
  double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
};

/// Transition matrix of a continuous-time simple symmetric random walk that
/// crosses every incident edge at `rate` (p_t for rate 1, q_t for rate 2).
DenseMatrix rw_transition(const TorusLattice& lattice, double t, double rate);

/// Joint law of two markers started at (x, y): entry (u, v) is
/// P(X(t) = u, Y(t) = v). With `same_channel` the markers follow one
/// stirring process (each incident edge moves a marker at rate 1, the shared
/// edge swaps them); otherwise they are independent rate-1 walks.
DenseMatrix marker_pair_law(const TorusLattice& lattice, Site x, Site y, double t, bool same_channel);

/// Two labelled exclusion particles from distinct sites (x, y).
DenseMatrix two_particle_exclusion(const TorusLattice& lattice, Site x, Site y, double t);

struct LiggettReport {
  /// max over x' != y', x, y of p^{a,a}(x',y',x,y) - p(x',x) p(y',y).
  double max_violation;
  /// max over x', y', x, y of |p^{a,b}(x',y',x,y) - p(x',x) p(y',y)|.
  double cross_channel_gap;
};

LiggettReport liggett_check(const TorusLattice& lattice, double t);

/// Negative correlation of stirring from a product law with site densities
/// `rho`: max over x != y of
///   sum_{x' != y'} p^{a,a}(x',y',x,y) rho(x') rho(y') - P(eta_t(x)=1) P(eta_t(y)=1),
/// where P(eta_t(x)=1) = sum_{x'} p_t(x',x) rho(x'). Never positive (up to rounding).
double liggett_product_violation(const TorusLattice& lattice, double t, std::span<const double> rho);

}  // namespace sep::oracle
