#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sep/core/config.hpp"
#include "sep/core/lattice.hpp"
#include "sep/core/rng.hpp"

namespace sep::ensembles {

/// Product measure with density rho.
struct Bernoulli {
  double rho = 0.5;
};

/// Block factor of an i.i.d. Bernoulli(p) driving field U:
/// eta_x = table[ sum_j U_{x + offsets[j]} << j ].
///
/// Only the window coordinates f actually reads are stored, so the range of
/// the factor is the largest sup-norm among `offsets`. Windows wrap on the
/// torus, which keeps the finite-volume law exactly translation invariant.
struct BlockFactor {
  int dimension = 1;
  double p = 0.5;
  std::vector<std::vector<int>> offsets;
  std::vector<std::uint8_t> table;  // size 2^offsets.size(), entries in {0,1}
  std::string label = "block";

  int range() const;
};

/// Stationary two-state Markov chain on Z with P = [[1-a, a], [b, 1-b]].
/// One-dimensional only.
struct MarkovChain1d {
  double a = 0.5;
  double b = 0.5;

  double lambda() const { return 1.0 - a - b; }  // second eigenvalue of P
};

using MeasureSpec = std::variant<Bernoulli, BlockFactor, MarkovChain1d>;

Bernoulli make_bernoulli(double rho);
/// eta_x = U_x xor U_{x + range e_0}.
BlockFactor block_xor(int dimension, double p, int range = 1);
/// eta_x = U_x and U_{x + range e_0}.
BlockFactor block_and(int dimension, double p, int range = 1);
MarkovChain1d make_markov(double a, double b);

/// Validates parameters; throws std::invalid_argument.
void validate(const MeasureSpec& spec);

std::string describe(const MeasureSpec& spec);
/// Spatial dimension the spec is tied to, or 0 when it works in any dimension.
int required_dimension(const MeasureSpec& spec);

double density(const MeasureSpec& spec);

/// Infinite-volume covariance mu(eta_0 ; eta_x) for a lattice offset x.
double covariance(const MeasureSpec& spec, std::span<const int> offset);

/// A(mu): sum over all offsets of |mu(eta_0 ; eta_x)|.
double correlation_sum_A(const MeasureSpec& spec);

/// Law of xi = eta - eta_ref with eta ~ mu and eta_ref ~ Bernoulli(rho)
/// independent. Construction rejects |density(mu) - rho| > 1e-12, since the
/// two signs are only equally likely when the densities agree.
struct DiffLawSpec {
  MeasureSpec mu;
  double rho;
};

DiffLawSpec make_diff_law(MeasureSpec mu, double rho);
DiffLawSpec make_diff_law(MeasureSpec mu);  // rho = density(mu)

/// B(law): sum over offsets and species pairs of |law(xi_0 = a ; xi_x = b)|.
double correlation_sum_B(const DiffLawSpec& spec);

/// Exact single-sample draw on the torus; a pure function of (spec, lattice, seed).
OccupancyConfig sample(const MeasureSpec& spec, const TorusLattice& lattice, Seed seed);

/// difference(sample(mu), sample(Bernoulli(rho))) with independent sub-streams.
SignedConfig sample_diff(const DiffLawSpec& spec, const TorusLattice& lattice, Seed seed);

/// Exact law of the torus sampler as a probability vector over {0,1}^N
/// (bit i of the state index is the occupation of site i). N <= 20.
std::vector<double> torus_law(const MeasureSpec& spec, const TorusLattice& lattice);

/// Infinite-volume marginal on the one-dimensional box {0..n-1}, same state
/// encoding as torus_law. Requires a spec usable in d = 1 and n <= 20.
std::vector<double> box_marginal(const MeasureSpec& spec, int n);

}  // namespace sep::ensembles
