#include <bit>
#include <cmath>
#include <stdexcept>

#include "sep/ensembles/measure.hpp"

namespace sep::ensembles {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_dimension(const MeasureSpec& spec, const TorusLattice& lattice) {
  const int d = required_dimension(spec);
  if (d != 0 && d != lattice.dimension())
    throw std::invalid_argument(describe(spec) + " cannot be placed on a " + lattice.describe());
}

// Window-site lookup table: site x, coordinate j -> x + offsets[j] (wrapped).
std::vector<Site> window_sites(const BlockFactor& f, const TorusLattice& lattice) {
  const std::size_t n = lattice.num_sites();
  const std::size_t k = f.offsets.size();
  std::vector<Site> w(n * k);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t j = 0; j < k; ++j) w[x * k + j] = lattice.translate(static_cast<Site>(x), f.offsets[j]);
  return w;
}

}  // namespace

OccupancyConfig sample(const MeasureSpec& spec, const TorusLattice& lattice, Seed seed) {
  validate(spec);
  check_dimension(spec, lattice);
  Rng rng = make_rng(seed);
  const std::size_t n = lattice.num_sites();
  std::vector<Symbol> eta(n, 0);
  std::visit(overloaded{
                 [&](const Bernoulli& b) {
                   for (auto& v : eta) v = uniform01(rng) < b.rho;
                 },
                 [&](const BlockFactor& f) {
                   std::vector<std::uint8_t> field(n);
                   for (auto& u : field) u = uniform01(rng) < f.p;
                   const auto win = window_sites(f, lattice);
                   const std::size_t k = f.offsets.size();
                   for (std::size_t x = 0; x < n; ++x) {
                     std::size_t idx = 0;
                     for (std::size_t j = 0; j < k; ++j) idx |= static_cast<std::size_t>(field[win[x * k + j]]) << j;
                     eta[x] = static_cast<Symbol>(f.table[idx]);
                   }
                 },
                 [&](const MarkovChain1d& m) {
                   // Run the stationary chain from a uniformly random cut so the
                   // torus law is a mixture of rotations: translation invariant
                   // with exact one-site density a / (a + b).
                   const double rho = m.a / (m.a + m.b);
                   const auto cut = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
                   Symbol s = uniform01(rng) < rho;
                   eta[cut] = s;
                   for (std::size_t i = 1; i < n; ++i) {
                     const double up = s ? 1.0 - m.b : m.a;
                     s = uniform01(rng) < up;
                     eta[(cut + i) % n] = s;
                   }
                 }},
             spec);
  return OccupancyConfig(lattice, std::move(eta));
}

SignedConfig sample_diff(const DiffLawSpec& spec, const TorusLattice& lattice, Seed seed) {
  if (std::abs(density(spec.mu) - spec.rho) > 1e-12)
    throw std::invalid_argument("difference law needs density(mu) == rho");
  const auto eta = sample(spec.mu, lattice, substream(seed, 1));
  const auto ref = sample(Bernoulli{spec.rho}, lattice, substream(seed, 2));
  return difference(eta, ref);
}

std::vector<double> torus_law(const MeasureSpec& spec, const TorusLattice& lattice) {
  validate(spec);
  check_dimension(spec, lattice);
  const std::size_t n = lattice.num_sites();
  if (n > 20) throw std::invalid_argument("torus law enumeration supports at most 20 sites");
  const std::size_t states = std::size_t{1} << n;
  std::vector<double> law(states, 0.0);
  std::visit(overloaded{
                 [&](const Bernoulli& b) {
                   for (std::size_t s = 0; s < states; ++s) {
                     const int ones = std::popcount(s);
                     law[s] = std::pow(b.rho, ones) * std::pow(1.0 - b.rho, static_cast<double>(n) - ones);
                   }
                 },
                 [&](const BlockFactor& f) {
                   const auto win = window_sites(f, lattice);
                   const std::size_t k = f.offsets.size();
                   for (std::size_t u = 0; u < states; ++u) {
                     const int ones = std::popcount(u);
                     const double w = std::pow(f.p, ones) * std::pow(1.0 - f.p, static_cast<double>(n) - ones);
                     std::size_t s = 0;
                     for (std::size_t x = 0; x < n; ++x) {
                       std::size_t idx = 0;
                       for (std::size_t j = 0; j < k; ++j) idx |= ((u >> win[x * k + j]) & 1u) << j;
                       s |= static_cast<std::size_t>(f.table[idx]) << x;
                     }
                     law[s] += w;
                   }
                 },
                 [&](const MarkovChain1d& m) {
                   const double rho = m.a / (m.a + m.b);
                   const double P[2][2] = {{1.0 - m.a, m.a}, {m.b, 1.0 - m.b}};
                   for (std::size_t s = 0; s < states; ++s) {
                     double total = 0.0;
                     for (std::size_t cut = 0; cut < n; ++cut) {
                       auto bit = [&](std::size_t i) { return (s >> ((cut + i) % n)) & 1u; };
                       double w = bit(0) ? rho : 1.0 - rho;
                       for (std::size_t i = 1; i < n; ++i) w *= P[bit(i - 1)][bit(i)];
                       total += w;
                     }
                     law[s] = total / static_cast<double>(n);
                   }
                 }},
             spec);
  return law;
}

}  // namespace sep::ensembles
