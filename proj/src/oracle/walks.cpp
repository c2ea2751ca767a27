#include "sep/oracle/walks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sep/oracle/uniformization.hpp"

namespace sep::oracle {

namespace {

std::vector<Site> neighbours(const TorusLattice& lat, Site x) {
  std::vector<Site> out;
  for (int a = 0; a < lat.dimension(); ++a) {
    out.push_back(lat.neighbor(x, a, +1));
    out.push_back(lat.neighbor(x, a, -1));
  }
  return out;
}

GeneratorMatrix walk_generator(const TorusLattice& lat, double rate) {
  const std::size_t n = lat.num_sites();
  std::vector<std::vector<Transition>> rows(n);
  for (std::size_t x = 0; x < n; ++x)
    for (Site y : neighbours(lat, static_cast<Site>(x))) rows[x].push_back({y, rate});
  return GeneratorMatrix(std::move(rows));
}

}  // namespace

DenseMatrix rw_transition(const TorusLattice& lattice, double t, double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("walk rate must be > 0");
  const auto Q = walk_generator(lattice, rate);
  const std::size_t n = lattice.num_sites();
  DenseMatrix P{n, std::vector<double>(n * n)};
  for (std::size_t x = 0; x < n; ++x) {
    const auto row = evolve_exact_serial(Q, point_mass(n, x), t);
    std::copy(row.begin(), row.end(), P.a.begin() + static_cast<std::ptrdiff_t>(x * n));
  }
  return P;
}

DenseMatrix marker_pair_law(const TorusLattice& lattice, Site x, Site y, double t, bool same_channel) {
  const std::size_t n = lattice.num_sites();
  if (x >= n || y >= n) throw std::out_of_range("marker start outside lattice");
  if (same_channel && x == y) throw std::invalid_argument("markers of one stirring channel start at distinct sites");
  if (n * n > kMaxStates) throw ResourceLimit("marker pair chain too large");

  // state (u, v) -> u * n + v
  std::vector<std::vector<Transition>> rows(n * n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) {
      if (same_channel && u == v) continue;  // unreachable
      auto& row = rows[u * n + v];
      for (Site u2 : neighbours(lattice, static_cast<Site>(u))) {
        if (same_channel && u2 == v) {
          row.push_back({static_cast<std::uint32_t>(v * n + u), 1.0});  // shared edge: swap
        } else {
          row.push_back({static_cast<std::uint32_t>(u2 * n + v), 1.0});
        }
      }
      for (Site v2 : neighbours(lattice, static_cast<Site>(v))) {
        if (same_channel && v2 == u) continue;  // already counted as the swap
        row.push_back({static_cast<std::uint32_t>(u * n + v2), 1.0});
      }
    }
  const GeneratorMatrix Q(std::move(rows));
  const auto law = evolve_exact_serial(Q, point_mass(n * n, x * n + y), t);
  return DenseMatrix{n, law};
}

DenseMatrix two_particle_exclusion(const TorusLattice& lattice, Site x, Site y, double t) {
  if (x == y) throw std::invalid_argument("exclusion particles start at distinct sites");
  return marker_pair_law(lattice, x, y, t, true);
}

LiggettReport liggett_check(const TorusLattice& lattice, double t) {
  const std::size_t n = lattice.num_sites();
  const DenseMatrix p = rw_transition(lattice, t, 1.0);
  LiggettReport r{-std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t xs = 0; xs < n; ++xs)
    for (std::size_t ys = 0; ys < n; ++ys) {
      const auto cross = marker_pair_law(lattice, static_cast<Site>(xs), static_cast<Site>(ys), t, false);
      for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = 0; v < n; ++v)
          r.cross_channel_gap = std::max(r.cross_channel_gap, std::abs(cross(u, v) - p(xs, u) * p(ys, v)));
      if (xs == ys) continue;
      const auto same = marker_pair_law(lattice, static_cast<Site>(xs), static_cast<Site>(ys), t, true);
      for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = 0; v < n; ++v) r.max_violation = std::max(r.max_violation, same(u, v) - p(xs, u) * p(ys, v));
    }
  return r;
}

double liggett_product_violation(const TorusLattice& lattice, double t, std::span<const double> rho) {
  const std::size_t n = lattice.num_sites();
  if (rho.size() != n) throw std::invalid_argument("one density per site is required");
  const DenseMatrix p = rw_transition(lattice, t, 1.0);
  std::vector<double> one(n, 0.0);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t xs = 0; xs < n; ++xs) one[x] += p(xs, x) * rho[xs];
  DenseMatrix two{n, std::vector<double>(n * n, 0.0)};
  for (std::size_t xs = 0; xs < n; ++xs)
    for (std::size_t ys = 0; ys < n; ++ys) {
      if (xs == ys) continue;
      const double w = rho[xs] * rho[ys];
      if (w == 0.0) continue;
      const auto same = marker_pair_law(lattice, static_cast<Site>(xs), static_cast<Site>(ys), t, true);
      for (std::size_t k = 0; k < n * n; ++k) two.a[k] += w * same.a[k];
    }
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (x != y) worst = std::max(worst, two(x, y) - one[x] * one[y]);
  return worst;
}

}  // namespace sep::oracle
