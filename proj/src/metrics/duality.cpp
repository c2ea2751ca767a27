#include <cmath>
#include <stdexcept>

#include "sep/dynamics/stirring.hpp"
#include "sep/metrics/bounds.hpp"
#include "sep/oracle/generator.hpp"
#include "sep/oracle/uniformization.hpp"
#include "sep/oracle/walks.hpp"

namespace sep::metrics {

namespace {

void check_pair(Site x, Site y, const TorusLattice& lattice) {
  if (x == y) throw std::invalid_argument("duality check needs distinct sites");
  if (x >= lattice.num_sites() || y >= lattice.num_sites()) throw std::out_of_range("site outside the lattice");
}

double pair_occupation(std::span<const double> law, Site u, Site v) {
  double s = 0.0;
  for (std::size_t k = 0; k < law.size(); ++k)
    if (((k >> u) & 1u) && ((k >> v) & 1u)) s += law[k];
  return s;
}

}  // namespace

DualityReport duality_check(const ensembles::MeasureSpec& mu, Site x, Site y, double t, const TorusLattice& lattice) {
  check_pair(x, y, lattice);
  if (lattice.num_sites() > kDualityExactMaxSites)
    throw oracle::ResourceLimit("exact duality check is limited to 12 sites");
  const auto law = ensembles::torus_law(mu, lattice);
  const auto gen = oracle::build_generator(dynamics::Process::sep, lattice);
  const auto evolved = oracle::evolve_exact(gen.Q, law, t);

  DualityReport r;
  r.mode = "exact";
  r.lhs = pair_occupation(evolved, x, y);
  const auto pair = oracle::two_particle_exclusion(lattice, x, y, t);
  const std::size_t n = lattice.num_sites();
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (u != v && pair(u, v) != 0.0) r.rhs += pair(u, v) * pair_occupation(law, static_cast<Site>(u), static_cast<Site>(v));
  r.discrepancy = std::abs(r.lhs - r.rhs);
  r.tolerance = kDualityExactTolerance;
  r.pass = r.discrepancy <= r.tolerance;
  return r;
}

DualityReport duality_check_monte_carlo(const ensembles::MeasureSpec& mu, Site x, Site y, double t,
                                        const TorusLattice& lattice, std::size_t replicas, Seed seed,
                                        const FarmOptions& opts) {
  check_pair(x, y, lattice);
  if (replicas < 2) throw std::invalid_argument("at least 2 replicas are needed for an error estimate");
  struct Pair {
    double lhs = 0.0, rhs = 0.0;
  };
  const auto values = farm(replicas, opts, [&](std::size_t i) {
    const Seed r = replica_seed(seed, i);
    Pair out;
    {
      dynamics::SepReplay replay(ensembles::sample(mu, lattice, substream(r, 0x10)), dynamics::Channel::minus);
      dynamics::StirringStream stream(lattice, 1, substream(r, 0x20));
      for (auto ev = stream.next(); ev.time <= t; ev = stream.next()) replay.apply(ev);
      out.lhs = replay.occupation()[x] * replay.occupation()[y];
    }
    {
      Site u = x, v = y;
      dynamics::StirringStream stream(lattice, 1, substream(r, 0x30));
      for (auto ev = stream.next(); ev.time <= t; ev = stream.next()) {
        const Edge e = lattice.edge(ev.edge);
        auto move = [&](Site& m) {
          if (m == e.lo) m = e.hi;
          else if (m == e.hi) m = e.lo;
        };
        move(u);
        move(v);
      }
      const OccupancyConfig eta = ensembles::sample(mu, lattice, substream(r, 0x40));
      out.rhs = eta[u] * eta[v];
    }
    return out;
  });
  RunningStats l, rr;
  for (const auto& p : values) {
    l.add(p.lhs);
    rr.add(p.rhs);
  }
  DualityReport r;
  r.mode = "monte_carlo";
  r.lhs = l.mean();
  r.rhs = rr.mean();
  r.lhs_stderr = l.stderr_of_mean();
  r.rhs_stderr = rr.stderr_of_mean();
  r.discrepancy = std::abs(r.lhs - r.rhs);
  r.tolerance = 4.0 * std::hypot(r.lhs_stderr, r.rhs_stderr);
  r.pass = r.discrepancy <= r.tolerance;
  return r;
}

}  // namespace sep::metrics
