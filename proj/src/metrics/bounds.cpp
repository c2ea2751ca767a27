#include "sep/metrics/bounds.hpp"

#include <cmath>
#include <stdexcept>

#include "sep/dynamics/stirring.hpp"

namespace sep::metrics {

VarianceBoundReport variance_bound_check(const ensembles::DiffLawSpec& diff, const TorusLattice& lattice,
                                         std::span<const Site> box, double t, std::size_t replicas, Seed seed,
                                         const FarmOptions& opts) {
  if (replicas < 2) throw std::invalid_argument("at least 2 replicas are needed for an error estimate");
  if (!(t >= 0.0)) throw std::invalid_argument("t must be >= 0");
  for (Site x : box)
    if (x >= lattice.num_sites()) throw std::out_of_range("box site outside the lattice");

  const auto values = farm(replicas, opts, [&](std::size_t i) {
    const Seed r = replica_seed(seed, i);
    const TwoSpeciesConfig init = to_two_species(ensembles::sample_diff(diff, lattice, substream(r, 0x10)));
    dynamics::FreeReplay replay(init);
    dynamics::StirringStream stream(lattice, 2, substream(r, 0x20));
    for (dynamics::ArrowEvent ev = stream.next(); ev.time <= t; ev = stream.next()) replay.apply(ev);
    long long net = 0;
    for (Site x : box) net += replay.plus_mask()[x] - replay.minus_mask()[x];
    return static_cast<double>(net * net);
  });

  RunningStats acc;
  for (double v : values) acc.add(v);
  VarianceBoundReport r;
  r.t = t;
  r.box_sites = box.size();
  r.replicas = replicas;
  r.second_moment = acc.mean();
  r.stderr_ = acc.stderr_of_mean();
  r.B = ensembles::correlation_sum_B(diff);
  r.bound = 2.0 * static_cast<double>(box.size()) * r.B;
  r.ratio = r.bound > 0.0 ? r.second_moment / r.bound : 0.0;
  const double rel = r.second_moment > 0.0 ? r.stderr_ / r.second_moment : 0.0;
  r.pass = r.second_moment <= r.bound * (1.0 + 4.0 * rel);
  return r;
}

}  // namespace sep::metrics
