#include "sep/metrics/estimators.hpp"

#include <cmath>
#include <stdexcept>

namespace sep::metrics {

namespace {

constexpr std::uint64_t kInitialStream = 0x10;
constexpr std::uint64_t kDynamicsStream = 0x20;

void check_times(std::span<const double> times) {
  if (times.empty()) throw std::invalid_argument("empty time grid");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || !std::isfinite(times[i])) throw std::invalid_argument("times must be finite and >= 0");
    if (i > 0 && !(times[i] > times[i - 1])) throw std::invalid_argument("times must be strictly increasing");
  }
}

long long charge_of(std::span<const Symbol> xi) {
  long long c = 0;
  for (Symbol s : xi) c += s;
  return c;
}

}  // namespace

double theoretical_exponent(int d) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  return d <= 4 ? d / 4.0 : 1.0;
}

std::vector<double> dyadic_times(double t0, int kmax) {
  if (!(t0 > 0.0) || kmax < 0) throw std::invalid_argument("dyadic grid needs t0 > 0 and kmax >= 0");
  std::vector<double> out;
  for (int k = 0; k <= kmax; ++k) out.push_back(std::ldexp(t0, k));
  return out;
}

ReplicaTrace discrepancy_replica(const DiffLawSpec& diff, const TorusLattice& lattice, std::span<const double> times,
                                 Seed replica, Engine engine) {
  const SignedConfig xi0 = ensembles::sample_diff(diff, lattice, substream(replica, kInitialStream));
  const Seed dyn = substream(replica, kDynamicsStream);
  const double n = static_cast<double>(lattice.num_sites());
  ReplicaTrace out;
  out.charge = charge_of(xi0.values());
  out.density.reserve(times.size());

  auto check_charge = [&](long long c) {
    if (c != out.charge) throw std::logic_error("charge changed along an annihilation replica");
  };

  if (engine == Engine::stirring) {
    dynamics::ThinningReplay replay(xi0);
    dynamics::StirringStream stream(lattice, 2, dyn);
    dynamics::ArrowEvent ev = stream.next();
    for (double t : times) {
      while (ev.time <= t) {
        replay.apply(ev);
        ev = stream.next();
      }
      check_charge(static_cast<long long>(replay.alive(+1)) - static_cast<long long>(replay.alive(-1)));
      out.density.push_back(static_cast<double>(replay.occupied()) / n);
    }
  } else {
    std::vector<Symbol> codes(xi0.values().begin(), xi0.values().end());
    dynamics::EdgeKmc kmc(dynamics::Process::annihilation, lattice, std::move(codes), dyn);
    for (double t : times) {
      kmc.advance_to(t);
      std::size_t occupied = 0;
      for (Symbol s : kmc.codes()) occupied += s != 0;
      check_charge(charge_of(kmc.codes()));
      out.density.push_back(static_cast<double>(occupied) / n);
    }
  }
  return out;
}

EstimateSeries estimate_discrepancy_density(const DiffLawSpec& diff, const TorusLattice& lattice,
                                            std::span<const double> times, std::size_t replicas, Seed seed,
                                            Engine engine, const FarmOptions& opts) {
  if (replicas < 2) throw std::invalid_argument("at least 2 replicas are needed for an error estimate");
  check_times(times);
  ensembles::validate(diff.mu);
  const int need = ensembles::required_dimension(diff.mu);
  if (need != 0 && need != lattice.dimension())
    throw std::invalid_argument("measure dimension does not match the lattice");

  const auto traces = farm(replicas, opts, [&](std::size_t i) {
    return discrepancy_replica(diff, lattice, times, replica_seed(seed, i), engine);
  });

  EstimateSeries s;
  s.times.assign(times.begin(), times.end());
  s.replicas = replicas;
  s.seed = seed;
  s.lattice = lattice.describe();
  s.measure = ensembles::describe(diff.mu);
  s.rho = diff.rho;
  s.engine = engine == Engine::stirring ? "stirring+thin" : "gillespie";
  for (std::size_t k = 0; k < times.size(); ++k) {
    RunningStats acc;
    for (const auto& tr : traces) acc.add(tr.density[k]);
    s.estimate.push_back(acc.mean());
    s.stderr_.push_back(acc.stderr_of_mean());
  }
  return s;
}

void attach_envelope(EstimateSeries& s, const DiffLawSpec& diff, int dimension) {
  s.label = "dbar_upper_bound";
  s.A = ensembles::correlation_sum_A(diff.mu);
  s.B = ensembles::correlation_sum_B(diff);
  s.gamma = theoretical_exponent(dimension);
  s.ratio.clear();
  s.ratio_stderr.clear();
  const double root = std::sqrt(s.A);
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    const double scale = root > 0.0 ? std::pow(s.times[k], s.gamma) / root : 0.0;
    s.ratio.push_back(s.estimate[k] * scale);
    s.ratio_stderr.push_back(s.stderr_[k] * scale);
  }
}

EstimateSeries dbar_bound_series(const DiffLawSpec& diff, const TorusLattice& lattice, std::span<const double> times,
                                 std::size_t replicas, Seed seed, Engine engine, const FarmOptions& opts) {
  EstimateSeries s = estimate_discrepancy_density(diff, lattice, times, replicas, seed, engine, opts);
  attach_envelope(s, diff, lattice.dimension());
  return s;
}

}  // namespace sep::metrics
