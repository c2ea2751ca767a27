#include "sep/dynamics/engine.hpp"

#include <stdexcept>
#include <string>

namespace sep::dynamics {

std::string_view engine_name(Engine e) { return e == Engine::stirring ? "stirring" : "gillespie"; }

Engine parse_engine(std::string_view name) {
  if (name == "stirring" || name == "stirring+thin") return Engine::stirring;
  if (name == "gillespie") return Engine::gillespie;
  throw std::invalid_argument("unknown engine '" + std::string(name) + "'");
}

int stirring_channels(Process p) { return p == Process::sep ? 1 : 2; }

namespace {

template <class Replay, class Make>
Trajectory<AnyState> replay_snapshots(Replay replay, const TorusLattice& lattice, int channels,
                                      std::span<const double> obs, Seed seed, Make make) {
  StirringStream stream(lattice, channels, seed);
  ArrowEvent ev = stream.next();
  Trajectory<AnyState> out;
  for (double t : obs) {
    while (ev.time <= t) {
      replay.apply(ev);
      ev = stream.next();
    }
    out.push_back({t, make(replay)});
  }
  return out;
}

}  // namespace

Trajectory<AnyState> run_process(Process p, Engine engine, const AnyState& init, double horizon,
                                 std::span<const double> obs, Seed seed) {
  if (engine == Engine::gillespie) return gillespie(p, init, horizon, obs, seed);

  // Validate through the Gillespie front door's checks without simulating.
  gillespie(p, init, horizon, {}, seed);
  double prev = 0.0;
  for (double t : obs) {
    if (!(t >= prev) || t > horizon) throw std::invalid_argument("observation times must be sorted within [0, horizon]");
    prev = t;
  }
  const int ch = stirring_channels(p);
  switch (p) {
    case Process::sep: {
      const auto& c = std::get<OccupancyConfig>(init);
      return replay_snapshots(SepReplay(c, Channel::minus), c.lattice(), ch, obs, seed,
                              [](const SepReplay& r) { return AnyState{r.config()}; });
    }
    case Process::coupled: {
      const auto& c = std::get<CoupledConfig>(init);
      return replay_snapshots(CoupledReplay(c), c.eta.lattice(), ch, obs, seed,
                              [](const CoupledReplay& r) { return AnyState{r.config()}; });
    }
    case Process::annihilation: {
      const auto& c = std::get<SignedConfig>(init);
      return replay_snapshots(ThinningReplay(c), c.lattice(), ch, obs, seed,
                              [](const ThinningReplay& r) { return AnyState{r.config()}; });
    }
    case Process::free: {
      const auto& c = std::get<TwoSpeciesConfig>(init);
      return replay_snapshots(FreeReplay(c), c.lattice(), ch, obs, seed,
                              [](const FreeReplay& r) { return AnyState{r.config()}; });
    }
  }
  throw std::invalid_argument("unknown process");
}

}  // namespace sep::dynamics
