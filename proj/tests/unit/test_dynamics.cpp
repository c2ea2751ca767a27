#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

#include "doctest.h"
#include "sep/dynamics/engine.hpp"
#include "sep/dynamics/trajectory_io.hpp"
#include "sep/ensembles/measure.hpp"
#include "sep/oracle/walks.hpp"

using namespace sep;
using namespace sep::dynamics;

namespace {

OccupancyConfig occ(int L, std::vector<Symbol> v) { return OccupancyConfig(TorusLattice(1, L), std::move(v)); }
SignedConfig sgn(int L, std::vector<Symbol> v) { return SignedConfig(TorusLattice(1, L), std::move(v)); }
TwoSpeciesConfig two(int L, std::vector<Symbol> v) { return TwoSpeciesConfig(TorusLattice(1, L), std::move(v)); }

std::size_t abs_mass(const SignedConfig& xi) {
  std::size_t n = 0;
  for (Symbol s : xi.values()) n += s != 0;
  return n;
}

}  // namespace

TEST_CASE("gen_stirring: errors, determinism, ordering") {
  TorusLattice lat(1, 5);
  CHECK_THROWS_AS(gen_stirring(lat, 0.0, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_stirring(lat, -1.0, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_stirring(lat, 1.0, 1, 3), std::invalid_argument);
  const auto a = gen_stirring(lat, 10.0, 5, 2), b = gen_stirring(lat, 10.0, 5, 2);
  REQUIRE(a.events.size() == b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    CHECK(a.events[i].time == b.events[i].time);
    CHECK(a.events[i].edge == b.events[i].edge);
    CHECK(a.events[i].channel == b.events[i].channel);
    if (i > 0) CHECK(a.events[i].time > a.events[i - 1].time);
    CHECK(a.events[i].time <= 10.0);
  }
  CHECK(gen_stirring(lat, 1e-12, 5, 1).events.empty());
}

TEST_CASE("gen_stirring: events per edge per unit time near 1") {
  TorusLattice lat(1, 3);
  const auto log = gen_stirring(lat, 1000.0, 17, 1);
  std::array<double, 3> count{};
  for (const auto& ev : log.events) count[ev.edge] += 1;
  for (double c : count) CHECK(std::abs(c / 1000.0 - 1.0) < 0.1);
}

TEST_CASE("gen_stirring: per (edge, channel) inter-arrivals are Exp(1) (KS test)") {
  TorusLattice lat(1, 4);
  const auto log = gen_stirring(lat, 2000.0, 23, 2);
  for (std::uint32_t e = 0; e < 4; ++e)
    for (Channel ch : {Channel::minus, Channel::plus}) {
      std::vector<double> gaps;
      double last = 0;
      for (const auto& ev : log.events)
        if (ev.edge == e && ev.channel == ch) {
          gaps.push_back(ev.time - last);
          last = ev.time;
        }
      std::sort(gaps.begin(), gaps.end());
      const double n = static_cast<double>(gaps.size());
      double dmax = 0;
      for (std::size_t i = 0; i < gaps.size(); ++i) {
        const double F = 1 - std::exp(-gaps[i]);
        dmax = std::max({dmax, std::abs(F - i / n), std::abs(F - (i + 1) / n)});
      }
      // Kolmogorov critical value at level 0.001 is about 1.95 / sqrt(n).
      CHECK(dmax < 1.95 / std::sqrt(n));
    }
}

TEST_CASE("stirring positions") {
  TorusLattice lat(1, 5);
  StirringLog empty{lat, 1.0, 1, {}};
  CHECK(stirring_position(empty, Channel::minus, 3, 1.0) == 3);
  StirringLog one{lat, 1.0, 1, {ArrowEvent{0.25, static_cast<std::uint32_t>(lat.edge_index(3, 0)), Channel::minus}}};
  CHECK(stirring_position(one, Channel::minus, 3, 1.0) == 4);
  CHECK(stirring_position(one, Channel::minus, 4, 1.0) == 3);
  CHECK(stirring_position(one, Channel::minus, 3, 0.2) == 3);
  CHECK_THROWS_AS(stirring_position(one, Channel::minus, 3, 1.5), std::out_of_range);
  const auto log = gen_stirring(TorusLattice(2, 4), 3.0, 9, 2);
  for (Channel ch : {Channel::minus, Channel::plus}) {
    auto perm = stirring_permutation(log, ch, 3.0);
    std::sort(perm.begin(), perm.end());
    for (Site x = 0; x < perm.size(); ++x) CHECK(perm[x] == x);
  }
}

TEST_CASE("realize_sep") {
  TorusLattice lat(1, 6);
  const auto log = gen_stirring(lat, 2.0, 4, 1);
  CHECK(realize_sep(occ(6, {1, 1, 1, 1, 1, 1}), log, 2.0) == occ(6, {1, 1, 1, 1, 1, 1}));
  CHECK(realize_sep(occ(6, {0, 0, 0, 0, 0, 0}), log, 2.0) == occ(6, {0, 0, 0, 0, 0, 0}));
  const auto init = occ(6, {1, 0, 1, 1, 0, 0});
  const auto out = realize_sep(init, log, 1.3);
  int n = 0;
  for (Symbol s : out.values()) n += s;
  CHECK(n == 3);
  // Pushforward by the stirring permutation.
  const auto perm = stirring_permutation(log, Channel::minus, 1.3);
  for (Site y = 0; y < 6; ++y) CHECK(out[perm[y]] == init[y]);
}

TEST_CASE("realize_sep single particle law matches p_t") {
  TorusLattice lat(1, 5);
  const auto p = oracle::rw_transition(lat, 1.0, 1.0);
  const std::size_t n = 100000;
  std::array<double, 5> hist{};
  for (std::size_t k = 0; k < n; ++k) {
    const auto log = gen_stirring(lat, 1.0, replica_seed(3, k), 1);
    hist[stirring_position(log, Channel::minus, 0, 1.0)] += 1;
  }
  for (Site u = 0; u < 5; ++u) {
    const double pu = p(0, u);
    CHECK(std::abs(hist[u] / n - pu) <= 4 * std::sqrt(pu * (1 - pu) / n));
  }
}

TEST_CASE("free two-species realisation") {
  TorusLattice lat(1, 3);
  StirringLog empty{lat, 1.0, 2, {}};
  CHECK(realize_two_species_free(two(3, {-1, 1, 0}), empty, 1.0) == two(3, {-1, 1, 0}));
  CHECK_THROWS_AS(realize_two_species_free(two(3, {-1, 1, 0}), gen_stirring(lat, 1.0, 1, 1), 1.0),
                  std::invalid_argument);
  TorusLattice big(2, 5);
  const auto log = gen_stirring(big, 4.0, 13, 2);
  Rng rng = make_rng(4);
  std::vector<Symbol> v(big.num_sites());
  for (auto& s : v) s = static_cast<Symbol>(static_cast<int>(rng() % 4) - 1);
  const TwoSpeciesConfig init(big, v);
  const auto all = all_sites(big);
  for (double t : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    const auto out = realize_two_species_free(init, log, t);
    for (int a : {-1, 1}) CHECK(count_species(out, all, a) == count_species(init, all, a));
  }
  const auto still = realize_two_species_free(two(3, {0, 0, 0}), gen_stirring(lat, 3.0, 2, 2), 3.0);
  for (Symbol s : still.values()) CHECK(s == 0);
}

TEST_CASE("thinning: hand-replayed annihilation") {
  TorusLattice lat(1, 3);
  StirringLog log{lat, 1.0, 2, {ArrowEvent{0.5, 0, Channel::plus}}};
  CHECK(thin_to_annihilation(sgn(3, {-1, 1, 0}), log, 1.0) == sgn(3, {0, 0, 0}));
  CHECK(thin_to_annihilation(sgn(3, {-1, 1, 0}), log, 0.4) == sgn(3, {-1, 1, 0}));
  // A channel-minus arrow moves the minus particle instead: onto the plus.
  StirringLog minus_log{lat, 1.0, 2, {ArrowEvent{0.5, 0, Channel::minus}}};
  CHECK(thin_to_annihilation(sgn(3, {-1, 1, 0}), minus_log, 1.0) == sgn(3, {0, 0, 0}));
  // A minus arrow on an edge without minus particles changes nothing.
  StirringLog idle{lat, 1.0, 2, {ArrowEvent{0.5, 1, Channel::minus}}};
  CHECK(thin_to_annihilation(sgn(3, {-1, 1, 0}), idle, 1.0) == sgn(3, {-1, 1, 0}));
  // A plus arrow on edge <1,2> moves the plus particle away from the minus.
  StirringLog away{lat, 1.0, 2, {ArrowEvent{0.5, 1, Channel::plus}}};
  CHECK(thin_to_annihilation(sgn(3, {-1, 1, 0}), away, 1.0) == sgn(3, {-1, 0, 1}));
}

TEST_CASE("thinning: plus-only input follows realize_sep on channel plus") {
  TorusLattice lat(1, 8);
  const auto log = gen_stirring(lat, 3.0, 6, 2);
  const auto xi = sgn(8, {1, 0, 1, 1, 0, 0, 1, 0});
  const auto out = thin_to_annihilation(xi, log, 3.0);
  const auto sep_out = realize_sep(species_mask(xi, +1), log, 3.0, Channel::plus);
  for (Site x = 0; x < 8; ++x) CHECK(out[x] == sep_out[x]);
}

TEST_CASE("thinning: inclusion in the free process and monotone mass") {
  TorusLattice lat(1, 40);
  for (Seed seed = 1; seed <= 20; ++seed) {
    const auto xi = ensembles::sample_diff(ensembles::make_diff_law(ensembles::make_bernoulli(0.5)), lat, seed);
    const auto log = gen_stirring(lat, 5.0, seed + 100, 2);
    std::size_t prev = abs_mass(xi);
    long long charge = 0;
    for (Symbol s : xi.values()) charge += s;
    for (double t : {0.5, 1.0, 2.0, 3.0, 5.0}) {
      const auto thin = thin_to_annihilation(xi, log, t);
      const auto free = realize_two_species_free(to_two_species(xi), log, t);
      for (Site x = 0; x < lat.num_sites(); ++x) {
        if (thin[x] == 1) CHECK((free[x] == sym::plus || free[x] == sym::both));
        if (thin[x] == -1) CHECK((free[x] == sym::minus || free[x] == sym::both));
      }
      const std::size_t m = abs_mass(thin);
      CHECK(m <= prev);
      CHECK((prev - m) % 2 == 0);
      prev = m;
      long long c = 0;
      for (Symbol s : thin.values()) c += s;
      CHECK(c == charge);
    }
  }
}

TEST_CASE("local moves follow the generators") {
  const auto ann = local_moves(Process::annihilation, 1, -1);
  REQUIRE(ann.size() == 1);
  CHECK(ann[0].lo == 0);
  CHECK(ann[0].hi == 0);
  CHECK(ann[0].rate == 2);
  CHECK(local_moves(Process::annihilation, 1, 0).size() == 1);
  CHECK(local_moves(Process::annihilation, 1, 1).empty());
  CHECK(local_moves(Process::sep, 1, 1).empty());
  // coupled: doubly discordant edge (eta, zeta) = (1,0) at lo and (0,1) at hi
  const auto cp = local_moves(Process::coupled, coupled_code(1, 0), coupled_code(0, 1));
  CHECK(cp.size() == 2);
  for (const auto& m : cp) CHECK(m.rate == 1);
  const auto fr = local_moves(Process::free, -1, 1);
  // merge in both orientations of the oriented-edge sum
  std::set<std::pair<int, int>> targets;
  for (const auto& m : fr) targets.insert({m.lo, m.hi});
  CHECK(targets.count({2, 0}) == 1);
  CHECK(targets.count({0, 2}) == 1);
}

TEST_CASE("gillespie annihilation: hazard 2 on the shared +/- edge") {
  TorusLattice lat(1, 3);
  EdgeKmc kmc(Process::annihilation, lat, {1, -1, 0}, 1);
  CHECK(kmc.edge_rate(lat.edge_index(0, 0)) == 2);
  CHECK(kmc.edge_rate(lat.edge_index(1, 0)) == 1);
  CHECK(kmc.edge_rate(lat.edge_index(2, 0)) == 1);
  CHECK(kmc.total_rate() == 4);
}

TEST_CASE("gillespie: input checking") {
  TorusLattice lat(1, 4);
  const double obs[] = {0.5};
  CHECK_THROWS_AS(gillespie(Process::sep, AnyState{SignedConfig(lat)}, 1.0, obs, 1), std::invalid_argument);
  const double late[] = {2.0};
  CHECK_THROWS_AS(gillespie(Process::sep, AnyState{OccupancyConfig(lat)}, 1.0, late, 1), std::invalid_argument);
}

TEST_CASE("gillespie coupled with equal marginals stays equal") {
  TorusLattice lat(1, 10);
  const auto eta = ensembles::sample(ensembles::make_bernoulli(0.4), lat, 5);
  const std::vector<double> obs{0.5, 1.0, 4.0, 10.0};
  for (const auto& snap : gillespie_coupled(CoupledConfig{eta, eta}, 10.0, obs, 3))
    CHECK(snap.config.eta == snap.config.zeta);
}

TEST_CASE("gillespie conservation laws") {
  TorusLattice lat(2, 6);
  const auto all = all_sites(lat);
  const std::vector<double> obs{0.5, 1.0, 2.0, 4.0};
  const auto eta = ensembles::sample(ensembles::make_bernoulli(0.3), lat, 1);
  std::size_t n0 = 0;
  for (Symbol s : eta.values()) n0 += s;
  for (const auto& snap : gillespie_sep(eta, 4.0, obs, 2)) {
    std::size_t n = 0;
    for (Symbol s : snap.config.values()) n += s;
    CHECK(n == n0);
  }
  const auto xi = ensembles::sample_diff(ensembles::make_diff_law(ensembles::make_bernoulli(0.5)), lat, 8);
  const auto tw = to_two_species(xi);
  for (const auto& snap : gillespie_free(tw, 4.0, obs, 3))
    for (int a : {-1, 1}) CHECK(count_species(snap.config, all, a) == count_species(tw, all, a));
  const long long q0 = static_cast<long long>(count_species(xi, all, 1)) - static_cast<long long>(count_species(xi, all, -1));
  std::size_t prev = abs_mass(xi);
  for (const auto& snap : gillespie_annihilation(xi, 4.0, obs, 4)) {
    const long long q = static_cast<long long>(count_species(snap.config, all, 1)) -
                        static_cast<long long>(count_species(snap.config, all, -1));
    CHECK(q == q0);
    CHECK(abs_mass(snap.config) <= prev);
    prev = abs_mass(snap.config);
  }
}

TEST_CASE("gillespie SEP from Bernoulli keeps density rho") {
  TorusLattice lat(1, 20);
  const std::size_t n = 10000;
  const double rho = 0.3;
  double sum = 0, sumsq = 0;
  const double obs[] = {1.0};
  for (std::size_t k = 0; k < n; ++k) {
    const auto eta = ensembles::sample(ensembles::make_bernoulli(rho), lat, replica_seed(1, k));
    const auto traj = gillespie_sep(eta, 1.0, obs, replica_seed(2, k));
    double m = 0;
    for (Symbol s : traj.back().config.values()) m += s;
    m /= 20;
    sum += m;
    sumsq += m * m;
  }
  const double mean = sum / n, var = (sumsq - n * mean * mean) / (n - 1);
  CHECK(std::abs(mean - rho) <= 4 * std::sqrt(var / n));
}

TEST_CASE("stirring and gillespie SEP agree on one- and two-site marginals") {
  TorusLattice lat(1, 5);
  const auto init = occ(5, {1, 1, 0, 0, 0});
  const std::size_t n = 100000;
  const double obs[] = {1.0};
  std::array<double, 2> site0{}, pair01{};
  for (std::size_t k = 0; k < n; ++k) {
    for (int e = 0; e < 2; ++e) {
      const auto traj = run_process(Process::sep, e == 0 ? Engine::stirring : Engine::gillespie, init, 1.0, obs,
                                    replica_seed(40 + e, k));
      const auto& c = std::get<OccupancyConfig>(traj.back().config);
      site0[e] += c[0];
      pair01[e] += c[0] * c[1];
    }
  }
  auto close = [&](double a, double b) {
    const double pa = a / n, pb = b / n;
    return std::abs(pa - pb) <= 4 * std::sqrt((pa * (1 - pa) + pb * (1 - pb)) / n);
  };
  CHECK(close(site0[0], site0[1]));
  CHECK(close(pair01[0], pair01[1]));
}

TEST_CASE("coupled difference has annihilation one-site marginals (L = 5, Monte Carlo)") {
  TorusLattice lat(1, 5);
  const CoupledConfig init{occ(5, {1, 1, 0, 1, 0}), occ(5, {0, 1, 1, 0, 0})};
  const auto xi0 = difference(init.eta, init.zeta);
  const std::size_t n = 50000;
  const double obs[] = {1.0};
  std::array<std::array<double, 3>, 5> a{}, b{};
  for (std::size_t k = 0; k < n; ++k) {
    const auto c = gillespie_coupled(init, 1.0, obs, replica_seed(61, k)).back().config;
    const auto d = difference(c.eta, c.zeta);
    const auto x = gillespie_annihilation(xi0, 1.0, obs, replica_seed(62, k)).back().config;
    for (Site s = 0; s < 5; ++s) {
      a[s][d[s] + 1] += 1;
      b[s][x[s] + 1] += 1;
    }
  }
  for (Site s = 0; s < 5; ++s)
    for (int v = 0; v < 3; ++v) {
      const double pa = a[s][v] / n, pb = b[s][v] / n;
      CHECK(std::abs(pa - pb) <= 4 * std::sqrt((pa * (1 - pa) + pb * (1 - pb)) / n) + 1e-12);
    }
}

TEST_CASE("run_process: deterministic, matches realize_* on the same stream") {
  TorusLattice lat(1, 7);
  const auto xi = sgn(7, {1, -1, 0, 1, 0, -1, 0});
  const std::vector<double> obs{0.5, 1.5, 3.0};
  const auto a = run_process(Process::annihilation, Engine::stirring, xi, 3.0, obs, 12);
  const auto b = run_process(Process::annihilation, Engine::stirring, xi, 3.0, obs, 12);
  const auto log = gen_stirring(lat, 3.0, 12, 2);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    CHECK(std::get<SignedConfig>(a[i].config) == std::get<SignedConfig>(b[i].config));
    CHECK(std::get<SignedConfig>(a[i].config) == thin_to_annihilation(xi, log, obs[i]));
  }
  const CoupledConfig cc{occ(7, {1, 0, 1, 0, 0, 1, 1}), occ(7, {0, 0, 1, 1, 0, 1, 0})};
  const auto c = run_process(Process::coupled, Engine::stirring, cc, 3.0, obs, 12);
  for (std::size_t i = 0; i < obs.size(); ++i)
    CHECK(std::get<CoupledConfig>(c[i].config) == realize_coupled(cc, log, obs[i]));
  CHECK_THROWS_AS(parse_engine("euler"), std::invalid_argument);
  CHECK(parse_engine("stirring+thin") == Engine::stirring);
}

TEST_CASE("coupled graphical construction never increases discordance") {
  TorusLattice lat(1, 30);
  for (Seed seed = 1; seed <= 10; ++seed) {
    const CoupledConfig cc{ensembles::sample(ensembles::make_bernoulli(0.5), lat, seed),
                           ensembles::sample(ensembles::make_bernoulli(0.5), lat, seed + 50)};
    const auto log = gen_stirring(lat, 6.0, seed, 2);
    std::size_t prev = hamming_distance(cc.eta, cc.zeta);
    for (double t : {1.0, 2.0, 4.0, 6.0}) {
      const auto out = realize_coupled(cc, log, t);
      const std::size_t h = hamming_distance(out.eta, out.zeta);
      CHECK(h <= prev);
      prev = h;
    }
  }
}

TEST_CASE("trajectory file round trip and run-length encoding") {
  const std::vector<Symbol> v{0, 0, 1, 1, 1, -1, 2, 2, 0};
  const auto runs = rle_encode(v);
  CHECK(runs.size() == 5);
  CHECK(rle_decode(runs) == v);
  CHECK(rle_encode(std::vector<Symbol>{}).empty());

  const auto path = (std::filesystem::temp_directory_path() / "sep_traj_test.bin").string();
  {
    TrajectoryWriter w(path, "{\"k\":1}");
    w.write(0, 0.5, v);
    w.write(3, 1.25, std::vector<Symbol>{1, 1, 1});
  }
  const auto f = read_trajectory(path);
  CHECK(f.version == kTrajectoryFormatVersion);
  CHECK(f.header_json == "{\"k\":1}");
  REQUIRE(f.records.size() == 2);
  CHECK(f.records[0].values == v);
  CHECK(f.records[1].replica == 3);
  CHECK(f.records[1].time == 1.25);
  std::filesystem::remove(path);
}
