#include "sep/dynamics/gillespie.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sep::dynamics {

std::string_view process_name(Process p) {
  switch (p) {
    case Process::sep: return "sep";
    case Process::coupled: return "coupled";
    case Process::annihilation: return "annihilation";
    case Process::free: return "free";
  }
  return "unknown";
}

Process parse_process(std::string_view name) {
  if (name == "sep") return Process::sep;
  if (name == "coupled") return Process::coupled;
  if (name == "annihilation") return Process::annihilation;
  if (name == "free") return Process::free;
  throw std::invalid_argument("unknown process '" + std::string(name) + "'");
}

namespace {

int min_code(Process p) { return (p == Process::annihilation || p == Process::free) ? -1 : 0; }
int max_code(Process p) {
  switch (p) {
    case Process::sep: return 1;
    case Process::annihilation: return 1;
    case Process::free: return 2;
    case Process::coupled: return 3;
  }
  return 0;
}

bool is_particle(Symbol s) { return s == sym::minus || s == sym::plus; }
bool is_hole_or_both(Symbol s) { return s == sym::empty || s == sym::both; }

}  // namespace

std::vector<LocalMove> local_moves(Process p, Symbol lo, Symbol hi, const KmcOptions& opts) {
  if (lo < min_code(p) || lo > max_code(p) || hi < min_code(p) || hi > max_code(p))
    throw std::invalid_argument("site code outside the process alphabet");
  std::vector<LocalMove> out;
  switch (p) {
    case Process::sep:
      if (lo != hi) out.push_back({hi, lo, 1});
      break;
    case Process::annihilation:
      if (lo * hi == -1) {
        if (opts.annihilation_rate > 0) out.push_back({0, 0, opts.annihilation_rate});
      } else if (lo != hi) {
        out.push_back({hi, lo, 1});
      }
      break;
    case Process::coupled: {
      const Symbol eta_lo = lo & 1, eta_hi = hi & 1, zeta_lo = lo >> 1, zeta_hi = hi >> 1;
      if (eta_lo != zeta_lo && eta_hi != zeta_hi) {
        if (eta_lo != eta_hi) out.push_back({coupled_code(eta_hi, zeta_lo), coupled_code(eta_lo, zeta_hi), 1});
        if (zeta_lo != zeta_hi) out.push_back({coupled_code(eta_lo, zeta_hi), coupled_code(eta_hi, zeta_lo), 1});
      } else if (lo != hi) {
        out.push_back({hi, lo, 1});
      }
      break;
    }
    case Process::free:
      // Both orientations of the edge contribute; the generator is a sum over
      // oriented edges.
      if ((is_particle(lo) && is_hole_or_both(hi)) || (is_particle(hi) && is_hole_or_both(lo))) {
        out.push_back({hi, lo, 1});
      } else if (lo * hi == -1) {
        out.push_back({sym::both, sym::empty, 1});
        out.push_back({sym::empty, sym::both, 1});
      } else if ((lo == sym::empty && hi == sym::both) || (lo == sym::both && hi == sym::empty)) {
        out.push_back({sym::plus, sym::minus, 1});
        out.push_back({sym::minus, sym::plus, 1});
      }
      break;
  }
  return out;
}

EdgeKmc::EdgeKmc(Process p, const TorusLattice& lattice, std::vector<Symbol> codes, Seed seed, const KmcOptions& opts)
    : process_(p), lattice_(lattice), codes_(std::move(codes)), rng_(make_rng(seed)), min_code_(min_code(p)) {
  if (codes_.size() != lattice_.num_sites()) throw std::invalid_argument("state size does not match lattice");
  for (Symbol s : codes_)
    if (s < min_code_ || s > max_code(p)) throw std::invalid_argument("site code outside the process alphabet");

  table_.resize(16);
  for (int a = min_code_; a <= max_code(p); ++a)
    for (int b = min_code_; b <= max_code(p); ++b) {
      Cell c;
      for (const auto& m : local_moves(p, static_cast<Symbol>(a), static_cast<Symbol>(b), opts)) {
        c.moves[c.count++] = m;
        c.total += m.rate;
      }
      table_[(a - min_code_) * 4 + (b - min_code_)] = c;
    }

  const std::size_t E = lattice_.num_edges();
  hi_.resize(E);
  for (std::size_t e = 0; e < E; ++e) hi_[e] = lattice_.edge(e).hi;
  while (leaves_ < E) leaves_ <<= 1;
  tree_.assign(2 * leaves_, 0);
  for (std::size_t e = 0; e < E; ++e) tree_[leaves_ + e] = cell(codes_[e / lattice_.dimension()], codes_[hi_[e]]).total;
  for (std::size_t i = leaves_ - 1; i >= 1; --i) tree_[i] = tree_[2 * i] + tree_[2 * i + 1];
}

void EdgeKmc::set_leaf(std::size_t e, std::uint32_t rate) {
  std::size_t i = leaves_ + e;
  if (tree_[i] == rate) return;
  tree_[i] = rate;
  for (i >>= 1; i >= 1; i >>= 1) tree_[i] = tree_[2 * i] + tree_[2 * i + 1];
}

void EdgeKmc::refresh_edge(std::size_t e) {
  const Site lo = static_cast<Site>(e / lattice_.dimension());
  set_leaf(e, cell(codes_[lo], codes_[hi_[e]]).total);
}

void EdgeKmc::fire(double at) {
  now_ = at;
  std::uniform_int_distribution<std::uint64_t> pick(0, total_rate() - 1);
  std::uint64_t r = pick(rng_);
  // descend while keeping the residual offset inside the chosen leaf
  std::size_t i = 1;
  while (i < leaves_) {
    if (r < tree_[2 * i]) {
      i = 2 * i;
    } else {
      r -= tree_[2 * i];
      i = 2 * i + 1;
    }
  }
  const std::size_t e = i - leaves_;
  const int d = lattice_.dimension();
  const Site lo = static_cast<Site>(e / d);
  const Site hi = hi_[e];
  const Cell& c = cell(codes_[lo], codes_[hi]);
  const LocalMove& m = (r < c.moves[0].rate) ? c.moves[0] : c.moves[1];
  codes_[lo] = m.lo;
  codes_[hi] = m.hi;
  ++events_;
  for (Site x : {lo, hi}) {
    for (int a = 0; a < d; ++a) {
      refresh_edge(lattice_.edge_index(x, a));
      refresh_edge(lattice_.edge_index(lattice_.neighbor(x, a, -1), a));
    }
  }
}

std::size_t EdgeKmc::advance_to(double t) {
  if (t < now_) throw std::invalid_argument("cannot advance simulation backwards in time");
  std::size_t fired = 0;
  while (true) {
    const std::uint64_t total = total_rate();
    if (total == 0) {
      pending_ = -1.0;
      break;
    }
    if (pending_ < 0.0) {
      const double dt = -std::log1p(-uniform01(rng_)) / static_cast<double>(total);
      pending_ = now_ + dt;
      if (!(pending_ > now_)) pending_ = std::nextafter(now_, std::numeric_limits<double>::infinity());
    }
    if (pending_ > t) break;
    fire(pending_);
    pending_ = -1.0;
    ++fired;
  }
  now_ = t;
  return fired;
}

// ---------------------------------------------------------------------------

std::vector<Symbol> encode_state(const AnyState& s) {
  if (const auto* c = std::get_if<CoupledConfig>(&s)) {
    if (!(c->eta.lattice() == c->zeta.lattice())) throw std::invalid_argument("coupled pair on different lattices");
    std::vector<Symbol> v(c->eta.size());
    for (std::size_t x = 0; x < v.size(); ++x) v[x] = coupled_code(c->eta[static_cast<Site>(x)], c->zeta[static_cast<Site>(x)]);
    return v;
  }
  return std::visit(
      [](const auto& c) -> std::vector<Symbol> {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, CoupledConfig>) {
          return {};
        } else {
          return {c.values().begin(), c.values().end()};
        }
      },
      s);
}

AnyState decode_state(Process p, const TorusLattice& lattice, std::span<const Symbol> codes) {
  std::vector<Symbol> v(codes.begin(), codes.end());
  switch (p) {
    case Process::sep: return OccupancyConfig(lattice, std::move(v));
    case Process::annihilation: return SignedConfig(lattice, std::move(v));
    case Process::free: return TwoSpeciesConfig(lattice, std::move(v));
    case Process::coupled: {
      std::vector<Symbol> eta(v.size()), zeta(v.size());
      for (std::size_t x = 0; x < v.size(); ++x) {
        eta[x] = v[x] & 1;
        zeta[x] = v[x] >> 1;
      }
      return CoupledConfig{OccupancyConfig(lattice, std::move(eta)), OccupancyConfig(lattice, std::move(zeta))};
    }
  }
  throw std::invalid_argument("unknown process");
}

namespace {

const TorusLattice& lattice_of(const AnyState& s) {
  return std::visit(
      [](const auto& c) -> const TorusLattice& {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, CoupledConfig>) return c.eta.lattice();
        else return c.lattice();
      },
      s);
}

bool matches(Process p, const AnyState& s) {
  switch (p) {
    case Process::sep: return std::holds_alternative<OccupancyConfig>(s);
    case Process::coupled: return std::holds_alternative<CoupledConfig>(s);
    case Process::annihilation: return std::holds_alternative<SignedConfig>(s);
    case Process::free: return std::holds_alternative<TwoSpeciesConfig>(s);
  }
  return false;
}

void check_observations(double horizon, std::span<const double> obs) {
  if (!(horizon >= 0.0)) throw std::invalid_argument("horizon must be >= 0");
  double prev = 0.0;
  for (double t : obs) {
    if (!(t >= prev)) throw std::invalid_argument("observation times must be nondecreasing and >= 0");
    if (t > horizon) throw std::invalid_argument("observation time beyond horizon");
    prev = t;
  }
}

}  // namespace

Trajectory<AnyState> gillespie(Process p, const AnyState& init, double horizon, std::span<const double> obs, Seed seed,
                               const KmcOptions& opts) {
  if (!matches(p, init))
    throw std::invalid_argument("initial state does not match process '" + std::string(process_name(p)) + "'");
  check_observations(horizon, obs);
  const TorusLattice& lattice = lattice_of(init);
  EdgeKmc kmc(p, lattice, encode_state(init), seed, opts);
  Trajectory<AnyState> out;
  out.reserve(obs.size());
  for (double t : obs) {
    kmc.advance_to(t);
    out.push_back({t, decode_state(p, lattice, kmc.codes())});
  }
  return out;
}

namespace {
template <class C>
Trajectory<C> typed(Process p, const C& init, double horizon, std::span<const double> obs, Seed seed,
                    const KmcOptions& opts) {
  auto any = gillespie(p, AnyState{init}, horizon, obs, seed, opts);
  Trajectory<C> out;
  out.reserve(any.size());
  for (auto& s : any) out.push_back({s.time, std::get<C>(std::move(s.config))});
  return out;
}
}  // namespace

Trajectory<OccupancyConfig> gillespie_sep(const OccupancyConfig& init, double horizon, std::span<const double> obs,
                                          Seed seed) {
  return typed(Process::sep, init, horizon, obs, seed, {});
}

Trajectory<CoupledConfig> gillespie_coupled(const CoupledConfig& init, double horizon, std::span<const double> obs,
                                            Seed seed) {
  return typed(Process::coupled, init, horizon, obs, seed, {});
}

Trajectory<SignedConfig> gillespie_annihilation(const SignedConfig& init, double horizon,
                                                std::span<const double> obs, Seed seed, const KmcOptions& opts) {
  return typed(Process::annihilation, init, horizon, obs, seed, opts);
}

Trajectory<TwoSpeciesConfig> gillespie_free(const TwoSpeciesConfig& init, double horizon,
                                            std::span<const double> obs, Seed seed) {
  return typed(Process::free, init, horizon, obs, seed, {});
}

}  // namespace sep::dynamics
