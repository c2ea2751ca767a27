#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "sep/core/config.hpp"
#include "sep/core/lattice.hpp"
#include "sep/core/rng.hpp"

namespace sep::dynamics {

enum class Process { sep, coupled, annihilation, free };

std::string_view process_name(Process p);
Process parse_process(std::string_view name);

/// Per-site code used by the simulators. SEP: occupation; annihilation:
/// signed value; free: two-species symbol; coupled: eta + 2 zeta.
inline Symbol coupled_code(Symbol eta, Symbol zeta) { return static_cast<Symbol>(eta + 2 * zeta); }

/// One effective transition of an unordered edge: the endpoint codes after
/// the jump and its (integer) rate.
struct LocalMove {
  Symbol lo;
  Symbol hi;
  std::uint32_t rate;
};

struct KmcOptions {
  std::uint32_t annihilation_rate = 2;  // hazard of xi^{x,y;dagger} on a +/- edge
};

/// Effective transitions of edge (lo, hi) given the codes at its endpoints.
/// Transitions that leave the state unchanged are omitted.
std::vector<LocalMove> local_moves(Process p, Symbol lo, Symbol hi, const KmcOptions& opts = {});

/// Direct-method stochastic simulation over edges. Edge hazards live in a
/// binary sum tree of integer rates; each event costs O(d log #edges).
class EdgeKmc {
 public:
  EdgeKmc(Process p, const TorusLattice& lattice, std::vector<Symbol> codes, Seed seed, const KmcOptions& opts = {});

  /// Applies every event up to and including time t. Returns events applied.
  std::size_t advance_to(double t);

  double time() const { return now_; }
  std::uint64_t total_rate() const { return tree_.empty() ? 0 : tree_[1]; }
  std::uint32_t edge_rate(std::size_t e) const { return tree_[leaves_ + e]; }
  std::span<const Symbol> codes() const { return codes_; }
  const TorusLattice& lattice() const { return lattice_; }
  std::uint64_t events() const { return events_; }

 private:
  struct Cell {
    LocalMove moves[2];
    std::uint8_t count = 0;
    std::uint32_t total = 0;
  };

  const Cell& cell(Symbol a, Symbol b) const { return table_[(a - min_code_) * 4 + (b - min_code_)]; }
  void refresh_edge(std::size_t e);
  void set_leaf(std::size_t e, std::uint32_t rate);
  void fire(double at);

  Process process_;
  TorusLattice lattice_;
  std::vector<Symbol> codes_;
  std::vector<Site> hi_;  // forward neighbour per edge
  Rng rng_;
  int min_code_;
  std::vector<Cell> table_;
  std::size_t leaves_ = 1;
  std::vector<std::uint64_t> tree_;
  std::vector<std::size_t> scratch_;
  double now_ = 0.0;
  double pending_ = -1.0;  // next event time, drawn lazily
  std::uint64_t events_ = 0;
};

template <class C>
struct Snapshot {
  double time;
  C config;
};

template <class C>
using Trajectory = std::vector<Snapshot<C>>;

using AnyState = std::variant<OccupancyConfig, CoupledConfig, SignedConfig, TwoSpeciesConfig>;

Trajectory<OccupancyConfig> gillespie_sep(const OccupancyConfig& init, double horizon, std::span<const double> obs,
                                          Seed seed);
Trajectory<CoupledConfig> gillespie_coupled(const CoupledConfig& init, double horizon, std::span<const double> obs,
                                            Seed seed);
Trajectory<SignedConfig> gillespie_annihilation(const SignedConfig& init, double horizon,
                                                std::span<const double> obs, Seed seed, const KmcOptions& opts = {});
Trajectory<TwoSpeciesConfig> gillespie_free(const TwoSpeciesConfig& init, double horizon,
                                            std::span<const double> obs, Seed seed);

/// Dispatch on a runtime process tag; throws std::invalid_argument when the
/// state alternative does not match the process.
Trajectory<AnyState> gillespie(Process p, const AnyState& init, double horizon, std::span<const double> obs,
                               Seed seed, const KmcOptions& opts = {});

std::vector<Symbol> encode_state(const AnyState& s);
AnyState decode_state(Process p, const TorusLattice& lattice, std::span<const Symbol> codes);

}  // namespace sep::dynamics
