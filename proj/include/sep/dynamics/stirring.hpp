#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "sep/core/config.hpp"
#include "sep/core/lattice.hpp"
#include "sep/core/rng.hpp"

namespace sep::dynamics {

/// The two independent stirring copies. Single-channel logs use `minus` only.
enum class Channel : std::uint8_t { minus = 0, plus = 1 };

struct ArrowEvent {
  double time;
  std::uint32_t edge;
  Channel channel;
};

/// Lazily generated stirring arrows: every (edge, channel) carries an
/// independent rate-1 Poisson clock, realised as one Poisson stream of rate
/// channels * #edges with a uniformly chosen (edge, channel) mark per event.
///
/// Event times are strictly increasing. When an exponential increment is
/// too small to move the running time in double precision the event is
/// placed at the next representable time; event order is the generation
/// order in every case.
class StirringStream {
 public:
  StirringStream(const TorusLattice& lattice, int channels, Seed seed);

  ArrowEvent next();
  int channels() const { return channels_; }
  const TorusLattice& lattice() const { return lattice_; }

 private:
  TorusLattice lattice_;
  int channels_;
  double rate_;
  std::uint64_t marks_;
  double time_ = 0.0;
  Rng rng_;
};

/// Time-ordered arrows in (0, horizon].
struct StirringLog {
  TorusLattice lattice;
  double horizon;
  int channels;
  std::vector<ArrowEvent> events;
};

StirringLog gen_stirring(const TorusLattice& lattice, double horizon, Seed seed, int channels);

/// W_y(t): where the marker started at y sits at time t, following the arrows of `channel`.
Site stirring_position(const StirringLog& log, Channel channel, Site y, double t);

/// Full map y -> W_y(t); always a permutation of the sites.
std::vector<Site> stirring_permutation(const StirringLog& log, Channel channel, double t);

OccupancyConfig realize_sep(const OccupancyConfig& initial, const StirringLog& log, double t,
                            Channel channel = Channel::minus);

/// Two-species dynamics without annihilation: the -1 species (initial sites
/// with -1 or both) is transported by channel minus, the +1 species by channel
/// plus; a site carrying both becomes `both`.
TwoSpeciesConfig realize_two_species_free(const TwoSpeciesConfig& initial, const StirringLog& log, double t);

/// Thinning of the free dynamics: opposite particles are removed in pairs as
/// soon as an arrow brings them onto the same site.
SignedConfig thin_to_annihilation(const SignedConfig& initial, const StirringLog& log, double t);

/// Graphical construction of the basic coupling of two exclusion processes:
/// a channel-minus arrow swaps eta alone on doubly discordant edges and swaps
/// (eta, zeta) jointly elsewhere; a channel-plus arrow swaps zeta alone on
/// doubly discordant edges and is ignored elsewhere.
CoupledConfig realize_coupled(const CoupledConfig& initial, const StirringLog& log, double t);

// Incremental replays of arrow events, shared by the realize_* functions and
// the streaming estimators.

class SepReplay {
 public:
  SepReplay(const OccupancyConfig& initial, Channel channel);
  void apply(const ArrowEvent& ev);
  OccupancyConfig config() const { return OccupancyConfig(lattice_, occ_); }
  std::span<const Symbol> occupation() const { return occ_; }

 private:
  TorusLattice lattice_;
  Channel channel_;
  std::vector<Symbol> occ_;
};

class FreeReplay {
 public:
  explicit FreeReplay(const TwoSpeciesConfig& initial);
  void apply(const ArrowEvent& ev);
  TwoSpeciesConfig config() const;
  std::span<const std::uint8_t> minus_mask() const { return minus_; }
  std::span<const std::uint8_t> plus_mask() const { return plus_; }

 private:
  TorusLattice lattice_;
  std::vector<std::uint8_t> minus_;
  std::vector<std::uint8_t> plus_;
};

class ThinningReplay {
 public:
  explicit ThinningReplay(const SignedConfig& initial);
  void apply(const ArrowEvent& ev);
  SignedConfig config() const;
  std::size_t annihilations() const { return annihilations_; }
  std::size_t alive(int alpha) const { return alpha > 0 ? plus_count_ : minus_count_; }
  /// Sum over sites of |xi_x|.
  std::size_t occupied() const { return plus_count_ + minus_count_; }

 private:
  void resolve(Site x);

  TorusLattice lattice_;
  std::vector<std::uint8_t> minus_;
  std::vector<std::uint8_t> plus_;
  std::size_t annihilations_ = 0;
  std::size_t plus_count_ = 0;
  std::size_t minus_count_ = 0;
};

class CoupledReplay {
 public:
  explicit CoupledReplay(const CoupledConfig& initial);
  void apply(const ArrowEvent& ev);
  CoupledConfig config() const;

 private:
  TorusLattice lattice_;
  std::vector<Symbol> eta_;
  std::vector<Symbol> zeta_;
};

/// Applies every event of `log` with time <= t, starting at `cursor`;
/// returns the new cursor.
template <class Replay>
std::size_t replay_until(Replay& replay, const StirringLog& log, std::size_t cursor, double t) {
  while (cursor < log.events.size() && log.events[cursor].time <= t) replay.apply(log.events[cursor++]);
  return cursor;
}

}  // namespace sep::dynamics
