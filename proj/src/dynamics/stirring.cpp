#include "sep/dynamics/stirring.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace sep::dynamics {

namespace {

void check_time(const StirringLog& log, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("observation time must be >= 0");
  if (t > log.horizon) throw std::out_of_range("observation time beyond stirring horizon");
}

void check_lattice(const TorusLattice& a, const TorusLattice& b) {
  if (!(a == b)) throw std::invalid_argument("configuration and stirring log live on different lattices");
}

}  // namespace

StirringStream::StirringStream(const TorusLattice& lattice, int channels, Seed seed)
    : lattice_(lattice), channels_(channels), rng_(make_rng(seed)) {
  if (channels != 1 && channels != 2) throw std::invalid_argument("stirring needs 1 or 2 channels");
  marks_ = lattice.num_edges() * static_cast<std::uint64_t>(channels);
  rate_ = static_cast<double>(marks_);
}

ArrowEvent StirringStream::next() {
  // 1 - u lies in (0, 1], so the increment is finite and >= 0.
  const double dt = -std::log1p(-uniform01(rng_)) / rate_;
  double t = time_ + dt;
  if (!(t > time_)) t = std::nextafter(time_, std::numeric_limits<double>::infinity());
  time_ = t;
  std::uniform_int_distribution<std::uint64_t> pick(0, marks_ - 1);
  const std::uint64_t mark = pick(rng_);
  return ArrowEvent{t, static_cast<std::uint32_t>(mark / channels_), static_cast<Channel>(mark % channels_)};
}

StirringLog gen_stirring(const TorusLattice& lattice, double horizon, Seed seed, int channels) {
  if (!(horizon > 0.0)) throw std::invalid_argument("stirring horizon must be > 0");
  StirringStream stream(lattice, channels, seed);
  StirringLog log{lattice, horizon, channels, {}};
  log.events.reserve(static_cast<std::size_t>(1.1 * horizon * static_cast<double>(lattice.num_edges() * channels)) + 16);
  for (ArrowEvent ev = stream.next(); ev.time <= horizon; ev = stream.next()) {
    if (!log.events.empty() && !(ev.time > log.events.back().time))
      throw std::logic_error("simultaneous stirring arrows");
    log.events.push_back(ev);
  }
  return log;
}

std::vector<Site> stirring_permutation(const StirringLog& log, Channel channel, double t) {
  check_time(log, t);
  const std::size_t n = log.lattice.num_sites();
  std::vector<Site> occupant(n);  // marker currently sitting at each site
  for (std::size_t x = 0; x < n; ++x) occupant[x] = static_cast<Site>(x);
  for (const auto& ev : log.events) {
    if (ev.time > t) break;
    if (ev.channel != channel) continue;
    const Edge e = log.lattice.edge(ev.edge);
    std::swap(occupant[e.lo], occupant[e.hi]);
  }
  std::vector<Site> position(n);
  for (std::size_t x = 0; x < n; ++x) position[occupant[x]] = static_cast<Site>(x);
  return position;
}

Site stirring_position(const StirringLog& log, Channel channel, Site y, double t) {
  check_time(log, t);
  if (y >= log.lattice.num_sites()) throw std::out_of_range("site outside lattice");
  Site at = y;
  for (const auto& ev : log.events) {
    if (ev.time > t) break;
    if (ev.channel != channel) continue;
    const Edge e = log.lattice.edge(ev.edge);
    if (e.lo == at) at = e.hi;
    else if (e.hi == at) at = e.lo;
  }
  return at;
}

// ---------------------------------------------------------------------------

SepReplay::SepReplay(const OccupancyConfig& initial, Channel channel)
    : lattice_(initial.lattice()), channel_(channel), occ_(initial.values().begin(), initial.values().end()) {}

void SepReplay::apply(const ArrowEvent& ev) {
  if (ev.channel != channel_) return;
  const Edge e = lattice_.edge(ev.edge);
  std::swap(occ_[e.lo], occ_[e.hi]);
}

FreeReplay::FreeReplay(const TwoSpeciesConfig& initial)
    : lattice_(initial.lattice()), minus_(initial.size()), plus_(initial.size()) {
  for (std::size_t x = 0; x < initial.size(); ++x) {
    const Symbol s = initial[static_cast<Site>(x)];
    minus_[x] = (s == sym::minus || s == sym::both);
    plus_[x] = (s == sym::plus || s == sym::both);
  }
}

void FreeReplay::apply(const ArrowEvent& ev) {
  const Edge e = lattice_.edge(ev.edge);
  auto& mask = ev.channel == Channel::minus ? minus_ : plus_;
  std::swap(mask[e.lo], mask[e.hi]);
}

TwoSpeciesConfig FreeReplay::config() const {
  std::vector<Symbol> v(minus_.size());
  for (std::size_t x = 0; x < v.size(); ++x) {
    if (minus_[x] && plus_[x]) v[x] = sym::both;
    else if (minus_[x]) v[x] = sym::minus;
    else if (plus_[x]) v[x] = sym::plus;
    else v[x] = sym::empty;
  }
  return TwoSpeciesConfig(lattice_, std::move(v));
}

ThinningReplay::ThinningReplay(const SignedConfig& initial)
    : lattice_(initial.lattice()), minus_(initial.size()), plus_(initial.size()) {
  for (std::size_t x = 0; x < initial.size(); ++x) {
    const Symbol s = initial[static_cast<Site>(x)];
    minus_[x] = (s == sym::minus);
    plus_[x] = (s == sym::plus);
    minus_count_ += minus_[x];
    plus_count_ += plus_[x];
  }
}

void ThinningReplay::resolve(Site x) {
  if (minus_[x] && plus_[x]) {
    minus_[x] = 0;
    plus_[x] = 0;
    --minus_count_;
    --plus_count_;
    ++annihilations_;
  }
}

void ThinningReplay::apply(const ArrowEvent& ev) {
  const Edge e = lattice_.edge(ev.edge);
  auto& mask = ev.channel == Channel::minus ? minus_ : plus_;
  if (mask[e.lo] == mask[e.hi]) return;
  std::swap(mask[e.lo], mask[e.hi]);
  // Exclusion within each species: at most one of the two endpoints can now
  // hold an opposite pair.
  resolve(e.lo);
  resolve(e.hi);
}

SignedConfig ThinningReplay::config() const {
  std::vector<Symbol> v(minus_.size());
  for (std::size_t x = 0; x < v.size(); ++x) v[x] = static_cast<Symbol>(plus_[x] - minus_[x]);
  return SignedConfig(lattice_, std::move(v));
}

CoupledReplay::CoupledReplay(const CoupledConfig& initial)
    : lattice_(initial.eta.lattice()),
      eta_(initial.eta.values().begin(), initial.eta.values().end()),
      zeta_(initial.zeta.values().begin(), initial.zeta.values().end()) {
  check_lattice(initial.eta.lattice(), initial.zeta.lattice());
}

void CoupledReplay::apply(const ArrowEvent& ev) {
  const Edge e = lattice_.edge(ev.edge);
  const bool split = eta_[e.lo] != zeta_[e.lo] && eta_[e.hi] != zeta_[e.hi];
  if (ev.channel == Channel::minus) {
    std::swap(eta_[e.lo], eta_[e.hi]);
    if (!split) std::swap(zeta_[e.lo], zeta_[e.hi]);
  } else if (split) {
    std::swap(zeta_[e.lo], zeta_[e.hi]);
  }
}

CoupledConfig CoupledReplay::config() const {
  return CoupledConfig{OccupancyConfig(lattice_, eta_), OccupancyConfig(lattice_, zeta_)};
}

// ---------------------------------------------------------------------------

OccupancyConfig realize_sep(const OccupancyConfig& initial, const StirringLog& log, double t, Channel channel) {
  check_lattice(initial.lattice(), log.lattice);
  check_time(log, t);
  if (static_cast<int>(channel) >= log.channels) throw std::invalid_argument("channel not present in stirring log");
  SepReplay r(initial, channel);
  replay_until(r, log, 0, t);
  return r.config();
}

TwoSpeciesConfig realize_two_species_free(const TwoSpeciesConfig& initial, const StirringLog& log, double t) {
  check_lattice(initial.lattice(), log.lattice);
  if (log.channels != 2) throw std::invalid_argument("two-species dynamics needs a two-channel stirring log");
  check_time(log, t);
  FreeReplay r(initial);
  replay_until(r, log, 0, t);
  return r.config();
}

SignedConfig thin_to_annihilation(const SignedConfig& initial, const StirringLog& log, double t) {
  check_lattice(initial.lattice(), log.lattice);
  if (log.channels != 2) throw std::invalid_argument("thinning needs a two-channel stirring log");
  check_time(log, t);
  ThinningReplay r(initial);
  replay_until(r, log, 0, t);
  return r.config();
}

CoupledConfig realize_coupled(const CoupledConfig& initial, const StirringLog& log, double t) {
  check_lattice(initial.eta.lattice(), log.lattice);
  if (log.channels != 2) throw std::invalid_argument("coupled construction needs a two-channel stirring log");
  check_time(log, t);
  CoupledReplay r(initial);
  replay_until(r, log, 0, t);
  return r.config();
}

}  // namespace sep::dynamics
