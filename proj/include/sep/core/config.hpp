#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <variant>
#include <vector>

#include "sep/core/lattice.hpp"

namespace sep {

using Symbol = std::int8_t;

// Site symbols. Occupancy configs use {0,1}, signed configs {-1,0,+1}, and
// two-species configs add `both` for a site holding one particle of each kind.
namespace sym {
inline constexpr Symbol minus = -1;
inline constexpr Symbol empty = 0;
inline constexpr Symbol plus = 1;
inline constexpr Symbol both = 2;
}  // namespace sym

enum class ConfigKind { occupancy, signed_, two_species };

std::string_view kind_name(ConfigKind kind);
bool symbol_allowed(ConfigKind kind, Symbol s);

/// Flat per-site array of symbols over a torus, tagged with its alphabet.
template <ConfigKind K>
class Config {
 public:
  static constexpr ConfigKind kind = K;

  explicit Config(const TorusLattice& lattice) : lattice_(lattice), values_(lattice.num_sites(), sym::empty) {}

  Config(const TorusLattice& lattice, std::vector<Symbol> values) : lattice_(lattice), values_(std::move(values)) {
    if (values_.size() != lattice_.num_sites()) throw std::invalid_argument("config size does not match lattice");
    for (Symbol s : values_)
      if (!symbol_allowed(K, s)) throw std::invalid_argument("symbol outside alphabet");
  }

  const TorusLattice& lattice() const { return lattice_; }
  std::size_t size() const { return values_.size(); }
  Symbol operator[](Site x) const { return values_[x]; }
  std::span<const Symbol> values() const { return values_; }

  void set(Site x, Symbol s) {
    if (!symbol_allowed(K, s)) throw std::invalid_argument("symbol outside alphabet");
    values_.at(x) = s;
  }

  /// Unchecked write access for hot loops that only permute existing symbols.
  std::span<Symbol> raw() { return values_; }

  friend bool operator==(const Config&, const Config&) = default;

 private:
  TorusLattice lattice_;
  std::vector<Symbol> values_;
};

using OccupancyConfig = Config<ConfigKind::occupancy>;
using SignedConfig = Config<ConfigKind::signed_>;
using TwoSpeciesConfig = Config<ConfigKind::two_species>;

/// Pair (eta, zeta) of occupancy configs on the same lattice.
struct CoupledConfig {
  OccupancyConfig eta;
  OccupancyConfig zeta;
  friend bool operator==(const CoupledConfig&, const CoupledConfig&) = default;
};

namespace detail {
inline void require_distinct(Site x, Site y, std::size_t n) {
  if (x == y) throw std::invalid_argument("pair operation needs two distinct sites");
  if (x >= n || y >= n) throw std::out_of_range("site outside lattice");
}
}  // namespace detail

/// eta^{x,y}: exchange the values at x and y.
template <ConfigKind K>
Config<K> swap(const Config<K>& c, Site x, Site y) {
  detail::require_distinct(x, y, c.size());
  Config<K> out = c;
  auto v = out.raw();
  std::swap(v[x], v[y]);
  return out;
}

/// xi^{x,y;dagger}: zero out both sites.
SignedConfig annihilate_pair(const SignedConfig& xi, Site x, Site y);

/// xi^{x,y;a,b}: write a at x and b at y.
TwoSpeciesConfig set_pair(const TwoSpeciesConfig& xi, Site x, Site y, Symbol a, Symbol b);

/// Site-wise eta - zeta.
SignedConfig difference(const OccupancyConfig& eta, const OccupancyConfig& zeta);

/// Number of sites in `region` carrying species `alpha` (+1 or -1). For
/// two-species configs the doubly occupied symbol counts toward both species.
std::size_t count_species(const SignedConfig& xi, std::span<const Site> region, int alpha);
std::size_t count_species(const TwoSpeciesConfig& xi, std::span<const Site> region, int alpha);

/// Sum over sites of |eta_x - zeta_x|.
std::size_t hamming_distance(const OccupancyConfig& eta, const OccupancyConfig& zeta);

/// Occupancy mask of one species in a two-species config.
OccupancyConfig species_mask(const TwoSpeciesConfig& xi, int alpha);
OccupancyConfig species_mask(const SignedConfig& xi, int alpha);

SignedConfig to_signed(const TwoSpeciesConfig& xi);  // throws if any site holds `both`
TwoSpeciesConfig to_two_species(const SignedConfig& xi);

std::vector<Site> all_sites(const TorusLattice& lattice);

}  // namespace sep
