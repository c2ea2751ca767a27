#include "sep/core/config.hpp"

#include <cstdlib>
#include <numeric>

namespace sep {

std::string_view kind_name(ConfigKind kind) {
  switch (kind) {
    case ConfigKind::occupancy: return "occupancy";
    case ConfigKind::signed_: return "signed";
    case ConfigKind::two_species: return "two_species";
  }
  return "unknown";
}

bool symbol_allowed(ConfigKind kind, Symbol s) {
  switch (kind) {
    case ConfigKind::occupancy: return s == 0 || s == 1;
    case ConfigKind::signed_: return s >= -1 && s <= 1;
    case ConfigKind::two_species: return s >= -1 && s <= 2;
  }
  return false;
}

SignedConfig annihilate_pair(const SignedConfig& xi, Site x, Site y) {
  detail::require_distinct(x, y, xi.size());
  SignedConfig out = xi;
  out.raw()[x] = sym::empty;
  out.raw()[y] = sym::empty;
  return out;
}

TwoSpeciesConfig set_pair(const TwoSpeciesConfig& xi, Site x, Site y, Symbol a, Symbol b) {
  detail::require_distinct(x, y, xi.size());
  TwoSpeciesConfig out = xi;
  out.set(x, a);
  out.set(y, b);
  return out;
}

SignedConfig difference(const OccupancyConfig& eta, const OccupancyConfig& zeta) {
  if (!(eta.lattice() == zeta.lattice())) throw std::invalid_argument("difference of configs on different lattices");
  std::vector<Symbol> v(eta.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<Symbol>(eta[i] - zeta[i]);
  return SignedConfig(eta.lattice(), std::move(v));
}

namespace {
void check_alpha(int alpha) {
  if (alpha != 1 && alpha != -1) throw std::invalid_argument("species must be +1 or -1");
}
}  // namespace

std::size_t count_species(const SignedConfig& xi, std::span<const Site> region, int alpha) {
  check_alpha(alpha);
  std::size_t n = 0;
  for (Site x : region) n += (xi[x] == alpha);
  return n;
}

std::size_t count_species(const TwoSpeciesConfig& xi, std::span<const Site> region, int alpha) {
  check_alpha(alpha);
  std::size_t n = 0;
  for (Site x : region) n += (xi[x] == alpha || xi[x] == sym::both);
  return n;
}

std::size_t hamming_distance(const OccupancyConfig& eta, const OccupancyConfig& zeta) {
  if (!(eta.lattice() == zeta.lattice())) throw std::invalid_argument("hamming distance across lattices");
  std::size_t n = 0;
  for (std::size_t i = 0; i < eta.size(); ++i) n += (eta[i] != zeta[i]);
  return n;
}

OccupancyConfig species_mask(const TwoSpeciesConfig& xi, int alpha) {
  check_alpha(alpha);
  std::vector<Symbol> v(xi.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (xi[i] == alpha || xi[i] == sym::both);
  return OccupancyConfig(xi.lattice(), std::move(v));
}

OccupancyConfig species_mask(const SignedConfig& xi, int alpha) {
  check_alpha(alpha);
  std::vector<Symbol> v(xi.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (xi[i] == alpha);
  return OccupancyConfig(xi.lattice(), std::move(v));
}

SignedConfig to_signed(const TwoSpeciesConfig& xi) {
  std::vector<Symbol> v(xi.values().begin(), xi.values().end());
  return SignedConfig(xi.lattice(), std::move(v));
}

TwoSpeciesConfig to_two_species(const SignedConfig& xi) {
  std::vector<Symbol> v(xi.values().begin(), xi.values().end());
  return TwoSpeciesConfig(xi.lattice(), std::move(v));
}

std::vector<Site> all_sites(const TorusLattice& lattice) {
  std::vector<Site> s(lattice.num_sites());
  std::iota(s.begin(), s.end(), Site{0});
  return s;
}

}  // namespace sep
