#include "sep/core/lattice.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sep {

TorusLattice::TorusLattice(int dimension, int side) : d_(dimension), L_(side), n_(1) {
  if (dimension < 1) throw std::invalid_argument("lattice dimension must be >= 1");
  if (side < 3) throw std::invalid_argument("lattice side must be >= 3 (got " + std::to_string(side) + ")");
  for (int k = 0; k < d_; ++k) {
    if (n_ > std::numeric_limits<Site>::max() / static_cast<std::size_t>(L_))
      throw std::invalid_argument("lattice too large for 32-bit site indices");
    n_ *= static_cast<std::size_t>(L_);
  }
}

std::vector<int> TorusLattice::coords(Site x) const {
  std::vector<int> c(d_);
  std::size_t r = x;
  for (int k = d_ - 1; k >= 0; --k) {
    c[k] = static_cast<int>(r % L_);
    r /= L_;
  }
  return c;
}

Site TorusLattice::site_at(std::span<const int> coords) const {
  if (static_cast<int>(coords.size()) != d_) throw std::invalid_argument("coordinate rank mismatch");
  std::size_t idx = 0;
  for (int k = 0; k < d_; ++k) {
    int c = coords[k] % L_;
    if (c < 0) c += L_;
    idx = idx * L_ + static_cast<std::size_t>(c);
  }
  return static_cast<Site>(idx);
}

Site TorusLattice::translate(Site x, std::span<const int> shift) const {
  auto c = coords(x);
  if (static_cast<int>(shift.size()) != d_) throw std::invalid_argument("shift rank mismatch");
  for (int k = 0; k < d_; ++k) c[k] += shift[k];
  return site_at(c);
}

Site TorusLattice::neighbor(Site x, int axis, int step) const {
  std::size_t stride = 1;
  for (int k = d_ - 1; k > axis; --k) stride *= L_;
  const auto c = static_cast<int>((x / stride) % L_);
  int nc = (c + step) % L_;
  if (nc < 0) nc += L_;
  return static_cast<Site>(x + (static_cast<std::ptrdiff_t>(nc) - c) * static_cast<std::ptrdiff_t>(stride));
}

Edge TorusLattice::edge(std::size_t e) const {
  const auto base = static_cast<Site>(e / d_);
  const int axis = static_cast<int>(e % d_);
  return {base, neighbor(base, axis, +1), axis};
}

void TorusLattice::incident_edges(Site x, std::vector<std::size_t>& out) const {
  out.clear();
  for (int a = 0; a < d_; ++a) {
    out.push_back(edge_index(x, a));
    out.push_back(edge_index(neighbor(x, a, -1), a));
  }
}

bool TorusLattice::adjacent(Site x, Site y) const {
  for (int a = 0; a < d_; ++a)
    if (neighbor(x, a, +1) == y || neighbor(x, a, -1) == y) return true;
  return false;
}

std::vector<Site> TorusLattice::box(std::span<const int> extent) const {
  if (static_cast<int>(extent.size()) != d_) throw std::invalid_argument("box rank mismatch");
  std::size_t count = 1;
  for (int e : extent) {
    if (e < 0 || e > L_) throw std::invalid_argument("box extent outside lattice");
    count *= static_cast<std::size_t>(e);
  }
  std::vector<Site> out;
  out.reserve(count);
  if (count == 0) return out;
  std::vector<int> c(d_, 0);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(site_at(c));
    for (int k = d_ - 1; k >= 0; --k) {
      if (++c[k] < extent[k]) break;
      c[k] = 0;
    }
  }
  return out;
}

int TorusLattice::distance_inf(Site x, Site y) const {
  const auto cx = coords(x), cy = coords(y);
  int best = 0;
  for (int k = 0; k < d_; ++k) {
    int diff = std::abs(cx[k] - cy[k]);
    diff = std::min(diff, L_ - diff);
    best = std::max(best, diff);
  }
  return best;
}

std::string TorusLattice::describe() const {
  std::ostringstream os;
  os << "torus(d=" << d_ << ",L=" << L_ << ")";
  return os.str();
}

int light_cone_side(double t, double epsilon) {
  if (!(t >= 0.0)) throw std::invalid_argument("light cone time must be >= 0");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("light cone epsilon must lie in (0,1)");
  const double side = 8.0 * t + 10.0 * std::sqrt(t * std::log(1.0 / epsilon)) + 20.0;
  return std::max(3, static_cast<int>(std::ceil(side)));
}

}  // namespace sep
