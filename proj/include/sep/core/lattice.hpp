#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sep {

using Site = std::uint32_t;

/// Unordered nearest-neighbour edge. `lo` is the base site, `hi` its
/// neighbour one step along `axis` (with periodic wrap).
struct Edge {
  Site lo;
  Site hi;
  int axis;
};

/// Periodic cubic box {0..L-1}^d with row-major site indexing
/// (axis 0 is the slowest coordinate).
///
/// Edge `e` joins site `e / d` to its forward neighbour along axis `e % d`,
/// so every site owns exactly d edges and the edge count is d * L^d.
/// Sides below 3 are rejected: at L = 2 the forward and backward
/// neighbours coincide and edges would be doubled.
class TorusLattice {
 public:
  TorusLattice(int dimension, int side);

  int dimension() const { return d_; }
  int side() const { return L_; }
  std::size_t num_sites() const { return n_; }
  std::size_t num_edges() const { return n_ * static_cast<std::size_t>(d_); }

  std::vector<int> coords(Site x) const;
  Site site_at(std::span<const int> coords) const;  // wraps out-of-range coords
  Site translate(Site x, std::span<const int> shift) const;
  Site neighbor(Site x, int axis, int step) const;

  Edge edge(std::size_t e) const;
  std::size_t edge_index(Site base, int axis) const { return static_cast<std::size_t>(base) * d_ + axis; }
  /// Fills `out` with the 2d edges touching `x`.
  void incident_edges(Site x, std::vector<std::size_t>& out) const;
  bool adjacent(Site x, Site y) const;

  /// Sites of the box [0, extent_0) x ... x [0, extent_{d-1}).
  std::vector<Site> box(std::span<const int> extent) const;
  /// Sup-norm of the shortest periodic displacement from x to y.
  int distance_inf(Site x, Site y) const;

  std::string describe() const;

  friend bool operator==(const TorusLattice&, const TorusLattice&) = default;

 private:
  int d_;
  int L_;
  std::size_t n_;
};

/// Side length that keeps the origin's dependence cone inside the torus up to
/// time t except with probability about epsilon:
/// max(3, ceil(8t + 10 sqrt(t ln(1/epsilon)) + 20)).
int light_cone_side(double t, double epsilon);

}  // namespace sep
