#include "sep/oracle/generator.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace sep::oracle {

StateSpace::StateSpace(std::vector<Symbol> alphabet, std::size_t sites)
    : alphabet_(std::move(alphabet)), sites_(sites), size_(1) {
  if (alphabet_.empty()) throw std::invalid_argument("empty alphabet");
  for (std::size_t i = 0; i < sites_; ++i) {
    size_ *= alphabet_.size();
    if (size_ > kMaxStates)
      throw ResourceLimit("state space exceeds " + std::to_string(kMaxStates) + " states");
  }
}

std::vector<Symbol> StateSpace::decode(std::size_t index) const {
  std::vector<Symbol> v(sites_);
  const std::size_t k = alphabet_.size();
  for (std::size_t i = 0; i < sites_; ++i) {
    v[i] = alphabet_[index % k];
    index /= k;
  }
  return v;
}

std::size_t StateSpace::encode(std::span<const Symbol> values) const {
  if (values.size() != sites_) throw std::invalid_argument("state length mismatch");
  std::size_t idx = 0;
  for (std::size_t i = sites_; i-- > 0;) {
    const auto it = std::find(alphabet_.begin(), alphabet_.end(), values[i]);
    if (it == alphabet_.end()) throw std::invalid_argument("symbol outside state alphabet");
    idx = idx * alphabet_.size() + static_cast<std::size_t>(it - alphabet_.begin());
  }
  return idx;
}

GeneratorMatrix::GeneratorMatrix(std::vector<std::vector<Transition>> rows) : rows_(std::move(rows)) {
  const std::size_t n = rows_.size();
  exit_.assign(n, 0.0);
  std::vector<std::size_t> indeg(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& tr : rows_[i]) {
      if (tr.target >= n) throw std::invalid_argument("transition target out of range");
      if (tr.target == i) throw std::invalid_argument("self transitions are not allowed");
      if (!(tr.rate >= 0.0)) throw std::invalid_argument("negative transition rate");
      exit_[i] += tr.rate;
      ++indeg[tr.target];
    }
    max_exit_ = std::max(max_exit_, exit_[i]);
  }
  in_start_.assign(n + 1, 0);
  for (std::size_t j = 0; j < n; ++j) in_start_[j + 1] = in_start_[j] + indeg[j];
  in_.resize(in_start_[n]);
  std::vector<std::size_t> fill(in_start_.begin(), in_start_.end() - 1);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& tr : rows_[i]) in_[fill[tr.target]++] = Transition{static_cast<std::uint32_t>(i), tr.rate};
}

double GeneratorMatrix::rate(std::size_t i, std::size_t j) const {
  if (i == j) return -exit_[i];
  double r = 0.0;
  for (const auto& tr : rows_[i])
    if (tr.target == j) r += tr.rate;
  return r;
}

std::vector<Symbol> process_alphabet(Process p) {
  switch (p) {
    case Process::sep: return {0, 1};
    case Process::coupled: return {0, 1, 2, 3};  // eta + 2 zeta
    case Process::annihilation: return {-1, 0, 1};
    case Process::free: return {-1, 0, 1, 2};
  }
  return {};
}

namespace {

struct RowBuilder {
  std::map<std::size_t, double> out;
  std::size_t self;
  void add(std::size_t target, double rate) {
    if (target != self && rate != 0.0) out[target] += rate;
  }
};

// Exclusion: sum over unordered edges of f(eta^{x,y}) - f(eta).
void sep_row(const StateSpace& S, const TorusLattice& lat, const OccupancyConfig& eta, RowBuilder& row) {
  for (std::size_t e = 0; e < lat.num_edges(); ++e) {
    const Edge ed = lat.edge(e);
    row.add(S.encode(swap(eta, ed.lo, ed.hi).values()), 1.0);
  }
}

std::size_t encode_pair(const StateSpace& S, const OccupancyConfig& eta, const OccupancyConfig& zeta) {
  std::vector<Symbol> v(eta.size());
  for (std::size_t x = 0; x < v.size(); ++x) v[x] = dynamics::coupled_code(eta[static_cast<Site>(x)], zeta[static_cast<Site>(x)]);
  return S.encode(v);
}

// Basic coupling: (1 - 1_{discordant at x and y}) [F(eta^{xy}, zeta^{xy}) - F]
//               + 1_{discordant at x and y} [F(eta^{xy}, zeta) + F(eta, zeta^{xy}) - 2F].
void coupled_row(const StateSpace& S, const TorusLattice& lat, const OccupancyConfig& eta,
                 const OccupancyConfig& zeta, RowBuilder& row) {
  for (std::size_t e = 0; e < lat.num_edges(); ++e) {
    const Edge ed = lat.edge(e);
    const bool split = eta[ed.lo] != zeta[ed.lo] && eta[ed.hi] != zeta[ed.hi];
    if (!split) {
      row.add(encode_pair(S, swap(eta, ed.lo, ed.hi), swap(zeta, ed.lo, ed.hi)), 1.0);
    } else {
      row.add(encode_pair(S, swap(eta, ed.lo, ed.hi), zeta), 1.0);
      row.add(encode_pair(S, eta, swap(zeta, ed.lo, ed.hi)), 1.0);
    }
  }
}

// 1_{xi_x xi_y != -1} [f(xi^{xy}) - f] + rate_dagger 1_{xi_x xi_y = -1} [f(xi^{xy;dagger}) - f].
void annihilation_row(const StateSpace& S, const TorusLattice& lat, const SignedConfig& xi, double rate_dagger,
                      RowBuilder& row) {
  for (std::size_t e = 0; e < lat.num_edges(); ++e) {
    const Edge ed = lat.edge(e);
    if (xi[ed.lo] * xi[ed.hi] != -1) row.add(S.encode(swap(xi, ed.lo, ed.hi).values()), 1.0);
    else row.add(S.encode(annihilate_pair(xi, ed.lo, ed.hi).values()), rate_dagger);
  }
}

// Sum over ORIENTED edges (x, y):
//   sum_{a in {-1,+1}} sum_{b in {0,both}} 1_a(xi_x) 1_b(xi_y) [f(xi^{xy}) - f]
//   + 1_{-1}(xi_x) 1_{+1}(xi_y) [f(xi^{xy;both,0}) + f(xi^{xy;0,both}) - 2f]
//   + 1_{0}(xi_x) 1_{both}(xi_y) [f(xi^{xy;+1,-1}) + f(xi^{xy;-1,+1}) - 2f].
void free_row(const StateSpace& S, const TorusLattice& lat, const TwoSpeciesConfig& xi, RowBuilder& row) {
  for (std::size_t e = 0; e < lat.num_edges(); ++e) {
    const Edge ed = lat.edge(e);
    for (int orient = 0; orient < 2; ++orient) {
      const Site x = orient == 0 ? ed.lo : ed.hi;
      const Site y = orient == 0 ? ed.hi : ed.lo;
      for (Symbol a : {sym::minus, sym::plus})
        for (Symbol b : {sym::empty, sym::both})
          if (xi[x] == a && xi[y] == b) row.add(S.encode(swap(xi, x, y).values()), 1.0);
      if (xi[x] == sym::minus && xi[y] == sym::plus) {
        row.add(S.encode(set_pair(xi, x, y, sym::both, sym::empty).values()), 1.0);
        row.add(S.encode(set_pair(xi, x, y, sym::empty, sym::both).values()), 1.0);
      }
      if (xi[x] == sym::empty && xi[y] == sym::both) {
        row.add(S.encode(set_pair(xi, x, y, sym::plus, sym::minus).values()), 1.0);
        row.add(S.encode(set_pair(xi, x, y, sym::minus, sym::plus).values()), 1.0);
      }
    }
  }
}

}  // namespace

ProcessGenerator build_generator(Process p, const TorusLattice& lattice, const GeneratorOptions& opts) {
  StateSpace S(process_alphabet(p), lattice.num_sites());
  std::vector<std::vector<Transition>> rows(S.size());
  for (std::size_t i = 0; i < S.size(); ++i) {
    RowBuilder row{{}, i};
    auto v = S.decode(i);
    switch (p) {
      case Process::sep:
        sep_row(S, lattice, OccupancyConfig(lattice, std::move(v)), row);
        break;
      case Process::annihilation:
        annihilation_row(S, lattice, SignedConfig(lattice, std::move(v)), opts.annihilation_rate, row);
        break;
      case Process::free:
        free_row(S, lattice, TwoSpeciesConfig(lattice, std::move(v)), row);
        break;
      case Process::coupled: {
        std::vector<Symbol> eta(v.size()), zeta(v.size());
        for (std::size_t x = 0; x < v.size(); ++x) {
          eta[x] = static_cast<Symbol>(v[x] & 1);
          zeta[x] = static_cast<Symbol>(v[x] >> 1);
        }
        coupled_row(S, lattice, OccupancyConfig(lattice, std::move(eta)), OccupancyConfig(lattice, std::move(zeta)),
                    row);
        break;
      }
    }
    rows[i].reserve(row.out.size());
    for (const auto& [target, rate] : row.out) rows[i].push_back({static_cast<std::uint32_t>(target), rate});
  }
  return ProcessGenerator{p, lattice, std::move(S), GeneratorMatrix(std::move(rows))};
}

}  // namespace sep::oracle
