#include "sep/ensembles/measure.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace sep::ensembles {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

using Mat2 = std::array<std::array<double, 2>, 2>;

Mat2 transition_matrix(const MarkovChain1d& m) { return {{{1.0 - m.a, m.a}, {m.b, 1.0 - m.b}}}; }

Mat2 multiply(const Mat2& x, const Mat2& y) {
  Mat2 r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
  return r;
}

constexpr double kMarkovTailTolerance = 1e-12;

// Joint law (mu(eta_0 = a, eta_x = b)) from the density and the covariance.
std::array<std::array<double, 2>, 2> pair_law(double rho, double cov, bool same_site) {
  std::array<std::array<double, 2>, 2> m{};
  if (same_site) {
    m[1][1] = rho;
    m[0][0] = 1.0 - rho;
    return m;
  }
  m[1][1] = rho * rho + cov;
  m[1][0] = rho - m[1][1];
  m[0][1] = rho - m[1][1];
  m[0][0] = 1.0 - 2.0 * rho + m[1][1];
  return m;
}

// Sum over species pairs of |law(xi_0 = alpha ; xi_x = beta)| for
// xi = eta - eta_ref, eta ~ mu with pair law `mu_pair`, eta_ref ~ Bernoulli(rho_ref).
double signed_pair_term(const std::array<std::array<double, 2>, 2>& mu_pair, double rho_mu, double rho_ref,
                        bool same_site) {
  const std::array<double, 2> mu1{1.0 - rho_mu, rho_mu};
  const std::array<double, 2> ref1{1.0 - rho_ref, rho_ref};
  std::array<std::array<double, 2>, 2> ref_pair{};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) ref_pair[a][b] = same_site ? (a == b ? ref1[a] : 0.0) : ref1[a] * ref1[b];

  // index species -1 -> 0, +1 -> 1
  std::array<std::array<double, 2>, 2> joint{};
  std::array<double, 2> marg{};
  for (int a = 0; a < 2; ++a)
    for (int ar = 0; ar < 2; ++ar) {
      const int alpha = a - ar;
      if (alpha == 0) continue;
      marg[alpha > 0] += mu1[a] * ref1[ar];
      for (int b = 0; b < 2; ++b)
        for (int br = 0; br < 2; ++br) {
          const int beta = b - br;
          if (beta == 0) continue;
          joint[alpha > 0][beta > 0] += mu_pair[a][b] * ref_pair[ar][br];
        }
    }
  double s = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) s += std::abs(joint[i][j] - marg[i] * marg[j]);
  return s;
}

// All offsets of the cube [-radius, radius]^d.
std::vector<std::vector<int>> cube_offsets(int d, int radius) {
  std::vector<std::vector<int>> out;
  std::vector<int> c(d, -radius);
  while (true) {
    out.push_back(c);
    int k = d - 1;
    for (; k >= 0; --k) {
      if (++c[k] <= radius) break;
      c[k] = -radius;
    }
    if (k < 0) break;
  }
  return out;
}

double block_density(const BlockFactor& f) {
  const std::size_t k = f.offsets.size();
  double rho = 0.0;
  for (std::size_t w = 0; w < f.table.size(); ++w) {
    if (!f.table[w]) continue;
    const int ones = std::popcount(w);
    rho += std::pow(f.p, ones) * std::pow(1.0 - f.p, static_cast<double>(k) - ones);
  }
  return rho;
}

// E[f(U restricted to S) f(U restricted to x + S)] by enumerating the union window.
double block_pair_moment(const BlockFactor& f, std::span<const int> x) {
  std::map<std::vector<int>, int> slot;
  auto slot_of = [&](std::vector<int> c) {
    auto [it, inserted] = slot.try_emplace(std::move(c), static_cast<int>(slot.size()));
    return it->second;
  };
  std::vector<int> at0, atx;
  for (const auto& o : f.offsets) at0.push_back(slot_of(o));
  for (const auto& o : f.offsets) {
    std::vector<int> c(o);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] += x[k];
    atx.push_back(slot_of(std::move(c)));
  }
  const std::size_t u = slot.size();
  if (u > 24) throw std::invalid_argument("block factor window too wide for exact enumeration");
  double m = 0.0;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << u); ++bits) {
    std::size_t w0 = 0, wx = 0;
    for (std::size_t j = 0; j < at0.size(); ++j) {
      w0 |= ((bits >> at0[j]) & 1u) << j;
      wx |= ((bits >> atx[j]) & 1u) << j;
    }
    if (!(f.table[w0] && f.table[wx])) continue;
    const int ones = std::popcount(bits);
    m += std::pow(f.p, ones) * std::pow(1.0 - f.p, static_cast<double>(u) - ones);
  }
  return m;
}

double markov_covariance(const MarkovChain1d& m, long dist) {
  const double rho = m.a / (m.a + m.b);
  const Mat2 P = transition_matrix(m);
  Mat2 Pk{{{1.0, 0.0}, {0.0, 1.0}}};
  for (long i = 0; i < std::labs(dist); ++i) Pk = multiply(Pk, P);
  return rho * Pk[1][1] - rho * rho;
}

// Visits (offset, covariance, same_site) for every offset with possibly nonzero
// covariance. Markov chains are truncated by the geometric tail bound.
template <class Fn>
void for_each_correlated_offset(const MeasureSpec& spec, Fn&& fn) {
  std::visit(overloaded{
                 [&](const Bernoulli& b) {
                   fn(0L, b.rho * (1.0 - b.rho), true);
                 },
                 [&](const BlockFactor& f) {
                   const double rho = block_density(f);
                   for (const auto& x : cube_offsets(f.dimension, 2 * f.range())) {
                     const bool zero = std::all_of(x.begin(), x.end(), [](int v) { return v == 0; });
                     const double cov = zero ? rho * (1.0 - rho) : block_pair_moment(f, x) - rho * rho;
                     fn(0L, cov, zero);
                   }
                 },
                 [&](const MarkovChain1d& m) {
                   const double rho = m.a / (m.a + m.b);
                   const double var = rho * (1.0 - rho);
                   const double lam = std::abs(m.lambda());
                   const Mat2 P = transition_matrix(m);
                   Mat2 Pk = P;
                   fn(0L, var, true);
                   double partial = var;
                   double envelope = var;
                   for (long k = 1;; ++k) {
                     const double cov = rho * Pk[1][1] - rho * rho;
                     fn(k, cov, false);
                     fn(-k, cov, false);
                     partial += 2.0 * std::abs(cov);
                     envelope *= lam;
                     // remaining two-sided tail is at most 2 var lam^{k+1} / (1 - lam)
                     const double tail = lam < 1.0 ? 2.0 * envelope * lam / (1.0 - lam) : partial;
                     if (tail <= kMarkovTailTolerance * partial) break;
                     Pk = multiply(Pk, P);
                   }
                 }},
             spec);
}

}  // namespace

int BlockFactor::range() const {
  int r = 0;
  for (const auto& o : offsets)
    for (int v : o) r = std::max(r, std::abs(v));
  return r;
}

Bernoulli make_bernoulli(double rho) {
  Bernoulli b{rho};
  validate(b);
  return b;
}

namespace {
BlockFactor two_point_factor(int dimension, double p, int range, const char* label, bool use_xor) {
  BlockFactor f;
  f.dimension = dimension;
  f.p = p;
  std::vector<int> origin(dimension, 0), shifted(dimension, 0);
  shifted[0] = range;
  f.offsets = {origin, shifted};
  f.table = use_xor ? std::vector<std::uint8_t>{0, 1, 1, 0} : std::vector<std::uint8_t>{0, 0, 0, 1};
  f.label = label;
  validate(f);
  return f;
}
}  // namespace

BlockFactor block_xor(int dimension, double p, int range) {
  return two_point_factor(dimension, p, range, "block_xor", true);
}

BlockFactor block_and(int dimension, double p, int range) {
  return two_point_factor(dimension, p, range, "block_and", false);
}

MarkovChain1d make_markov(double a, double b) {
  MarkovChain1d m{a, b};
  validate(m);
  return m;
}

void validate(const MeasureSpec& spec) {
  std::visit(overloaded{
                 [](const Bernoulli& b) {
                   if (!(b.rho >= 0.0 && b.rho <= 1.0)) throw std::invalid_argument("bernoulli rho must lie in [0,1]");
                 },
                 [](const BlockFactor& f) {
                   if (f.dimension < 1) throw std::invalid_argument("block factor dimension must be >= 1");
                   if (!(f.p >= 0.0 && f.p <= 1.0)) throw std::invalid_argument("block factor p must lie in [0,1]");
                   if (f.offsets.empty() || f.offsets.size() > 16)
                     throw std::invalid_argument("block factor needs 1..16 window coordinates");
                   for (const auto& o : f.offsets)
                     if (static_cast<int>(o.size()) != f.dimension)
                       throw std::invalid_argument("block factor offset rank mismatch");
                   if (f.table.size() != (std::size_t{1} << f.offsets.size()))
                     throw std::invalid_argument("block factor table must have 2^k entries");
                   for (auto v : f.table)
                     if (v > 1) throw std::invalid_argument("block factor table entries must be 0 or 1");
                 },
                 [](const MarkovChain1d& m) {
                   if (!(m.a > 0.0 && m.a <= 1.0 && m.b > 0.0 && m.b <= 1.0))
                     throw std::invalid_argument("markov chain rates must lie in (0,1]");
                   if (m.a == 1.0 && m.b == 1.0) throw std::invalid_argument("markov chain must be aperiodic");
                 }},
             spec);
}

std::string describe(const MeasureSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{[&](const Bernoulli& b) { os << "bernoulli(rho=" << b.rho << ")"; },
                        [&](const BlockFactor& f) {
                          os << f.label << "(d=" << f.dimension << ",p=" << f.p << ",range=" << f.range() << ")";
                        },
                        [&](const MarkovChain1d& m) { os << "markov(a=" << m.a << ",b=" << m.b << ")"; }},
             spec);
  return os.str();
}

int required_dimension(const MeasureSpec& spec) {
  return std::visit(overloaded{[](const Bernoulli&) { return 0; }, [](const BlockFactor& f) { return f.dimension; },
                               [](const MarkovChain1d&) { return 1; }},
                    spec);
}

double density(const MeasureSpec& spec) {
  return std::visit(overloaded{[](const Bernoulli& b) { return b.rho; },
                               [](const BlockFactor& f) { return block_density(f); },
                               [](const MarkovChain1d& m) { return m.a / (m.a + m.b); }},
                    spec);
}

double covariance(const MeasureSpec& spec, std::span<const int> offset) {
  const bool zero = std::all_of(offset.begin(), offset.end(), [](int v) { return v == 0; });
  return std::visit(overloaded{
                        [&](const Bernoulli& b) { return zero ? b.rho * (1.0 - b.rho) : 0.0; },
                        [&](const BlockFactor& f) {
                          if (static_cast<int>(offset.size()) != f.dimension)
                            throw std::invalid_argument("offset rank does not match block factor");
                          const double rho = block_density(f);
                          if (zero) return rho * (1.0 - rho);
                          for (int v : offset)
                            if (std::abs(v) > 2 * f.range()) return 0.0;
                          return block_pair_moment(f, offset) - rho * rho;
                        },
                        [&](const MarkovChain1d& m) {
                          if (offset.size() != 1) throw std::invalid_argument("markov chain offsets are one-dimensional");
                          return markov_covariance(m, offset[0]);
                        }},
                    spec);
}

double correlation_sum_A(const MeasureSpec& spec) {
  double a = 0.0;
  for_each_correlated_offset(spec, [&](long, double cov, bool) { a += std::abs(cov); });
  return a;
}

DiffLawSpec make_diff_law(MeasureSpec mu, double rho) {
  validate(mu);
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("reference density must lie in [0,1]");
  const double d = density(mu);
  if (std::abs(d - rho) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "density mismatch: measure density " << d << " vs rho " << rho;
    throw std::invalid_argument(os.str());
  }
  return DiffLawSpec{std::move(mu), rho};
}

DiffLawSpec make_diff_law(MeasureSpec mu) {
  const double rho = density(mu);
  return make_diff_law(std::move(mu), rho);
}

double correlation_sum_B(const DiffLawSpec& spec) {
  const double rho_mu = density(spec.mu);
  double b = 0.0;
  for_each_correlated_offset(spec.mu, [&](long, double cov, bool same_site) {
    b += signed_pair_term(pair_law(rho_mu, cov, same_site), rho_mu, spec.rho, same_site);
  });
  return b;
}

std::vector<double> box_marginal(const MeasureSpec& spec, int n) {
  if (n < 1 || n > 20) throw std::invalid_argument("box marginal supports 1..20 sites");
  const std::size_t states = std::size_t{1} << n;
  std::vector<double> law(states, 0.0);
  std::visit(overloaded{
                 [&](const Bernoulli& b) {
                   for (std::size_t s = 0; s < states; ++s) {
                     const int ones = std::popcount(s);
                     law[s] = std::pow(b.rho, ones) * std::pow(1.0 - b.rho, n - ones);
                   }
                 },
                 [&](const BlockFactor& f) {
                   if (f.dimension != 1) throw std::invalid_argument("box marginal needs a one-dimensional factor");
                   int lo = 0, hi = 0;
                   for (const auto& o : f.offsets) {
                     lo = std::min(lo, o[0]);
                     hi = std::max(hi, o[0]);
                   }
                   const int width = n + hi - lo;  // driving sites lo .. n-1+hi
                   if (width > 24) throw std::invalid_argument("box marginal driving window too wide");
                   for (std::uint64_t u = 0; u < (std::uint64_t{1} << width); ++u) {
                     const int ones = std::popcount(u);
                     const double w = std::pow(f.p, ones) * std::pow(1.0 - f.p, width - ones);
                     std::size_t s = 0;
                     for (int x = 0; x < n; ++x) {
                       std::size_t idx = 0;
                       for (std::size_t j = 0; j < f.offsets.size(); ++j)
                         idx |= ((u >> (x + f.offsets[j][0] - lo)) & 1u) << j;
                       s |= static_cast<std::size_t>(f.table[idx]) << x;
                     }
                     law[s] += w;
                   }
                 },
                 [&](const MarkovChain1d& m) {
                   const Mat2 P = transition_matrix(m);
                   const double rho = m.a / (m.a + m.b);
                   for (std::size_t s = 0; s < states; ++s) {
                     double w = (s & 1u) ? rho : 1.0 - rho;
                     for (int x = 1; x < n; ++x) w *= P[(s >> (x - 1)) & 1u][(s >> x) & 1u];
                     law[s] = w;
                   }
                 }},
             spec);
  return law;
}

}  // namespace sep::ensembles
