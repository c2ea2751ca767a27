#include "sep/oracle/wasserstein.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "sep/oracle/generator.hpp"

namespace sep::oracle {

namespace {

constexpr double kFlowEps = 1e-15;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Transportation problem between supplies a and demands b with Hamming
// costs, solved by successive shortest paths (Dijkstra with potentials on
// the dense residual graph). Node layout: 0 = source, 1..n = supply states,
// n+1..2n = demand states, 2n+1 = sink.
double min_cost_transport(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const std::size_t V = 2 * n + 2, src = 0, snk = 2 * n + 1;
  auto cost = [](std::size_t i, std::size_t j) { return static_cast<double>(std::popcount(i ^ j)); };

  std::vector<double> sent(n, 0.0), received(n, 0.0), flow(n * n, 0.0);
  std::vector<double> potential(V, 0.0), dist(V);
  std::vector<std::size_t> parent(V);
  std::vector<char> done(V);

  double remaining = std::accumulate(a.begin(), a.end(), 0.0);
  while (remaining > kFlowEps) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(done.begin(), done.end(), 0);
    dist[src] = 0.0;
    for (std::size_t iter = 0; iter < V; ++iter) {
      std::size_t u = V;
      double best = kInf;
      for (std::size_t k = 0; k < V; ++k)
        if (!done[k] && dist[k] < best) best = dist[k], u = k;
      if (u == V) break;
      done[u] = 1;
      auto relax = [&](std::size_t v, double c) {
        const double nd = dist[u] + c + potential[u] - potential[v];
        if (nd < dist[v]) dist[v] = nd, parent[v] = u;
      };
      if (u == src) {
        for (std::size_t i = 0; i < n; ++i)
          if (a[i] - sent[i] > kFlowEps) relax(1 + i, 0.0);
      } else if (u <= n) {
        const std::size_t i = u - 1;
        for (std::size_t j = 0; j < n; ++j) relax(1 + n + j, cost(i, j));
      } else if (u < snk) {
        const std::size_t j = u - 1 - n;
        for (std::size_t i = 0; i < n; ++i)
          if (flow[i * n + j] > kFlowEps) relax(1 + i, -cost(i, j));
        if (b[j] - received[j] > kFlowEps) relax(snk, 0.0);
      }
    }
    if (dist[snk] == kInf) break;
    for (std::size_t k = 0; k < V; ++k) potential[k] += std::min(dist[k], dist[snk]);

    // bottleneck along the path
    double push = remaining;
    for (std::size_t v = snk; v != src; v = parent[v]) {
      const std::size_t u = parent[v];
      if (u == src) push = std::min(push, a[v - 1] - sent[v - 1]);
      else if (v == snk) push = std::min(push, b[u - 1 - n] - received[u - 1 - n]);
      else if (u > n) push = std::min(push, flow[(v - 1) * n + (u - 1 - n)]);
    }
    for (std::size_t v = snk; v != src; v = parent[v]) {
      const std::size_t u = parent[v];
      if (u == src) sent[v - 1] += push;
      else if (v == snk) received[u - 1 - n] += push;
      else if (u <= n) flow[(u - 1) * n + (v - 1 - n)] += push;
      else flow[(v - 1) * n + (u - 1 - n)] -= push;
    }
    remaining -= push;
  }

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) total += flow[i * n + j] * cost(i, j);
  return total;
}

void check_law(std::span<const double> law, std::size_t states) {
  if (law.size() != states) throw std::invalid_argument("law size does not match 2^sites");
  double s = 0.0;
  for (double p : law) {
    if (p < -1e-15) throw std::invalid_argument("law has negative mass");
    s += p;
  }
  if (std::abs(s - 1.0) > 1e-10) throw std::invalid_argument("law does not sum to 1");
}

}  // namespace

double exact_wasserstein(std::span<const double> mu, std::span<const double> nu, int sites) {
  if (sites < 0) throw std::invalid_argument("negative site count");
  if (sites > 8) throw ResourceLimit("exact Wasserstein supports at most 8 sites");
  const std::size_t states = std::size_t{1} << sites;
  check_law(mu, states);
  check_law(nu, states);
  // Mass that stays in place costs nothing; transport only the excesses.
  std::vector<double> a(states), b(states);
  for (std::size_t s = 0; s < states; ++s) {
    const double common = std::min(mu[s], nu[s]);
    a[s] = std::max(0.0, mu[s] - common);
    b[s] = std::max(0.0, nu[s] - common);
  }
  return min_cost_transport(a, b);
}

std::vector<double> marginalize(std::span<const double> law, int sites, std::span<const int> keep) {
  const std::size_t states = std::size_t{1} << sites;
  if (law.size() != states) throw std::invalid_argument("law size does not match 2^sites");
  std::vector<double> out(std::size_t{1} << keep.size(), 0.0);
  for (std::size_t s = 0; s < states; ++s) {
    std::size_t m = 0;
    for (std::size_t k = 0; k < keep.size(); ++k) {
      if (keep[k] < 0 || keep[k] >= sites) throw std::invalid_argument("marginal site out of range");
      m |= ((s >> keep[k]) & 1u) << k;
    }
    out[m] += law[s];
  }
  return out;
}

}  // namespace sep::oracle
