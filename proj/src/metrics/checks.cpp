#include "sep/metrics/checks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sep/metrics/bounds.hpp"
#include "sep/oracle/uniformization.hpp"
#include "sep/oracle/walks.hpp"
#include "sep/oracle/wasserstein.hpp"

namespace sep::metrics {

using dynamics::Process;
using json = nlohmann::json;

namespace {

CheckReport make_report(std::string name, const std::string& lattice, double t, double statistic, double tolerance) {
  CheckReport r;
  r.check = std::move(name);
  r.lattice = lattice;
  r.t = t;
  r.statistic = statistic;
  r.tolerance = tolerance;
  r.pass = statistic <= tolerance;
  return r;
}

}  // namespace

std::vector<CheckReport> check_coupling_projection(const TorusLattice& lattice, std::span<const double> times,
                                       const oracle::GeneratorOptions& opts, double tolerance) {
  const auto coupled = oracle::build_generator(Process::coupled, lattice, opts);
  const auto annih = oracle::build_generator(Process::annihilation, lattice, opts);
  const std::size_t n = lattice.num_sites();

  std::vector<std::size_t> project(coupled.space.size());
  for (std::size_t s = 0; s < coupled.space.size(); ++s) {
    auto codes = coupled.space.decode(s);
    for (auto& c : codes) c = static_cast<Symbol>((c & 1) - (c >> 1));
    project[s] = annih.space.encode(codes);
  }

  std::vector<CheckReport> out;
  for (double t : times) {
    double worst = -1.0;
    std::size_t worst_pair = 0;
    for (std::size_t s = 0; s < coupled.space.size(); ++s) {
      const auto dc = oracle::evolve_exact(coupled.Q, oracle::point_mass(coupled.space.size(), s), t);
      oracle::Distribution projected(annih.space.size(), 0.0);
      for (std::size_t k = 0; k < dc.size(); ++k) projected[project[k]] += dc[k];
      const auto da = oracle::evolve_exact(annih.Q, oracle::point_mass(annih.space.size(), project[s]), t);
      const double tv = oracle::total_variation(projected, da);
      if (tv > worst) {
        worst = tv;
        worst_pair = s;
      }
    }
    auto r = make_report("coupling_projection", lattice.describe(), t, worst, tolerance);
    const auto codes = coupled.space.decode(worst_pair);
    std::string eta, zeta;
    for (std::size_t i = 0; i < n; ++i) {
      eta += (codes[i] & 1) ? '1' : '0';
      zeta += (codes[i] >> 1) ? '1' : '0';
    }
    r.details = json{{"initial_pairs", coupled.space.size()},
                     {"worst_eta", eta},
                     {"worst_zeta", zeta},
                     {"annihilation_rate", opts.annihilation_rate}};
    out.push_back(std::move(r));
  }
  return out;
}

dynamics::AnyState reference_state(Process p, const TorusLattice& lattice) {
  if (lattice.num_sites() < 3) throw std::invalid_argument("reference state needs at least 3 sites");
  const Site last = static_cast<Site>(lattice.num_sites() - 1);
  switch (p) {
    case Process::sep: {
      OccupancyConfig c(lattice);
      c.set(0, 1);
      c.set(1, 1);
      return c;
    }
    case Process::coupled: {
      OccupancyConfig eta(lattice), zeta(lattice);
      eta.set(0, 1);
      eta.set(1, 1);
      zeta.set(1, 1);
      zeta.set(2, 1);
      return CoupledConfig{eta, zeta};
    }
    case Process::annihilation: {
      SignedConfig c(lattice);
      c.set(0, sym::plus);
      c.set(last, sym::minus);
      return c;
    }
    case Process::free: {
      TwoSpeciesConfig c(lattice);
      c.set(0, sym::plus);
      c.set(1, sym::minus);
      return c;
    }
  }
  throw std::invalid_argument("unknown process");
}

CheckReport check_mc_vs_oracle(Process p, dynamics::Engine engine, const TorusLattice& lattice,
                               const dynamics::AnyState& init, double t, std::size_t replicas, Seed seed,
                               const FarmOptions& opts, const oracle::GeneratorOptions& gopts) {
  if (replicas < 2) throw std::invalid_argument("at least 2 replicas are needed");
  const auto gen = oracle::build_generator(p, lattice, gopts);
  const std::size_t start = gen.space.encode(dynamics::encode_state(init));
  const auto exact = oracle::evolve_exact(gen.Q, oracle::point_mass(gen.space.size(), start), t);

  const double obs[] = {t};
  const auto finals = farm(replicas, opts, [&](std::size_t i) {
    const auto traj = dynamics::run_process(p, engine, init, t, obs, replica_seed(seed, i));
    return gen.space.encode(dynamics::encode_state(traj.back().config));
  });
  std::vector<double> counts(gen.space.size(), 0.0);
  for (std::size_t s : finals) counts[s] += 1.0;

  const double n = static_cast<double>(replicas);
  double worst = 0.0, worst_dev = 0.0;
  std::size_t worst_state = 0, failures = 0;
  for (std::size_t s = 0; s < exact.size(); ++s) {
    const double pe = std::clamp(exact[s], 0.0, 1.0);
    const double dev = std::abs(counts[s] / n - pe);
    const double tol = 4.0 * std::sqrt(pe * (1.0 - pe) / n);
    const double score = tol > 0.0 ? dev / tol : (dev > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    if (dev > tol) ++failures;
    if (score > worst) {
      worst = score;
      worst_state = s;
      worst_dev = dev;
    }
  }
  auto r = make_report(std::string("mc_vs_oracle_") + std::string(dynamics::process_name(p)) + "_" +
                           std::string(dynamics::engine_name(engine)),
                       lattice.describe(), t, worst, 1.0);
  r.pass = failures == 0;
  r.details = json{{"replicas", replicas},   {"seed", seed},          {"states", exact.size()},
                   {"failing_states", failures}, {"worst_state", worst_state}, {"worst_abs_deviation", worst_dev},
                   {"statistic", "max_state |p_hat - p| / (4 sqrt(p(1-p)/n))"}};
  return r;
}

CheckReport check_variance_bound(const ensembles::DiffLawSpec& diff, const TorusLattice& lattice, int box_side,
                                 double t, std::size_t replicas, Seed seed, const FarmOptions& opts) {
  std::vector<int> extent(static_cast<std::size_t>(lattice.dimension()), 1);
  extent[0] = box_side;
  const auto box = lattice.box(extent);
  const auto v = variance_bound_check(diff, lattice, box, t, replicas, seed, opts);
  const double rel = v.second_moment > 0.0 ? v.stderr_ / v.second_moment : 0.0;
  CheckReport r;
  r.check = "free_process_variance_bound";
  r.lattice = lattice.describe();
  r.t = t;
  r.statistic = v.second_moment;
  r.tolerance = v.bound * (1.0 + 4.0 * rel);
  r.pass = v.pass;
  r.details = json{{"measure", ensembles::describe(diff.mu)}, {"box_sites", v.box_sites}, {"replicas", replicas},
                   {"seed", seed}, {"stderr", v.stderr_}, {"B", v.B}, {"bound", v.bound}, {"ratio", v.ratio}};
  return r;
}

std::vector<CheckReport> check_liggett(const TorusLattice& lattice, double t, Seed seed, double tolerance) {
  const auto rep = oracle::liggett_check(lattice, t);
  Rng rng = make_rng(seed);
  double worst = -std::numeric_limits<double>::infinity();
  json profiles = json::array();
  for (int k = 0; k < 4; ++k) {
    std::vector<double> rho(lattice.num_sites());
    for (auto& r : rho) r = uniform01(rng);
    worst = std::max(worst, oracle::liggett_product_violation(lattice, t, rho));
    profiles.push_back(rho);
  }
  auto neg = make_report("liggett_negative_correlation", lattice.describe(), t, worst, tolerance);
  neg.details = json{{"statistic", "max_{x!=y} P(eta_t(x)=eta_t(y)=1) - P(eta_t(x)=1) P(eta_t(y)=1), product initial laws"},
                     {"density_profiles", profiles},
                     {"labelled_entrywise_max", rep.max_violation}};
  return {neg, make_report("liggett_cross_channel_factorisation", lattice.describe(), t, rep.cross_channel_gap, tolerance)};
}

CheckReport check_duality(const ensembles::MeasureSpec& mu, const TorusLattice& lattice, Site x, Site y, double t) {
  const auto d = duality_check(mu, x, y, t, lattice);
  auto r = make_report("sep_self_duality", lattice.describe(), t, d.discrepancy, d.tolerance);
  r.details = json{{"measure", ensembles::describe(mu)}, {"x", x}, {"y", y}, {"lhs", d.lhs}, {"rhs", d.rhs}};
  return r;
}

CheckReport check_wasserstein_axioms(int sites, std::size_t triples, Seed seed, double tolerance) {
  const std::size_t states = std::size_t{1} << sites;
  Rng rng = make_rng(seed);
  auto draw = [&] {
    std::vector<double> w(states, 0.0);
    double sum = 0.0;
    while (!(sum > 0.0)) {
      sum = 0.0;
      for (auto& v : w) {
        v = uniform01(rng) < 0.25 ? 0.0 : -std::log1p(-uniform01(rng));
        sum += v;
      }
    }
    for (auto& v : w) v /= sum;
    return w;
  };
  double worst = 0.0;
  std::string worst_axiom = "none";
  auto note = [&](double violation, const char* axiom) {
    if (violation > worst) {
      worst = violation;
      worst_axiom = axiom;
    }
  };
  for (std::size_t k = 0; k < triples; ++k) {
    const auto a = draw(), b = draw(), c = draw();
    const double ab = oracle::exact_wasserstein(a, b, sites);
    const double ba = oracle::exact_wasserstein(b, a, sites);
    const double bc = oracle::exact_wasserstein(b, c, sites);
    const double ac = oracle::exact_wasserstein(a, c, sites);
    note(std::abs(oracle::exact_wasserstein(a, a, sites)), "identity");
    note(std::abs(ab - ba), "symmetry");
    note(ac - ab - bc, "triangle");
    note(-ab, "nonnegativity");
    // Distinct states are at Hamming distance >= 1, so W >= TV > 0 when a != b.
    note(oracle::total_variation(a, b) - ab, "separation");
  }
  auto r = make_report("wasserstein_metric_axioms", "box(" + std::to_string(sites) + ")", 0.0, worst, tolerance);
  r.details = json{{"triples", triples}, {"seed", seed}, {"worst_axiom", worst_axiom}};
  return r;
}

CheckReport check_superadditivity(const ensembles::MeasureSpec& mu, const ensembles::MeasureSpec& nu, int max_side,
                                  double tolerance) {
  if (max_side < 2 || max_side > 8) throw std::invalid_argument("super-additivity boxes must have 2..8 sites");
  std::vector<double> w(static_cast<std::size_t>(max_side) + 1, 0.0);
  double worst = -std::numeric_limits<double>::infinity();
  int worst_a = 0, worst_b = 0;
  for (int b = 1; b <= max_side; ++b) {
    const auto mb = ensembles::box_marginal(mu, b);
    const auto nb = ensembles::box_marginal(nu, b);
    w[static_cast<std::size_t>(b)] = oracle::exact_wasserstein(mb, nb, b);
    for (int a = 1; a < b; ++a) {
      std::vector<int> left, right;
      for (int i = 0; i < a; ++i) left.push_back(i);
      for (int i = a; i < b; ++i) right.push_back(i);
      const double wl = oracle::exact_wasserstein(oracle::marginalize(mb, b, left), oracle::marginalize(nb, b, left), a);
      const double wr =
          oracle::exact_wasserstein(oracle::marginalize(mb, b, right), oracle::marginalize(nb, b, right), b - a);
      const double violation = wl + wr - w[static_cast<std::size_t>(b)];
      if (violation > worst) {
        worst = violation;
        worst_a = a;
        worst_b = b;
      }
    }
  }
  // Normalised values along doubling chains n -> 2n.
  double chain_worst = -std::numeric_limits<double>::infinity();
  for (int n = 1; 2 * n <= max_side; ++n)
    chain_worst = std::max(chain_worst, w[static_cast<std::size_t>(n)] / n - w[static_cast<std::size_t>(2 * n)] / (2 * n));
  auto r = make_report("wasserstein_superadditivity", "Z boxes [0,b), b<=" + std::to_string(max_side), 0.0,
                       std::max(worst, chain_worst), tolerance);
  json wn = json::array();
  for (int b = 1; b <= max_side; ++b) wn.push_back(w[static_cast<std::size_t>(b)]);
  r.details = json{{"mu", ensembles::describe(mu)},
                   {"nu", ensembles::describe(nu)},
                   {"W_by_box", wn},
                   {"worst_split", {worst_a, worst_b}},
                   {"split_violation", worst},
                   {"doubling_violation", chain_worst}};
  return r;
}

CheckReport check_annihilation_monotone(const ensembles::DiffLawSpec& diff, const TorusLattice& lattice,
                                        std::span<const double> times, double tolerance) {
  const auto gen = oracle::build_generator(Process::annihilation, lattice);
  const auto law = ensembles::torus_law(diff.mu, lattice);
  const auto ref = ensembles::torus_law(ensembles::make_bernoulli(diff.rho), lattice);
  const std::size_t n = lattice.num_sites();
  oracle::Distribution d0(gen.space.size(), 0.0);
  std::vector<Symbol> xi(n);
  for (std::size_t a = 0; a < law.size(); ++a)
    for (std::size_t b = 0; b < ref.size(); ++b) {
      if (law[a] == 0.0 || ref[b] == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i)
        xi[i] = static_cast<Symbol>(static_cast<int>((a >> i) & 1u) - static_cast<int>((b >> i) & 1u));
      d0[gen.space.encode(xi)] += law[a] * ref[b];
    }
  std::vector<double> values;
  double worst = -std::numeric_limits<double>::infinity();
  for (double t : times) {
    const auto d = oracle::evolve_exact(gen.Q, d0, t);
    double e = 0.0;
    for (std::size_t s = 0; s < d.size(); ++s)
      if (gen.space.decode(s)[0] != 0) e += d[s];
    if (!values.empty()) worst = std::max(worst, e - values.back());
    values.push_back(e);
  }
  auto r = make_report("annihilation_exact_monotone", lattice.describe(), times.empty() ? 0.0 : times.back(),
                       values.size() > 1 ? worst : 0.0, tolerance);
  r.details = json{{"measure", ensembles::describe(diff.mu)}, {"times", std::vector<double>(times.begin(), times.end())},
                   {"E_abs_xi0", values}};
  return r;
}

std::vector<CheckReport> run_validation_suite(const ValidationOptions& opts) {
  using namespace ensembles;
  const TorusLattice ring(1, opts.side);
  std::vector<CheckReport> out;
  auto append = [&](std::vector<CheckReport> v) { out.insert(out.end(), v.begin(), v.end()); };

  const double projection_times[] = {0.1, 1.0, 5.0};
  append(check_coupling_projection(ring, projection_times, oracle::GeneratorOptions{opts.annihilation_rate}));

  const oracle::GeneratorOptions gopts{opts.annihilation_rate};
  std::uint64_t k = 0;
  for (Process p : {Process::sep, Process::coupled, Process::annihilation, Process::free})
    for (dynamics::Engine e : {dynamics::Engine::gillespie, dynamics::Engine::stirring})
      out.push_back(check_mc_vs_oracle(p, e, ring, reference_state(p, ring), 1.0, opts.mc_replicas,
                                       substream(opts.seed, ++k), opts.farm, gopts));

  const double mono_times[] = {0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  out.push_back(check_annihilation_monotone(make_diff_law(make_bernoulli(0.5)), ring, mono_times));
  out.push_back(check_annihilation_monotone(make_diff_law(make_markov(0.3, 0.2)), ring, mono_times));

  const TorusLattice line(1, light_cone_side(16.0, 1e-6));
  for (double t : {1.0, 4.0, 16.0}) {
    out.push_back(check_variance_bound(make_diff_law(make_bernoulli(0.5)), line, 16, t, opts.variance_replicas,
                                       substream(opts.seed, 100 + static_cast<std::uint64_t>(t)), opts.farm));
    out.push_back(check_variance_bound(make_diff_law(make_markov(0.3, 0.2)), line, 16, t, opts.variance_replicas,
                                       substream(opts.seed, 200 + static_cast<std::uint64_t>(t)), opts.farm));
  }

  for (const TorusLattice& lat : {TorusLattice(1, 5), TorusLattice(2, 3)})
    for (double t : {0.5, 1.0, 2.0}) append(check_liggett(lat, t, substream(opts.seed, 400)));

  const TorusLattice four(1, 4);
  for (const MeasureSpec& mu : {MeasureSpec(make_bernoulli(0.3)), MeasureSpec(make_markov(0.3, 0.2))})
    for (double t : {0.5, 2.0})
      for (Site y : {Site{1}, Site{2}}) out.push_back(check_duality(mu, four, 0, y, t));

  out.push_back(check_wasserstein_axioms(3, 200, substream(opts.seed, 300)));
  out.push_back(check_superadditivity(make_markov(0.3, 0.2), make_bernoulli(0.5), 6));
  out.push_back(check_superadditivity(block_xor(1, 0.3, 1), make_bernoulli(0.42), 6));
  out.push_back(check_superadditivity(block_and(1, 0.6, 1), make_markov(0.2, 0.4), 6));
  return out;
}

}  // namespace sep::metrics
