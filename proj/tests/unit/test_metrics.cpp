#include <cmath>

#include "doctest.h"
#include "sep/metrics/bounds.hpp"
#include "sep/metrics/checks.hpp"
#include "sep/metrics/estimators.hpp"
#include "sep/metrics/fit.hpp"

using namespace sep;
using namespace sep::metrics;
using namespace sep::ensembles;

TEST_CASE("theoretical exponent") {
  CHECK(theoretical_exponent(1) == 0.25);
  CHECK(theoretical_exponent(2) == 0.5);
  CHECK(theoretical_exponent(4) == 1.0);
  CHECK(theoretical_exponent(7) == 1.0);
  CHECK_THROWS_AS(theoretical_exponent(0), std::invalid_argument);
}

TEST_CASE("dyadic grid") {
  const auto t = dyadic_times(10.0, 6);
  REQUIRE(t.size() == 7);
  CHECK(t.front() == 10.0);
  CHECK(t.back() == 640.0);
}

TEST_CASE("power-law fit on synthetic series") {
  const auto t = dyadic_times(1.0, 6);
  std::vector<double> y, se(t.size(), 0.0), flat(t.size(), 0.7);
  for (double x : t) y.push_back(std::pow(x, -0.25));
  const auto f = fit_power_law(t, y, se, 0, 1e9);
  CHECK(f.slope == doctest::Approx(-0.25).epsilon(1e-12));
  CHECK(f.half_width == 0.0);
  CHECK(fit_power_law(t, flat, se, 0, 1e9).slope == doctest::Approx(0.0).scale(1));

  std::vector<double> with_zero = y;
  with_zero[2] = 0.0;
  const auto g = fit_power_law(t, with_zero, se, 0, 1e9);
  CHECK(g.dropped_times == std::vector<double>{t[2]});
  CHECK(g.used_times.size() == 6);
  CHECK(g.slope == doctest::Approx(-0.25).epsilon(1e-12));
  CHECK_THROWS_AS(fit_power_law(t, y, se, 8.0, 32.0), std::invalid_argument);

  // The theoretical envelope reproduces -gamma(d) exactly.
  for (int d : {1, 2, 3, 6}) {
    std::vector<double> env;
    for (double x : t) env.push_back(std::sqrt(0.25) / std::pow(x, theoretical_exponent(d)));
    CHECK(fit_power_law(t, env, se, 0, 1e9).slope == doctest::Approx(-theoretical_exponent(d)).epsilon(1e-12));
  }
  // Half-width grows with the per-point error.
  std::vector<double> noisy(t.size(), 0.01);
  CHECK(fit_power_law(t, y, noisy, 0, 1e9).half_width > 0.0);
}

TEST_CASE("discrepancy density at t = 0 and degenerate measures") {
  const TorusLattice lat(1, 200);
  const double t0[] = {0.0};
  const auto s = estimate_discrepancy_density(make_diff_law(make_bernoulli(0.3)), lat, t0, 400, 5, Engine::stirring);
  CHECK(std::abs(s.estimate[0] - 0.42) <= 4 * s.stderr_[0]);
  CHECK(s.stderr_[0] > 0.0);

  const double times[] = {0.0, 1.0, 4.0};
  const auto z = estimate_discrepancy_density(make_diff_law(make_bernoulli(1.0)), lat, times, 4, 5, Engine::gillespie);
  for (double v : z.estimate) CHECK(v == 0.0);
  CHECK_THROWS_AS(estimate_discrepancy_density(make_diff_law(make_bernoulli(0.5)), lat, times, 1, 5, Engine::stirring),
                  std::invalid_argument);
  const double unsorted[] = {1.0, 0.5};
  CHECK_THROWS_AS(
      estimate_discrepancy_density(make_diff_law(make_bernoulli(0.5)), lat, unsorted, 4, 5, Engine::stirring),
      std::invalid_argument);
}

TEST_CASE("replica farm: worker count and serial reference give identical series") {
  const TorusLattice lat(1, 128);
  const auto diff = make_diff_law(make_markov(0.3, 0.2));
  const double times[] = {0.5, 2.0, 8.0};
  const auto ref = estimate_discrepancy_density(diff, lat, times, 24, 99, Engine::stirring, FarmOptions{0, true});
  for (int w : {1, 2, 3, 8}) {
    const auto par = estimate_discrepancy_density(diff, lat, times, 24, 99, Engine::stirring, FarmOptions{w, false});
    CHECK(par.estimate == ref.estimate);
    CHECK(par.stderr_ == ref.stderr_);
  }
  const auto g1 = estimate_discrepancy_density(diff, lat, times, 12, 4, Engine::gillespie, FarmOptions{0, true});
  const auto g2 = estimate_discrepancy_density(diff, lat, times, 12, 4, Engine::gillespie, FarmOptions{3, false});
  CHECK(g1.estimate == g2.estimate);
}

TEST_CASE("run_replicas propagates exceptions") {
  auto boom = [](std::size_t i) -> int {
    if (i == 5) throw std::runtime_error("boom");
    return static_cast<int>(i);
  };
  CHECK_THROWS_AS(run_replicas(10, 2, boom), std::runtime_error);
  CHECK_THROWS_AS(run_replicas_serial(10, boom), std::runtime_error);
  const auto ok = run_replicas(10, 3, [](std::size_t i) { return i * i; });
  CHECK(ok[9] == 81);
}

TEST_CASE("engines agree at t = 1 on L = 64") {
  const TorusLattice lat(1, 64);
  const double times[] = {1.0};
  const auto diff = make_diff_law(make_bernoulli(0.5));
  const auto a = estimate_discrepancy_density(diff, lat, times, 2000, 11, Engine::stirring);
  const auto b = estimate_discrepancy_density(diff, lat, times, 2000, 12, Engine::gillespie);
  CHECK(std::abs(a.estimate[0] - b.estimate[0]) <= 4 * std::hypot(a.stderr_[0], b.stderr_[0]));
}

TEST_CASE("dbar bound series: metadata, t = 0 entry, ratio, monotone decay") {
  const TorusLattice lat(1, light_cone_side(32.0, 1e-6));
  const std::vector<double> times{0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
  const auto s = dbar_bound_series(make_diff_law(make_bernoulli(0.5)), lat, times, 32, 3);
  CHECK(s.label == "dbar_upper_bound");
  CHECK(s.A == doctest::Approx(0.25));
  CHECK(s.B == doctest::Approx(0.5));
  CHECK(s.gamma == 0.25);
  CHECK(std::abs(s.estimate[0] - 0.5) <= 4 * s.stderr_[0]);
  for (std::size_t k = 0; k < times.size(); ++k)
    CHECK(s.ratio[k] == doctest::Approx(s.estimate[k] * std::pow(times[k], 0.25) / 0.5).epsilon(1e-14));
  for (std::size_t k = 1; k < times.size(); ++k)
    CHECK(s.estimate[k] <= s.estimate[k - 1] + 2 * std::hypot(s.stderr_[k], s.stderr_[k - 1]));
  const auto f = fit_decay_exponent(s, 1.0, 32.0);
  CHECK(f.dropped_times.empty());
  CHECK(f.used_times.size() == 6);
  CHECK(fit_ratio_trend(s).dropped_times == std::vector<double>{0.0});
}

TEST_CASE("variance bound examples") {
  const TorusLattice lat(1, 100);
  std::vector<Site> box;
  for (Site x = 0; x < 16; ++x) box.push_back(x);
  const double rho = 0.3, sigma = rho * (1 - rho);
  const auto r0 = variance_bound_check(make_diff_law(make_bernoulli(rho)), lat, box, 0.0, 20000, 1);
  CHECK(std::abs(r0.second_moment - 2 * sigma * 16) <= 4 * r0.stderr_);
  CHECK(r0.bound == doctest::Approx(2 * 16 * 2 * sigma));
  CHECK(r0.pass);
  const auto r1 = variance_bound_check(make_diff_law(make_bernoulli(1.0)), lat, box, 2.0, 50, 1);
  CHECK(r1.second_moment == 0.0);
  CHECK(r1.bound == 0.0);
  CHECK(r1.pass);
  const auto r2 = variance_bound_check(make_diff_law(make_markov(0.3, 0.2)), lat, box, 4.0, 4000, 2);
  CHECK(r2.pass);
}

TEST_CASE("duality: exact and Monte Carlo") {
  const TorusLattice four(1, 4);
  const auto m = make_markov(0.3, 0.2);
  CHECK(duality_check(m, 0, 1, 0.0, four).discrepancy <= 1e-12);
  const auto d = duality_check(m, 0, 2, 1.0, four);
  CHECK(d.discrepancy <= 1e-8);
  CHECK(d.pass);
  for (double t : {0.0, 0.7, 3.0}) {
    const auto b = duality_check(make_bernoulli(0.3), 1, 3, t, four);
    CHECK(b.lhs == doctest::Approx(0.09).epsilon(1e-10));
    CHECK(b.rhs == doctest::Approx(0.09).epsilon(1e-10));
  }
  CHECK_THROWS_AS(duality_check(m, 2, 2, 1.0, four), std::invalid_argument);
  CHECK_THROWS(duality_check(m, 0, 1, 1.0, TorusLattice(1, 13)));
  const auto mc = duality_check_monte_carlo(m, 0, 1, 1.0, TorusLattice(1, 8), 20000, 6);
  CHECK(mc.pass);
  CHECK(mc.tolerance > 0.0);
}

TEST_CASE("coupling projection check passes and detects a wrong annihilation rate") {
  const TorusLattice ring(1, 3);
  const double times[] = {0.1, 1.0, 5.0};
  for (const auto& r : check_coupling_projection(ring, times)) {
    CHECK(r.pass);
    CHECK(r.statistic <= 1e-9);
  }
  bool any_fail = false;
  for (const auto& r : check_coupling_projection(ring, times, oracle::GeneratorOptions{1.0})) any_fail = any_fail || !r.pass;
  CHECK(any_fail);
}

TEST_CASE("property checks pass at pinned seeds") {
  CHECK(check_wasserstein_axioms(3, 50, 3).pass);
  CHECK(check_superadditivity(make_markov(0.3, 0.2), make_bernoulli(0.5), 5).pass);
  const double times[] = {0.0, 0.5, 1.0, 2.0, 4.0};
  CHECK(check_annihilation_monotone(make_diff_law(make_bernoulli(0.5)), TorusLattice(1, 3), times).pass);
  for (const auto& r : check_liggett(TorusLattice(1, 4), 1.0, 7)) CHECK(r.pass);
  const TorusLattice ring(1, 3);
  CHECK(check_mc_vs_oracle(dynamics::Process::free, Engine::gillespie, ring,
                           reference_state(dynamics::Process::free, ring), 1.0, 20000, 8)
            .pass);
}
