#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "sep/core/config.hpp"
#include "sep/core/config_io.hpp"
#include "sep/core/lattice.hpp"
#include "sep/core/rng.hpp"

using namespace sep;

namespace {

template <ConfigKind K>
Config<K> make(int L, std::vector<Symbol> v) {
  return Config<K>(TorusLattice(1, L), std::move(v));
}

template <ConfigKind K>
Config<K> random_config(const TorusLattice& lat, std::vector<Symbol> alphabet, Rng& rng) {
  std::vector<Symbol> v(lat.num_sites());
  for (auto& s : v) s = alphabet[rng() % alphabet.size()];
  return Config<K>(lat, v);
}

}  // namespace

TEST_CASE("torus sizes and rejected sides") {
  for (int d = 1; d <= 3; ++d)
    for (int L = 3; L <= 5; ++L) {
      TorusLattice lat(d, L);
      std::size_t n = 1;
      for (int i = 0; i < d; ++i) n *= L;
      CHECK(lat.num_sites() == n);
      CHECK(lat.num_edges() == d * n);
    }
  CHECK_THROWS_AS(TorusLattice(1, 2), std::invalid_argument);
  CHECK_THROWS_AS(TorusLattice(2, 1), std::invalid_argument);
  CHECK_THROWS_AS(TorusLattice(0, 5), std::invalid_argument);
}

TEST_CASE("every site has 2d distinct neighbours and edges are distinct") {
  TorusLattice lat(2, 4);
  std::vector<std::size_t> inc;
  for (Site x = 0; x < lat.num_sites(); ++x) {
    lat.incident_edges(x, inc);
    CHECK(inc.size() == 4);
    std::set<Site> nb;
    for (auto e : inc) {
      const Edge ed = lat.edge(e);
      CHECK((ed.lo == x || ed.hi == x));
      nb.insert(ed.lo == x ? ed.hi : ed.lo);
    }
    CHECK(nb.size() == 4);
    for (Site y : nb) CHECK(lat.adjacent(x, y));
  }
  std::set<std::pair<Site, Site>> seen;
  for (std::size_t e = 0; e < lat.num_edges(); ++e) {
    const Edge ed = lat.edge(e);
    seen.insert({std::min(ed.lo, ed.hi), std::max(ed.lo, ed.hi)});
    CHECK(lat.edge_index(ed.lo, ed.axis) == e);
  }
  CHECK(seen.size() == lat.num_edges());
}

TEST_CASE("translate is a bijection with inverse") {
  TorusLattice lat(3, 3);
  const std::vector<int> v{1, -2, 5}, minus_v{-1, 2, -5};
  std::set<Site> image;
  for (Site x = 0; x < lat.num_sites(); ++x) {
    const Site y = lat.translate(x, v);
    image.insert(y);
    CHECK(lat.translate(y, minus_v) == x);
  }
  CHECK(image.size() == lat.num_sites());
}

TEST_CASE("coords and distances") {
  TorusLattice lat(2, 5);
  const std::vector<int> c{4, 1};
  const Site x = lat.site_at(c);
  CHECK(lat.coords(x) == c);
  CHECK(x == 4 * 5 + 1);
  CHECK(lat.distance_inf(lat.site_at(std::vector<int>{0, 0}), x) == 1);
  CHECK(lat.neighbor(lat.site_at(std::vector<int>{0, 0}), 0, -1) == lat.site_at(std::vector<int>{4, 0}));
  CHECK(lat.box(std::vector<int>{2, 3}).size() == 6);
}

TEST_CASE("light-cone side rule") {
  CHECK(light_cone_side(0.0, 1e-6) == 20);
  CHECK(light_cone_side(640.0, 1e-6) == 6081);
  CHECK(light_cone_side(1.0, 0.5) == static_cast<int>(std::ceil(8 + 10 * std::sqrt(std::log(2.0)) + 20)));
}

TEST_CASE("swap examples") {
  const auto xi = make<ConfigKind::signed_>(3, {1, -1, 0});
  CHECK(swap(xi, 1, 2) == make<ConfigKind::signed_>(3, {1, 0, -1}));
  const auto eta = make<ConfigKind::occupancy>(3, {1, 0, 0});
  CHECK(swap(eta, 0, 1) == make<ConfigKind::occupancy>(3, {0, 1, 0}));
  CHECK_THROWS_AS(swap(eta, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(swap(eta, 1, 7), std::out_of_range);
}

TEST_CASE("annihilate_pair examples") {
  const auto xi = make<ConfigKind::signed_>(3, {1, -1, 0});
  const auto zero = make<ConfigKind::signed_>(3, {0, 0, 0});
  CHECK(annihilate_pair(xi, 0, 1) == zero);
  const auto only = make<ConfigKind::signed_>(3, {0, 0, 1});
  CHECK(annihilate_pair(only, 0, 1) == only);
  CHECK(annihilate_pair(annihilate_pair(xi, 1, 2), 1, 2) == annihilate_pair(xi, 1, 2));
  CHECK_THROWS_AS(annihilate_pair(xi, 2, 2), std::invalid_argument);
}

TEST_CASE("set_pair examples") {
  const auto a = make<ConfigKind::two_species>(3, {-1, 1, 0});
  CHECK(set_pair(a, 0, 1, sym::both, sym::empty) == make<ConfigKind::two_species>(3, {2, 0, 0}));
  const auto b = make<ConfigKind::two_species>(3, {0, 2, 0});
  CHECK(set_pair(b, 0, 1, sym::plus, sym::minus) == make<ConfigKind::two_species>(3, {1, -1, 0}));
  CHECK(set_pair(b, 0, 1, b[0], b[1]) == b);
  CHECK_THROWS_AS(set_pair(b, 0, 0, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(set_pair(b, 0, 1, 3, 1), std::invalid_argument);
}

TEST_CASE("difference examples") {
  const auto eta = make<ConfigKind::occupancy>(3, {1, 1, 0});
  const auto zeta = make<ConfigKind::occupancy>(3, {1, 0, 1});
  CHECK(difference(eta, zeta) == make<ConfigKind::signed_>(3, {0, 1, -1}));
  CHECK(difference(eta, eta) == make<ConfigKind::signed_>(3, {0, 0, 0}));
  CHECK(difference(make<ConfigKind::occupancy>(3, {1, 1, 1}), make<ConfigKind::occupancy>(3, {0, 0, 0})) ==
        make<ConfigKind::signed_>(3, {1, 1, 1}));
  CHECK_THROWS_AS(difference(eta, make<ConfigKind::occupancy>(4, {0, 0, 0, 0})), std::invalid_argument);
}

TEST_CASE("count_species examples") {
  const auto xi = make<ConfigKind::signed_>(3, {1, -1, 0});
  const auto all = all_sites(xi.lattice());
  CHECK(count_species(xi, all, +1) == 1);
  const auto t = make<ConfigKind::two_species>(3, {2, -1, 0});
  CHECK(count_species(t, all, -1) == 2);
  CHECK(count_species(t, all, +1) == 1);
  CHECK(count_species(t, std::vector<Site>{}, -1) == 0);
}

TEST_CASE("fuzz: operations stay in the alphabet, additivity, Hamming identity") {
  TorusLattice lat(2, 4);
  Rng rng = make_rng(99);
  for (int rep = 0; rep < 200; ++rep) {
    auto eta = random_config<ConfigKind::occupancy>(lat, {0, 1}, rng);
    auto zeta = random_config<ConfigKind::occupancy>(lat, {0, 1}, rng);
    auto xi = random_config<ConfigKind::signed_>(lat, {-1, 0, 1}, rng);
    auto tw = random_config<ConfigKind::two_species>(lat, {-1, 0, 1, 2}, rng);
    const Site x = static_cast<Site>(rng() % lat.num_sites());
    Site y = static_cast<Site>(rng() % lat.num_sites());
    if (y == x) y = (x + 1) % lat.num_sites();

    CHECK(swap(swap(xi, x, y), x, y) == xi);
    const auto ann = annihilate_pair(xi, x, y);
    for (Symbol s : ann.values()) CHECK(symbol_allowed(ConfigKind::signed_, s));
    const auto sp = set_pair(tw, x, y, 2, -1);
    for (Symbol s : sp.values()) CHECK(symbol_allowed(ConfigKind::two_species, s));
    const auto d = difference(eta, zeta);
    std::size_t abs_sum = 0;
    for (Symbol s : d.values()) abs_sum += s != 0;
    CHECK(abs_sum == hamming_distance(eta, zeta));

    std::vector<Site> left, right, both;
    for (Site s = 0; s < lat.num_sites(); ++s) {
      ((rng() & 1) ? left : right).push_back(s);
    }
    both = left;
    both.insert(both.end(), right.begin(), right.end());
    for (int a : {-1, 1}) {
      CHECK(count_species(xi, both, a) == count_species(xi, left, a) + count_species(xi, right, a));
      CHECK(count_species(tw, both, a) == count_species(tw, left, a) + count_species(tw, right, a));
    }
  }
}

TEST_CASE("text format round trip") {
  TorusLattice lat(2, 3);
  Rng rng = make_rng(5);
  const auto tw = random_config<ConfigKind::two_species>(lat, {-1, 0, 1, 2}, rng);
  const std::string text = to_text(AnyConfig{tw});
  CHECK(text.rfind("2 3 two_species\n", 0) == 0);
  CHECK(std::get<TwoSpeciesConfig>(from_text(text)) == tw);
  const auto occ = std::get<OccupancyConfig>(from_text("1 4 occupancy\n1 0\n 1 1"));
  CHECK(occ == make<ConfigKind::occupancy>(4, {1, 0, 1, 1}));
  const auto sg = std::get<SignedConfig>(from_text("1 3 signed\n+-0"));
  CHECK(sg == make<ConfigKind::signed_>(3, {1, -1, 0}));
  CHECK_THROWS(from_text("1 3 signed\n+-"));
  CHECK_THROWS(from_text("1 3 signed\n+-2"));
}

TEST_CASE("seed splitting is deterministic and distinct") {
  CHECK(replica_seed(1, 0) == replica_seed(1, 0));
  CHECK(replica_seed(1, 0) != replica_seed(1, 1));
  CHECK(substream(7, 1) != substream(7, 2));
  std::set<Seed> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(replica_seed(42, i));
  CHECK(seen.size() == 1000);
  Rng a = make_rng(3), b = make_rng(3);
  for (int i = 0; i < 10; ++i) {
    const double u = uniform01(a);
    CHECK(u == uniform01(b));
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}
