#include <doctest.h>

#include <random>

#include "fracsys/energy.hpp"
#include "oracles.hpp"

using namespace fracsys;

namespace {

GridFunction random_fn(const GridDomain& d, std::mt19937_64& rng, double lo,
                       double hi) {
  std::uniform_real_distribution<double> unif(lo, hi);
  GridFunction w = zeros(d);
  for (double& v : w.values) v = unif(rng);
  return w;
}

}  // namespace

TEST_CASE("seminorm worked example on two nodes") {
  const GridDomain d = oracles::manual_interval(0.0, 1.0, {1.0 / 3, 2.0 / 3}, 1.0 / 3);
  GridFunction w{&d, {1.0, 0.0}};
  CHECK(seminorm_p(w, 0.5, 2.0, true) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(seminorm_p(w, 0.5, 2.0, false) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(seminorm_p(zeros(d), 0.5, 2.0, true) == 0.0);
}

TEST_CASE("seminorm log-domain path agrees with direct summation") {
  const GridDomain d = build_interval(0.0, 1.0, 15);
  std::mt19937_64 rng(3);
  const GridFunction w = random_fn(d, rng, -1.0, 1.0);
  for (double p : {34.0, 48.0}) {
    const double got = seminorm_p(w, 0.5, p, true);
    const double ref = oracles::seminorm_direct(w, 0.5, p, true);
    CHECK(got == doctest::Approx(ref).epsilon(1e-11));
  }
}

TEST_CASE("seminorm of |w| never exceeds seminorm of w") {
  const GridDomain d = build_interval(0.0, 1.0, 21);
  std::mt19937_64 rng(5);
  for (int k = 0; k < 30; ++k) {
    const GridFunction w = random_fn(d, rng, -1.0, 1.0);
    GridFunction aw = w;
    for (double& v : aw.values) v = std::abs(v);
    for (double p : {2.0, 3.5}) {
      CHECK(seminorm_p(aw, 0.5, p) <= seminorm_p(w, 0.5, p) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("coupling examples") {
  const GridDomain d = build_interval(0.0, 1.0, 7);
  GridFunction one = zeros(d);
  for (double& v : one.values) v = 1.0;
  FracParams params{0.5, 0.5, 2.0, 0.5};
  CHECK(coupling(one, one, params) == doctest::Approx(1.0).epsilon(1e-13));

  const GridDomain d3 = build_interval(0.0, 1.0, 3);
  GridFunction u{&d3, {1.0, 0.0, 1.0}};
  GridFunction v{&d3, {1.0, 1.0, 0.0}};
  CHECK(coupling(u, v, params) == doctest::Approx(1.0 / 3).epsilon(1e-13));

  // homogeneity in u of degree alpha
  std::mt19937_64 rng(9);
  const GridFunction a = random_fn(d, rng, 0.1, 1.0);
  const GridFunction b = random_fn(d, rng, 0.1, 1.0);
  FracParams p3{0.5, 0.5, 3.0, 1.0 / 3};
  GridFunction ca = a;
  for (double& x : ca.values) x *= 2.5;
  CHECK(coupling(ca, b, p3) ==
        doctest::Approx(std::pow(2.5, p3.alpha()) * coupling(a, b, p3)).epsilon(1e-12));

  const GridDomain other = build_interval(0.0, 1.0, 7);
  GridFunction mism = zeros(other);
  CHECK_THROWS_AS(coupling(a, mism, p3), std::invalid_argument);
}

TEST_CASE("rayleigh worked example and scale invariance") {
  const GridDomain d = oracles::manual_interval(0.0, 1.0, {1.0 / 3, 2.0 / 3}, 1.0 / 3);
  GridFunction u{&d, {1.0, 0.0}};
  FracParams params{0.5, 0.5, 2.0, 0.5};
  CHECK(rayleigh(u, u, params) == doctest::Approx(30.0).epsilon(1e-12));

  GridFunction cu = u;
  for (double& x : cu.values) x *= 7.0;
  CHECK(rayleigh(cu, cu, params) == doctest::Approx(30.0).epsilon(1e-12));

  GridFunction z = zeros(d);
  CHECK_THROWS_AS(rayleigh(z, z, params), std::invalid_argument);
}

TEST_CASE("fractional p-Laplacian equals finite-difference gradient") {
  const GridDomain d = build_interval(0.0, 1.0, 12);
  std::mt19937_64 rng(11);
  for (double p : {2.0, 3.0}) {
    for (int k = 0; k < 5; ++k) {
      const GridFunction w = random_fn(d, rng, -1.0, 1.0);
      const GridFunction g = frac_p_laplacian_apply(w, 0.5, p);
      const auto fd = oracles::fd_gradient(w, 0.5, p);
      for (std::size_t i = 0; i < d.size(); ++i) {
        const double scale = std::max(1.0, std::abs(g.values[i]));
        CHECK(std::abs(g.values[i] - fd[i]) / scale <= 1e-5);
      }
    }
  }
}

TEST_CASE("fractional p-Laplacian is linear at p = 2") {
  const GridDomain d = build_interval(0.0, 1.0, 10);
  std::mt19937_64 rng(13);
  const GridFunction a = random_fn(d, rng, -1.0, 1.0);
  const GridFunction b = random_fn(d, rng, -1.0, 1.0);
  GridFunction sum = a;
  for (std::size_t i = 0; i < d.size(); ++i) sum.values[i] += b.values[i];
  const GridFunction ga = frac_p_laplacian_apply(a, 0.5, 2.0);
  const GridFunction gb = frac_p_laplacian_apply(b, 0.5, 2.0);
  const GridFunction gs = frac_p_laplacian_apply(sum, 0.5, 2.0);
  for (std::size_t i = 0; i < d.size(); ++i)
    CHECK(gs.values[i] == doctest::Approx(ga.values[i] + gb.values[i]).epsilon(1e-10));
  CHECK(frac_p_laplacian_apply(zeros(d), 0.5, 3.0).values ==
        std::vector<double>(d.size(), 0.0));
}

TEST_CASE("picone worked values") {
  const GridDomain d = oracles::manual_interval(0.0, 1.0, {0.25, 0.75}, 0.5);
  std::vector<std::pair<std::size_t, std::size_t>> pair{{0, 1}};

  GridFunction phi{&d, {2.0, 1.0}};
  GridFunction psi{&d, {1.0, 1.0}};
  CHECK(picone(phi, psi, 2.0, pair)[0] == doctest::Approx(1.0));

  GridFunction phi2{&d, {1.0, 2.0}};
  GridFunction psi2{&d, {2.0, 1.0}};
  CHECK(picone(phi2, psi2, 2.0, pair)[0] == doctest::Approx(4.5));

  GridFunction same{&d, {0.7, 1.3}};
  CHECK(picone(same, same, 3.0, pair)[0] == doctest::Approx(0.0).epsilon(1e-14));

  GridFunction bad{&d, {1.0, 0.0}};
  CHECK_THROWS_AS(picone(phi, bad, 2.0, pair), std::invalid_argument);
}

TEST_CASE("picone expression is nonnegative") {
  const GridDomain d = build_interval(0.0, 1.0, 9);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = i + 1; j < d.size(); ++j) pairs.push_back({i, j});
  std::mt19937_64 rng(17);
  for (double p : {2.0, 2.5, 3.0, 4.0}) {
    for (int k = 0; k < 200; ++k) {
      GridFunction phi = random_fn(d, rng, 0.0, 2.0);
      GridFunction psi = random_fn(d, rng, 0.05, 2.0);
      for (double L : picone(phi, psi, p, pairs)) CHECK(L >= -1e-10);
    }
  }
}

TEST_CASE("poincare constant and random suite") {
  const GridDomain d = build_interval(0.0, 1.0, 33);
  // single-node indicator
  GridFunction ind = zeros(d);
  ind.values[16] = 1.0;
  const auto chk = poincare_check(ind, 0.5, 2.0);
  CHECK(chk.holds);
  // with t=0.5, p=2, diam=1 the constant is exactly 1
  std::vector<double> lp(d.size(), 0.0);
  lp[16] = 1.0 * d.cell_volume;
  CHECK(chk.rhs == doctest::Approx(lp[16]));

  std::mt19937_64 rng(19);
  for (auto [t, p] : std::vector<std::pair<double, double>>{{0.5, 2.0}, {0.3, 3.0}, {0.7, 4.0}}) {
    for (int k = 0; k < 100; ++k) {
      const GridFunction w = random_fn(d, rng, -1.0, 1.0);
      CHECK(poincare_check(w, t, p).holds);
    }
  }
}

TEST_CASE("embedding inequalities") {
  const GridDomain d = build_interval(0.0, 1.0, 17);
  GridFunction c = zeros(d);
  for (double& v : c.values) v = 3.0;
  CHECK(embedding_check(c, 0.9, 40.0, 20.0));
  CHECK(embedding_check(zeros(d), 0.9, 40.0, 20.0));

  std::mt19937_64 rng(23);
  for (int k = 0; k < 50; ++k) {
    const GridFunction w = random_fn(d, rng, -1.0, 1.0);
    CHECK(embedding_check(w, 0.9, 40.0, 20.0));
  }
  CHECK_THROWS_AS(embedding_check(c, 0.9, 20.0, 40.0), std::invalid_argument);
}
