#include "jsum/near_triangular.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace jsum;
using Catch::Approx;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// Sign-pattern witness on l_inf^n scaled by (1 - delta): margin exactly
// 1 - delta, every pairing +-(1 - delta).
JWitness scaled_corner_witness(int n, double delta) {
  JWitness w = lq_example_witness(Exponent::inf(), n);
  for (Vec& z : w.z) z *= (1.0 - delta);
  w.margin = 1.0 - delta;
  return w;
}

// Realizes a prescribed pairing table in l_inf^n: y_k = e_k and x rows carry
// the table entries, so <x_l, y_k> = alpha(l, k) exactly.
NearTriangularSystem system_from_alpha(const Mat& alpha) {
  const int n = static_cast<int>(alpha.rows());
  Space space = Space::linf(n);
  std::vector<Vec> x(n), y(n);
  for (int l = 0; l < n; ++l) x[l] = alpha.row(l).transpose();
  for (int k = 0; k < n; ++k) y[k] = Vec::Unit(n, k);
  return make_near_triangular(space, std::move(x), std::move(y));
}

Mat random_band_alpha(int n, double eps, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Mat alpha(n, n);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      alpha(l, k) = l <= k ? 1.0 - eps * u01(rng) : eps * (2.0 * u01(rng) - 1.0);
  return alpha;
}

}  // namespace

TEST_CASE("norming system for the corner witness has band zero") {
  JWitness w = lq_example_witness(Exponent::inf(), 2);
  NormingSystem ns = norming_system(w.space, w);
  CHECK(ns.realized_band == 0.0);
  CHECK(ns.y[0] == vec({0, 1}));   // norms z1 - z2 = (0, 2)
  CHECK(ns.y[1] == vec({-1, 0}));  // norms z1 + z2 = (-2, 0)
  for (int k = 0; k < 2; ++k)
    for (int h = 0; h < 2; ++h) {
      double s = h <= k ? 1.0 : -1.0;
      REQUIRE(s * w.z[h].dot(ns.y[k]) == 1.0);
    }
}

TEST_CASE("norming system on the line witness reports the full band") {
  Space line = Space::lp(2.0, 1);
  JWitness w{line, 2, {vec({1}), vec({0})}, 0.5};
  NormingSystem ns = norming_system(line, w);
  // <z_2, y_2> = 0, so the deviation from 1 is a whole unit: n (1 - margin).
  CHECK(ns.realized_band == Approx(1.0).margin(1e-15));
  // A band that large cannot enter the triangular stage.
  CHECK_THROWS_AS(shifted_system(w, ns.y), check_failed);
}

TEST_CASE("degenerate signed sums are refused") {
  Space line = Space::lp(2.0, 1);
  JWitness tiny{line, 2, {vec({1e-13}), vec({0})}, 5e-14};
  CHECK_THROWS_AS(norming_system(line, tiny), check_failed);
  JWitness zero{line, 2, {vec({0}), vec({0})}, 0.0};
  CHECK_THROWS_AS(norming_system(line, zero), std::invalid_argument);
}

TEST_CASE("shifted system of the corner witness is exactly triangular") {
  JWitness w = lq_example_witness(Exponent::inf(), 2);
  NormingSystem ns = norming_system(w.space, w);
  NearTriangularSystem sys = shifted_system(w, ns.y);
  Mat expected(2, 2);
  expected << 1, 1, 0, 1;
  CHECK(sys.alpha == expected);
  CHECK(sys.band == 0.0);
}

TEST_CASE("shifted system band scales with the witness deficit") {
  const double delta = 1e-4;
  JWitness w = scaled_corner_witness(3, delta);
  NormingSystem ns = norming_system(w.space, w);
  NearTriangularSystem sys = shifted_system(w, ns.y);
  CHECK(sys.band <= 3 * delta + 1e-12);
  for (int l = 0; l < 3; ++l)
    for (int k = 0; k < 3; ++k) {
      if (l <= k)
        REQUIRE(sys.alpha(l, k) >= 1.0 - 3 * delta - 1e-12);
      else
        REQUIRE(std::abs(sys.alpha(l, k)) <= 3 * delta + 1e-12);
    }
}

TEST_CASE("distortion on an exact system is the identity correction") {
  JWitness w = lq_example_witness(Exponent::inf(), 3);
  NormingSystem ns = norming_system(w.space, w);
  DistortionResult res = distortion_factorize(shifted_system(w, ns.y));
  CHECK(res.max_abs_xi == 0.0);
  CHECK(res.fact.sigma == Approx(1.0).margin(1e-12));
  CHECK(res.fact.defect <= 1e-12);
  CHECK(res.det == Approx(1.0).margin(1e-12));
}

TEST_CASE("hand-solved 2x2 distortion") {
  Mat alpha(2, 2);
  alpha << 1.0, 1.0, 0.01, 1.0;
  NearTriangularSystem sys = system_from_alpha(alpha);
  DistortionResult res = distortion_factorize(sys);
  CHECK(res.det == Approx(0.99).margin(1e-12));
  CHECK(res.fact.defect <= 1e-9);
  // Solving by hand: xi^(1) = 0 and xi^(2) = (-1/99, 1/99), so the second
  // column collapses to (0, 1) and both operator norms are 1.
  CHECK(res.max_abs_xi == Approx(1.0 / 99.0).margin(1e-12));
  CHECK(res.fact.sigma == Approx(1.0).margin(1e-9));
  CHECK(res.fact.sigma <= 1.08);  // 1 + 2 n^2 band budget for band 0.01
  CHECK(res.fact.a.matrix.col(1).isApprox(vec({0, 1}), 1e-9));
}

TEST_CASE("singular pairing matrices are refused") {
  Mat alpha(2, 2);
  alpha << 0.6, 1.0, 0.36, 0.6;  // determinant exactly zero, band 0.4
  NearTriangularSystem sys = system_from_alpha(alpha);
  CHECK_THROWS_AS(distortion_factorize(sys), check_failed);
  // Two equal vectors push the band itself past 1/2 before the solve.
  Mat dup(2, 2);
  dup << 1.0, 1.0, 1.0, 1.0;
  CHECK_THROWS_AS(system_from_alpha(dup), check_failed);
}

TEST_CASE("random band ensembles: determinant and solution-size bounds") {
  auto rng = make_rng(99);
  for (int n = 2; n <= 8; ++n) {
    const double eps_cap = std::pow(2.0, -(n + 1));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int trial = 0; trial < 500 / 7; ++trial) {
      double eps = eps_cap * (0.1 + 0.9 * u01(rng));
      Mat alpha = random_band_alpha(n, eps, rng);
      NearTriangularSystem sys = system_from_alpha(alpha);
      DistortionResult res = distortion_factorize(sys);
      REQUIRE(res.det >= 1.0 - std::pow(2.0, n) * eps);
      // Perturbation bound: the correction solves a near-identity system
      // with right-hand side below eps entrywise, so |xi| <= (8/3) eps
      // whenever 2 n eps <= 1/4.
      REQUIRE(res.max_abs_xi <= (8.0 / 3.0) * eps + 1e-12);
      REQUIRE(res.fact.defect <= 1e-8);
      REQUIRE(res.fact.sigma <= 1.0 + 2.0 * n * n * eps + 1e-6);
    }
  }
}

TEST_CASE("sigma never grows as the band shrinks on a fixed pattern") {
  auto rng = make_rng(123);
  for (int n : {2, 4}) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    Mat upper(n, n), lower(n, n);
    for (int l = 0; l < n; ++l)
      for (int k = 0; k < n; ++k) {
        upper(l, k) = u01(rng);
        lower(l, k) = 2.0 * u01(rng) - 1.0;
      }
    double prev = std::numeric_limits<double>::infinity();
    for (double eps : {1e-3, 1e-4, 1e-5, 1e-6}) {
      Mat alpha(n, n);
      for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k)
          alpha(l, k) = l <= k ? 1.0 - eps * upper(l, k) : eps * lower(l, k);
      DistortionResult res = distortion_factorize(system_from_alpha(alpha));
      REQUIRE(res.fact.sigma <= prev + 1e-9);
      prev = res.fact.sigma;
    }
  }
}

TEST_CASE("pipeline: exact witness gives sigma exactly one") {
  for (int n = 2; n <= 6; ++n) {
    JWitness w = lq_example_witness(Exponent::inf(), n);
    Factorization f = factorization_from_witness(w.space, w);
    REQUIRE(f.sigma == Approx(1.0).margin(1e-9));
    REQUIRE(f.defect <= 1e-9);
  }
}

TEST_CASE("pipeline: quantitative budget for a small-deficit witness") {
  const int n = 3;
  const double delta = 1e-4;
  JWitness w = scaled_corner_witness(n, delta);
  Factorization f = factorization_from_witness(w.space, w);
  CHECK(f.sigma <= 1.0 + 2.0 * n * n * delta + 1e-9);
}

TEST_CASE("pipeline refuses weak witnesses") {
  JWitness w = lq_example_witness(Exponent::finite(2.0), 4);  // margin 1/2
  CHECK_THROWS_AS(factorization_from_witness(w.space, w), std::invalid_argument);
}
