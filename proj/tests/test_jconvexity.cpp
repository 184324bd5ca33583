#include "jsum/jconvexity.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <iostream>

using namespace jsum;
using Catch::Approx;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

std::vector<Vec> scalar_witness(std::initializer_list<double> xs) {
  std::vector<Vec> z;
  for (double x : xs) z.push_back(vec({x}));
  return z;
}

// Product-enumeration oracle for the grid optimum at dimension one; the
// library uses a DP fast path there, so this stays an independent check.
double brute_grid_margin_1d(const Space& s, int n, double step) {
  int J = static_cast<int>(std::floor((1.0 + 1e-12) / step));
  std::vector<double> pts;
  for (int j = -J; j <= J; ++j) pts.push_back(j * step);
  std::vector<int> idx(n, 0);
  double best = 0.0;
  while (true) {
    std::vector<Vec> z;
    for (int h = 0; h < n; ++h) z.push_back(vec({pts[idx[h]]}));
    best = std::max(best, j_margin(s, z));
    int i = 0;
    for (; i < n; ++i) {
      if (++idx[i] < static_cast<int>(pts.size())) break;
      idx[i] = 0;
    }
    if (i == n) break;
  }
  return best;
}

}  // namespace

TEST_CASE("j_margin hand-evaluated examples") {
  Space line = Space::lp(2.0, 1);
  CHECK(j_margin(line, scalar_witness({1, 0, 0, 0})) == Approx(0.25).margin(1e-15));
  CHECK(j_margin(line, scalar_witness({0, 0, 0})) == 0.0);

  Space li2 = Space::linf(2);
  std::vector<Vec> z{vec({-1, 1}), vec({-1, -1})};
  CHECK(j_margin(li2, z) == Approx(1.0).margin(1e-15));

  CHECK_THROWS_AS(j_margin(line, scalar_witness({1.5})), std::invalid_argument);
  CHECK_THROWS_AS(j_margin(line, {}), std::invalid_argument);
}

TEST_CASE("j_margin is invariant under an isometric wrap") {
  Space x = Space::lp(1.0, 3);
  Space wrapped = Space::l2_sum(x, 1);
  auto rng = make_rng(17);
  for (int t = 0; t < 50; ++t) {
    std::vector<Vec> z;
    for (int h = 0; h < 3; ++h) z.push_back(x.sample_unit_ball(derive_seed(99, 3 * t + h)));
    REQUIRE(j_margin(x, z) == Approx(j_margin(wrapped, z)).margin(1e-12));
  }
}

TEST_CASE("search reproduces the line values 1/n") {
  Space line = Space::lp(2.0, 1);
  for (int n = 2; n <= 5; ++n) {
    JWitness w = j_upper_search(line, n, 1, 24, 400);
    CHECK(w.margin == Approx(1.0 / n).margin(1e-6));
    CHECK(w.margin <= 1.0 / n + 1e-12);  // no witness beats 1/n on the line
  }
}

TEST_CASE("search approaches margin 1 on l_inf and 1/2 on the line with n = 2") {
  JWitness w = j_upper_search(Space::linf(3), 3, 2, 16, 300);
  CHECK(w.margin >= 0.95);
  JWitness w8 = j_upper_search(Space::linf(8), 4, 1, 24, 400);
  CHECK(w8.margin >= 0.95);

  JWitness half = j_upper_search(Space::lp(2.0, 1), 2, 1, 8, 200);
  CHECK(half.margin == Approx(0.5).margin(1e-6));
}

TEST_CASE("search: n = 1 yields the trivial margin-1 witness, determinism holds") {
  JWitness w = j_upper_search(Space::lp(4.0, 3), 1, 9, 4, 10);
  CHECK(w.margin == 1.0);
  CHECK(w.n == 1);

  JWitness a = j_upper_search(Space::lp(2.0, 2), 2, 33, 4, 50);
  JWitness b = j_upper_search(Space::lp(2.0, 2), 2, 33, 4, 50);
  REQUIRE(a.margin == b.margin);
  for (int h = 0; h < 2; ++h) REQUIRE(a.z[h] == b.z[h]);
}

TEST_CASE("grid certification on the line") {
  Space line = Space::lp(2.0, 1);
  for (int n = 2; n <= 5; ++n) {
    MarginEnclosure enc = j_certify_grid(line, n, 0.02);
    REQUIRE(enc.lo <= 1.0 / n + 1e-12);
    REQUIRE(enc.hi >= 1.0 / n - 1e-12);
    REQUIRE(enc.hi - enc.lo <= 0.05);
  }
  // J_n(R) = 1 - 1/n sits inside [1 - hi, 1 - lo] by the above.
}

TEST_CASE("grid DP agrees with brute-force product enumeration") {
  Space line = Space::lp(2.0, 1);
  for (double step : {0.25, 0.4}) {
    for (int n = 1; n <= 3; ++n) {
      MarginEnclosure enc = j_certify_grid(line, n, step);
      double brute = brute_grid_margin_1d(line, n, step);
      REQUIRE(enc.lo == Approx(brute).margin(1e-12));
    }
  }
}

TEST_CASE("grid certification at dimension two finds the sup on l_inf") {
  MarginEnclosure enc = j_certify_grid(Space::linf(2), 2, 0.5);
  CHECK(enc.lo == Approx(1.0).margin(1e-12));  // the corner witness is on the grid
  CHECK(enc.hi >= 1.0);
}

TEST_CASE("one-point grid still yields a valid enclosure") {
  MarginEnclosure enc = j_certify_grid(Space::lp(2.0, 1), 3, 2.0);
  CHECK(enc.lo == 0.0);
  CHECK(enc.hi >= 1.0);  // sup-margin <= 1 always, so the enclosure holds vacuously
}

TEST_CASE("grid budget is enforced") {
  CHECK_THROWS_AS(j_certify_grid(Space::lp(2.0, 2), 4, 0.02, 1000), budget_exhausted);
}

TEST_CASE("n (1 - sup margin) is non-decreasing on the line within enclosure widths") {
  Space line = Space::lp(2.0, 1);
  double prev_hi = 0.0;
  for (int n = 2; n <= 5; ++n) {
    MarginEnclosure enc = j_certify_grid(line, n, 0.02);
    double lo_n = n * (1.0 - enc.hi);  // lower end of n * J_n enclosure
    double hi_n = n * (1.0 - enc.lo);
    REQUIRE(hi_n >= prev_hi - 1e-9);
    prev_hi = lo_n;
  }
}

TEST_CASE("block transforms: identities and the exact round trip") {
  auto rng = make_rng(5);
  Space s = Space::lp(3.0, 2);
  std::vector<Vec> z;
  for (int h = 0; h < 3; ++h) z.push_back(s.sample_unit_ball(derive_seed(4, h)));

  CHECK(witness_average_block(z, 1) == z);
  CHECK(witness_repeat_block(z, 1) == z);

  auto zz = witness_repeat_block(z, 2);
  REQUIRE(zz.size() == 6);
  CHECK(zz[0] == z[0]);
  CHECK(zz[1] == z[0]);
  CHECK(zz[4] == z[2]);

  // Averaging constants reproduces them; the round trip is exact.
  for (int m : {2, 3, 4}) {
    auto round = witness_average_block(witness_repeat_block(z, m), m);
    REQUIRE(round.size() == z.size());
    for (std::size_t h = 0; h < z.size(); ++h)
      REQUIRE((round[h] - z[h]).cwiseAbs().maxCoeff() <= 1e-12);
    REQUIRE(j_margin(s, round) == Approx(j_margin(s, z)).margin(1e-12));
  }

  CHECK_THROWS_AS(witness_average_block(z, 2), std::invalid_argument);
  (void)rng;
}

TEST_CASE("block transform margin inequalities on random witnesses") {
  for (int n = 2; n <= 4; ++n) {
    for (int m = 2; m <= 4; ++m) {
      for (int trial = 0; trial < 12; ++trial) {
        Space s = Space::lp(trial % 2 ? 2.0 : 1.0, 2);
        std::vector<Vec> z;
        for (int h = 0; h < n; ++h)
          z.push_back(s.sample_unit_ball(derive_seed(1000 + trial, n * m + h)));
        double base = j_margin(s, z);
        // Repeating blocks loses at most 1/n of margin.
        double rep = j_margin(s, witness_repeat_block(z, m));
        REQUIRE(rep >= base - 1.0 / n - 1e-12);
        // Averaging blocks of a longer witness never decreases the margin.
        std::vector<Vec> zz;
        for (int h = 0; h < n * m; ++h)
          zz.push_back(s.sample_unit_ball(derive_seed(2000 + trial, h)));
        REQUIRE(j_margin(s, witness_average_block(zz, m)) >= j_margin(s, zz) - 1e-12);
      }
    }
  }
}

TEST_CASE("l_q example witness: certified margins and evaluated margins") {
  {
    JWitness w = lq_example_witness(Exponent::inf(), 2);
    CHECK(w.z[0] == vec({-1, 1}));
    CHECK(w.z[1] == vec({-1, -1}));
    CHECK(w.margin == 1.0);
    CHECK(j_margin(w.space, w.z) == Approx(1.0).margin(1e-15));
  }
  {
    // Hand evaluation for q = 2, n = 4: every split sum is a shift of
    // (2, 4, 2, 0)/sqrt(4), so the margin is sqrt(24)/8.
    JWitness w = lq_example_witness(Exponent::finite(2.0), 4);
    CHECK(w.margin == Approx(0.5).margin(1e-15));
    CHECK(j_margin(w.space, w.z) == Approx(std::sqrt(24.0) / 8.0).margin(1e-12));
  }
  {
    JWitness w = lq_example_witness(Exponent::finite(1.0), 3);
    CHECK(w.margin == Approx(1.0 / 3.0).margin(1e-15));
    // Hand evaluation: split sums have |.|_1 = 5, witness scaled by 1/3.
    CHECK(j_margin(w.space, w.z) == Approx(5.0 / 9.0).margin(1e-12));
  }

  // The stored margin is always a certified lower bound for the evaluation,
  // tight exactly for q = inf or n <= 2.
  std::vector<Exponent> qs{Exponent::finite(1.0), Exponent::finite(2.0), Exponent::finite(4.0),
                           Exponent::finite(10.0), Exponent::inf()};
  for (const Exponent& q : qs) {
    for (int n = 1; n <= 8; ++n) {
      JWitness w = lq_example_witness(q, n);
      double eval = j_margin(w.space, w.z);
      double expected = q.is_inf() ? 1.0 : std::pow(n, -1.0 / q.value());
      REQUIRE(w.margin == Approx(expected).margin(1e-12));
      REQUIRE(eval >= w.margin - 1e-12);
      if (q.is_inf() || n <= 2) REQUIRE(eval == Approx(w.margin).margin(1e-12));
      CHECK_NOTHROW(validate_witness(w));
    }
  }
}

TEST_CASE("exact line values") {
  CHECK(real_line_value(1).num == 0);
  CHECK(real_line_value(2).num == 1);
  CHECK(real_line_value(2).den == 2);
  CHECK(real_line_value(3).value() == Approx(2.0 / 3.0).margin(1e-15));
  CHECK_THROWS_AS(real_line_value(0), std::invalid_argument);
}

TEST_CASE("finite l2-sum probe: search margins reported, no assertion") {
  // Records how the searched margin moves between X and the l2-sum of two
  // copies; informational only.
  Space x = Space::lp(1.0, 3);
  Space xx = Space::l2_sum(x, 2);
  JWitness wx = j_upper_search(x, 3, 7, 8, 150);
  JWitness wxx = j_upper_search(xx, 3, 7, 8, 150);
  std::cout << "[probe] margin(" << x.spec() << ", n=3) = " << wx.margin << ", margin("
            << xx.spec() << ", n=3) = " << wxx.margin << "\n";
  CHECK(wx.margin >= 0.0);
  CHECK(wxx.margin >= 0.0);
}
