#include "jsum/ramsey.hpp"

#include "test_util.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <set>

using namespace jsum;

TEST_CASE("interval family validation") {
  std::vector<int> m{1, 2, 3, 4, 7, 9};
  CHECK_NOTHROW(IntervalFamily(m, {{1, 3}, {4, 9}}));
  CHECK_THROWS_AS(IntervalFamily(m, {{3, 1}}), std::invalid_argument);        // l >= r
  CHECK_THROWS_AS(IntervalFamily(m, {{1, 4}, {3, 9}}), std::invalid_argument);  // overlap
  CHECK_THROWS_AS(IntervalFamily(m, {{1, 5}}), std::invalid_argument);        // 5 not in M
  CHECK_THROWS_AS(IntervalFamily({3, 2, 1}, {{1, 2}}), std::invalid_argument);  // unsorted
}

TEST_CASE("enumeration matches the binomial count and the bijection round-trips") {
  {
    std::vector<int> m{1, 2, 3, 4};
    auto fams = enumerate_interval_families(m, 2);
    REQUIRE(fams.size() == 1);
    CHECK(fams[0].intervals == std::vector<std::pair<int, int>>{{1, 2}, {3, 4}});
  }
  {
    std::vector<int> m{1, 2, 3, 4, 5};
    CHECK(enumerate_interval_families(m, 2).size() == 5);
  }
  for (int size = 4; size <= 12; ++size) {
    std::vector<int> m;
    for (int i = 1; i <= size; ++i) m.push_back(2 * i + 3);  // arbitrary sorted ground set
    for (int half = 1; 2 * half <= size && half <= 3; ++half) {
      auto fams = enumerate_interval_families(m, half);
      REQUIRE(static_cast<long long>(fams.size()) == jsum_test::binomial(size, 2 * half));
      std::set<std::vector<int>> seen;
      for (const IntervalFamily& f : fams) {
        auto subset = f.endpoint_subset();
        REQUIRE(IntervalFamily::from_subset(m, subset) == f);
        seen.insert(subset);
      }
      REQUIRE(seen.size() == fams.size());
    }
  }
}

TEST_CASE("prefix families") {
  std::vector<int> m{1, 2, 3, 4, 5, 6};
  IntervalFamily f(m, {{1, 2}, {3, 4}, {5, 6}});
  CHECK(f.prefix(3) == f);
  CHECK(f.prefix(1).intervals == std::vector<std::pair<int, int>>{{1, 2}});
  CHECK(f.prefix(2).prefix(1) == f.prefix(1));
  CHECK_THROWS_AS(f.prefix(0), std::invalid_argument);
  CHECK_THROWS_AS(f.prefix(4), std::invalid_argument);
}

TEST_CASE("constant coloring returns the leading segment") {
  Coloring constant = [](const std::vector<int>&) { return 1; };
  MonoResult r = monochromatic_search(8, 2, 3, constant, 4);
  REQUIRE(r.status == MonoStatus::Found);
  CHECK(r.subset == std::vector<int>{1, 2, 3, 4});
  CHECK(r.color == 1);
}

TEST_CASE("every 2-coloring of pairs on 6 points has a monochromatic triangle") {
  // R(3,3) = 6: exhaustive over all 2^15 colorings.
  std::vector<std::pair<int, int>> pairs;
  for (int i = 1; i <= 6; ++i)
    for (int j = i + 1; j <= 6; ++j) pairs.emplace_back(i, j);
  REQUIRE(pairs.size() == 15);
  for (long mask = 0; mask < (1L << 15); ++mask) {
    Coloring f = [&](const std::vector<int>& s) {
      for (std::size_t i = 0; i < pairs.size(); ++i)
        if (pairs[i] == std::make_pair(s[0], s[1])) return 1 + static_cast<int>((mask >> i) & 1);
      throw std::logic_error("unknown pair");
    };
    MonoResult r = monochromatic_search(6, 2, 2, f, 3);
    REQUIRE(r.status == MonoStatus::Found);
    REQUIRE(r.subset.size() == 3);
  }
}

TEST_CASE("the pentagon coloring of 5 points has no monochromatic triangle") {
  // Edges of the 5-cycle get color 1, diagonals color 2; both graphs are C5.
  Coloring f = [](const std::vector<int>& s) {
    int d = s[1] - s[0];
    return (d == 1 || d == 4) ? 1 : 2;
  };
  MonoResult r = monochromatic_search(5, 2, 2, f, 3);
  CHECK(r.status == MonoStatus::NoneExists);
}

TEST_CASE("budget exhaustion is reported distinctly") {
  Coloring f = [](const std::vector<int>& s) { return 1 + (s[0] + s[1]) % 2; };
  MonoResult r = monochromatic_search(12, 2, 2, f, 6, /*budget=*/3);
  CHECK(r.status == MonoStatus::BudgetExhausted);
  CHECK(r.evals <= 3);
}

TEST_CASE("colorings are memoized and validated") {
  long long raw_calls = 0;
  Coloring f = [&raw_calls](const std::vector<int>&) {
    ++raw_calls;
    return 1;
  };
  MonoResult r = monochromatic_search(7, 2, 2, f, 7);
  REQUIRE(r.status == MonoStatus::Found);
  CHECK(raw_calls == jsum_test::binomial(7, 2));  // each pair evaluated once

  Coloring bad = [](const std::vector<int>&) { return 99; };
  CHECK_THROWS_AS(monochromatic_search(4, 2, 2, bad, 3), std::invalid_argument);
}

TEST_CASE("target larger than the ground set cannot exist") {
  Coloring constant = [](const std::vector<int>&) { return 1; };
  CHECK(monochromatic_search(4, 2, 2, constant, 5).status == MonoStatus::NoneExists);
}
