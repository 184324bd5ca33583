#pragma once

// Interval-family combinatorics (sequences of m consecutive integer
// intervals with endpoints in a ground set, identified with 2m-subsets) and
// explicit monochromatic-subset search for colorings of k-subsets.

#include "jsum/numerics.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace jsum {

// F = (F_1, ..., F_m) with F_j = {l_j, l_j+1, ..., r_j} as sets of integers,
// l_j, r_j in the ground set M, and l_j < r_j < l_{j+1}.
struct IntervalFamily {
  std::vector<int> ground;
  std::vector<std::pair<int, int>> intervals;

  IntervalFamily(std::vector<int> m, std::vector<std::pair<int, int>> ivs)
      : ground(std::move(m)), intervals(std::move(ivs)) {
    validate();
  }

  int size() const { return static_cast<int>(intervals.size()); }

  // Bijection with 2m-subsets of M: flatten the endpoints.
  std::vector<int> endpoint_subset() const {
    std::vector<int> s;
    s.reserve(intervals.size() * 2);
    for (auto [l, r] : intervals) {
      s.push_back(l);
      s.push_back(r);
    }
    return s;
  }

  static IntervalFamily from_subset(const std::vector<int>& ground,
                                    const std::vector<int>& subset) {
    if (subset.empty() || subset.size() % 2 != 0)
      throw std::invalid_argument("interval family: subset size must be even and positive");
    std::vector<std::pair<int, int>> ivs;
    for (std::size_t i = 0; i + 1 < subset.size(); i += 2)
      ivs.emplace_back(subset[i], subset[i + 1]);
    return IntervalFamily(ground, std::move(ivs));
  }

  // Prefix family (F_1, ..., F_j).
  IntervalFamily prefix(int j) const {
    if (j < 1 || j > size()) throw std::invalid_argument("prefix index out of range");
    return IntervalFamily(ground,
                          std::vector<std::pair<int, int>>(intervals.begin(), intervals.begin() + j));
  }

  bool operator==(const IntervalFamily& o) const {
    return ground == o.ground && intervals == o.intervals;
  }

 private:
  void validate() const {
    if (ground.empty()) throw std::invalid_argument("interval family: empty ground set");
    for (std::size_t i = 0; i < ground.size(); ++i) {
      if (ground[i] < 1 || (i > 0 && ground[i] <= ground[i - 1]))
        throw std::invalid_argument("interval family: ground set must be sorted, distinct, positive");
    }
    if (intervals.empty()) throw std::invalid_argument("interval family: no intervals");
    int prev_r = 0;
    bool first = true;
    for (auto [l, r] : intervals) {
      if (!std::binary_search(ground.begin(), ground.end(), l) ||
          !std::binary_search(ground.begin(), ground.end(), r))
        throw std::invalid_argument("interval family: endpoint not in ground set");
      if (!(l < r)) throw std::invalid_argument("interval family: requires l < r");
      if (!first && !(prev_r < l))
        throw std::invalid_argument("interval family: intervals must be consecutive");
      prev_r = r;
      first = false;
    }
  }
};

// Lazy enumeration of all C(|M|, 2m) families over M in lexicographic
// subset order.
class IntervalFamilyCursor {
 public:
  IntervalFamilyCursor(std::vector<int> ground, int m)
      : ground_(std::move(ground)), k_(2 * m) {
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    if (static_cast<int>(ground_.size()) < k_)
      throw std::invalid_argument("ground set smaller than 2m");
    idx_.resize(k_);
    for (int i = 0; i < k_; ++i) idx_[i] = i;
    done_ = false;
  }

  std::optional<IntervalFamily> next() {
    if (done_) return std::nullopt;
    std::vector<int> subset(k_);
    for (int i = 0; i < k_; ++i) subset[i] = ground_[idx_[i]];
    IntervalFamily out = IntervalFamily::from_subset(ground_, subset);
    advance();
    return out;
  }

 private:
  void advance() {
    const int n = static_cast<int>(ground_.size());
    int i = k_ - 1;
    while (i >= 0 && idx_[i] == n - k_ + i) --i;
    if (i < 0) {
      done_ = true;
      return;
    }
    ++idx_[i];
    for (int j = i + 1; j < k_; ++j) idx_[j] = idx_[j - 1] + 1;
  }

  std::vector<int> ground_;
  int k_;
  std::vector<int> idx_;
  bool done_ = true;
};

inline std::vector<IntervalFamily> enumerate_interval_families(const std::vector<int>& m_set,
                                                               int m) {
  IntervalFamilyCursor cur(m_set, m);
  std::vector<IntervalFamily> out;
  while (auto fam = cur.next()) out.push_back(std::move(*fam));
  return out;
}

// ---------------------------------------------------------------------------
// Monochromatic subset search.

using Coloring = std::function<int(const std::vector<int>&)>;  // sorted k-subset -> 1..r

enum class MonoStatus { Found, NoneExists, BudgetExhausted };

struct MonoResult {
  MonoStatus status = MonoStatus::BudgetExhausted;
  std::vector<int> subset;
  int color = 0;
  long long evals = 0;  // coloring evaluations spent (memoized)
};

namespace detail {

class MemoColoring {
 public:
  MemoColoring(const Coloring& f, int r, long long budget) : f_(f), r_(r), budget_(budget) {}

  int color(const std::vector<int>& subset) {
    auto it = memo_.find(subset);
    if (it != memo_.end()) return it->second;
    if (evals_ >= budget_) throw budget_exhausted("monochromatic_search: coloring budget spent");
    ++evals_;
    int c = f_(subset);
    if (c < 1 || c > r_)
      throw std::invalid_argument("monochromatic_search: coloring returned value outside 1..r");
    memo_.emplace(subset, c);
    return c;
  }

  long long evals() const { return evals_; }

 private:
  const Coloring& f_;
  int r_;
  long long budget_;
  long long evals_ = 0;
  std::map<std::vector<int>, int> memo_;
};

// All k-subsets of `set` that contain its last element share color c?
inline bool closing_subsets_match(MemoColoring& memo, const std::vector<int>& set, int k, int c) {
  const int n = static_cast<int>(set.size());
  std::vector<int> pick(k - 1);
  std::vector<int> idx(k - 1);
  for (int i = 0; i < k - 1; ++i) idx[i] = i;
  if (k == 1) {
    std::vector<int> single{set.back()};
    return memo.color(single) == c;
  }
  while (true) {
    std::vector<int> subset(k);
    for (int i = 0; i < k - 1; ++i) subset[i] = set[idx[i]];
    subset[k - 1] = set.back();
    if (memo.color(subset) != c) return false;
    int i = k - 2;
    while (i >= 0 && idx[i] == n - 1 - (k - 1) + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k - 1; ++j) idx[j] = idx[j - 1] + 1;
  }
  return true;
}

// Depth-first search over ascending subsets, pruning any extension whose
// closing k-subsets break the color.  Complete: if it returns without
// hitting the budget, no monochromatic target-subset of this color exists.
inline bool mono_dfs(MemoColoring& memo, std::vector<int>& chosen, int next, int ground_n, int k,
                     int c, int target, std::vector<int>& found) {
  if (static_cast<int>(chosen.size()) == target) {
    found = chosen;
    return true;
  }
  int remaining_needed = target - static_cast<int>(chosen.size());
  for (int v = next; v <= ground_n - remaining_needed + 1; ++v) {
    chosen.push_back(v);
    bool ok = static_cast<int>(chosen.size()) < k ||
              closing_subsets_match(memo, chosen, k, c);
    if (ok && mono_dfs(memo, chosen, v + 1, ground_n, k, c, target, found)) return true;
    chosen.pop_back();
  }
  return false;
}

}  // namespace detail

// Searches {1..N} for a subset M with |M| >= target whose k-subsets all get
// one color.  Strategy: test the full ground set, then a complete
// backtracking search per color under the evaluation budget.  A returned
// subset is always re-verified exhaustively; NoneExists is only reported
// when the search space was fully explored.
inline MonoResult monochromatic_search(int grounds_n, int k, int r, const Coloring& f, int target,
                                       long long budget = 2'000'000) {
  if (grounds_n < k || k < 1 || r < 1) throw std::invalid_argument("monochromatic_search: need N >= k >= 1, r >= 1");
  if (target < k) throw std::invalid_argument("monochromatic_search: target must be >= k");
  if (target > grounds_n) return MonoResult{MonoStatus::NoneExists, {}, 0, 0};

  detail::MemoColoring memo(f, r, budget);
  auto verify = [&](const std::vector<int>& m_set, int c) {
    const int n = static_cast<int>(m_set.size());
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      std::vector<int> subset(k);
      for (int i = 0; i < k; ++i) subset[i] = m_set[idx[i]];
      if (memo.color(subset) != c) return false;
      int i = k - 1;
      while (i >= 0 && idx[i] == n - k + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return true;
  };

  try {
    // (a) Is the whole ground set already monochromatic?  Bails at the first
    // mismatch, so this is cheap unless the coloring is near-constant.
    {
      std::vector<int> all(grounds_n);
      for (int i = 0; i < grounds_n; ++i) all[i] = i + 1;
      std::vector<int> first(k);
      for (int i = 0; i < k; ++i) first[i] = i + 1;
      int c0 = memo.color(first);
      if (verify(all, c0)) {
        std::vector<int> m_set(all.begin(), all.begin() + target);
        return MonoResult{MonoStatus::Found, m_set, c0, memo.evals()};
      }
    }
    // (b)+(c) Complete backtracking per color.
    for (int c = 1; c <= r; ++c) {
      std::vector<int> chosen, found;
      if (detail::mono_dfs(memo, chosen, 1, grounds_n, k, c, target, found)) {
        if (!verify(found, c))
          throw check_failed("monochromatic_search: candidate failed re-verification");
        return MonoResult{MonoStatus::Found, found, c, memo.evals()};
      }
    }
    return MonoResult{MonoStatus::NoneExists, {}, 0, memo.evals()};
  } catch (const budget_exhausted&) {
    return MonoResult{MonoStatus::BudgetExhausted, {}, 0, memo.evals()};
  }
}

}  // namespace jsum
