#pragma once

// J-convexity margins and witnesses: margin evaluation, randomized upper
// bound search, certified grid enclosures at tiny dimension, block
// transforms between witness lengths, and the explicit l_q witness family.

#include "jsum/spaces.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <vector>

namespace jsum {

// A tuple z_1..z_n in the unit ball together with a certified margin:
// j_margin(space, z) >= margin - kAlgTol always holds.  Searches store the
// evaluated margin (tight); analytic constructions may store a certified
// lower bound that the evaluation can exceed.
struct JWitness {
  Space space;
  int n = 0;
  std::vector<Vec> z;
  double margin = 0.0;
};

// (1/n) * min over split points k of || sum_{h<=k} z_h - sum_{h>k} z_h ||.
// Requires every z_h in the unit ball (within kAlgTol); the value then lies
// in [0, 1].
inline double j_margin(const Space& space, const std::vector<Vec>& z) {
  if (z.empty()) throw std::invalid_argument("j_margin: empty witness");
  const int n = static_cast<int>(z.size());
  for (const Vec& v : z) {
    if (!(space.norm(v) <= 1.0 + kAlgTol))
      throw std::invalid_argument("j_margin: witness vector outside the unit ball");
  }
  Vec total = Vec::Zero(space.dim());
  for (const Vec& v : z) total += v;
  Vec prefix = Vec::Zero(space.dim());
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    prefix += z[k];
    best = std::min(best, space.norm(2.0 * prefix - total));
  }
  return best / n;
}

inline void validate_witness(const JWitness& w) {
  if (w.n < 1 || static_cast<int>(w.z.size()) != w.n)
    throw std::invalid_argument("witness: n does not match vector count");
  double m = j_margin(w.space, w.z);  // also validates ball membership
  if (m < w.margin - kAlgTol)
    throw std::invalid_argument("witness: stored margin exceeds evaluated margin");
}

// Random restarts plus coordinate ascent on the active minimal split term;
// each z_h is re-projected onto the ball by radial scaling after every step.
// Returns the best witness found with its evaluated margin; deterministic
// for a fixed seed.
inline JWitness j_upper_search(const Space& space, int n, std::uint64_t seed, int restarts,
                               int iters) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (restarts < 1 || iters < 1) throw std::invalid_argument("restarts/iters must be >= 1");
  const int d = space.dim();
  if (n == 1) {
    // Any unit vector attains the trivial margin 1.
    Vec e1 = Vec::Zero(d);
    e1[0] = 1.0;
    return JWitness{space, 1, {e1}, 1.0};
  }

  std::vector<Vec> best_z;
  double best_margin = -1.0;
  for (int r = 0; r < restarts; ++r) {
    auto rng = make_rng(derive_seed(seed, 1000003ULL * r));
    std::vector<Vec> z(n);
    for (int h = 0; h < n; ++h)
      z[h] = space.sample_unit_ball(derive_seed(seed, 17ULL + r * 131ULL + h));

    Vec prefix(d), total(d);
    for (int t = 1; t <= iters; ++t) {
      total.setZero();
      for (const Vec& v : z) total += v;
      prefix.setZero();
      int active = 0;
      double active_norm = std::numeric_limits<double>::infinity();
      Vec active_w(d);
      for (int k = 0; k < n; ++k) {
        prefix += z[k];
        Vec w = 2.0 * prefix - total;
        double nm = space.norm(w);
        if (nm < active_norm) {
          active_norm = nm;
          active = k;
          active_w = w;
        }
      }
      Vec dir;
      if (active_norm < 1e-12) {
        dir = gaussian_vector(d, rng);
        double nm = space.dual_norm(dir);
        if (nm == 0.0) continue;
        dir /= nm;
      } else {
        dir = space.norming_functional(active_w);
      }
      double step = 0.35 / std::sqrt(static_cast<double>(t));
      for (int h = 0; h < n; ++h) {
        z[h] += (h <= active ? step : -step) * dir;
        double nm = space.norm(z[h]);
        if (nm > 1.0) z[h] /= nm;
      }
      double m = j_margin(space, z);
      if (m > best_margin) {
        best_margin = m;
        best_z = z;
      }
    }
  }
  return JWitness{space, n, best_z, best_margin};
}

// Certified enclosure [lo, hi] of the supremum margin over the unit ball:
// lo is the best margin over a finite grid, and hi adds the covering slack.
// The margin moves by at most max_h ||delta z_h||, so a grid whose points
// cover the ball within distance b in the space norm yields hi = lo + b.
struct MarginEnclosure {
  double lo = 0.0;
  double hi = 0.0;
};

namespace detail {

// Exhaustive max-min over the 1-D grid {j*step : |j| <= J} via dynamic
// programming on integer prefix sums; exactly equals brute-force product
// enumeration of the same grid but runs in polynomial time.
inline double grid_best_margin_1d(int n, int J, double step) {
  const int INF = std::numeric_limits<int>::max() / 4;
  const int range = n * J;
  const int width = 2 * range + 1;
  std::vector<int> prev(width, -1), cur(width, -1);
  int best_units = -1;
  for (int s = -range; s <= range; ++s) {
    std::fill(prev.begin(), prev.end(), -1);
    prev[range] = INF;  // empty prefix at p = 0
    for (int h = 1; h <= n; ++h) {
      std::fill(cur.begin(), cur.end(), -1);
      const int plo = -std::min(h * J, range), phi = std::min(h * J, range);
      // Sliding-window maximum of prev over [p-J, p+J].
      std::deque<int> win;  // indices into prev, values decreasing
      int next_push = plo - J;
      for (int p = plo; p <= phi; ++p) {
        for (; next_push <= p + J; ++next_push) {
          if (next_push < -range || next_push > range) continue;
          int v = prev[next_push + range];
          if (v < 0) continue;
          while (!win.empty() && prev[win.back() + range] <= v) win.pop_back();
          win.push_back(next_push);
        }
        while (!win.empty() && win.front() < p - J) win.pop_front();
        if (win.empty()) continue;
        int reach = prev[win.front() + range];
        cur[p + range] = std::min(reach, std::abs(2 * p - s));
      }
      std::swap(prev, cur);
    }
    best_units = std::max(best_units, prev[s + range]);
  }
  return best_units <= 0 ? 0.0 : step * best_units / n;
}

}  // namespace detail

// Guarantees sup-margin in [lo, hi], hence J_n(X) in [1 - hi, 1 - lo].
// Intended for dim <= 2 and small n; throws budget_exhausted beyond the
// evaluation budget.  Any 1-dimensional space uses the exact DP fast path.
inline MarginEnclosure j_certify_grid(const Space& space, int n, double step,
                                      long long budget = 50'000'000) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  const int d = space.dim();
  const int J = static_cast<int>(std::floor((1.0 + 1e-12) / step));
  // Per-axis covering radius of {j*step} over [-1, 1].
  const double rho = std::max(step / 2.0, 1.0 - J * step);
  const double ones_norm = space.norm(Vec::Ones(d));

  if (d == 1) {
    double lo = detail::grid_best_margin_1d(n, J, step);
    return MarginEnclosure{lo, lo + rho * ones_norm};
  }

  // Generic path: cube grid, radially projected onto the ball.
  std::vector<double> axis;
  for (int j = -J; j <= J; ++j) axis.push_back(j * step);
  long long npoints = 1;
  for (int i = 0; i < d; ++i) {
    npoints *= static_cast<long long>(axis.size());
    if (npoints > budget) throw budget_exhausted("j_certify_grid: grid too large for budget");
  }
  std::vector<Vec> pts;
  pts.reserve(static_cast<std::size_t>(npoints));
  bool projected_any = false;
  {
    std::vector<int> idx(d, 0);
    Vec g(d);
    while (true) {
      for (int i = 0; i < d; ++i) g[i] = axis[idx[i]];
      double nm = space.norm(g);
      if (nm > 1.0 + 1e-15) {
        projected_any = true;
        pts.push_back(g / nm);
      } else {
        pts.push_back(g);
      }
      int i = 0;
      for (; i < d; ++i) {
        if (++idx[i] < static_cast<int>(axis.size())) break;
        idx[i] = 0;
      }
      if (i == d) break;
    }
  }

  double total_work = 1.0;
  for (int h = 0; h < n; ++h) total_work *= static_cast<double>(pts.size());
  if (total_work * n > static_cast<double>(budget))
    throw budget_exhausted("j_certify_grid: grid^n exceeds budget");

  // Depth-first product enumeration with running prefix sums.
  const int m = static_cast<int>(pts.size());
  std::vector<int> choice(n, 0);
  std::vector<Vec> prefix(n + 1, Vec::Zero(d));
  double best = 0.0;
  int depth = 0;
  while (depth >= 0) {
    if (choice[depth] == m) {
      choice[depth] = 0;
      --depth;
      if (depth >= 0) ++choice[depth];
      continue;
    }
    prefix[depth + 1] = prefix[depth] + pts[choice[depth]];
    if (depth + 1 == n) {
      const Vec& total = prefix[n];
      double worst = std::numeric_limits<double>::infinity();
      for (int k = 1; k <= n; ++k)
        worst = std::min(worst, space.norm(2.0 * prefix[k] - total));
      best = std::max(best, worst / n);
      ++choice[depth];
    } else {
      ++depth;
    }
  }

  double cover = rho * ones_norm * (projected_any ? 2.0 : 1.0);
  return MarginEnclosure{best, best + cover};
}

// Block average: n*m vectors -> n vectors, x_h = (1/m) sum of block h.
// Outputs stay in the ball by convexity.
inline std::vector<Vec> witness_average_block(const std::vector<Vec>& z, int m) {
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (z.empty() || z.size() % static_cast<std::size_t>(m) != 0)
    throw std::invalid_argument("witness_average_block: length not divisible by m");
  const int n = static_cast<int>(z.size()) / m;
  std::vector<Vec> out(n);
  for (int h = 0; h < n; ++h) {
    Vec acc = Vec::Zero(z[0].size());
    for (int k = 0; k < m; ++k) acc += z[h * m + k];
    out[h] = acc / m;
  }
  return out;
}

// Block repeat: n vectors -> n*m vectors, each repeated m times in order.
inline std::vector<Vec> witness_repeat_block(const std::vector<Vec>& z, int m) {
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  std::vector<Vec> out;
  out.reserve(z.size() * static_cast<std::size_t>(m));
  for (const Vec& v : z)
    for (int k = 0; k < m; ++k) out.push_back(v);
  return out;
}

// The explicit witness in l_q^n with z_h = x_h / n^{1/q}, where x_h has h
// leading -1 entries followed by n-h entries +1.  Every signed partial sum
// has sup-norm exactly n, and ||.||_q >= ||.||_inf, so the witness certifies
// margin >= n^{-1/q}; that certified value is stored (the evaluated j_margin
// can only exceed it, with equality for q = inf or n <= 2).
inline JWitness lq_example_witness(const Exponent& q, int n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  Space space = Space::lp(q, n);
  const double scale = q.is_inf() ? 1.0 : std::pow(static_cast<double>(n), -1.0 / q.value());
  std::vector<Vec> z(n);
  for (int h = 1; h <= n; ++h) {
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = i < h ? -1.0 : 1.0;
    z[h - 1] = scale * x;
  }
  return JWitness{space, n, std::move(z), scale};
}

// Exact value of J_n(R) as a rational: 1 - 1/n.  The pigeonhole argument on
// sign changes of the split sums bounds every margin by 1/n, and the witness
// (1, 0, ..., 0) attains it.
struct Rational {
  long long num = 0;
  long long den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

inline Rational real_line_value(int n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  return Rational{n - 1, n};
}

}  // namespace jsum
