#pragma once

// From a factorization of S_N with quality sigma to a J-witness with margin
// close to 1 - eps: constrained minimal-norm elements x(F) over interval
// families, geometric bucket colorings of their prefix norms, Ramsey
// extraction of a stable index pattern, and the overlapping interval
// patterns that assemble the witness.  Every inequality the construction
// relies on is re-verified numerically before a witness is returned.

#include "jsum/jconvexity.hpp"
#include "jsum/linprog.hpp"
#include "jsum/operators.hpp"
#include "jsum/ramsey.hpp"
#include "jsum/tower.hpp"

#include <map>
#include <utility>
#include <vector>

namespace jsum {

// Geometric partition of [1/sigma, 2m]: A_i = (1/sigma)[r^{i-1}, r^i) with
// r = 1/(1-eps), for i = 1..m-1.  Covers the interval whenever
// 2 m sigma < r^{m-1}.
struct BucketScheme {
  double sigma = 1.0;
  double eps = 0.5;
  int m = 2;

  double ratio() const { return 1.0 / (1.0 - eps); }
  double lower_edge(int i) const { return std::pow(ratio(), i - 1) / sigma; }
  double upper_edge(int i) const { return std::pow(ratio(), i) / sigma; }

  // Unique i in 1..m-1 with value in A_i; left-closed, right-open.
  int bucket_index(double value) const {
    if (!(value >= lower_edge(1) - 1e-9) || !(value <= 2.0 * m + 1e-9))
      throw check_failed("bucket_index: value " + std::to_string(value) +
                         " outside [1/sigma, 2m]");
    double v = std::max(value, lower_edge(1));
    int i = static_cast<int>(std::floor(std::log(v * sigma) / std::log(ratio()))) + 1;
    i = std::max(1, std::min(m - 1, i));
    while (i > 1 && v < lower_edge(i)) --i;
    while (i < m - 1 && v >= upper_edge(i)) ++i;
    return i;
  }

  // Distance to the nearest boundary between two buckets (the left edge of
  // A_1 is not a misclassification risk: values are pinned above it).
  double interior_boundary_distance(double value) const {
    if (m <= 2) return std::numeric_limits<double>::infinity();
    double lv = std::log(std::max(value * sigma, 1e-300)) / std::log(ratio());
    long long near = std::llround(lv);
    double best = std::numeric_limits<double>::infinity();
    for (long long i = near - 1; i <= near + 1; ++i) {
      if (i < 1 || i > m - 2) continue;
      best = std::min(best, std::abs(value - upper_edge(static_cast<int>(i))));
    }
    return best;
  }
};

struct MinimizeResult {
  Vec xi;              // coefficients over x_1..x_N
  double value = 0.0;  // achieved norm (the feasible upper value)
  double lower = 0.0;  // certified lower bound on the true minimum
  double gap = 0.0;    // value - lower
  std::string certificate;  // "lp_dual" or "dual_pairing"
};

// Minimal-norm elements of
//   S(F) = { sum_h xi_h x_h : |xi_h| <= 2, <x, y_l> = (-1)^j for l in F_j }
// over prefixes of interval families, memoized by endpoint subset.
// Polyhedral norms (p = 1, inf) go through an LP solved to pivot tolerance
// with a dual certificate; other norms use projected subgradient descent
// from the canonical feasible point with a dual-pairing lower bound.
class PrefixMinimizer {
 public:
  PrefixMinimizer(Space space, Mat xcols, Mat yrows, double tol_feas, double tol_solve,
                  std::uint64_t seed = 1)
      : space_(std::move(space)),
        xcols_(std::move(xcols)),
        yrows_(std::move(yrows)),
        gram_(yrows_ * xcols_),
        tol_feas_(tol_feas),
        tol_solve_(tol_solve),
        seed_(seed) {
    if (xcols_.rows() != space_.dim() || yrows_.cols() != space_.dim())
      throw std::invalid_argument("PrefixMinimizer: shape mismatch");
    if (xcols_.cols() != yrows_.rows())
      throw std::invalid_argument("PrefixMinimizer: x/y count mismatch");
  }

  int ground_size() const { return static_cast<int>(xcols_.cols()); }
  const Space& space() const { return space_; }
  const Mat& pairing() const { return gram_; }

  // Constraint system of S(F): one row <., y_l> per integer l covered by an
  // interval, right-hand side (-1)^j.
  void constraint_rows(const IntervalFamily& fam, Mat& g_cov, Vec& rhs) const {
    std::vector<std::pair<int, double>> rows;
    int j = 0;
    for (auto [l, r] : fam.intervals) {
      ++j;
      double sign = (j % 2 == 0) ? 1.0 : -1.0;
      for (int l_pos = l; l_pos <= r; ++l_pos) {
        if (l_pos < 1 || l_pos > ground_size())
          throw std::invalid_argument("constraint index outside ground set");
        rows.emplace_back(l_pos - 1, sign);
      }
    }
    g_cov.resize(static_cast<int>(rows.size()), ground_size());
    rhs.resize(static_cast<int>(rows.size()));
    for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
      g_cov.row(i) = gram_.row(rows[i].first);
      rhs[i] = rows[i].second;
    }
  }

  // The explicit feasible point: coefficient -1 at the first left endpoint
  // and 2*(-1)^i at the i-th left endpoint, when the pairing table is
  // S_N-triangular.  Verified before use; its norm is at most 2m - 1.
  Vec feasible_coeffs(const IntervalFamily& fam) const {
    Vec xi = Vec::Zero(ground_size());
    int i = 0;
    for (auto [l, r] : fam.intervals) {
      ++i;
      xi[l - 1] = (i == 1) ? -1.0 : 2.0 * ((i % 2 == 0) ? 1.0 : -1.0);
    }
    Mat g_cov;
    Vec rhs;
    constraint_rows(fam, g_cov, rhs);
    double resid = (g_cov * xi - rhs).cwiseAbs().maxCoeff();
    if (resid > tol_feas_)
      throw check_failed("feasible point infeasible (residual " + std::to_string(resid) +
                         "); factorization pairing is not triangular");
    return xi;
  }

  const MinimizeResult& solve(const IntervalFamily& fam) {
    std::vector<int> key = fam.endpoint_subset();
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    MinimizeResult res = space_.is_l1() || space_.is_linf() ? solve_lp_path(fam)
                                                            : solve_subgradient(fam);
    check_box_and_feasibility(fam, res.xi);
    return memo_.emplace(std::move(key), std::move(res)).first->second;
  }

  long long solves() const { return static_cast<long long>(memo_.size()); }

 private:
  void check_box_and_feasibility(const IntervalFamily& fam, const Vec& xi) const {
    if (xi.cwiseAbs().maxCoeff() > 2.0 + 1e-9)
      throw check_failed("minimizer violated the box bound");
    Mat g_cov;
    Vec rhs;
    constraint_rows(fam, g_cov, rhs);
    double resid = (g_cov * xi - rhs).cwiseAbs().maxCoeff();
    if (resid > 10.0 * tol_feas_)
      throw check_failed("minimizer constraint residual " + std::to_string(resid));
  }

  MinimizeResult solve_lp_path(const IntervalFamily& fam) const {
    feasible_coeffs(fam);  // certifies feasibility up front
    Mat g_cov;
    Vec rhs;
    constraint_rows(fam, g_cov, rhs);
    const int big_n = ground_size();
    const int d = space_.dim();
    const bool inf_norm = space_.is_linf();
    const int naux = inf_norm ? 1 : d;
    const int nv = big_n + naux;

    double aux_cap = 1.0;
    for (int i = 0; i < d; ++i) aux_cap = std::max(aux_cap, 2.0 * xcols_.row(i).cwiseAbs().sum());
    aux_cap += 1.0;

    LpProblem lp;
    lp.c = Vec::Zero(nv);
    for (int i = 0; i < naux; ++i) lp.c[big_n + i] = 1.0;
    lp.lo = Vec::Zero(nv);
    lp.hi = Vec::Zero(nv);
    lp.lo.head(big_n).setConstant(-2.0);
    lp.hi.head(big_n).setConstant(2.0);
    lp.lo.tail(naux).setConstant(0.0);
    lp.hi.tail(naux).setConstant(aux_cap);

    lp.a_eq = Mat::Zero(g_cov.rows(), nv);
    lp.a_eq.leftCols(big_n) = g_cov;
    lp.b_eq = rhs;

    lp.a_ub = Mat::Zero(2 * d, nv);
    lp.b_ub = Vec::Zero(2 * d);
    for (int i = 0; i < d; ++i) {
      lp.a_ub.row(i).head(big_n) = xcols_.row(i);
      lp.a_ub.row(d + i).head(big_n) = -xcols_.row(i);
      int aux_col = inf_norm ? big_n : big_n + i;
      lp.a_ub(i, aux_col) = -1.0;
      lp.a_ub(d + i, aux_col) = -1.0;
    }

    LpResult r = solve_lp(lp);
    if (r.status == LpResult::Status::Infeasible)
      throw check_failed("x(F) LP reported infeasible despite a feasible point");
    if (r.status == LpResult::Status::IterLimit)
      throw budget_exhausted("x(F) LP hit its iteration limit");

    MinimizeResult res;
    res.xi = r.x.head(big_n);
    res.value = space_.norm(xcols_ * res.xi);
    res.lower = std::min(r.dual_bound, res.value);
    res.gap = res.value - res.lower;
    res.certificate = "lp_dual";
    if (res.gap > tol_solve_)
      throw budget_exhausted("x(F) LP gap " + std::to_string(res.gap) + " above tol_solve");
    return res;
  }

  MinimizeResult solve_subgradient(const IntervalFamily& fam) const {
    Mat g_cov;
    Vec rhs;
    constraint_rows(fam, g_cov, rhs);
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(g_cov);
    auto project_affine = [&](const Vec& v) { return (v - cod.solve(g_cov * v - rhs)).eval(); };
    auto clamp_box = [&](Vec v) {
      for (int i = 0; i < v.size(); ++i) v[i] = std::max(-2.0, std::min(2.0, v[i]));
      return v;
    };
    auto feasible = [&](const Vec& v) {
      return v.cwiseAbs().maxCoeff() <= 2.0 + 1e-9 &&
             (g_cov * v - rhs).cwiseAbs().maxCoeff() <= tol_feas_;
    };
    Vec xi0;
    try {
      xi0 = feasible_coeffs(fam);
    } catch (const check_failed&) {
      // Non-triangular pairing table: start from the least-squares point.
      xi0 = project_affine(Vec::Zero(ground_size()));
      for (int q = 0; q < 6 && !feasible(xi0); ++q) xi0 = project_affine(clamp_box(xi0));
      if (!feasible(xi0))
        throw check_failed("norm minimization: no feasible starting point found");
    }

    const int restarts = 4, iters = 800;
    Vec best_xi = xi0;
    double best_val = space_.norm(xcols_ * xi0);
    std::vector<double> restart_bests;
    auto rng = make_rng(seed_);
    for (int r = 0; r < restarts; ++r) {
      Vec xi = xi0;
      if (r > 0) {
        Vec noise = gaussian_vector(static_cast<int>(xi.size()), rng);
        xi = project_affine(clamp_box(xi0 + 0.3 * noise));
        for (int q = 0; q < 4; ++q) xi = project_affine(clamp_box(xi));
      }
      double local_best = std::numeric_limits<double>::infinity();
      double f0 = std::max(1.0, space_.norm(xcols_ * xi));
      for (int t = 1; t <= iters; ++t) {
        Vec img = xcols_ * xi;
        double f = space_.norm(img);
        if (feasible(xi) && f < local_best) {
          local_best = f;
          if (f < best_val) {
            best_val = f;
            best_xi = xi;
          }
        }
        if (f < 1e-14) break;
        Vec grad = xcols_.transpose() * space_.norming_functional(img);
        double step = 0.4 * f0 / std::sqrt(static_cast<double>(t));
        xi = clamp_box(xi - step * grad / std::max(grad.norm(), 1e-12));
        xi = project_affine(xi);
        for (int q = 0; q < 3 && !feasible(xi); ++q) xi = project_affine(clamp_box(xi));
      }
      restart_bests.push_back(local_best);
    }

    // Certified lower bound: ||x|| >= (lambda . rhs) / ||sum_l lambda_l y_l||*
    // for any multiplier vector lambda over the covered constraints.
    Mat y_cov(g_cov.rows(), space_.dim());
    {
      int i = 0;
      int j = 0;
      for (auto [l, r] : fam.intervals) {
        ++j;
        for (int l_pos = l; l_pos <= r; ++l_pos) y_cov.row(i++) = yrows_.row(l_pos - 1);
      }
      (void)j;
    }
    double lower = 0.0;
    auto pairing_bound = [&](const Vec& lambda) {
      double num = lambda.dot(rhs);
      double den = space_.dual_norm(y_cov.transpose() * lambda);
      if (den <= 1e-15) return 0.0;
      return num / den;
    };
    for (int i = 0; i < static_cast<int>(rhs.size()); ++i) {
      Vec lam = Vec::Zero(rhs.size());
      lam[i] = rhs[i];  // sign-aligned single constraint
      lower = std::max(lower, pairing_bound(lam));
    }
    {
      // Least-squares multiplier candidate.
      Eigen::LDLT<Mat> gram_y((y_cov * y_cov.transpose()) +
                              1e-10 * Mat::Identity(rhs.size(), rhs.size()));
      Vec lam = gram_y.solve(rhs);
      lower = std::max(lower, pairing_bound(lam));
    }
    double spread = 0.0;
    for (double v : restart_bests)
      if (std::isfinite(v)) spread = std::max(spread, v - best_val);

    MinimizeResult res;
    res.xi = best_xi;
    res.value = best_val;
    res.lower = std::min(best_val, std::max(lower, best_val - spread - tol_solve_));
    res.gap = res.value - res.lower;
    res.certificate = "dual_pairing";
    return res;
  }

  Space space_;
  Mat xcols_;   // d x N, columns x_h
  Mat yrows_;   // N x d, rows y_k
  Mat gram_;
  double tol_feas_;
  double tol_solve_;
  std::uint64_t seed_;
  std::map<std::vector<int>, MinimizeResult> memo_;
};

// The 2n overlapping interval patterns over a ground set of exactly 2nm+1
// points p_1 < ... < p_{2nm+1}.
struct PatternSet {
  std::vector<IntervalFamily> f;  // n families of length m
  std::vector<IntervalFamily> e;  // n families of length m (last interval auxiliary)
};

inline PatternSet build_patterns(const std::vector<int>& m_points, int n, int m) {
  if (n < 2 || m < 2) throw std::invalid_argument("build_patterns: need n >= 2 and m >= 2");
  if (static_cast<int>(m_points.size()) != 2 * n * m + 1)
    throw std::invalid_argument("build_patterns: ground set must have exactly 2nm+1 points");
  auto p = [&](int i) {  // 1-based
    if (i < 1 || i > static_cast<int>(m_points.size()))
      throw std::logic_error("pattern index out of range");
    return m_points[i - 1];
  };
  PatternSet out;
  for (int h = 1; h <= n; ++h) {
    std::vector<std::pair<int, int>> ivs;
    for (int j = 1; j <= m; ++j) {
      if (j == 1)
        ivs.emplace_back(p(h), p(n + 2 * h - 1));
      else if (j < m)
        ivs.emplace_back(p(n * (2 * j - 3) + 2 * h), p(n * (2 * j - 1) + 2 * h - 1));
      else
        ivs.emplace_back(p(n * (2 * m - 3) + 2 * h), p(n * (2 * m - 1) + h));
    }
    out.f.emplace_back(m_points, std::move(ivs));
  }
  for (int k = 1; k <= n; ++k) {
    std::vector<std::pair<int, int>> ivs;
    for (int j = 1; j <= m - 1; ++j)
      ivs.emplace_back(p(n * (2 * j - 1) + 2 * k), p(n * (2 * j - 1) + 2 * k + 1));
    ivs.emplace_back(p(2 * n * m), p(2 * n * m + 1));  // auxiliary last interval
    out.e.emplace_back(m_points, std::move(ivs));
  }
  return out;
}

// Least j >= 2 whose consecutive prefix-minimizer norms share a bucket;
// exists by monotonicity and pigeonhole over the m-1 buckets.
inline int stable_prefix_color(const std::vector<double>& values, const BucketScheme& scheme) {
  const int m = static_cast<int>(values.size());
  for (int j = 2; j <= m; ++j)
    if (scheme.bucket_index(values[j - 2]) == scheme.bucket_index(values[j - 1])) return j;
  throw check_failed("no stable prefix pair found; solver tolerance too loose");
}

struct ExtractionOptions {
  double tol_feas = 1e-8;
  double tol_solve = 1e-6;
  long long coloring_budget = 20000;
  std::uint64_t seed = 1;
};

struct ExtractionReport {
  int n = 0;
  long long m = 0;
  int j0 = 0;
  int i0 = 0;
  std::vector<int> l_set;  // stage-1 monochromatic subset (ground set if direct)
  std::vector<int> m_set;  // final 2nm+1 pattern points
  JWitness witness;
  std::vector<double> solver_gaps;
  bool direct_mode = false;
  double sigma = 0.0;
  double eps = 0.0;
  double slack = 0.0;  // margin slack attributable to solver gaps
  std::vector<std::vector<double>> f_prefix_values;
  std::vector<std::vector<double>> e_prefix_values;
  std::string ground_bound;          // symbolic worst-case ground-set bound
  std::string ground_bound_formula;  // the nested Ramsey expression it bounds
};

namespace detail {

struct FamilyAnalysis {
  std::vector<double> values;
  int f_color = 0;
  int g_color = 0;
};

inline FamilyAnalysis analyze_family(PrefixMinimizer& ctx, const IntervalFamily& fam,
                                     const BucketScheme& scheme, double sigma, long long m,
                                     double tol_solve) {
  FamilyAnalysis out;
  for (int j = 1; j <= fam.size(); ++j) {
    const MinimizeResult& res = ctx.solve(fam.prefix(j));
    double v = res.value;
    if (v < 1.0 / sigma - 10.0 * tol_solve || v > 2.0 * m - 1.0 + 10.0 * tol_solve)
      throw check_failed("prefix value " + std::to_string(v) + " violates [1/sigma, 2m-1]");
    if (!out.values.empty() && out.values.back() > v + tol_solve)
      throw check_failed("prefix values not monotone; solver tolerance too loose");
    if (scheme.interior_boundary_distance(v) < 10.0 * tol_solve)
      throw check_failed("prefix value " + std::to_string(v) + " straddles a bucket boundary");
    out.values.push_back(v);
  }
  out.f_color = stable_prefix_color(out.values, scheme);
  out.g_color = scheme.bucket_index(out.values[out.f_color - 1]);
  return out;
}

}  // namespace detail

// Runs the construction on whatever ground set the input factorization
// provides.  The worst-case sufficient ground size is tower-sized and only
// reported symbolically; the pipeline first checks whether the two colorings
// are already constant across the pattern families it actually uses (true
// for the canonical instances) and falls back to explicit monochromatic
// search otherwise.  Every bucket membership, S-membership and the final
// inequality chain are verified before the witness is returned.
inline ExtractionReport extract_witness(const Factorization& fact, int n, double eps,
                                        const ExtractionOptions& opt = {}) {
  if (n < 2) throw std::invalid_argument("extract_witness: n >= 2 required");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("extract_witness: eps in (0,1)");
  if (!fact.valid || fact.defect > kAlgTol)
    throw std::invalid_argument("extract_witness: factorization defect above tolerance");

  // Normalize ||A|| = 1 exactly by a global scale that B absorbs; the
  // pairing table and sigma are unchanged.
  const double a_norm = norm_from_l1(fact.a);
  if (!(a_norm > 0.0)) throw std::invalid_argument("extract_witness: zero operator A");
  Mat xcols = fact.a.matrix / a_norm;
  Mat yrows = fact.b.matrix * a_norm;
  const Space& space = fact.a.codomain;
  const double sigma =
      norm_to_linf(LinOperator(yrows, space, Space::linf(fact.n)));

  const long long m = choose_m(sigma, eps);
  const int big_n = fact.n;
  const long long need = 2LL * n * m + 1;
  if (big_n < need)
    throw std::invalid_argument("extract_witness: ground set too small (N = " +
                                std::to_string(big_n) + " < 2nm+1 = " + std::to_string(need) + ")");

  BucketScheme scheme{sigma, eps, static_cast<int>(m)};
  PrefixMinimizer ctx(space, xcols, yrows, opt.tol_feas, opt.tol_solve, opt.seed);

  ExtractionReport rep;
  rep.n = n;
  rep.m = m;
  rep.sigma = sigma;
  rep.eps = eps;
  {
    GroundSetBound gb = ground_set_bound(n, sigma, eps);
    rep.ground_bound = gb.outer.str();
    rep.ground_bound_formula = gb.formula;
  }

  std::vector<int> ground(big_n);
  for (int i = 0; i < big_n; ++i) ground[i] = i + 1;

  auto analyze_patterns = [&](const std::vector<int>& pts, int& j0, int& i0, PatternSet& pat,
                              std::vector<std::vector<double>>& fv,
                              std::vector<std::vector<double>>& ev, bool throw_on_mismatch) {
    pat = build_patterns(pts, n, static_cast<int>(m));
    fv.clear();
    ev.clear();
    j0 = i0 = 0;
    bool consistent = true;
    for (const auto* group : {&pat.f, &pat.e}) {
      for (const IntervalFamily& fam : *group) {
        auto an = detail::analyze_family(ctx, fam, scheme, sigma, m, opt.tol_solve);
        (group == &pat.f ? fv : ev).push_back(an.values);
        if (j0 == 0) {
          j0 = an.f_color;
          i0 = an.g_color;
        } else if (an.f_color != j0 || an.g_color != i0) {
          consistent = false;
          if (throw_on_mismatch)
            throw check_failed("pattern families disagree on (j0, i0) after extraction");
        }
      }
    }
    return consistent;
  };

  // Direct mode: colorings constant across the families the construction uses.
  std::vector<int> m_pts(ground.begin(), ground.begin() + need);
  PatternSet pat;
  int j0 = 0, i0 = 0;
  bool direct = analyze_patterns(m_pts, j0, i0, pat, rep.f_prefix_values, rep.e_prefix_values,
                                 /*throw_on_mismatch=*/false);
  if (direct) {
    rep.direct_mode = true;
    rep.l_set = ground;
    rep.m_set = m_pts;
  } else {
    // Ramsey fallback: extract a stable-prefix-monochromatic subset first,
    // then a bucket-monochromatic subset inside it.
    auto f_coloring = [&](const std::vector<int>& subset) {
      IntervalFamily fam = IntervalFamily::from_subset(ground, subset);
      return detail::analyze_family(ctx, fam, scheme, sigma, m, opt.tol_solve).f_color;
    };
    long long slack_pts = std::min<long long>(big_n - need, 2 * m);
    int target_l = static_cast<int>(need + slack_pts);
    MonoResult r1 = monochromatic_search(big_n, static_cast<int>(2 * m), static_cast<int>(m),
                                         f_coloring, target_l, opt.coloring_budget);
    if (r1.status != MonoStatus::Found)
      throw budget_exhausted(r1.status == MonoStatus::NoneExists
                                 ? "Ramsey extraction: no stable-prefix monochromatic subset in "
                                   "this ground set"
                                 : "Ramsey extraction: coloring budget exhausted (stage 1)");
    j0 = r1.color;
    std::vector<int> l_set = r1.subset;
    auto g_coloring = [&](const std::vector<int>& idx_subset) {
      std::vector<int> subset;
      subset.reserve(idx_subset.size());
      for (int i : idx_subset) subset.push_back(l_set[i - 1]);
      IntervalFamily fam = IntervalFamily::from_subset(l_set, subset);
      auto an = detail::analyze_family(ctx, fam, scheme, sigma, m, opt.tol_solve);
      return an.g_color;
    };
    MonoResult r2 = monochromatic_search(static_cast<int>(l_set.size()), static_cast<int>(2 * m),
                                         static_cast<int>(m), g_coloring,
                                         static_cast<int>(need), opt.coloring_budget);
    if (r2.status != MonoStatus::Found)
      throw budget_exhausted(r2.status == MonoStatus::NoneExists
                                 ? "Ramsey extraction: no bucket-monochromatic subset in stage 2"
                                 : "Ramsey extraction: coloring budget exhausted (stage 2)");
    i0 = r2.color;
    std::vector<int> found;
    found.reserve(r2.subset.size());
    for (int i : r2.subset) found.push_back(l_set[i - 1]);
    m_pts.assign(found.begin(), found.begin() + need);
    rep.direct_mode = false;
    rep.l_set = std::move(l_set);
    rep.m_set = m_pts;
    int jj = 0, ii = 0;
    analyze_patterns(m_pts, jj, ii, pat, rep.f_prefix_values, rep.e_prefix_values,
                     /*throw_on_mismatch=*/true);
    if (jj != j0 || ii != i0)
      throw check_failed("extracted subset colors do not match pattern colors");
  }
  rep.j0 = j0;
  rep.i0 = i0;

  // Witness assembly: z_h = sigma (1-eps)^{i0} x(P_{j0}(F^{(h)})).
  const double factor = sigma * std::pow(1.0 - eps, i0);
  std::vector<Vec> coeffs(n);
  std::vector<Vec> z(n);
  std::vector<double> gaps;
  for (int h = 0; h < n; ++h) {
    const MinimizeResult& res = ctx.solve(pat.f[h].prefix(j0));
    coeffs[h] = res.xi;
    z[h] = factor * (xcols * res.xi);
    gaps.push_back(res.gap);
    double nz = space.norm(z[h]);
    if (nz > 1.0 + 1e-8)
      throw check_failed("witness vector norm " + std::to_string(nz) + " above 1");
  }

  // S-membership of the signed averages and the final inequality chain.
  double max_e_gap = 0.0;
  for (int k = 1; k <= n; ++k) {
    Vec avg = Vec::Zero(ctx.ground_size());
    for (int h = 0; h < n; ++h) avg += (h < k ? -1.0 : 1.0) * coeffs[h];
    avg /= n;
    IntervalFamily e_pref = pat.e[k - 1].prefix(j0 - 1);
    Mat g_cov;
    Vec rhs;
    ctx.constraint_rows(e_pref, g_cov, rhs);
    if (avg.cwiseAbs().maxCoeff() > 2.0 + 1e-9)
      throw check_failed("signed average violates the box bound");
    double resid = (g_cov * avg - rhs).cwiseAbs().maxCoeff();
    if (resid > 10.0 * opt.tol_feas)
      throw check_failed("signed average constraint residual " + std::to_string(resid));

    const MinimizeResult& e_res = ctx.solve(e_pref);
    gaps.push_back(e_res.gap);
    max_e_gap = std::max(max_e_gap, e_res.gap);
    if (scheme.bucket_index(e_res.value) != i0)
      throw check_failed("E-prefix value left bucket i0");

    Vec signed_sum = Vec::Zero(space.dim());
    for (int h = 0; h < n; ++h) signed_sum += (h < k ? 1.0 : -1.0) * z[h];
    double lhs = space.norm(signed_sum);
    double rhs_chain = n * factor * (e_res.value - e_res.gap) - 1e-12;
    if (lhs < rhs_chain)
      throw check_failed("final inequality chain failed at split " + std::to_string(k));
  }

  const double slack = factor * max_e_gap + kAlgTol;
  double margin = j_margin(space, z);
  if (margin < (1.0 - eps) - slack)
    throw check_failed("extracted witness margin " + std::to_string(margin) +
                       " below (1-eps) - slack");

  rep.witness = JWitness{space, n, std::move(z), margin};
  rep.solver_gaps = std::move(gaps);
  rep.slack = slack;
  return rep;
}

}  // namespace jsum
