#pragma once

// Small dense linear programming via two-phase primal simplex with Bland's
// rule.  Scope: box-bounded problems with a few hundred variables, solved to
// pivot tolerance, with a rigorous dual-based lower bound on the optimum
// (weak duality plus interval bounds absorb any residual dual infeasibility).

#include "jsum/numerics.hpp"

#include <limits>
#include <vector>

namespace jsum {

struct LpProblem {
  Vec c;              // objective over the structural variables
  Mat a_eq;           // a_eq x = b_eq (may have zero rows)
  Vec b_eq;
  Mat a_ub;           // a_ub x <= b_ub (may have zero rows)
  Vec b_ub;
  Vec lo, hi;         // finite elementwise bounds, lo <= hi
};

struct LpResult {
  enum class Status { Optimal, Infeasible, IterLimit };
  Status status = Status::IterLimit;
  Vec x;
  double objective = 0.0;
  double dual_bound = -std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
};

namespace detail {

struct StdForm {
  Mat a;               // m x ncols, equality rows with b >= 0
  Vec b;
  Vec c;               // costs over real columns
  Vec upper;           // finite upper bounds per real column
  int n_struct = 0;    // leading columns are the shifted structural vars
  int n_real = 0;      // structural + slack + bound columns
};

// Shift x = lo + u, add slack columns for the <= rows and bound rows
// u_j + w_j = hi_j - lo_j, then flip rows so b >= 0.
inline StdForm build_std_form(const LpProblem& p) {
  const int nv = static_cast<int>(p.c.size());
  const int me = static_cast<int>(p.b_eq.size());
  const int mu = static_cast<int>(p.b_ub.size());
  const int m = me + mu + nv;
  const int ncols = nv + mu + nv;

  StdForm f;
  f.a = Mat::Zero(m, ncols);
  f.b = Vec::Zero(m);
  f.c = Vec::Zero(ncols);
  f.upper = Vec::Zero(ncols);
  f.n_struct = nv;
  f.n_real = ncols;

  Vec range = p.hi - p.lo;
  for (int j = 0; j < nv; ++j) {
    if (!(range[j] >= 0.0) || !std::isfinite(range[j]))
      throw std::invalid_argument("solve_lp: bounds must be finite with lo <= hi");
    f.c[j] = p.c[j];
    f.upper[j] = range[j];
  }

  int row = 0;
  for (int i = 0; i < me; ++i, ++row) {
    f.a.row(row).head(nv) = p.a_eq.row(i);
    f.b[row] = p.b_eq[i] - p.a_eq.row(i).dot(p.lo);
  }
  for (int i = 0; i < mu; ++i, ++row) {
    f.a.row(row).head(nv) = p.a_ub.row(i);
    f.a(row, nv + i) = 1.0;
    f.b[row] = p.b_ub[i] - p.a_ub.row(i).dot(p.lo);
  }
  for (int j = 0; j < nv; ++j, ++row) {
    f.a(row, j) = 1.0;
    f.a(row, nv + mu + j) = 1.0;
    f.b[row] = range[j];
    f.upper[nv + mu + j] = range[j];
  }

  // Upper bounds for slack columns via interval arithmetic over the box.
  for (int i = 0; i < mu; ++i) {
    double lo_row = 0.0;
    for (int j = 0; j < nv; ++j) {
      double a = p.a_ub(i, j);
      lo_row += std::min(a * 0.0, a * range[j]);
    }
    f.upper[nv + i] = std::max(0.0, (p.b_ub[i] - p.a_ub.row(i).dot(p.lo)) - lo_row);
  }

  for (int i = 0; i < m; ++i) {
    if (f.b[i] < 0.0) {
      f.a.row(i) = -f.a.row(i);
      f.b[i] = -f.b[i];
    }
  }
  return f;
}

}  // namespace detail

inline LpResult solve_lp(const LpProblem& p, double pivot_tol = 1e-9, long max_iters = 50000) {
  using detail::StdForm;
  StdForm f = detail::build_std_form(p);
  const int m = static_cast<int>(f.b.size());
  const int n_real = f.n_real;
  const int n_total = n_real + m;  // one artificial per row

  // Tableau [A | I_art | b]; cost rows handled separately.
  Mat t(m, n_total + 1);
  t.setZero();
  t.block(0, 0, m, n_real) = f.a;
  for (int i = 0; i < m; ++i) t(i, n_real + i) = 1.0;
  t.col(n_total) = f.b;

  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n_real + i;

  Vec cost = Vec::Zero(n_total);
  auto run_simplex = [&](bool phase_one, long& iters_left) {
    while (iters_left-- > 0) {
      // Reduced costs r_j = c_j - c_B^T T_j; Bland's rule: smallest index.
      int enter = -1;
      for (int j = 0; j < (phase_one ? n_total : n_real); ++j) {
        double cb_tj = 0.0;
        for (int i = 0; i < m; ++i) cb_tj += cost[basis[i]] * t(i, j);
        if (cost[j] - cb_tj < -pivot_tol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;  // optimal
      int leave = -1;
      double best_ratio = 0.0;
      for (int i = 0; i < m; ++i) {
        if (t(i, enter) > pivot_tol) {
          double ratio = t(i, n_total) / t(i, enter);
          if (leave < 0 || ratio < best_ratio - 1e-15 ||
              (std::abs(ratio - best_ratio) <= 1e-15 && basis[i] < basis[leave]))
            leave = i, best_ratio = ratio;
        }
      }
      if (leave < 0) return true;  // unbounded direction; cannot occur with bound rows
      double piv = t(leave, enter);
      t.row(leave) /= piv;
      for (int i = 0; i < m; ++i) {
        if (i == leave) continue;
        double factor = t(i, enter);
        if (factor != 0.0) t.row(i) -= factor * t.row(leave);
      }
      basis[leave] = enter;
    }
    return false;
  };

  long iters = max_iters;

  // Phase 1: drive out the artificials.
  for (int j = n_real; j < n_total; ++j) cost[j] = 1.0;
  if (!run_simplex(true, iters)) {
    LpResult r;
    r.status = LpResult::Status::IterLimit;
    return r;
  }
  double phase1 = 0.0;
  for (int i = 0; i < m; ++i)
    if (basis[i] >= n_real) phase1 += t(i, n_total);
  if (phase1 > 1e-7) {
    LpResult r;
    r.status = LpResult::Status::Infeasible;
    return r;
  }
  // Pivot zero-level artificials onto real columns where possible.
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n_real) continue;
    int enter = -1;
    for (int j = 0; j < n_real; ++j)
      if (std::abs(t(i, j)) > 1e-7) {
        enter = j;
        break;
      }
    if (enter < 0) continue;  // redundant row; harmless to keep
    double piv = t(i, enter);
    t.row(i) /= piv;
    for (int q = 0; q < m; ++q) {
      if (q == i) continue;
      double factor = t(q, enter);
      if (factor != 0.0) t.row(q) -= factor * t.row(i);
    }
    basis[i] = enter;
  }

  // Phase 2 on the real objective.
  cost.setZero();
  for (int j = 0; j < n_real; ++j) cost[j] = f.c[j];
  bool finished = run_simplex(false, iters);

  // Primal solution.
  Vec z = Vec::Zero(n_real);
  for (int i = 0; i < m; ++i)
    if (basis[i] < n_real) z[basis[i]] = t(i, n_total);
  const int nv = f.n_struct;
  LpResult r;
  r.x = p.lo + z.head(nv);
  r.objective = p.c.dot(r.x);

  // Dual certificate from the final basis: y solves B^T y = c_B over the
  // original standard form.  Weak duality with box bounds turns any residual
  // dual infeasibility into a rigorous correction term.
  Mat bmat(m, m);
  Vec cb(m);
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n_real) {
      bmat.col(i) = f.a.col(basis[i]);
      cb[i] = f.c[basis[i]];
    } else {
      bmat.col(i) = Vec::Unit(m, basis[i] - n_real);
      cb[i] = 0.0;
    }
  }
  Vec y = bmat.transpose().partialPivLu().solve(cb);
  double correction = 0.0;
  for (int j = 0; j < n_real; ++j) {
    double rj = f.c[j] - y.dot(f.a.col(j));
    if (rj < 0.0) correction += rj * f.upper[j];
  }
  double shift = p.c.dot(p.lo);  // objective offset from the variable shift
  r.dual_bound = y.dot(f.b) + correction + shift;
  r.gap = r.objective - r.dual_bound;
  r.status = finished ? LpResult::Status::Optimal : LpResult::Status::IterLimit;
  return r;
}

}  // namespace jsum
