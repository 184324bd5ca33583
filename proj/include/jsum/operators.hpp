#pragma once

// Dense linear operators between described spaces, the summation operator,
// the exact l_1-domain / l_inf-codomain operator-norm rules, and
// verification plus numerical search of factorizations S_n = B A.

#include "jsum/spaces.hpp"

#include <algorithm>
#include <optional>
#include <utility>

namespace jsum {

struct LinOperator {
  Mat matrix;  // codomain.dim() x domain.dim()
  Space domain;
  Space codomain;

  LinOperator(Mat m, Space dom, Space cod)
      : matrix(std::move(m)), domain(std::move(dom)), codomain(std::move(cod)) {
    if (matrix.rows() != codomain.dim() || matrix.cols() != domain.dim())
      throw std::invalid_argument("operator matrix shape does not match spaces");
    if (!all_finite(matrix))
      throw std::invalid_argument("operator matrix has non-finite entries");
  }

  Vec apply(const Vec& v) const {
    if (v.size() != domain.dim()) throw std::invalid_argument("operator/vector dimension mismatch");
    return matrix * v;
  }
};

// S_n : l_1^n -> l_inf^n, (xi_k) |-> (sum_{h<=k} xi_h); lower-triangular ones.
inline LinOperator summation_operator(int n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  Mat s = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k)
    for (int h = 0; h <= k; ++h) s(k, h) = 1.0;
  return LinOperator(std::move(s), Space::lp(1.0, n), Space::linf(n));
}

inline Mat summation_matrix(int n) { return summation_operator(n).matrix; }

// Exact norm of A : l_1^n -> X: the max over columns of the codomain norm.
inline double norm_from_l1(const LinOperator& a) {
  if (!a.domain.is_l1()) throw std::invalid_argument("norm_from_l1: domain is not l_1");
  double best = 0.0;
  for (int h = 0; h < a.matrix.cols(); ++h)
    best = std::max(best, a.codomain.norm(a.matrix.col(h)));
  return best;
}

// Exact norm of B : X -> l_inf^n: the max over rows of the domain dual norm.
inline double norm_to_linf(const LinOperator& b) {
  if (!b.codomain.is_linf()) throw std::invalid_argument("norm_to_linf: codomain is not l_inf");
  double best = 0.0;
  for (int k = 0; k < b.matrix.rows(); ++k)
    best = std::max(best, b.domain.dual_norm(b.matrix.row(k).transpose()));
  return best;
}

// Pairing table of B∘A as an l_1 -> l_inf operator: entry (k, h) = <A e_h, row_k(B)>.
inline Mat gram(const LinOperator& a, const LinOperator& b) {
  if (!(a.codomain == b.domain))
    throw std::invalid_argument("gram: codomain of A does not match domain of B");
  return b.matrix * a.matrix;
}

struct Factorization {
  LinOperator a;  // l_1^n -> X
  LinOperator b;  // X -> l_inf^n
  int n = 0;
  double sigma = 0.0;   // ||A|| * ||B||, by the exact column/row rules
  double defect = 0.0;  // max entrywise deviation of B∘A from S_n
  bool valid = false;
};

inline Factorization verify_factorization(const LinOperator& a, const LinOperator& b, int n,
                                          double tol) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (!a.domain.is_l1() || a.domain.dim() != n)
    throw std::invalid_argument("verify_factorization: A domain must be l_1^n");
  if (!b.codomain.is_linf() || b.codomain.dim() != n)
    throw std::invalid_argument("verify_factorization: B codomain must be l_inf^n");
  if (!(a.codomain == b.domain))
    throw std::invalid_argument("verify_factorization: middle spaces do not match");
  Mat g = gram(a, b);
  // The l_1 -> l_inf operator norm of the difference is exactly the max
  // absolute entry, so the defect is exact.
  double defect = (g - summation_matrix(n)).cwiseAbs().maxCoeff();
  Factorization f{a, b, n, norm_from_l1(a) * norm_to_linf(b), defect, defect <= tol};
  return f;
}

namespace detail {

// Min-change correction of A making B*A = S_n exactly (up to roundoff),
// for fixed B of full row rank: per column, subtract the least-squares
// solution of the residual system.
inline Mat project_to_exact(const Mat& bmat, const Mat& amat, const Mat& target) {
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(bmat);
  return amat - cod.solve(bmat * amat - target);
}

}  // namespace detail

// Random-restart local search for a factorization of S_n through `space`
// with small quality sigma.  Entries of A and B are optimized jointly with
// an escalating defect penalty, candidates are projected onto the exact
// constraint B*A = S_n by a least-squares correction of A, and only exactly
// projected candidates count.  Deterministic for a fixed seed; restarts are
// merged by (sigma, restart index).
inline Factorization search_factorization(const Space& space, int n, std::uint64_t seed,
                                          int restarts, int iters) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (space.dim() < n)
    throw std::invalid_argument("search_factorization: space dimension below n");
  if (restarts < 1 || iters < 1) throw std::invalid_argument("restarts/iters must be >= 1");

  const int d = space.dim();
  const Mat s = summation_matrix(n);
  const Space l1n = Space::lp(1.0, n);
  const Space linfn = Space::linf(n);

  auto sigma_of = [&](const Mat& amat, const Mat& bmat) {
    double na = 0.0, nb = 0.0;
    for (int h = 0; h < n; ++h) na = std::max(na, space.norm(amat.col(h)));
    for (int k = 0; k < n; ++k) nb = std::max(nb, space.dual_norm(bmat.row(k).transpose()));
    return na * nb;
  };
  auto defect_of = [&](const Mat& amat, const Mat& bmat) {
    return (bmat * amat - s).cwiseAbs().maxCoeff();
  };

  std::optional<Factorization> best;
  for (int r = 0; r < restarts; ++r) {
    auto rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    std::normal_distribution<double> gauss(0.0, 1.0);

    Mat bmat(n, d);
    if (r == 0) {
      // Coordinate embedding: B rows are basis functionals, A solves exactly.
      bmat = Mat::Zero(n, d);
      for (int k = 0; k < n; ++k) bmat(k, k) = 1.0;
    } else if (r == 1) {
      // Partial-sum functionals.
      bmat = Mat::Zero(n, d);
      for (int k = 0; k < n; ++k)
        for (int h = 0; h <= k; ++h) bmat(k, h) = 1.0;
    } else {
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < d; ++j) bmat(k, j) = gauss(rng);
    }
    Mat amat;
    {
      Eigen::CompleteOrthogonalDecomposition<Mat> cod(bmat);
      amat = cod.solve(s);
    }
    if (defect_of(amat, bmat) > 1e-6) continue;  // degenerate random B

    Mat best_a = amat, best_b = bmat;
    double best_sigma = sigma_of(amat, bmat);
    double mu = 1.0;
    double cur_obj = best_sigma;
    for (int t = 1; t <= iters; ++t) {
      double step = 0.3 / std::sqrt(static_cast<double>(t));
      Mat a2 = amat, b2 = bmat;
      switch (rng() % 3) {
        case 0:  // a few joint entries
          for (int q = 0; q < 3; ++q) {
            a2(static_cast<int>(rng() % static_cast<std::uint64_t>(d)),
               static_cast<int>(rng() % static_cast<std::uint64_t>(n))) += step * gauss(rng);
            b2(static_cast<int>(rng() % static_cast<std::uint64_t>(n)),
               static_cast<int>(rng() % static_cast<std::uint64_t>(d))) += step * gauss(rng);
          }
          break;
        case 1:  // whole of B
          for (int k = 0; k < n; ++k)
            for (int j = 0; j < d; ++j) b2(k, j) += step * gauss(rng);
          break;
        default:  // whole of A
          for (int j = 0; j < d; ++j)
            for (int h = 0; h < n; ++h) a2(j, h) += step * gauss(rng);
          break;
      }
      double df = defect_of(a2, b2);
      double obj = sigma_of(a2, b2) + mu * df * df;
      // Rank the proposal by its exactly projected quality as well, so the
      // walk follows genuine sigma progress and not just the penalty shape.
      Mat ap = detail::project_to_exact(b2, a2, s);
      bool projected_ok = defect_of(ap, b2) <= kAlgTol;
      double psig = projected_ok ? sigma_of(ap, b2) : std::numeric_limits<double>::infinity();
      if (projected_ok && psig < best_sigma) {
        best_sigma = psig;
        best_a = ap;
        best_b = b2;
      }
      if (obj < cur_obj || psig < best_sigma + 1e-12) {
        amat = (projected_ok && psig < obj) ? ap : a2;
        bmat = b2;
        cur_obj = std::min(obj, psig);
      }
      if (t % 50 == 0) mu *= 4.0;
    }

    if (defect_of(best_a, best_b) > kAlgTol) continue;
    Factorization cand = verify_factorization(LinOperator(best_a, l1n, space),
                                              LinOperator(best_b, space, linfn), n, kAlgTol);
    if (!cand.valid) continue;
    if (!best || cand.sigma < best->sigma) best = cand;
  }

  if (!best)
    throw budget_exhausted("search_factorization: no valid factorization found within budget");
  return *best;
}

// Canonical exact factorizations: sigma = 1, defect = 0.
inline Factorization canonical_l1_factorization(int n) {
  Space x = Space::lp(1.0, n);
  LinOperator a(Mat::Identity(n, n), Space::lp(1.0, n), x);
  LinOperator b(summation_matrix(n), x, Space::linf(n));
  return verify_factorization(a, b, n, 0.0);
}

inline Factorization canonical_linf_factorization(int n) {
  Space x = Space::linf(n);
  LinOperator a(summation_matrix(n), Space::lp(1.0, n), x);
  LinOperator b(Mat::Identity(n, n), x, Space::linf(n));
  return verify_factorization(a, b, n, 0.0);
}

}  // namespace jsum
