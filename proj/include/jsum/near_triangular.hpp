#pragma once

// From a good J-witness to an explicit factorization of S_n: build norming
// functionals for the signed partial sums, form the near-triangular pairing
// system x_h = (z_1 + z_h)/2 against those functionals, and correct the
// distortion by one dense linear solve per column.

#include "jsum/jconvexity.hpp"
#include "jsum/operators.hpp"

#include <vector>

namespace jsum {

struct NormingSystem {
  std::vector<Vec> y;    // unit dual vectors, one per split point
  double realized_band;  // max deviation of the signed pairings from 1
};

// y_k norms the k-th signed partial sum of the witness.  The band actually
// realized by the pairings <z_h, y_k> is measured and reported rather than
// taken from the nominal n*(1 - margin) budget.
inline NormingSystem norming_system(const Space& space, const JWitness& w) {
  validate_witness(w);
  if (!(w.margin > 0.0)) throw std::invalid_argument("norming_system: witness margin must be positive");
  const int n = w.n;
  Vec total = Vec::Zero(space.dim());
  for (const Vec& v : w.z) total += v;
  std::vector<Vec> y(n);
  Vec prefix = Vec::Zero(space.dim());
  for (int k = 0; k < n; ++k) {
    prefix += w.z[k];
    Vec wk = 2.0 * prefix - total;
    if (space.norm(wk) < 1e-12)
      throw check_failed("norming_system: degenerate signed sum; witness too weak");
    y[k] = space.norming_functional(wk);
  }
  double band = 0.0;
  for (int k = 0; k < n; ++k)
    for (int h = 0; h < n; ++h) {
      double s = h <= k ? 1.0 : -1.0;
      band = std::max(band, 1.0 - s * w.z[h].dot(y[k]));
    }
  return NormingSystem{std::move(y), band};
}

// Vectors x_h in the ball, unit dual vectors y_k, and their pairing table
// alpha(l, k) = <x_l, y_k> with alpha in (1-band, 1] on or above the split
// and in (-band, band) below it.
struct NearTriangularSystem {
  Space space;
  int n = 0;
  std::vector<Vec> x;
  std::vector<Vec> y;
  Mat alpha;    // alpha(l, k), rows indexed by vector, columns by functional
  double band = 0.0;
};

inline NearTriangularSystem make_near_triangular(const Space& space, std::vector<Vec> x,
                                                 std::vector<Vec> y) {
  const int n = static_cast<int>(x.size());
  if (n < 1 || y.size() != x.size())
    throw std::invalid_argument("near-triangular system: mismatched x/y counts");
  for (const Vec& v : x)
    if (!(space.norm(v) <= 1.0 + kAlgTol))
      throw std::invalid_argument("near-triangular system: x outside the unit ball");
  for (const Vec& f : y)
    if (!(space.dual_norm(f) <= 1.0 + kAlgTol))
      throw std::invalid_argument("near-triangular system: y outside the dual unit ball");
  Mat alpha(n, n);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k) alpha(l, k) = x[l].dot(y[k]);
  double band = 0.0;
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k) {
      if (l <= k)
        band = std::max(band, 1.0 - alpha(l, k));
      else
        band = std::max(band, std::abs(alpha(l, k)));
      if (alpha(l, k) > 1.0 + kAlgTol)
        throw std::invalid_argument("near-triangular system: pairing above 1");
    }
  if (band >= 0.5)
    throw check_failed("near-triangular system: realized band >= 1/2");
  return NearTriangularSystem{space, n, std::move(x), std::move(y), std::move(alpha), band};
}

// The half-shift x_h = (z_1 + z_h)/2 turns the +-1 witness pairings into the
// one-sided near-triangular pattern.
inline NearTriangularSystem shifted_system(const JWitness& w, const std::vector<Vec>& y) {
  if (static_cast<int>(y.size()) != w.n)
    throw std::invalid_argument("shifted_system: functional count mismatch");
  std::vector<Vec> x(w.n);
  for (int h = 0; h < w.n; ++h) x[h] = 0.5 * (w.z[0] + w.z[h]);
  return make_near_triangular(w.space, std::move(x), y);
}

struct DistortionResult {
  Factorization fact;
  double det = 0.0;         // determinant of the pairing matrix
  double max_abs_xi = 0.0;  // largest correction coefficient
  double max_xi_sum = 0.0;  // max over h of sum_l |xi_l^(h)|
};

// Solves, for each h, the linear system making column h of the factorization
// pair exactly against every y_k:
//   sum_l alpha(l, k) xi_l + alpha(h, k) = [h <= k],   k = 1..n,
// then sets A e_h = sum_l x_l xi_l^(h) + x_h and B x = (<x, y_k>)_k.
// Partial-pivoting solve with one step of iterative refinement; refuses
// systems whose determinant falls below 1e-6.
inline DistortionResult distortion_factorize(const NearTriangularSystem& sys) {
  const int n = sys.n;
  const double det_floor = 1e-6;
  Mat at = sys.alpha.transpose();  // row k, column l
  Eigen::PartialPivLU<Mat> lu(at);
  double det = lu.determinant();
  if (!std::isfinite(det) || std::abs(det) < det_floor)
    throw check_failed("distortion_factorize: pairing matrix determinant below floor (" +
                       std::to_string(det) + ")");

  Mat xmat(sys.space.dim(), n);
  for (int l = 0; l < n; ++l) xmat.col(l) = sys.x[l];

  Mat amat(sys.space.dim(), n);
  double max_abs_xi = 0.0, max_xi_sum = 0.0;
  for (int h = 0; h < n; ++h) {
    Vec rhs(n);
    for (int k = 0; k < n; ++k) rhs[k] = (h <= k ? 1.0 : 0.0) - sys.alpha(h, k);
    Vec xi = lu.solve(rhs);
    xi += lu.solve(rhs - at * xi);  // one refinement pass
    max_abs_xi = std::max(max_abs_xi, xi.cwiseAbs().maxCoeff());
    max_xi_sum = std::max(max_xi_sum, xi.cwiseAbs().sum());
    amat.col(h) = xmat * xi + sys.x[h];
  }

  Mat bmat(n, sys.space.dim());
  for (int k = 0; k < n; ++k) bmat.row(k) = sys.y[k].transpose();

  Factorization f = verify_factorization(LinOperator(amat, Space::lp(1.0, n), sys.space),
                                         LinOperator(bmat, sys.space, Space::linf(n)), n, kAlgTol);
  if (!f.valid)
    throw check_failed("distortion_factorize: residual defect " + std::to_string(f.defect));
  double y_norm = 0.0;
  for (const Vec& y : sys.y) y_norm = std::max(y_norm, sys.space.dual_norm(y));
  if (f.sigma > (1.0 + max_xi_sum) * y_norm + kAlgTol)
    throw check_failed("distortion_factorize: sigma exceeds its analytic budget");
  return DistortionResult{f, det, max_abs_xi, max_xi_sum};
}

// Full chain witness -> norming system -> shifted system -> factorization.
// Quantitative regime: requires 1 - margin <= 1/(n 2^{n+1}) and asserts
// sigma <= 1 + 2 n^2 (1 - margin) on the way out.
inline Factorization factorization_from_witness(const Space& space, const JWitness& w,
                                                double tol_pipeline = 1e-6) {
  const int n = w.n;
  const double eps = 1.0 - w.margin;
  const double threshold = 1.0 / (n * std::pow(2.0, n + 1));
  if (eps > threshold + 1e-15)
    throw std::invalid_argument("factorization_from_witness: 1 - margin exceeds 1/(n*2^(n+1))");
  NormingSystem ns = norming_system(space, w);
  NearTriangularSystem sys = shifted_system(w, ns.y);
  DistortionResult res = distortion_factorize(sys);
  double budget = 1.0 + 2.0 * n * n * eps + tol_pipeline;
  if (res.fact.sigma > budget)
    throw check_failed("factorization_from_witness: sigma " + std::to_string(res.fact.sigma) +
                       " exceeds budget " + std::to_string(budget));
  return res.fact;
}

}  // namespace jsum
