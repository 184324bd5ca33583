#pragma once

// Shared numeric aliases, tolerances, error types and small helpers.

#include <Eigen/Dense>

#include <cstdint>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>

namespace jsum {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Tolerance for algebraic identities that hold exactly in real arithmetic
// but are checked in double precision.
inline constexpr double kAlgTol = 1e-9;

// A search or solver ran out of its iteration/evaluation budget before
// reaching the requested target.  Distinct from "the target does not exist".
struct budget_exhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An internal pipeline assertion failed; the computation cannot be trusted.
struct check_failed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

// Stable per-(seed, stream) derivation so that nested loops can draw
// independent deterministic generators.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

inline Vec gaussian_vector(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = g(rng);
  return v;
}

// Deterministic rendering used for CSV cells; %.12g round-trips all values
// produced by the pipelines at the precision we report.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::string(buf);
}

inline bool all_finite(const Vec& v) { return v.allFinite(); }
inline bool all_finite(const Mat& m) { return m.allFinite(); }

}  // namespace jsum
