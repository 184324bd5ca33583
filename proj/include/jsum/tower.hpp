#pragma once

// Lazy iterated-exponential integers P_g(m) (P_0(m) = m, P_{g+1}(m) =
// 2^{P_g(m)}), exactly comparable without materialization, plus the Ramsey
// upper-bound formulas built on them.

#include "jsum/numerics.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <string>

namespace jsum {

using BigInt = boost::multiprecision::cpp_int;

// Normal form: height 0 (exact base), or height >= 1 with base > 63.  One
// exponentiation step is absorbed whenever the materialized value stays
// below 2^63, so equal values always share a representation.
class TowerInt {
 public:
  TowerInt() = default;

  // P_g(m).
  static TowerInt tower(long long g, BigInt m) {
    if (g < 0 || m < 0) throw std::invalid_argument("tower: g and m must be nonnegative");
    TowerInt t;
    t.height_ = g;
    t.base_ = std::move(m);
    t.normalize();
    return t;
  }
  static TowerInt exact(BigInt v) { return tower(0, std::move(v)); }

  long long height() const { return height_; }
  const BigInt& base() const { return base_; }
  bool is_exact() const { return height_ == 0; }
  const BigInt& exact_value() const {
    if (height_ != 0) throw std::logic_error("exact_value() on a symbolic tower");
    return base_;
  }

  // P_extra(this); exact because P composes by adding heights.
  TowerInt apply_tower(long long extra) const {
    if (extra < 0) throw std::invalid_argument("apply_tower: negative height");
    TowerInt t;
    t.height_ = height_ + extra;
    t.base_ = base_;
    t.normalize();
    return t;
  }

  // Upper bound on c * value, representable as a tower: exact when the value
  // is materialized; otherwise rounds up via c * P_g(b) <= P_g(c * b), which
  // holds for b >= 2 and c >= 1 (normalized symbolic bases exceed 63).
  TowerInt scaled_upper(const BigInt& c) const {
    if (c < 1) throw std::invalid_argument("scaled_upper: c must be >= 1");
    TowerInt t;
    t.height_ = height_;
    t.base_ = base_ * c;
    t.normalize();
    return t;
  }

  std::string str() const {
    if (height_ == 0) return base_.str();
    if (height_ == 1) return "2^" + base_.str();
    return "P_" + std::to_string(height_) + "(" + base_.str() + ")";
  }

  // -1, 0, +1 on the represented values; exact for every input.
  friend int tower_cmp(const TowerInt& a, const TowerInt& b) {
    if (a.height_ == b.height_) return cmp_big(a.base_, b.base_);
    const TowerInt& tall = a.height_ > b.height_ ? a : b;
    const TowerInt& low = a.height_ > b.height_ ? b : a;
    // P_{g1}(b1) vs P_{g2}(b2) with g1 > g2 reduces, by strict monotonicity
    // of the exponential, to P_{g1-g2}(b1) vs b2.
    int c = cmp_lifted(tall.base_, tall.height_ - low.height_, low.base_);
    return a.height_ > b.height_ ? c : -c;
  }

  friend bool operator<(const TowerInt& a, const TowerInt& b) { return tower_cmp(a, b) < 0; }
  friend bool operator==(const TowerInt& a, const TowerInt& b) { return tower_cmp(a, b) == 0; }
  friend bool operator<=(const TowerInt& a, const TowerInt& b) { return tower_cmp(a, b) <= 0; }

 private:
  static int cmp_big(const BigInt& x, const BigInt& y) { return x < y ? -1 : (x == y ? 0 : 1); }

  // Compare P_delta(t) against the exact integer rhs.
  static int cmp_lifted(BigInt t, long long delta, const BigInt& rhs) {
    const long long rhs_bits = static_cast<long long>(boost::multiprecision::msb(rhs < 1 ? BigInt(1) : rhs)) + 1;
    for (long long i = 0; i < delta; ++i) {
      // 2^t has t+1 bits; once t reaches the bit length of rhs the remaining
      // exponentiations can only push the value further above it.
      if (t >= rhs_bits) return 1;
      t = BigInt(1) << static_cast<unsigned>(t);
    }
    return cmp_big(t, rhs);
  }

  void normalize() {
    while (height_ > 0 && base_ <= 63) {
      base_ = BigInt(1) << static_cast<unsigned>(base_);
      --height_;
    }
  }

  long long height_ = 0;
  BigInt base_ = 0;
};

inline TowerInt tower(long long g, BigInt m) { return TowerInt::tower(g, std::move(m)); }

// Smallest m with 2 m sigma < (1/(1-eps))^(m-1).
inline long long choose_m(double sigma, double eps) {
  if (!(sigma >= 1.0)) throw std::invalid_argument("choose_m: sigma must be >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("choose_m: eps must be in (0,1)");
  const double ratio = 1.0 / (1.0 - eps);
  for (long long m = 1; m <= 100'000'000; ++m) {
    double lhs = 2.0 * static_cast<double>(m) * sigma;
    double rhs = std::pow(ratio, static_cast<double>(m - 1));
    if (lhs < rhs) return m;
  }
  throw budget_exhausted("choose_m: no m found below cap");
}

// Upper bound P_k(c * l) on the Ramsey number R_k(l, r).  The constant c is
// caller-supplied (the sources do not pin it); r only sanity-checks inputs.
inline TowerInt ramsey_upper(long long k, const BigInt& l, long long r, const BigInt& c) {
  if (k < 1 || l < 1 || r < 1 || c < 1)
    throw std::invalid_argument("ramsey_upper: all parameters must be >= 1");
  return TowerInt::tower(k, c * l);
}

// Same bound with a tower-valued l (nested application); rounds up to the
// nearest representable tower.
inline TowerInt ramsey_upper(long long k, const TowerInt& l, long long r, const BigInt& c) {
  if (k < 1 || r < 1 || c < 1)
    throw std::invalid_argument("ramsey_upper: all parameters must be >= 1");
  return l.scaled_upper(c).apply_tower(k);
}

// Symbolic size bound for the ground set needed to extract a J(n, eps)
// witness from a quality-sigma factorization: the nested Ramsey bound
// R_{2m}(R_{2m}(2nm+1, m), m) evaluated through ramsey_upper, which
// collapses below P_{4m}(c3 * n).
struct GroundSetBound {
  long long m = 0;
  TowerInt inner;   // bound on R_{2m}(2nm+1, m)
  TowerInt outer;   // bound on the full nested expression
  std::string formula;  // the exact nested Ramsey expression
};

inline GroundSetBound ground_set_bound(int n, double sigma, double eps, const BigInt& c = 2) {
  if (n < 1) throw std::invalid_argument("ground_set_bound: n must be >= 1");
  const long long m = choose_m(sigma, eps);
  const BigInt core = 2 * static_cast<long long>(n) * m + 1;
  TowerInt inner = ramsey_upper(2 * m, core, m, c);
  TowerInt outer = ramsey_upper(2 * m, inner, m, c);
  // Collapse check: outer <= P_{4m}(c3 * n) with c3 = c^2 (2m + 1).
  TowerInt collapsed = TowerInt::tower(4 * m, c * c * BigInt(2 * m + 1) * n);
  if (!(outer <= collapsed))
    throw check_failed("ground_set_bound: nested bound failed to collapse");
  std::string formula = "R_" + std::to_string(2 * m) + "(R_" + std::to_string(2 * m) + "(" +
                        core.str() + "," + std::to_string(m) + ")," + std::to_string(m) + ")";
  return GroundSetBound{m, std::move(inner), std::move(outer), std::move(formula)};
}

}  // namespace jsum
