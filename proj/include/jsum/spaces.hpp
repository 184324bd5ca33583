#pragma once

// Finite-dimensional normed spaces: l_p^d for p in [1, inf] and finite
// l_2-sums of copies of an inner space.  Every descriptor carries an exact
// norm, the conjugate (dual) norm, and a norming-functional rule, which is
// all the downstream factorization and witness machinery needs.

#include "jsum/numerics.hpp"

#include <cmath>
#include <memory>
#include <string>

namespace jsum {

// Extended exponent p in [1, inf].  Infinity is a symbolic tag, never a
// floating-point sentinel, so p-power formulas cannot overflow through it.
class Exponent {
 public:
  static Exponent finite(double p) {
    if (!(p >= 1.0) || std::isinf(p) || std::isnan(p))
      throw std::invalid_argument("p out of range [1, inf]");
    return Exponent(p, false);
  }
  static Exponent inf() { return Exponent(0.0, true); }

  bool is_inf() const { return inf_; }
  bool is_one() const { return !inf_ && p_ == 1.0; }

  double value() const {
    if (inf_) throw std::logic_error("value() called on infinite exponent");
    return p_;
  }

  // Conjugate exponent q with 1/p + 1/q = 1.
  Exponent conjugate() const {
    if (inf_) return finite(1.0);
    if (p_ == 1.0) return inf();
    return finite(p_ / (p_ - 1.0));
  }

  bool operator==(const Exponent& o) const {
    return inf_ == o.inf_ && (inf_ || p_ == o.p_);
  }
  bool operator!=(const Exponent& o) const { return !(*this == o); }

  std::string str() const {
    if (inf_) return "inf";
    if (p_ == std::floor(p_) && std::abs(p_) < 1e15) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.0f", p_);
      return buf;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", p_);
    return buf;
  }

  static Exponent parse(const std::string& s) {
    if (s == "inf") return inf();
    char* end = nullptr;
    double p = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s.empty())
      throw std::invalid_argument("bad exponent: '" + s + "'");
    return finite(p);
  }

 private:
  Exponent(double p, bool is_infinite) : p_(p), inf_(is_infinite) {}
  double p_;
  bool inf_;
};

// Descriptor of a finite-dimensional normed space.  Immutable value type;
// all operations are pure, so concurrent evaluation is safe.
class Space {
 public:
  // Defaults to the real line l_2^1 so aggregates holding a Space stay
  // default-constructible.
  Space() : p_(Exponent::finite(2.0)) {}

  static Space lp(Exponent p, int dim) {
    if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
    Space s;
    s.kind_ = Kind::Lp;
    s.p_ = p;
    s.dim_ = dim;
    return s;
  }
  static Space lp(double p, int dim) { return lp(Exponent::finite(p), dim); }
  static Space linf(int dim) { return lp(Exponent::inf(), dim); }

  // Outer l_2-sum of `copies` copies of `inner`:
  //   ||(v_1,...,v_c)|| = (sum_i ||v_i||_inner^2)^(1/2).
  static Space l2_sum(const Space& inner, int copies) {
    if (copies < 1) throw std::invalid_argument("copies must be >= 1");
    Space s;
    s.kind_ = Kind::L2Sum;
    s.inner_ = std::make_shared<Space>(inner);
    s.copies_ = copies;
    s.dim_ = inner.dim() * copies;
    return s;
  }

  int dim() const { return dim_; }
  bool is_lp() const { return kind_ == Kind::Lp; }
  bool is_l2_sum() const { return kind_ == Kind::L2Sum; }
  bool is_l1() const { return is_lp() && p_.is_one(); }
  bool is_linf() const { return is_lp() && p_.is_inf(); }

  Exponent p() const {
    require(is_lp(), "p() on non-lp space");
    return p_;
  }
  const Space& inner() const {
    require(is_l2_sum(), "inner() on non-l2sum space");
    return *inner_;
  }
  int copies() const {
    require(is_l2_sum(), "copies() on non-l2sum space");
    return copies_;
  }

  double norm(const Vec& v) const {
    check_dim(v);
    return norm_impl(v);
  }

  // Norm of the conjugate space: l_q with 1/p + 1/q = 1 for l_p; the outer
  // l_2-sum structure is self-dual with inner dual norms.
  double dual_norm(const Vec& y) const {
    check_dim(y);
    return dual_norm_impl(y);
  }

  // Unit dual vector y with <v, y> = ||v||, i.e. Hahn-Banach at the point v.
  // p = inf breaks ties at the lowest maximizing index; p = 1 emits 0 at zero
  // coordinates.  Both choices keep the output deterministic.
  Vec norming_functional(const Vec& v) const {
    check_dim(v);
    if (norm_impl(v) == 0.0)
      throw std::invalid_argument("norming functional of the zero vector");
    return norming_impl(v);
  }

  // Deterministic draw with norm <= 1.  Full support on the ball (gaussian
  // direction with a radial factor), not uniform; only used to seed searches.
  Vec sample_unit_ball(std::uint64_t seed) const {
    auto rng = make_rng(seed);
    Vec g = gaussian_vector(dim_, rng);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double r = std::pow(u01(rng), 1.0 / dim_);
    double nrm = norm_impl(g);
    if (nrm == 0.0) return Vec::Zero(dim_);
    return (r / nrm) * g;
  }

  // Spec-string form used by the CLI and all file formats:
  //   lp:<p>:<dim>            e.g. lp:2:8, lp:inf:5
  //   l2sum:<copies>:(<inner>) e.g. l2sum:3:(lp:1:4)
  std::string spec() const {
    if (kind_ == Kind::Lp)
      return "lp:" + p_.str() + ":" + std::to_string(dim_);
    return "l2sum:" + std::to_string(copies_) + ":(" + inner_->spec() + ")";
  }

  static Space parse(const std::string& s) {
    std::size_t pos = 0;
    Space sp = parse_at(s, pos);
    if (pos != s.size())
      throw std::invalid_argument("trailing characters in space spec: '" + s + "'");
    return sp;
  }

  bool operator==(const Space& o) const {
    if (kind_ != o.kind_ || dim_ != o.dim_) return false;
    if (kind_ == Kind::Lp) return p_ == o.p_;
    return copies_ == o.copies_ && *inner_ == *o.inner_;
  }
  bool operator!=(const Space& o) const { return !(*this == o); }

 private:
  enum class Kind { Lp, L2Sum };

  static void require(bool ok, const char* msg) {
    if (!ok) throw std::logic_error(msg);
  }
  void check_dim(const Vec& v) const {
    if (v.size() != dim_)
      throw std::invalid_argument("vector dimension " + std::to_string(v.size()) +
                                  " does not match space dimension " + std::to_string(dim_));
  }

  static double lp_norm(const Exponent& p, const Vec& v) {
    if (p.is_inf()) return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
    double pv = p.value();
    if (pv == 1.0) return v.cwiseAbs().sum();
    if (pv == 2.0) return v.norm();
    double mx = v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
    if (mx == 0.0) return 0.0;
    double acc = 0.0;
    for (int i = 0; i < v.size(); ++i) acc += std::pow(std::abs(v[i]) / mx, pv);
    return mx * std::pow(acc, 1.0 / pv);
  }

  double norm_impl(const Vec& v) const {
    if (kind_ == Kind::Lp) return lp_norm(p_, v);
    const int d = inner_->dim();
    double ss = 0.0;
    for (int c = 0; c < copies_; ++c) {
      double t = inner_->norm_impl(v.segment(c * d, d));
      ss += t * t;
    }
    return std::sqrt(ss);
  }

  double dual_norm_impl(const Vec& y) const {
    if (kind_ == Kind::Lp) return lp_norm(p_.conjugate(), y);
    const int d = inner_->dim();
    double ss = 0.0;
    for (int c = 0; c < copies_; ++c) {
      double t = inner_->dual_norm_impl(y.segment(c * d, d));
      ss += t * t;
    }
    return std::sqrt(ss);
  }

  Vec norming_impl(const Vec& v) const {
    if (kind_ == Kind::Lp) {
      Vec y = Vec::Zero(dim_);
      if (p_.is_inf()) {
        int best = 0;
        for (int i = 1; i < dim_; ++i)
          if (std::abs(v[i]) > std::abs(v[best])) best = i;
        y[best] = v[best] >= 0.0 ? 1.0 : -1.0;
        return y;
      }
      double pv = p_.value();
      if (pv == 1.0) {
        for (int i = 0; i < dim_; ++i)
          y[i] = v[i] > 0.0 ? 1.0 : (v[i] < 0.0 ? -1.0 : 0.0);
        return y;
      }
      double nrm = lp_norm(p_, v);
      for (int i = 0; i < dim_; ++i) {
        double a = std::abs(v[i]) / nrm;
        double mag = std::pow(a, pv - 1.0);
        y[i] = v[i] >= 0.0 ? mag : -mag;
      }
      return y;
    }
    const int d = inner_->dim();
    double total = norm_impl(v);
    Vec y = Vec::Zero(dim_);
    for (int c = 0; c < copies_; ++c) {
      Vec block = v.segment(c * d, d);
      double bn = inner_->norm_impl(block);
      if (bn == 0.0) continue;
      y.segment(c * d, d) = (bn / total) * inner_->norming_impl(block);
    }
    return y;
  }

  static Space parse_at(const std::string& s, std::size_t& pos) {
    auto fail = [&](const std::string& why) {
      throw std::invalid_argument("bad space spec '" + s + "': " + why);
    };
    auto take_until = [&](char stop) {
      std::size_t start = pos;
      while (pos < s.size() && s[pos] != stop && s[pos] != ')') ++pos;
      return s.substr(start, pos - start);
    };
    auto take_colon = [&] {
      if (pos >= s.size() || s[pos] != ':') fail("expected ':'");
      ++pos;
    };
    auto parse_int = [&](const std::string& tok) {
      if (tok.empty()) fail("empty integer field");
      for (char c : tok)
        if (!std::isdigit(static_cast<unsigned char>(c))) fail("bad integer '" + tok + "'");
      long v = std::strtol(tok.c_str(), nullptr, 10);
      if (v < 1 || v > 1'000'000) fail("integer out of range '" + tok + "'");
      return static_cast<int>(v);
    };

    if (s.compare(pos, 3, "lp:") == 0) {
      pos += 3;
      Exponent p = Exponent::parse(take_until(':'));
      take_colon();
      int dim = parse_int(take_until(':'));
      return lp(p, dim);
    }
    if (s.compare(pos, 6, "l2sum:") == 0) {
      pos += 6;
      int copies = parse_int(take_until(':'));
      take_colon();
      if (pos >= s.size() || s[pos] != '(') fail("expected '('");
      ++pos;
      Space inner = parse_at(s, pos);
      if (pos >= s.size() || s[pos] != ')') fail("expected ')'");
      ++pos;
      return l2_sum(inner, copies);
    }
    fail("unknown space kind");
    return lp(2.0, 1);  // unreachable
  }

  Kind kind_ = Kind::Lp;
  Exponent p_;
  int dim_ = 1;
  std::shared_ptr<const Space> inner_;
  int copies_ = 0;
};

}  // namespace jsum
