#pragma once

// Truncated Laurent series in t over F_{p^k}: x = t^val * (u_0 + u_1 t + ...)
// with u_0 != 0, known modulo t^abs_prec. Exact values carry an infinite
// absolute precision. At most `cap` unit digits are kept; an exact value that
// would need more becomes inexact at relative precision cap.
//
// Only valuations are ever compared: |x| = rho^val for a formal rho in (0, 1).

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "germ/field.hpp"
#include "germ/ring_traits.hpp"

namespace germ {

inline constexpr int kLaurentDefaultPrecision = 32;

struct LaurentContext {
  FieldRef field = nullptr;
  int cap = kLaurentDefaultPrecision;
  friend bool operator==(const LaurentContext&, const LaurentContext&) = default;
};

class LaurentScalar {
 public:
  static constexpr std::int64_t kInfinity = std::numeric_limits<std::int64_t>::max() / 4;

  LaurentScalar() = default;

  static LaurentScalar zero(LaurentContext ctx) { return LaurentScalar(ctx); }
  /// O(t^abs_prec).
  static LaurentScalar zero_to(LaurentContext ctx, std::int64_t abs_prec);
  static LaurentScalar constant(LaurentContext ctx, const FieldElement& c);
  static LaurentScalar from_int(LaurentContext ctx, std::int64_t n);
  /// c * t^k.
  static LaurentScalar monomial(LaurentContext ctx, std::int64_t k, const FieldElement& c);
  /// t^val * sum digits[i] t^i, known modulo t^abs_prec.
  static LaurentScalar from_digits(LaurentContext ctx, std::int64_t val, std::vector<FieldElement> digits,
                                   std::int64_t abs_prec = kInfinity);

  LaurentContext ctx() const { return ctx_; }
  /// t-adic valuation; kInfinity when zero to the known precision.
  std::int64_t val() const { return val_; }
  std::int64_t abs_prec() const { return abs_; }
  /// Digits of the unit part, u_0 != 0.
  const std::vector<FieldElement>& unit() const { return digits_; }
  bool is_zero() const { return val_ == kInfinity; }
  bool is_exact() const { return abs_ == kInfinity; }
  bool is_exact_zero() const { return is_zero() && is_exact(); }
  /// Lower bound on the valuation (the absolute precision for zero-to-precision values).
  std::int64_t val_lower_bound() const { return is_zero() ? abs_ : val_; }
  /// Coefficient of t^k (k below abs_prec).
  FieldElement coeff(std::int64_t k) const;

  LaurentScalar inverse() const;
  /// x^p.
  LaurentScalar frobenius() const;
  /// The y with y^{p^m} = x, if it exists in F_q((t)); UnsolvableRoot otherwise.
  LaurentScalar frobenius_root(unsigned m) const;

  friend LaurentScalar operator+(const LaurentScalar& a, const LaurentScalar& b);
  friend LaurentScalar operator-(const LaurentScalar& a, const LaurentScalar& b) { return a + (-b); }
  friend LaurentScalar operator*(const LaurentScalar& a, const LaurentScalar& b);
  friend LaurentScalar operator/(const LaurentScalar& a, const LaurentScalar& b) { return a * b.inverse(); }
  LaurentScalar operator-() const;
  LaurentScalar& operator+=(const LaurentScalar& o) { return *this = *this + o; }
  LaurentScalar& operator-=(const LaurentScalar& o) { return *this = *this - o; }
  LaurentScalar& operator*=(const LaurentScalar& o) { return *this = *this * o; }

  std::string to_string() const;

 private:
  explicit LaurentScalar(LaurentContext ctx) : ctx_(ctx) {}
  void normalize();

  LaurentContext ctx_{};
  std::int64_t val_ = kInfinity;
  std::vector<FieldElement> digits_;
  std::int64_t abs_ = kInfinity;
};

template <>
struct RingTraits<LaurentScalar> {
  using Context = LaurentContext;

  static Context context(const LaurentScalar& x) { return x.ctx(); }
  static LaurentScalar zero(Context c) { return LaurentScalar::zero(c); }
  static LaurentScalar one(Context c) { return LaurentScalar::from_int(c, 1); }
  static LaurentScalar from_int(Context c, std::int64_t n) { return LaurentScalar::from_int(c, n); }
  /// Zero to the known precision.
  static bool is_zero(const LaurentScalar& x) { return x.is_zero(); }
  /// Zero with no error term; only these may be skipped or dropped.
  static bool is_exact_zero(const LaurentScalar& x) { return x.is_exact_zero(); }
  static std::uint64_t characteristic(Context c) { return c.field->p(); }
  static LaurentScalar frobenius(const LaurentScalar& x) { return x.frobenius(); }
  static LaurentScalar frobenius_root(const LaurentScalar& x, unsigned m) { return x.frobenius_root(m); }
  static LaurentScalar inverse(const LaurentScalar& x) { return x.inverse(); }
  static std::string to_string(const LaurentScalar& x) { return x.to_string(); }
};

}  // namespace germ
