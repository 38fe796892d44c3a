#pragma once

// Finite fields F_{p^k} in the polynomial basis of a monic irreducible modulus.
//
// Field descriptors are interned: field_create() returns a pointer into a
// process-wide registry that is never freed, so FieldRef is a cheap handle that
// compares by identity and can be shared across threads. Elements are
// (field, code) pairs with code = sum_i c_i p^i, c_i the coordinates in the
// basis 1, a, a^2, ... of the modulus root a.

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "germ/numtheory.hpp"

namespace germ {

class Field;
using FieldRef = const Field*;

class Field {
 public:
  std::uint64_t p() const { return p_; }
  unsigned k() const { return k_; }
  /// Monic modulus, coefficients c_0..c_k with c_k = 1.
  const std::vector<std::uint64_t>& modulus() const { return modulus_; }
  u128 order() const { return order_; }
  bool is_prime_field() const { return k_ == 1; }
  std::string describe() const;

  // Arithmetic on element codes. Codes must be < order().
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t neg(std::uint64_t a) const;
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t inv(std::uint64_t a) const;
  std::uint64_t pow(std::uint64_t a, u128 e) const;
  std::uint64_t from_int(std::int64_t n) const { return residue(n, p_); }

  std::vector<std::uint64_t> digits(std::uint64_t code) const;
  std::uint64_t encode(std::span<const std::uint64_t> digits) const;

  Field(const Field&) = delete;
  Field& operator=(const Field&) = delete;

 private:
  friend class FieldRegistry;
  Field(std::uint64_t p, unsigned k, std::vector<std::uint64_t> modulus);
  void build_tables();
  std::uint64_t mul_poly(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t add_digits(std::uint64_t a, std::uint64_t b, bool subtract) const;

  std::uint64_t p_;
  unsigned k_;
  std::vector<std::uint64_t> modulus_;
  u128 order_;
  std::vector<std::uint64_t> pow_p_;  // p^i for i < k

  // Discrete-log tables (k >= 2 and q <= kTableLimit)
  bool tables_ = false;
  std::vector<std::uint32_t> log_;
  std::vector<std::uint32_t> exp_;
  std::vector<std::int32_t> zech_;
  std::uint32_t log_minus_one_ = 0;
};

inline constexpr std::uint64_t kTableLimit = 1u << 16;

/// Creates (or returns the interned) field F_{p^k}. Without a modulus, the
/// lowest monic irreducible polynomial in the order of the base-p integer
/// c_0 + c_1 p + ... + c_{k-1} p^{k-1} is used. Errors: CompositeP,
/// ReducibleModulus, FieldTooLarge (p^k > 2^64), ValidationError.
FieldRef field_create(std::uint64_t p, unsigned k,
                      std::optional<std::vector<std::uint64_t>> modulus = std::nullopt);

inline FieldRef prime_field(std::uint64_t p) { return field_create(p, 1); }

class FieldElement {
 public:
  FieldElement() = default;
  FieldElement(FieldRef field, std::uint64_t code) : field_(field), code_(code) {}

  static FieldElement zero(FieldRef f) { return {f, 0}; }
  static FieldElement one(FieldRef f) { return {f, 1}; }
  static FieldElement from_int(FieldRef f, std::int64_t n) { return {f, f->from_int(n)}; }
  static FieldElement from_coeffs(FieldRef f, std::span<const std::uint64_t> coeffs);
  /// The class of x modulo the field modulus (equals from_int(-c_0) when k = 1).
  static FieldElement generator(FieldRef f);

  FieldRef field() const { return field_; }
  std::uint64_t code() const { return code_; }
  std::vector<std::uint64_t> coeffs() const { return field_->digits(code_); }
  bool is_zero() const { return code_ == 0; }
  bool is_one() const { return code_ == 1; }

  FieldElement inverse() const;
  FieldElement pow(u128 e) const { return {field_, field_->pow(code_, e)}; }
  /// x -> x^p.
  FieldElement frobenius() const { return pow(field_->p()); }

  friend FieldElement operator+(const FieldElement& a, const FieldElement& b);
  friend FieldElement operator-(const FieldElement& a, const FieldElement& b);
  friend FieldElement operator*(const FieldElement& a, const FieldElement& b);
  friend FieldElement operator/(const FieldElement& a, const FieldElement& b);
  FieldElement operator-() const { return {field_, field_->neg(code_)}; }
  FieldElement& operator+=(const FieldElement& o) { return *this = *this + o; }
  FieldElement& operator-=(const FieldElement& o) { return *this = *this - o; }
  FieldElement& operator*=(const FieldElement& o) { return *this = *this * o; }

  /// Elements of different fields compare equal only when both lie in the
  /// common prime field.
  friend bool operator==(const FieldElement& a, const FieldElement& b);
  /// Fixed total order used for deterministic root choices: lexicographic on
  /// the coefficient vector read from the highest coordinate down.
  friend std::strong_ordering operator<=>(const FieldElement& a, const FieldElement& b) {
    return a.code_ <=> b.code_;
  }

  std::string to_string() const;

 private:
  FieldRef field_ = nullptr;
  std::uint64_t code_ = 0;
};

/// The unique y with y^(p^m) = x.
FieldElement frobenius_root(const FieldElement& x, unsigned m);

/// True iff zeta^n = zeta.
bool unity_relation(const FieldElement& zeta, u128 n);

/// Field homomorphism F_{p^a} -> F_{p^b} (a | b) sending the generator of the
/// source to a fixed root of its modulus in the target.
struct Embedding {
  FieldRef from = nullptr;
  FieldRef to = nullptr;
  FieldElement image;  // image of FieldElement::generator(from)

  FieldElement operator()(const FieldElement& x) const;
};

/// Cached; picks the smallest root of the source modulus in the target.
Embedding embedding(FieldRef from, FieldRef to);

// Dense univariate polynomials, coefficient of z^i at index i.
using Poly = std::vector<FieldElement>;

namespace poly {
void trim(Poly& f);
int degree(const Poly& f);  // -1 for the zero polynomial
Poly add(const Poly& a, const Poly& b);
Poly sub(const Poly& a, const Poly& b);
Poly mul(const Poly& a, const Poly& b);
/// Quotient and remainder; b must be nonzero.
std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b);
Poly mod(const Poly& a, const Poly& b);
Poly monic(const Poly& f);
Poly gcd(Poly a, Poly b);
Poly powmod(const Poly& base, u128 e, const Poly& m);
FieldElement eval(const Poly& f, const FieldElement& z);
Poly map(const Poly& f, const Embedding& emb);
}  // namespace poly

struct RootResult {
  std::vector<FieldElement> roots;  // sorted ascending, distinct
  FieldRef field = nullptr;         // field the roots live in
  std::optional<Embedding> embedding;  // set when an extension was built
};

/// Distinct roots of a nonzero polynomial. When none exist and
/// allow_extension is set, moves to the smallest extension (canonical default
/// modulus over the prime field) containing a root. Equal-degree splitting is
/// randomized with the given seed. Errors: NoRootInField, FieldTooLarge,
/// ValidationError (zero polynomial).
RootResult poly_roots(const Poly& coeffs, bool allow_extension, std::uint64_t seed = 0);

/// Smallest s such that the polynomial has a root in the degree-s extension.
unsigned root_extension_degree(const Poly& f);

}  // namespace germ
