#pragma once

// Germs f(x) = C x^D (1 + ε(x)) in N variables over a finite field, and their
// conjugacy to the monomial map C x^D when gcd(det D, p) = 1.
//
// Exponent convention: column j of D holds the exponents of component j, so
// (x^D)_j = prod_i x_i^{D[i][j]}. The same convention applies to unit vectors
// raised to rational matrices, which makes (u^A)^B = u^{AB}.

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "germ/field.hpp"
#include "germ/numtheory.hpp"

namespace germ {

using Exponent = std::vector<unsigned>;

/// Monomials in N variables of total degree <= T, ordered by degree. Interned.
struct MonomialIndex {
  unsigned N = 0;
  int T = 0;
  std::uint64_t base = 0;  // T + 1; exponent codes are base-(T+1) digit strings
  std::vector<Exponent> exps;
  std::vector<int> deg;
  std::vector<std::uint64_t> code;
  std::vector<std::int32_t> lookup;  // code -> index
  std::vector<std::size_t> upto;     // upto[d] = number of monomials of degree <= d

  std::size_t size() const { return exps.size(); }
  /// Index of the exponent, or -1 when its degree exceeds T.
  std::int64_t find(const Exponent& e) const;

  /// Errors: ValidationError for N = 0, T < 0 or (T+1)^N > 2^24.
  static const MonomialIndex& get(unsigned N, int T);
};

/// Truncated power series in N variables; terms of total degree > T are unknown.
class MultiSeries {
 public:
  MultiSeries() = default;
  MultiSeries(FieldRef field, unsigned N, int T);

  static MultiSeries zero(FieldRef field, unsigned N, int T) { return {field, N, T}; }
  static MultiSeries one(FieldRef field, unsigned N, int T);
  static MultiSeries var(FieldRef field, unsigned N, int T, unsigned i);
  static MultiSeries monomial(FieldRef field, unsigned N, int T, const Exponent& e, const FieldElement& c);
  static MultiSeries from_terms(FieldRef field, unsigned N, int T, const std::map<Exponent, FieldElement>& terms);

  FieldRef field() const { return field_; }
  unsigned nvars() const { return idx_->N; }
  int trunc() const { return idx_->T; }
  const MonomialIndex& index() const { return *idx_; }
  const std::vector<std::uint64_t>& codes() const { return c_; }

  FieldElement coeff(const Exponent& e) const;
  FieldElement constant_term() const { return {field_, c_[0]}; }
  void set(const Exponent& e, const FieldElement& c);
  /// Nonzero terms.
  std::map<Exponent, FieldElement> terms() const;
  bool is_zero() const;
  /// Lowest total degree of a nonzero term; trunc() + 1 when zero to precision.
  int order() const;
  /// Projection to a lower truncation (or padding with unknown terms).
  MultiSeries with_trunc(int T) const;

  friend MultiSeries operator+(const MultiSeries& a, const MultiSeries& b);
  friend MultiSeries operator-(const MultiSeries& a, const MultiSeries& b);
  friend MultiSeries operator*(const MultiSeries& a, const MultiSeries& b);
  friend MultiSeries operator*(const FieldElement& c, const MultiSeries& a);
  MultiSeries operator-() const;
  MultiSeries& operator+=(const MultiSeries& o) { return *this = *this + o; }
  MultiSeries& operator*=(const MultiSeries& o) { return *this = *this * o; }
  /// Equal truncations and equal coefficients.
  friend bool operator==(const MultiSeries& a, const MultiSeries& b);

  std::string to_string() const;

 private:
  MultiSeries(FieldRef field, const MonomialIndex* idx, std::vector<std::uint64_t> c)
      : field_(field), idx_(idx), c_(std::move(c)) {}
  FieldRef field_ = nullptr;
  const MonomialIndex* idx_ = nullptr;
  std::vector<std::uint64_t> c_;
};

using MultiMap = std::vector<MultiSeries>;

MultiSeries pow(const MultiSeries& a, u128 e);
MultiSeries map_field(const MultiSeries& a, const Embedding& emb);
/// Lowest total degree at which two series differ, or -1 when they agree to
/// the smaller truncation.
int first_difference(const MultiSeries& a, const MultiSeries& b);

/// h(F_1, ..., F_N) for every h in hs. Needs F_i(0) = 0. Truncated at the
/// smallest truncation involved. Errors: CompositionWithUnit, ValidationError.
MultiMap compose(const MultiMap& hs, const MultiMap& F);
MultiSeries compose(const MultiSeries& h, const MultiMap& F);
MultiMap identity_map(FieldRef field, unsigned N, int T);
/// Compositional inverse of F = x + (terms of degree >= 2).
MultiMap inverse_map(const MultiMap& F);

using IntMatrix = std::vector<std::vector<std::int64_t>>;
using RatMatrix = std::vector<std::vector<BigRational>>;

/// Errors: ValidationError for a non-square matrix.
BigInt determinant(const IntMatrix& A);
std::size_t rank(const IntMatrix& A);
/// Errors: SingularMatrix.
RatMatrix inverse(const RatMatrix& A);
RatMatrix to_rational(const IntMatrix& A);
RatMatrix multiply(const RatMatrix& A, const RatMatrix& B);
/// Every entry a/b (lowest terms) has nu_p(a) >= nu_p(b).
bool is_p_integral(const RatMatrix& M, std::uint64_t p);

struct PadicMatrixPower {
  RatMatrix M;  // D^{-k}
  bool p_integral = false;
};

/// D^{-k} over the rationals. Errors: SingularMatrix.
PadicMatrixPower matrix_power_padic(const IntMatrix& D, std::uint64_t k, std::uint64_t p);

/// (1 + w)^q for w(0) = 0 and p-integral q. Errors: PadicObstruction.
MultiSeries unit_power(const MultiSeries& u, const BigRational& q);
/// Component j is prod_i u_i^{M[i][j]}. Errors: PadicObstruction, ValidationError.
MultiMap multi_unit_power(const MultiMap& u, const RatMatrix& M);

struct MultiGerm {
  std::vector<FieldElement> C;
  IntMatrix D;
  MultiMap eps;  // eps[j](0) = 0

  unsigned N() const { return static_cast<unsigned>(C.size()); }
  FieldRef field() const { return C.empty() ? nullptr : C.front().field(); }
  int trunc() const;
  /// Shapes, nonnegative D with column sums >= 1, nonzero C, ε(0) = 0, and a
  /// nilpotent linear part. Errors: ValidationError, NotSuperattracting.
  void validate() const;
  /// Component maps C_j x^{D_j} (1 + ε_j), truncated at T.
  MultiMap to_map(int T) const;
  /// The monomial map C x^D truncated at T.
  MultiMap monomial_map(int T) const;
};

/// Recovers (C, D, ε) from component maps of the form c x^a (unit): a is the
/// gcd monomial of the support. Errors: ShapeViolation.
MultiGerm germ_from_map(const MultiMap& f);

struct MonomialConjugacy {
  MultiMap Phi;              // Φ(x) = x φ(x)
  int verified = -1;         // Φ∘f ≡ C x^D ∘ Φ through this total degree
  std::size_t factors = 0;   // nontrivial factors of the product
  std::vector<int> orders;   // vanishing order of ε∘f^{∘k}, k = 0, 1, ...
};

/// Φ = x prod_{k>=1} (1 + ε∘f^{∘k-1})^{D^{-k}} to total degree T, checked by
/// composition. Errors: SingularMatrix, DetDivisibleByP, NotSuperattracting,
/// ValidationError.
MonomialConjugacy monomial_conjugacy(const MultiGerm& f, int T);

/// Highest total degree through which Φ∘f and g∘Φ agree (T when they agree
/// everywhere, -1 when the constant terms already differ).
int verify_multi_conjugacy(const MultiMap& f, const MultiMap& g, const MultiMap& Phi, int T);

struct DiagonalScaling {
  std::optional<std::vector<FieldElement>> delta;
  std::size_t moduli_dimension = 0;   // rank(D - Id) when 1 is an eigenvalue
  std::optional<Embedding> extension;  // set when Δ needed a larger field
};

/// Δ with Δ^{D-Id} = C^{-1}, so that x -> Δx conjugates C x^D to x^D. Absent
/// when det(D - Id) = 0. Roots are the smallest available, extending as needed.
DiagonalScaling diagonal_scaling(const std::vector<FieldElement>& C, const IntMatrix& D);

/// x -> Δ^{-1} f(Δx) as a germ.
MultiGerm scale_germ(const MultiGerm& f, const std::vector<FieldElement>& delta);

MultiGerm map_field(const MultiGerm& f, const Embedding& emb);

}  // namespace germ
