#pragma once

// Discrete conjugacy invariants (m, d, e, r) of a superattracting germ and the
// index map J that schedules the normal-form recursion.

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "germ/error.hpp"
#include "germ/numtheory.hpp"
#include "germ/series.hpp"

namespace germ {

using Rational = boost::rational<std::int64_t>;
using BigInt = boost::multiprecision::cpp_int;

struct InvariantProfile {
  std::uint64_t p = 0;
  unsigned m = 0;
  std::int64_t d = 1;
  unsigned e = 0;
  std::vector<std::int64_t> r;  // r_0 >= ... >= r_e = 0

  std::int64_t r0() const { return r.front(); }
  friend bool operator==(const InvariantProfile&, const InvariantProfile&) = default;
  std::string to_string() const;
};

/// f = g(x^{p^m}) with g(y) = C y^d (1 + eps(y)); eps_0 = 1 is stored as well.
template <class R>
struct GermData {
  unsigned m = 0;
  std::int64_t d = 0;
  R leading;
  Series<R> eps;  // coefficients eps_n = g_{d+n} / g_d, truncated at trunc(g) - d
};

/// Validates a superattracting germ and splits off Frobenius and the leading
/// coefficient. Errors: NotSuperattracting, ZeroToPrecision.
template <class R>
GermData<R> germ_data(const Series<R>& f) {
  using Traits = RingTraits<R>;
  if (!Traits::is_zero(f[0])) fail(Errc::NotSuperattracting, "germ does not fix 0");
  auto [g, m] = split_frobenius(f);
  const std::int64_t d = g.ord();
  std::int64_t pm = 1;
  for (unsigned i = 0; i < m; ++i) pm *= static_cast<std::int64_t>(Traits::characteristic(f.ctx()));
  if (d * pm < 2) fail(Errc::NotSuperattracting, "vanishing order d p^m = " + std::to_string(d * pm) + " < 2");
  GermData<R> out;
  out.m = m;
  out.d = d;
  out.leading = g[d];
  const R inv = Traits::inverse(out.leading);
  std::vector<R> eps;
  for (std::int64_t n = d; n < g.size(); ++n) eps.push_back(g.coeffs()[n] * inv);
  out.eps = Series<R>(f.ctx(), std::move(eps), g.is_exact() ? kExact : g.trunc() - d);
  return out;
}

/// False for coefficients that only vanish to the known precision.
template <class R>
bool provably_zero(const R& x) {
  if constexpr (requires { x.is_exact_zero(); }) {
    return x.is_exact_zero();
  } else {
    return RingTraits<R>::is_zero(x);
  }
}

/// r per its recursive definition from eps, d, p. Reports InsufficientPrecision
/// if some r_u is not determined by the visible coefficients.
template <class R>
std::vector<std::int64_t> r_sequence(const Series<R>& eps, std::int64_t d, std::uint64_t p) {
  using Traits = RingTraits<R>;
  const unsigned e = nu_p(d, p);
  const std::int64_t top = eps.is_exact() ? eps.size() - 1 : eps.trunc();
  std::vector<std::int64_t> r;
  for (unsigned u = 0; u <= e; ++u) {
    std::int64_t cand = -1;
    std::int64_t unclear = -1;
    for (std::int64_t n = 0; n <= top && n < eps.size(); ++n) {
      if (nu_p(d + n, p) != u) continue;
      const R& c = eps.coeffs()[n];
      if (!Traits::is_zero(c)) {
        cand = n;
        break;
      }
      if (unclear < 0 && !provably_zero(c)) unclear = n;
    }
    if (unclear >= 0 && (u == 0 || unclear < r.back())) {
      fail(Errc::InsufficientPrecision, "eps_" + std::to_string(unclear) + " vanishes only to the known precision");
    }
    if (u == 0) {
      if (cand < 0) {
        if (eps.is_exact()) fail(Errc::Internal, "exact germ with vanishing derivative after Frobenius split");
        fail(Errc::InsufficientPrecision, "r_0 has no witness eps_n != 0 with nu_p(d+n) = 0 for n <= " +
                                              std::to_string(top) + "; raise the truncation");
      }
      r.push_back(cand);
    } else {
      const std::int64_t prev = r.back();
      if (cand >= 0) {
        r.push_back(std::min(cand, prev));
      } else if (eps.is_exact() || prev <= top + 1) {
        r.push_back(prev);
      } else {
        fail(Errc::InsufficientPrecision,
             "r_" + std::to_string(u) + " is not resolved: eps is known up to n = " + std::to_string(top) +
                 ", needs n = " + std::to_string(prev - 1));
      }
    }
  }
  return r;
}

template <class R>
InvariantProfile profile(const Series<R>& f) {
  const GermData<R> data = germ_data(f);
  InvariantProfile prof;
  prof.p = RingTraits<R>::characteristic(f.ctx());
  prof.m = data.m;
  prof.d = data.d;
  prof.e = nu_p(data.d, prof.p);
  prof.r = r_sequence(data.eps, data.d, prof.p);
  return prof;
}

/// Checks the structural invariants of a profile (non-increasing r, r_e = 0,
/// d p^m >= 2). Errors: ValidationError.
void validate_profile(const InvariantProfile& prof);

struct JValues {
  std::vector<Rational> per_k;  // J_0(n) .. J_e(n)
  std::int64_t j = 0;           // J(n) = max_k J_k(n)
};

JValues jays(const InvariantProfile& prof, std::int64_t n);
std::int64_t big_j(const InvariantProfile& prof, std::int64_t n);

/// {n : J(n) = j}, ascending.
std::vector<std::int64_t> fiber(const InvariantProfile& prof, std::int64_t j);

std::int64_t n_prime(const InvariantProfile& prof, std::int64_t j);
/// Lexicographic order on (min(nu_p(n), e), n), nu_p(0) = infinity.
std::strong_ordering preceq_cmp(std::uint64_t p, unsigned e, std::int64_t n1, std::int64_t n2);
std::int64_t n_doubleprime(const InvariantProfile& prof, std::int64_t j);

/// max_{k >= 1} (r_0 - r_k) / (p^k - 1); requires e >= 1.
Rational stable_threshold(const InvariantProfile& prof);

struct CompositionBound {
  unsigned m = 0;
  std::int64_t d = 0;
  unsigned e = 0;
  std::vector<std::int64_t> r_bound;
  std::vector<bool> certain;  // equality guaranteed (unique minimizer, u = 0 or u = e)
};

/// Invariants of f'' ∘ f' from those of f' (first) and f'' (second).
CompositionBound compose_bound(const InvariantProfile& inner, const InvariantProfile& outer);

struct IterateProfile {
  BigInt m;
  BigInt d;
  BigInt e;
  BigInt r0;
};

IterateProfile iterate_profile(const InvariantProfile& prof, unsigned n);

/// Germ at infinity of P(z) = sum c_i z^i in the coordinate x = 1/z:
/// x^D / (c_D + c_{D-1} x + ... + c_0 x^D), truncated at `trunc` (default
/// 2D + 1, enough to resolve r_0 <= d). Checks r_0 <= d. Errors: DegreeTooSmall.
FSeries germ_at_infinity(const std::vector<FieldElement>& coeffs, std::optional<std::int64_t> trunc = std::nullopt);

/// Rows n = 0..n_max of the J table as TSV: n, J_0..J_e, J, with "x" where
/// n = r_k (in the J_k column) or n is some r_u (in the J column) and blank
/// cells for zero.
std::string jtable_tsv(const InvariantProfile& prof, std::int64_t n_max);

std::string rational_to_string(const Rational& q);

}  // namespace germ
