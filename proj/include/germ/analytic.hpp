#pragma once

// Conjugacy of a germ over F_q((t)) to its own truncation, and the growth
// certificate bounding -val(φ_n) linearly in n.

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <string>
#include <vector>

#include "germ/invariants.hpp"
#include "germ/laurent.hpp"
#include "germ/normalizer.hpp"

namespace germ {

/// p^m (d + floor(r_0 p/(p-1)) + 1) - 1. Errors: ValidationError for e = 0.
std::int64_t truncation_target(const InvariantProfile& prof);

/// Φ with Φ∘f = f̃∘Φ mod x^{T+1}, f̃ the truncation of f at truncation_target.
/// Needs e >= 1 and leading coefficient 1; over Laurent scalars also
/// val(ε_n) >= 0. Errors: ValidationError, UnsolvableRoot, InsufficientPrecision.
template <class R>
Solution<R> conjugacy_to_truncation(const Series<R>& f, std::int64_t T) {
  using Traits = RingTraits<R>;
  const InvariantProfile prof = profile(f);
  if (prof.e == 0) fail(Errc::ValidationError, "conjugacy to the truncation needs e >= 1");
  const GermData<R> data = germ_data(f);
  if (!Traits::is_zero(data.leading - Traits::one(f.ctx()))) fail(Errc::ValidationError, "leading coefficient must be 1");
  if constexpr (std::is_same_v<R, LaurentScalar>) {
    for (const auto& c : data.eps.coeffs()) {
      if (!c.is_zero() && c.val() < 0) fail(Errc::ValidationError, "coefficient with negative valuation " + c.to_string());
    }
  }
  const std::int64_t pm = detail::ipow64(prof.p, prof.m);
  const std::int64_t top = truncation_target(prof) / pm - prof.d;
  std::vector<R> target;
  for (std::int64_t n = 0; n <= top; ++n) target.push_back(data.eps[n]);
  return NormalFormSolver<R>(f, T, SolveOptions{}, std::move(target)).run();
}

struct GrowthCertificate {
  std::uint64_t p = 0;
  unsigned m = 0;
  std::int64_t r0 = 0;
  std::int64_t s0 = 0;
  std::int64_t v = 0;  // val(ε_{r_0})
  std::int64_t W = 1;  // γ = ρ^{-W}
  BigRational eta;
  BigRational c;

  std::int64_t s_h(unsigned h) const;
  std::int64_t k_h(unsigned h) const;
  BigRational t_h(unsigned h) const;
  BigRational delta_h(unsigned h) const;
  /// (h, k) with n = s_h + k, 0 <= k < k_h; needs n >= s_0.
  std::pair<unsigned, std::int64_t> block(std::int64_t n) const;
  /// c_n = n for n <= s_0, else s_0 + c(n - s_0) - k δ_h.
  BigRational c_n(std::int64_t n) const;
  /// c_n = t_h + k(c - δ_h) with t_h from its recursion.
  BigRational c_n_recursive(std::int64_t n) const;
};

/// phi holds φ_0, φ_1, ... (at least up to s_0 where available).
GrowthCertificate certificate(const InvariantProfile& prof, const std::vector<LaurentScalar>& phi, std::int64_t v);

struct GrowthRow {
  std::int64_t n = 0;
  std::optional<std::int64_t> neg_val;  // -val(φ_n); empty when φ_n vanishes to precision
  BigRational bound;                    // W c_n
};

struct GrowthReport {
  bool ok = true;
  std::optional<std::int64_t> first_violation;
  /// First φ_n that vanishes only to a precision too coarse to decide the bound.
  std::optional<std::int64_t> first_undetermined;
  BigRational max_ratio;  // max (-val φ_n) / (W c_n)
  BigRational A;          // -val(φ_n) <= A + B n
  BigRational B;
  std::vector<GrowthRow> rows;
};

GrowthReport check_growth(const std::vector<LaurentScalar>& phi, const GrowthCertificate& cert);

std::string big_rational_to_string(const BigRational& q);

/// n, -val(φ_n), W c_n as TSV.
std::string growth_tsv(const GrowthReport& rep);

}  // namespace germ
