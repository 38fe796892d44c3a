#pragma once

// Truncated univariate power series over a coefficient ring R (see
// ring_traits.hpp). A series stores c_0..c_k (k <= trunc) and trusts every
// coefficient up to trunc; coefficients above the stored ones but <= trunc are
// zero. trunc == kExact marks a polynomial known exactly.
//
// Every operation computes the truncation of its result from the truncations
// and vanishing orders of its inputs, so a stored coefficient is always fully
// determined by trusted input data.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "germ/error.hpp"
#include "germ/numtheory.hpp"
#include "germ/ring_traits.hpp"

namespace germ {

inline constexpr std::int64_t kExact = std::int64_t{1} << 40;

inline std::int64_t clamp_trunc(__int128 t) {
  if (t >= kExact) return kExact;
  return static_cast<std::int64_t>(t);
}

template <class R>
class Series {
 public:
  using Traits = RingTraits<R>;
  using Context = typename Traits::Context;

  Series() = default;
  Series(Context ctx, std::int64_t trunc) : ctx_(ctx), trunc_(trunc) {}
  Series(Context ctx, std::vector<R> coeffs, std::int64_t trunc)
      : ctx_(ctx), coeffs_(std::move(coeffs)), trunc_(trunc) {
    if (trunc_ < -1) fail(Errc::Internal, "negative truncation");
    if (static_cast<std::int64_t>(coeffs_.size()) > trunc_ + 1) coeffs_.resize(static_cast<std::size_t>(trunc_ + 1));
    trim();
  }

  static Series constant(Context ctx, const R& c, std::int64_t trunc = kExact) {
    return Series(ctx, std::vector<R>{c}, trunc);
  }
  static Series one(Context ctx, std::int64_t trunc = kExact) { return constant(ctx, Traits::one(ctx), trunc); }
  static Series monomial(Context ctx, std::int64_t n, const R& c, std::int64_t trunc = kExact) {
    std::vector<R> v(static_cast<std::size_t>(n + 1), Traits::zero(ctx));
    v[static_cast<std::size_t>(n)] = c;
    return Series(ctx, std::move(v), trunc);
  }
  static Series x(Context ctx, std::int64_t trunc = kExact) { return monomial(ctx, 1, Traits::one(ctx), trunc); }

  Context ctx() const { return ctx_; }
  std::int64_t trunc() const { return trunc_; }
  bool is_exact() const { return trunc_ >= kExact; }
  const std::vector<R>& coeffs() const { return coeffs_; }
  /// Number of stored coefficients (one past the last nonzero one).
  std::int64_t size() const { return static_cast<std::int64_t>(coeffs_.size()); }

  R operator[](std::int64_t n) const {
    if (n < 0) return Traits::zero(ctx_);
    if (n > trunc_) fail(Errc::Internal, "coefficient " + std::to_string(n) + " beyond truncation " + std::to_string(trunc_));
    return n < size() ? coeffs_[static_cast<std::size_t>(n)] : Traits::zero(ctx_);
  }

  void set(std::int64_t n, const R& c) {
    if (n > trunc_) fail(Errc::Internal, "write beyond truncation");
    if (n >= size()) {
      if (Traits::is_exact_zero(c)) return;
      coeffs_.resize(static_cast<std::size_t>(n + 1), Traits::zero(ctx_));
    }
    coeffs_[static_cast<std::size_t>(n)] = c;
    if (n == size() - 1) trim();
  }

  /// First index with a nonzero stored coefficient.
  std::optional<std::int64_t> ord_opt() const {
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (!Traits::is_zero(coeffs_[i])) return static_cast<std::int64_t>(i);
    }
    return std::nullopt;
  }
  /// Order of vanishing; ZeroToPrecision if nothing nonzero is visible.
  std::int64_t ord() const {
    auto o = ord_opt();
    if (!o) fail(Errc::ZeroToPrecision, "series vanishes to precision " + std::to_string(trunc_));
    return *o;
  }
  /// Lower bound on the order usable in truncation formulas.
  /// Coefficients that vanish only to precision count as nonzero here.
  std::int64_t low() const {
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (!Traits::is_exact_zero(coeffs_[i])) return static_cast<std::int64_t>(i);
    }
    return is_exact() ? kExact : trunc_ + 1;
  }
  bool is_zero_to_precision() const { return !ord_opt().has_value(); }

  Series truncated(std::int64_t t) const {
    if (t >= trunc_) return *this;
    Series out(ctx_, trunc_);
    out.trunc_ = t;
    out.coeffs_.assign(coeffs_.begin(), coeffs_.begin() + std::min<std::int64_t>(size(), t + 1));
    out.trim();
    return out;
  }

  /// Same coefficients with a new truncation claim. Used by algorithms that
  /// know a sharper bound than the generic propagation.
  Series with_trunc(std::int64_t t) const {
    Series out = *this;
    out.trunc_ = t;
    if (out.size() > t + 1) out.coeffs_.resize(static_cast<std::size_t>(t + 1));
    out.trim();
    return out;
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (Traits::is_zero(coeffs_[i])) continue;
      if (!s.empty()) s += " + ";
      s += Traits::to_string(coeffs_[i]);
      if (i > 0) s += "*x^" + std::to_string(i);
    }
    if (s.empty()) s = "0";
    if (!is_exact()) s += " + O(x^" + std::to_string(trunc_ + 1) + ")";
    return s;
  }

 private:
  void trim() {
    while (!coeffs_.empty() && Traits::is_exact_zero(coeffs_.back())) coeffs_.pop_back();
  }

  Context ctx_{};
  std::vector<R> coeffs_;
  std::int64_t trunc_ = kExact;
};

// ---------------------------------------------------------------------------
// Ring operations

template <class R>
Series<R> operator+(const Series<R>& a, const Series<R>& b) {
  const std::int64_t t = std::min(a.trunc(), b.trunc());
  const std::int64_t n = std::min(std::max(a.size(), b.size()), t + 1);
  std::vector<R> v;
  v.reserve(static_cast<std::size_t>(std::max<std::int64_t>(n, 0)));
  for (std::int64_t i = 0; i < n; ++i) {
    if (i < a.size() && i < b.size()) {
      v.push_back(a.coeffs()[i] + b.coeffs()[i]);
    } else {
      v.push_back(i < a.size() ? a.coeffs()[i] : b.coeffs()[i]);
    }
  }
  return Series<R>(a.ctx(), std::move(v), t);
}

template <class R>
Series<R> operator-(const Series<R>& a) {
  std::vector<R> v;
  v.reserve(a.coeffs().size());
  for (const auto& c : a.coeffs()) v.push_back(-c);
  return Series<R>(a.ctx(), std::move(v), a.trunc());
}

template <class R>
Series<R> operator-(const Series<R>& a, const Series<R>& b) {
  return a + (-b);
}

template <class R>
Series<R> scale(const Series<R>& a, const R& c) {
  std::vector<R> v;
  v.reserve(a.coeffs().size());
  for (const auto& x : a.coeffs()) v.push_back(x * c);
  return Series<R>(a.ctx(), std::move(v), a.trunc());
}

namespace detail {

// Raw truncated product of coefficient vectors, keeping degrees <= limit.
template <class R>
std::vector<R> mul_raw(const std::vector<R>& a, const std::vector<R>& b, std::int64_t limit, const R& zero) {
  if (a.empty() || b.empty() || limit < 0) return {};
  const std::int64_t n = std::min<std::int64_t>(static_cast<std::int64_t>(a.size() + b.size()) - 2, limit);
  std::vector<R> out(static_cast<std::size_t>(n + 1), zero);
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(a.size()) && i <= n; ++i) {
    if (RingTraits<R>::is_exact_zero(a[i])) continue;
    const std::int64_t jmax = std::min<std::int64_t>(static_cast<std::int64_t>(b.size()) - 1, n - i);
    for (std::int64_t j = 0; j <= jmax; ++j) {
      if (RingTraits<R>::is_exact_zero(b[j])) continue;
      out[i + j] += a[i] * b[j];
    }
  }
  return out;
}

}  // namespace detail

template <class R>
Series<R> operator*(const Series<R>& a, const Series<R>& b) {
  const std::int64_t t = clamp_trunc(std::min(static_cast<__int128>(a.trunc()) + b.low(),
                                               static_cast<__int128>(b.trunc()) + a.low()));
  const std::int64_t limit = std::min<std::int64_t>(t, a.size() + b.size());
  return Series<R>(a.ctx(), detail::mul_raw(a.coeffs(), b.coeffs(), limit, RingTraits<R>::zero(a.ctx())), t);
}

/// f^p = T(f)(x^p) in characteristic p.
template <class R>
Series<R> frobenius_power(const Series<R>& f) {
  using Traits = RingTraits<R>;
  const std::uint64_t p = Traits::characteristic(f.ctx());
  const std::int64_t t = f.is_exact() ? kExact : clamp_trunc(static_cast<__int128>(p) * (f.trunc() + 1) - 1);
  std::vector<R> v;
  if (f.size() > 0) {
    const std::int64_t n = std::min<std::int64_t>((f.size() - 1) * static_cast<std::int64_t>(p), t);
    v.assign(static_cast<std::size_t>(n + 1), Traits::zero(f.ctx()));
    for (std::int64_t i = 0; i < f.size() && i * static_cast<std::int64_t>(p) <= n; ++i) {
      if (!Traits::is_exact_zero(f.coeffs()[i])) v[i * p] = Traits::frobenius(f.coeffs()[i]);
    }
  }
  return Series<R>(f.ctx(), std::move(v), t);
}

template <class R>
Series<R> frobenius_power(const Series<R>& f, unsigned s) {
  Series<R> out = f;
  for (unsigned i = 0; i < s; ++i) out = frobenius_power(out);
  return out;
}

/// The operator T: coefficient-wise Frobenius.
template <class R>
Series<R> t_operator(const Series<R>& f) {
  std::vector<R> v;
  v.reserve(f.coeffs().size());
  for (const auto& c : f.coeffs()) v.push_back(RingTraits<R>::frobenius(c));
  return Series<R>(f.ctx(), std::move(v), f.trunc());
}

/// T^{-m}: coefficient-wise p^m-th roots.
template <class R>
Series<R> t_operator_inverse(const Series<R>& f, unsigned m) {
  std::vector<R> v;
  v.reserve(f.coeffs().size());
  for (const auto& c : f.coeffs()) v.push_back(RingTraits<R>::frobenius_root(c, m));
  return Series<R>(f.ctx(), std::move(v), f.trunc());
}

/// f^h by splitting off the p-part of h through frobenius_power. An optional
/// limit truncates intermediate results early.
template <class R>
Series<R> pow(const Series<R>& f, u128 h, std::optional<std::int64_t> limit = std::nullopt) {
  using Traits = RingTraits<R>;
  const std::uint64_t p = Traits::characteristic(f.ctx());
  auto cut = [&](Series<R> s) { return limit ? s.truncated(*limit) : s; };
  if (h == 0) return cut(Series<R>::one(f.ctx()));
  Series<R> base = cut(f);
  while (h % p == 0) {
    base = cut(frobenius_power(base));
    h /= p;
  }
  Series<R> result = Series<R>::one(base.ctx());
  bool first = true;
  while (h > 0) {
    if (h & 1) {
      result = first ? base : cut(result * base);
      first = false;
    }
    h >>= 1;
    if (h > 0) base = cut(base * base);
  }
  return result;
}

/// Composition g(h(x)); requires h(0) = 0. If g only involves powers of
/// x^{p^a} the inner series is raised by Frobenius first, which keeps the
/// truncation sharp.
template <class R>
Series<R> compose(const Series<R>& g, const Series<R>& h) {
  using Traits = RingTraits<R>;
  if (!Traits::is_zero(h[0])) fail(Errc::CompositionWithUnit, "inner series has a nonzero constant term");
  const std::uint64_t p = Traits::characteristic(g.ctx());
  // largest a with g supported on multiples of p^a
  unsigned a = 0;
  bool any_positive = false;
  for (std::int64_t i = 1; i < g.size(); ++i) any_positive |= !Traits::is_exact_zero(g.coeffs()[i]);
  if (any_positive) {
    std::uint64_t step = p;
    while (step <= static_cast<std::uint64_t>(g.size())) {
      bool ok = true;
      for (std::int64_t i = 1; i < g.size() && ok; ++i) {
        if (!Traits::is_exact_zero(g.coeffs()[i]) && static_cast<std::uint64_t>(i) % step != 0) ok = false;
      }
      if (!ok) break;
      ++a;
      step *= p;
    }
  }
  std::int64_t pa = 1;
  for (unsigned i = 0; i < a; ++i) pa *= static_cast<std::int64_t>(p);
  std::vector<R> gc;
  for (std::int64_t i = 0; i < g.size(); i += pa) gc.push_back(g.coeffs()[i]);
  const std::int64_t tg = g.is_exact() ? kExact : g.trunc() / pa;
  const Series<R> gp(g.ctx(), std::move(gc), tg);
  const Series<R> H = frobenius_power(h, a);
  const std::int64_t oh = H.low();
  std::int64_t kmin = gp.is_exact() ? kExact : gp.trunc() + 1;
  for (std::int64_t k = 1; k < gp.size(); ++k) {
    if (!Traits::is_exact_zero(gp.coeffs()[k])) {
      kmin = k;
      break;
    }
  }
  __int128 t1 = gp.is_exact() ? static_cast<__int128>(kExact) : static_cast<__int128>(tg + 1) * oh - 1;
  __int128 t2 = H.is_exact() || kmin >= kExact ? static_cast<__int128>(kExact)
                                               : static_cast<__int128>(H.trunc()) + static_cast<__int128>(kmin - 1) * oh;
  std::int64_t t = clamp_trunc(std::min(t1, t2));
  if (t >= kExact) {
    // exact result: degree bound
    t = kExact;
  }
  const std::int64_t deg_bound =
      clamp_trunc(static_cast<__int128>(std::max<std::int64_t>(gp.size() - 1, 0)) * std::max<std::int64_t>(H.size() - 1, 0));
  const std::int64_t limit = std::min(t, deg_bound);
  const R zero = Traits::zero(g.ctx());
  std::vector<R> acc;
  const std::vector<R> hv(H.coeffs().begin(), H.coeffs().begin() + std::min<std::int64_t>(H.size(), limit + 1));
  for (std::int64_t k = gp.size() - 1; k >= 0; --k) {
    acc = detail::mul_raw(acc, hv, limit, zero);
    if (acc.empty()) acc.push_back(gp.coeffs()[k]);
    else acc[0] += gp.coeffs()[k];
  }
  return Series<R>(g.ctx(), std::move(acc), t);
}

/// 1/f; f(0) must be invertible. Exact non-constant input needs a limit.
template <class R>
Series<R> reciprocal(const Series<R>& f, std::optional<std::int64_t> limit = std::nullopt) {
  using Traits = RingTraits<R>;
  if (Traits::is_zero(f[0])) fail(Errc::NonUnitReciprocal, "constant term is not invertible");
  std::int64_t t = limit ? std::min(*limit, f.trunc()) : f.trunc();
  if (t >= kExact) {
    if (f.size() == 1) return Series<R>::constant(f.ctx(), Traits::inverse(f[0]));
    fail(Errc::ValidationError, "reciprocal of a polynomial needs a truncation");
  }
  const R inv0 = Traits::inverse(f[0]);
  std::vector<R> g(static_cast<std::size_t>(t + 1), Traits::zero(f.ctx()));
  g[0] = inv0;
  const R minus_inv0 = -inv0;
  for (std::int64_t n = 1; n <= t; ++n) {
    R acc = Traits::zero(f.ctx());
    const std::int64_t kmax = std::min(n, f.size() - 1);
    for (std::int64_t k = 1; k <= kmax; ++k) {
      if (Traits::is_exact_zero(f.coeffs()[k]) || Traits::is_exact_zero(g[n - k])) continue;
      acc += f.coeffs()[k] * g[n - k];
    }
    g[n] = acc * minus_inv0;
  }
  return Series<R>(f.ctx(), std::move(g), t);
}

template <class R>
Series<R> derivative(const Series<R>& f) {
  using Traits = RingTraits<R>;
  std::vector<R> v;
  for (std::int64_t n = 1; n < f.size(); ++n) v.push_back(Traits::from_int(f.ctx(), n) * f.coeffs()[n]);
  return Series<R>(f.ctx(), std::move(v), f.is_exact() ? kExact : f.trunc() - 1);
}

/// Multiplication by x^k.
template <class R>
Series<R> shift(const Series<R>& f, std::int64_t k) {
  std::vector<R> v(static_cast<std::size_t>(k), RingTraits<R>::zero(f.ctx()));
  v.insert(v.end(), f.coeffs().begin(), f.coeffs().end());
  return Series<R>(f.ctx(), std::move(v), f.is_exact() ? kExact : f.trunc() + k);
}

/// Compositional inverse g of f (f(0) = 0, f'(0) invertible) with f∘g = x,
/// by Newton iteration. Truncated at the truncation of f (or the limit).
template <class R>
Series<R> reversion(const Series<R>& f, std::optional<std::int64_t> limit = std::nullopt) {
  using Traits = RingTraits<R>;
  if (!Traits::is_zero(f[0])) fail(Errc::CompositionWithUnit, "reversion needs f(0) = 0");
  if (Traits::is_zero(f[1])) fail(Errc::NonUnitReciprocal, "reversion needs f'(0) != 0");
  const std::int64_t t = limit ? std::min(*limit, f.trunc()) : f.trunc();
  if (t >= kExact) fail(Errc::ValidationError, "reversion of a polynomial needs a truncation");
  const Series<R> ft = f.truncated(t);
  const Series<R> df = derivative(ft);
  const Series<R> x = Series<R>::x(f.ctx());
  Series<R> g = Series<R>::monomial(f.ctx(), 1, Traits::inverse(f[1]), std::min<std::int64_t>(t, 1));
  std::int64_t prec = 1;
  while (prec < t) {
    prec = std::min(2 * prec, t);
    const Series<R> gp = g.with_trunc(prec);
    const Series<R> err = (compose(ft.truncated(prec), gp) - x).with_trunc(prec);
    const Series<R> corr = err * reciprocal(compose(df.truncated(prec), gp).with_trunc(prec));
    g = (gp - corr).with_trunc(prec);
  }
  return g.with_trunc(t);
}

/// u^{a/b} for u(0) = 1 and nu_p(a) >= nu_p(b), from the mod-p binomial
/// coefficients of the p-integral exponent. Exact input needs a limit.
template <class R>
Series<R> binomial_pow(const Series<R>& u, std::int64_t a, std::int64_t b, std::optional<std::int64_t> limit = std::nullopt) {
  using Traits = RingTraits<R>;
  if (b == 0) fail(Errc::ValidationError, "zero denominator");
  const R one = Traits::one(u.ctx());
  if (!Traits::is_zero(u[0] - one)) fail(Errc::ValidationError, "binomial_pow needs u(0) = 1");
  const std::uint64_t p = Traits::characteristic(u.ctx());
  if (a != 0 && nu_p(a, p) < nu_p(b, p)) fail(Errc::PadicObstruction, "nu_p(a) < nu_p(b)");
  if (b < 0) {
    a = -a;
    b = -b;
  }
  const std::int64_t g = gcd_i64(a, b);
  if (g != 0) {
    a /= g;
    b /= g;
  }
  if (a == 0) {
    return Series<R>::one(u.ctx(), limit ? std::min(*limit, u.trunc()) : u.trunc());
  }
  unsigned s = 0;
  while (a % static_cast<std::int64_t>(p) == 0) {
    a /= static_cast<std::int64_t>(p);
    ++s;
  }
  Series<R> v = u;
  if (limit) v = v.truncated(*limit);
  v = frobenius_power(v, s);
  std::int64_t t = limit ? std::min(*limit, v.trunc()) : v.trunc();
  if (t >= kExact) {
    if (b == 1 && a > 0) return pow(v, static_cast<u128>(a));
    fail(Errc::ValidationError, "non-integral power of a polynomial needs a truncation");
  }
  v = v.truncated(t);
  const Series<R> w = v - Series<R>::one(u.ctx());
  const std::int64_t ow = w.low();
  const std::int64_t nterms = ow > t ? 0 : t / ow;
  const auto residues = binomial_series_residues(a, b, p, static_cast<std::size_t>(nterms + 1));
  const R zero = Traits::zero(u.ctx());
  std::vector<R> acc;
  const std::vector<R> wv = w.coeffs();
  for (std::int64_t n = nterms; n >= 0; --n) {
    acc = detail::mul_raw(acc, wv, t, zero);
    const R c = Traits::from_int(u.ctx(), static_cast<std::int64_t>(residues[n]));
    if (acc.empty()) acc.push_back(c);
    else acc[0] += c;
  }
  return Series<R>(u.ctx(), std::move(acc), t);
}

template <class R>
struct FrobeniusSplit {
  Series<R> g;
  unsigned m = 0;
};

/// f = g(x^{p^m}) with m = min nu_p over the support of f.
template <class R>
FrobeniusSplit<R> split_frobenius(const Series<R>& f) {
  using Traits = RingTraits<R>;
  const std::uint64_t p = Traits::characteristic(f.ctx());
  unsigned m = kNuInfinity;
  for (std::int64_t n = 1; n < f.size(); ++n) {
    if (!Traits::is_zero(f.coeffs()[n])) m = std::min(m, nu_p(n, p));
  }
  if (m == kNuInfinity) fail(Errc::ZeroToPrecision, "no nonconstant term within precision");
  std::int64_t pm = 1;
  for (unsigned i = 0; i < m; ++i) pm *= static_cast<std::int64_t>(p);
  std::vector<R> v;
  for (std::int64_t n = 0; n < f.size(); n += pm) v.push_back(f.coeffs()[n]);
  return {Series<R>(f.ctx(), std::move(v), f.is_exact() ? kExact : f.trunc() / pm), m};
}

/// g(x^k).
template <class R>
Series<R> inflate(const Series<R>& g, std::int64_t k) {
  using Traits = RingTraits<R>;
  std::vector<R> v;
  if (g.size() > 0) {
    v.assign(static_cast<std::size_t>((g.size() - 1) * k + 1), Traits::zero(g.ctx()));
    for (std::int64_t n = 0; n < g.size(); ++n) v[n * k] = g.coeffs()[n];
  }
  return Series<R>(g.ctx(), std::move(v), g.is_exact() ? kExact : clamp_trunc(static_cast<__int128>(g.trunc() + 1) * k - 1));
}

/// First index <= min truncation where a and b differ, if any.
template <class R>
std::optional<std::int64_t> first_difference(const Series<R>& a, const Series<R>& b) {
  const std::int64_t t = std::min(a.trunc(), b.trunc());
  const std::int64_t n = std::min(std::max(a.size(), b.size()) - 1, t);
  for (std::int64_t i = 0; i <= n; ++i) {
    if (!RingTraits<R>::is_zero(a[i] - b[i])) return i;
  }
  return std::nullopt;
}

/// Apply a coefficient map (for instance a field embedding).
template <class R, class Fn>
Series<R> map_coeffs(const Series<R>& f, typename RingTraits<R>::Context ctx, Fn&& fn) {
  std::vector<R> v;
  v.reserve(f.coeffs().size());
  for (const auto& c : f.coeffs()) v.push_back(fn(c));
  return Series<R>(ctx, std::move(v), f.trunc());
}

using FSeries = Series<FieldElement>;

}  // namespace germ
