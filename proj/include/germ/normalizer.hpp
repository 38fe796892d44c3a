#pragma once

// Normal forms of superattracting germs. The solver determines Φ(x) = xφ(x)
// and the target coefficients ε̃ column by column from
//   (1 + ε(y)) φ(y^d (1 + ε(y))) = (1 + ε̃(T^m φ(y) y)) (T^m φ(y))^d,
// in the order given by the index map J of the invariants module.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "germ/error.hpp"
#include "germ/field.hpp"
#include "germ/invariants.hpp"
#include "germ/laurent.hpp"
#include "germ/series.hpp"

namespace germ {

enum class NRuleKind { NPrime, NDoublePrime, Custom };

/// Which member of each fiber J^{-1}(j) gets ε̃ = 0.
struct NRule {
  NRuleKind kind = NRuleKind::NDoublePrime;
  std::map<std::int64_t, std::int64_t> table;  // j -> N(j), custom rule only

  std::string name() const;
  /// "nprime" or "ndoubleprime". Errors: ParseError.
  static NRule parse(const std::string& s);
};

/// N(j) under the rule. For j >= r_0/(p-1) the fiber is {r_0 + j} and the rule
/// is not consulted. Errors: ValidationError for a custom entry outside the fiber.
std::int64_t choose_n(const InvariantProfile& prof, const NRule& rule, std::int64_t j);

/// Smallest truncation order the solver accepts: p^m (d + floor(p r_0/(p-1)) + 1).
std::int64_t minimal_order(const InvariantProfile& prof);

struct TranscriptEntry {
  std::string kind;  // eps | phi | lambda | extension
  std::int64_t n = 0;
  std::string value;
  std::vector<std::string> roots_considered;
  std::size_t chosen = 0;
  std::string note;
};

struct SolveOptions {
  NRule rule;
  bool allow_extension = true;
  std::uint64_t seed = 0;
  /// Index into the sorted candidate roots at each decision with more than one
  /// root, in order of occurrence. Missing entries mean 0 (the smallest root).
  std::vector<std::size_t> choices;
};

template <class R>
struct Solution {
  InvariantProfile profile;
  std::int64_t order = 0;      // T
  std::int64_t eps_order = 0;  // floor(T / p^m) - d
  R lambda;
  std::vector<R> eps_tilde;    // ε̃_0 .. ε̃_{eps_order}
  std::vector<R> phi;          // φ_0 .. φ_{eps_order - r_0} of the normalized germ
  Series<R> normal_form;       // x^{dp^m} Σ ε̃_n x^{n p^m}, exact polynomial
  Series<R> conjugacy;         // Ψ(x) = Φ(x/λ), exact polynomial; Ψ∘f = f̃∘Ψ mod x^{T+1}
  std::vector<TranscriptEntry> transcript;
  std::vector<std::size_t> branching;  // candidate count at each decision
  std::optional<Embedding> extension;  // input field -> solution field, when they differ
};

struct ConjugacyReport {
  bool success = false;
  std::optional<std::int64_t> first_difference;
  std::int64_t verified_order = -1;
  std::int64_t requested = 0;
};

/// Compares Φ∘f with f̃∘Φ by full truncated composition up to order T.
template <class R>
ConjugacyReport verify_conjugacy(const Series<R>& f, const Series<R>& ft, const Series<R>& phi, std::int64_t T) {
  ConjugacyReport rep;
  rep.requested = T;
  const Series<R> pt = phi.truncated(T);
  const Series<R> lhs = compose(pt, f.truncated(T)).truncated(T);
  const Series<R> rhs = compose(ft.truncated(T), pt).truncated(T);
  const std::int64_t avail = std::min(lhs.trunc(), rhs.trunc());
  rep.first_difference = germ::first_difference(lhs, rhs);
  rep.verified_order = rep.first_difference ? *rep.first_difference - 1 : std::min(avail, T);
  rep.success = !rep.first_difference && avail >= T;
  return rep;
}

namespace detail {

/// Ceiling of a / b for b > 0.
inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return a >= 0 ? (a + b - 1) / b : -((-a) / b); }

inline std::int64_t ipow64(std::uint64_t p, unsigned k) {
  std::int64_t out = 1;
  for (unsigned i = 0; i < k; ++i) out *= static_cast<std::int64_t>(p);
  return out;
}

template <class R>
R frobenius_n(R x, unsigned k) {
  for (unsigned i = 0; i < k; ++i) x = RingTraits<R>::frobenius(x);
  return x;
}

}  // namespace detail

/// The coefficient recursion. In normalizing mode ε̃_{N(j)} = 0 and the other
/// fiber members are solved for; in target mode ε̃ is prescribed and only φ is
/// solved for, each fiber equation then acting as a consistency check.
template <class R>
class NormalFormSolver {
 public:
  using Traits = RingTraits<R>;
  using Context = typename Traits::Context;

  NormalFormSolver(Series<R> f, std::int64_t order, SolveOptions opts,
                   std::optional<std::vector<R>> target = std::nullopt)
      : f_(std::move(f)), order_(order), opts_(std::move(opts)), target_(std::move(target)) {}

  Solution<R> run() {
    ctx_ = f_.ctx();
    prof_ = profile(f_);
    p_ = prof_.p;
    pm_ = detail::ipow64(p_, prof_.m);
    d_ = prof_.d;
    r0_ = prof_.r0();
    if (order_ < minimal_order(prof_)) {
      fail(Errc::InsufficientPrecision, "order " + std::to_string(order_) + " below the required " +
                                            std::to_string(minimal_order(prof_)));
    }
    if (f_.trunc() < order_) {
      fail(Errc::InsufficientPrecision, "germ known to order " + std::to_string(f_.trunc()) + " < " +
                                            std::to_string(order_));
    }
    choose_lambda();
    setup();
    base_step();
    for (std::int64_t j = 1; j <= tu_ - r0_; ++j) step(j);
    for (std::int64_t n = 0; n <= tu_; ++n) {
      if (!assigned_[n]) fail(Errc::Internal, "eps~_" + std::to_string(n) + " never assigned");
    }
    return finish();
  }

 private:
  R zero() const { return Traits::zero(ctx_); }
  R one() const { return Traits::one(ctx_); }

  std::size_t decide(std::size_t count) {
    const std::size_t idx = decision_ < opts_.choices.size() ? opts_.choices[decision_] : 0;
    if (idx >= count) fail(Errc::ValidationError, "root choice out of range");
    ++decision_;
    branching_.push_back(count);
    return idx;
  }

  static std::vector<std::string> names(const std::vector<R>& v) {
    std::vector<std::string> out;
    for (const auto& x : v) out.push_back(Traits::to_string(x));
    return out;
  }

  void note_extension(const Embedding& emb) {
    if (!extension_) {
      extension_ = emb;
    } else {
      extension_ = Embedding{extension_->from, emb.to, emb(extension_->image)};
    }
  }

  void choose_lambda() {
    const std::int64_t big_d = d_ * pm_;
    const R c = f_[big_d];
    if constexpr (std::is_same_v<R, FieldElement>) {
      const R cinv = Traits::inverse(c);
      if (big_d - 1 == 1) {
        lambda_ = cinv;
        transcript_.push_back({"lambda", 0, Traits::to_string(lambda_), {Traits::to_string(lambda_)}, 0, ""});
        return;
      }
      Poly poly(static_cast<std::size_t>(big_d), zero());
      poly[0] = -cinv;
      poly.back() = one();
      RootResult rr = poly_roots(poly, opts_.allow_extension, opts_.seed);
      if (rr.embedding) {
        f_ = map_coeffs(f_, rr.embedding->to, *rr.embedding);
        if (target_) {
          for (auto& x : *target_) x = (*rr.embedding)(x);
        }
        ctx_ = rr.embedding->to;
        note_extension(*rr.embedding);
        transcript_.push_back({"extension", 0, ctx_->describe(), {}, 0, "lambda"});
      }
      const std::size_t idx = rr.roots.size() > 1 ? decide(rr.roots.size()) : 0;
      lambda_ = rr.roots[idx];
      transcript_.push_back({"lambda", 0, Traits::to_string(lambda_), names(rr.roots), idx, ""});
    } else {
      if (!Traits::is_zero(c - one())) fail(Errc::UnsolvableRoot, "leading coefficient must be 1 over Laurent scalars");
      lambda_ = one();
      transcript_.push_back({"lambda", 0, Traits::to_string(lambda_), {Traits::to_string(lambda_)}, 0, ""});
    }
  }

  void setup() {
    // f'(x) = f(λx)/λ, coefficient k scaled by λ^{k-1}
    std::vector<R> fc;
    const Series<R> ft = f_.truncated(order_);
    R scale = Traits::inverse(lambda_);
    for (std::int64_t k = 0; k < ft.size(); ++k) {
      fc.push_back(ft.coeffs()[k] * scale);
      scale = scale * lambda_;
    }
    const Series<R> fprime(ctx_, std::move(fc), order_);
    const GermData<R> data = germ_data(fprime);
    if (!Traits::is_zero(data.leading - one())) fail(Errc::Internal, "normalized leading coefficient is not 1");
    tu_ = order_ / pm_ - d_;
    u_.assign(static_cast<std::size_t>(tu_ + 1), zero());
    for (std::int64_t n = 0; n <= tu_; ++n) u_[n] = data.eps[n];
    const std::int64_t kmax = tu_ / d_ + 1;
    upow_.assign(static_cast<std::size_t>(kmax + 1), {});
    upow_[1] = u_;
    for (std::int64_t k = 2; k <= kmax; ++k) {
      const std::int64_t len = tu_ - d_ * (k - 1) + 1;
      std::vector<R> next(static_cast<std::size_t>(len), zero());
      const auto& prev = upow_[k - 1];
      for (std::int64_t a = 0; a < len; ++a) {
        if (Traits::is_exact_zero(prev[a])) continue;
        for (std::int64_t b = 0; a + b < len; ++b) {
          if (!Traits::is_exact_zero(u_[b])) next[a + b] += prev[a] * u_[b];
        }
      }
      upow_[k] = std::move(next);
    }
    eps_t_.assign(static_cast<std::size_t>(tu_ + 1), zero());
    assigned_.assign(static_cast<std::size_t>(tu_ + 1), false);
    if (target_) {
      for (std::int64_t n = 0; n <= tu_; ++n) {
        if (n < static_cast<std::int64_t>(target_->size())) eps_t_[n] = (*target_)[n];
        assigned_[n] = true;
      }
    }
    phi_.assign(static_cast<std::size_t>(tu_ + 1), zero());
    psi_.assign(static_cast<std::size_t>(tu_ + 1), zero());
    phi_[0] = one();
    psi_[0] = one();
    powers_.assign(2, {});
    cols_ = 0;
    add_column(0);
  }

  // P_a[j] = [y^j] ψ^a for all stored powers a.
  void add_column(std::int64_t j) {
    if (cols_ == j) {
      for (auto& col : powers_) col.push_back(zero());
      ++cols_;
    }
    powers_[0][j] = j == 0 ? one() : zero();
    for (std::size_t a = 1; a < powers_.size(); ++a) {
      R acc = zero();
      for (std::int64_t t = 0; t <= j; ++t) {
        if (!Traits::is_exact_zero(psi_[t])) acc += psi_[t] * powers_[a - 1][j - t];
      }
      powers_[a][j] = acc;
    }
  }

  const std::vector<R>& power(std::int64_t h) {
    while (static_cast<std::int64_t>(powers_.size()) <= h) {
      const auto& prev = powers_.back();
      std::vector<R> next(static_cast<std::size_t>(cols_), zero());
      for (std::int64_t s = 0; s < cols_; ++s) {
        R acc = zero();
        for (std::int64_t t = 0; t <= s; ++t) {
          if (!Traits::is_exact_zero(psi_[t])) acc += psi_[t] * prev[s - t];
        }
        next[s] = acc;
      }
      powers_.push_back(std::move(next));
    }
    return powers_[h];
  }

  // lhs_n - rhs_n with the current assignments; unassigned ε̃ count as 0.
  R residual(std::int64_t n) {
    R lhs = zero();
    for (std::int64_t j = 0; j < cols_ && d_ * j <= n; ++j) {
      if (!Traits::is_exact_zero(phi_[j])) lhs += phi_[j] * upow_[j + 1][n - d_ * j];
    }
    R rhs = zero();
    for (std::int64_t i = 0; i <= n; ++i) {
      if (!assigned_[i] || Traits::is_exact_zero(eps_t_[i])) continue;
      const std::int64_t h = d_ + i;
      const unsigned k = nu_p(h, p_);
      const std::int64_t pk = detail::ipow64(p_, k);
      if ((n - i) % pk != 0) continue;
      const std::int64_t s = (n - i) / pk;
      if (s >= cols_) {
        fail(Errc::UnassignedDependency, "rhs_" + std::to_string(n) + " needs column " + std::to_string(s));
      }
      rhs += eps_t_[i] * detail::frobenius_n(power(h / pk)[s], k);
    }
    return lhs - rhs;
  }

  void base_step() {
    for (std::int64_t n : fiber(prof_, 0)) {
      if (n > tu_) continue;
      if (target_) {
        if (!Traits::is_zero(eps_t_[n] - u_[n])) {
          fail(Errc::ValidationError, "target differs from the germ at n = " + std::to_string(n) + " where J(n) = 0");
        }
      } else {
        eps_t_[n] = u_[n];
        assigned_[n] = true;
      }
      transcript_.push_back({"eps", n, Traits::to_string(eps_t_[n]), {}, 0, "J(n)=0"});
    }
    for (std::int64_t n : fiber(prof_, 0)) {
      if (n <= tu_ && !Traits::is_zero(residual(n))) {
        fail(Errc::Internal, "base equation fails at n = " + std::to_string(n));
      }
    }
  }

  void set_phi(std::int64_t j, const R& z) {
    phi_[j] = z;
    psi_[j] = detail::frobenius_n(z, prof_.m);
    add_column(j);
  }

  void reembed(const Embedding& emb) {
    auto mv = [&](std::vector<R>& v) {
      for (auto& x : v) x = emb(x);
    };
    f_ = map_coeffs(f_, emb.to, emb);
    lambda_ = emb(lambda_);
    mv(u_);
    for (auto& v : upow_) mv(v);
    mv(eps_t_);
    mv(phi_);
    mv(psi_);
    for (auto& v : powers_) mv(v);
    if (target_) mv(*target_);
    ctx_ = emb.to;
    note_extension(emb);
  }

  void step(std::int64_t j) {
    add_column(j);
    std::vector<std::int64_t> fib;
    for (std::int64_t n : fiber(prof_, j)) {
      if (n <= tu_) fib.push_back(n);
    }
    const std::int64_t big_n = choose_n(prof_, opts_.rule, j);
    if (big_n > tu_) fail(Errc::Internal, "N(j) beyond the window");
    if (!target_) {
      eps_t_[big_n] = zero();
      assigned_[big_n] = true;
      transcript_.push_back({"eps", big_n, Traits::to_string(zero()), {}, 0, "N(" + std::to_string(j) + ")"});
    }
    const R q = residual(big_n);
    // R(z) = Σ_k ((d + r_k)/p^k mod p) ε̃_{r_k} z^{p^{m+k}} - [d = p^e, N = jd] z
    std::map<std::int64_t, R> terms;
    const unsigned vn = nu_p(big_n, p_);
    for (unsigned k = 0; k <= prof_.e; ++k) {
      const std::int64_t pk = detail::ipow64(p_, k);
      const std::int64_t rk = prof_.r[k];
      if (k > vn || big_n <= rk || big_n - rk != j * pk) continue;
      if (!assigned_[rk]) fail(Errc::Internal, "eps~_{r_k} unassigned");
      const std::int64_t mult = ((d_ + rk) / pk) % static_cast<std::int64_t>(p_);
      const R c = Traits::from_int(ctx_, mult) * eps_t_[rk];
      if (Traits::is_zero(c)) continue;
      const std::int64_t ex = detail::ipow64(p_, prof_.m + k);
      auto it = terms.find(ex);
      if (it == terms.end()) terms.emplace(ex, c);
      else it->second += c;
    }
    if (d_ == detail::ipow64(p_, prof_.e) && big_n == j * d_) {
      auto it = terms.find(1);
      if (it == terms.end()) terms.emplace(1, -one());
      else it->second -= one();
    }
    // terms whose coefficient vanishes only to precision widen the root's error below
    std::map<std::int64_t, R> faint;
    for (const auto& [ex, c] : terms) {
      if (Traits::is_zero(c) && !Traits::is_exact_zero(c)) faint.emplace(ex, c);
    }
    std::erase_if(terms, [](const auto& kv) { return Traits::is_zero(kv.second); });
    if (terms.empty()) fail(Errc::Internal, "R(z) vanishes at j = " + std::to_string(j));

    std::vector<R> roots;
    if (terms.size() == 1) {
      const auto& [ex, c] = *terms.begin();
      unsigned s = 0;
      for (std::int64_t t = ex; t > 1; t /= static_cast<std::int64_t>(p_)) ++s;
      R z = Traits::frobenius_root(q * Traits::inverse(c), s);
      if constexpr (std::is_same_v<R, LaurentScalar>) {
        for (const auto& [fex, fc] : faint) {
          if (z.is_exact_zero()) break;
          const std::int64_t err = fc.abs_prec() + fex * z.val_lower_bound() - c.val();
          z += LaurentScalar::zero_to(ctx_, detail::ceil_div(err, ex));
        }
      }
      roots.push_back(z);
    } else {
      if constexpr (std::is_same_v<R, FieldElement>) {
        Poly poly(static_cast<std::size_t>(terms.rbegin()->first + 1), zero());
        poly[0] = -q;
        for (const auto& [ex, c] : terms) poly[ex] += c;
        RootResult rr = poly_roots(poly, opts_.allow_extension, opts_.seed);
        if (rr.embedding) {
          reembed(*rr.embedding);
          transcript_.push_back({"extension", j, ctx_->describe(), {}, 0, "phi"});
        }
        roots = rr.roots;
      } else if (Traits::is_exact_zero(q)) {
        // R has no constant term, so z = 0 solves R(z) = 0
        roots.push_back(zero());
      } else if (Traits::is_zero(q)) {
        // the root near 0 is only known to vanish: c z^e = O(t^A) for the dominant term
        std::int64_t bound = LaurentScalar::kInfinity;
        const std::int64_t a = q.abs_prec();
        for (const auto& [ex, c] : terms) {
          const std::int64_t num = a - c.val();
          bound = std::min(bound, detail::ceil_div(num, ex));
        }
        roots.push_back(LaurentScalar::zero_to(ctx_, bound));
      } else {
        fail(Errc::UnsolvableRoot, "R(z) = Q has several terms over Laurent scalars at j = " + std::to_string(j));
      }
    }

    if (target_) {
      for (std::size_t idx = 0; idx < roots.size(); ++idx) {
        set_phi(j, roots[idx]);
        bool ok = true;
        for (std::int64_t n : fib) ok = ok && Traits::is_zero(residual(n));
        if (ok) {
          transcript_.push_back({"phi", j, Traits::to_string(roots[idx]), names(roots), idx, "N=" + std::to_string(big_n)});
          return;
        }
      }
      fail(Errc::ValidationError, "target is not reachable at j = " + std::to_string(j));
    }

    const std::size_t idx = roots.size() > 1 ? decide(roots.size()) : 0;
    set_phi(j, roots[idx]);
    transcript_.push_back({"phi", j, Traits::to_string(roots[idx]), names(roots), idx, "N=" + std::to_string(big_n)});
    if (!Traits::is_zero(residual(big_n))) fail(Errc::Internal, "equation N(j) fails after solving at j = " + std::to_string(j));
    for (std::int64_t n : fib) {
      if (n == big_n) continue;
      eps_t_[n] = zero();
      assigned_[n] = true;
      eps_t_[n] = residual(n);
      transcript_.push_back({"eps", n, Traits::to_string(eps_t_[n]), {}, 0, "J(n)=" + std::to_string(j)});
    }
  }

  Solution<R> finish() {
    Solution<R> out;
    out.profile = prof_;
    out.order = order_;
    out.eps_order = tu_;
    out.lambda = lambda_;
    out.eps_tilde = eps_t_;
    out.phi.assign(phi_.begin(), phi_.begin() + (tu_ - r0_ + 1));
    std::vector<R> nf(static_cast<std::size_t>(pm_ * (d_ + tu_) + 1), zero());
    for (std::int64_t n = 0; n <= tu_; ++n) nf[pm_ * (d_ + n)] = eps_t_[n];
    out.normal_form = Series<R>(ctx_, std::move(nf), kExact);
    std::vector<R> psi(out.phi.size() + 1, zero());
    const R linv = Traits::inverse(lambda_);
    R sc = linv;
    for (std::size_t j = 0; j < out.phi.size(); ++j) {
      psi[j + 1] = out.phi[j] * sc;
      sc = sc * linv;
    }
    out.conjugacy = Series<R>(ctx_, std::move(psi), kExact);
    out.transcript = std::move(transcript_);
    out.branching = std::move(branching_);
    out.extension = extension_;
    return out;
  }

  Series<R> f_;
  std::int64_t order_;
  SolveOptions opts_;
  std::optional<std::vector<R>> target_;

  Context ctx_{};
  InvariantProfile prof_;
  std::uint64_t p_ = 0;
  std::int64_t pm_ = 1, d_ = 1, r0_ = 0, tu_ = 0;
  R lambda_;
  std::vector<R> u_;
  std::vector<std::vector<R>> upow_;
  std::vector<R> eps_t_;
  std::vector<bool> assigned_;
  std::vector<R> phi_, psi_;
  std::vector<std::vector<R>> powers_;
  std::int64_t cols_ = 0;
  std::vector<TranscriptEntry> transcript_;
  std::vector<std::size_t> branching_;
  std::size_t decision_ = 0;
  std::optional<Embedding> extension_;
};

/// Normal form of f under the rule, with the conjugacy to order T.
/// Errors: InsufficientPrecision, NotSuperattracting, NoRootInField (extension disabled).
Solution<FieldElement> normal_form(const FSeries& f, std::int64_t T, const SolveOptions& opts = {});

struct UnitNormalization {
  FSeries f;  // leading coefficient 1
  FieldElement lambda;
};

/// L^{-1}∘f∘L with L(x) = λx and λ^{dp^m - 1} = C^{-1}; `choice` indexes the sorted roots.
UnitNormalization normalize_unit(const FSeries& f, std::size_t choice = 0, std::uint64_t seed = 0);

/// All normal forms reachable through the root choices, over a common field.
/// Errors: ValidationError when more than max_runs solver runs are needed.
std::vector<Solution<FieldElement>> enumerate_normal_forms(const FSeries& f, std::int64_t T, const NRule& rule,
                                                           std::size_t max_runs = 4096);

struct BhardShape {
  std::vector<FieldElement> a;  // a(z) with the normal form x^{dp^m}(a(x^{p^{m+1}}) + b x^{r_0 p^m})
  FieldElement b;
};

/// Errors: ValidationError for e = 0, ShapeViolation if the coefficients do not regroup.
BhardShape bhard_extract(const InvariantProfile& prof, const std::vector<FieldElement>& a);

struct NfConditions {
  bool leading = false;      // a_0 = 1
  bool low_zeros = false;    // a_n = 0 for n < r_u, nu_p(n) = u < e
  bool witnesses = false;    // a_{r_u} != 0 for u < e
  bool fiber_zeros = false;  // a_{N(j)} = 0 for 0 < j < r_0/(p-1)
  bool degree = false;       // deg a < p r_0/(p-1) (e >= 1), a = 1 (e = 0)
  bool all() const { return leading && low_zeros && witnesses && fiber_zeros && degree; }
};

NfConditions check_nf_conditions(const InvariantProfile& prof, const std::vector<FieldElement>& a, const NRule& rule);

/// Φ for e = 0 as the product Π (1 + ε^{(n)})^{d^{-n-1}}; Φ∘f = x^{dp^m}∘Φ mod x^{T+1}
/// for f with leading coefficient 1. Errors: NotCoprime, ValidationError (d = 1 or C != 1).
FSeries bottcher_product(const FSeries& f, std::int64_t T);

/// Φ∘f∘Φ^{-1} to order T.
FSeries conjugate(const FSeries& f, const FSeries& phi, std::int64_t T);

struct RandomConjugate {
  FSeries f;
  FSeries phi;
};

/// Seeded random Φ(x) = x(φ_0 + φ_1 x + ...) with φ_0 != 0, and Φ∘f∘Φ^{-1}.
RandomConjugate random_conjugate(const FSeries& f, std::uint64_t seed, std::int64_t T);

}  // namespace germ
