#include "germ/normalizer.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace germ {

std::string NRule::name() const {
  switch (kind) {
    case NRuleKind::NPrime: return "nprime";
    case NRuleKind::NDoublePrime: return "ndoubleprime";
    case NRuleKind::Custom: return "custom";
  }
  return "custom";
}

NRule NRule::parse(const std::string& s) {
  if (s == "nprime") return {NRuleKind::NPrime, {}};
  if (s == "ndoubleprime") return {NRuleKind::NDoublePrime, {}};
  fail(Errc::ParseError, "unknown N rule '" + s + "' (expected nprime or ndoubleprime)");
}

std::int64_t choose_n(const InvariantProfile& prof, const NRule& rule, std::int64_t j) {
  const std::int64_t r0 = prof.r0();
  if (prof.e == 0 || j * static_cast<std::int64_t>(prof.p - 1) >= r0) return r0 + j;
  std::int64_t n = 0;
  switch (rule.kind) {
    case NRuleKind::NPrime: n = n_prime(prof, j); break;
    case NRuleKind::NDoublePrime: n = n_doubleprime(prof, j); break;
    case NRuleKind::Custom: {
      auto it = rule.table.find(j);
      if (it == rule.table.end()) fail(Errc::ValidationError, "custom rule has no entry for j = " + std::to_string(j));
      n = it->second;
      break;
    }
  }
  if (n < 0 || big_j(prof, n) != j) {
    fail(Errc::ValidationError, "N(" + std::to_string(j) + ") = " + std::to_string(n) + " is not in the fiber of j");
  }
  return n;
}

std::int64_t minimal_order(const InvariantProfile& prof) {
  const std::int64_t p = static_cast<std::int64_t>(prof.p);
  return detail::ipow64(prof.p, prof.m) * (prof.d + p * prof.r0() / (p - 1) + 1);
}

Solution<FieldElement> normal_form(const FSeries& f, std::int64_t T, const SolveOptions& opts) {
  return NormalFormSolver<FieldElement>(f, T, opts).run();
}

UnitNormalization normalize_unit(const FSeries& f, std::size_t choice, std::uint64_t seed) {
  const GermData<FieldElement> data = germ_data(f);
  const std::int64_t big_d = data.d * detail::ipow64(f.ctx()->p(), data.m);
  FieldRef field = f.ctx();
  Poly poly(static_cast<std::size_t>(big_d), FieldElement::zero(field));
  poly[0] = -data.leading.inverse();
  poly.back() = FieldElement::one(field);
  const RootResult rr = poly_roots(poly, true, seed);
  if (choice >= rr.roots.size()) fail(Errc::ValidationError, "root choice out of range");
  FSeries g = f;
  if (rr.embedding) {
    g = map_coeffs(f, rr.embedding->to, *rr.embedding);
    field = rr.embedding->to;
  }
  const FieldElement lambda = rr.roots[choice];
  std::vector<FieldElement> v;
  FieldElement sc = lambda.inverse();
  for (std::int64_t k = 0; k < g.size(); ++k) {
    v.push_back(g.coeffs()[k] * sc);
    sc = sc * lambda;
  }
  return {FSeries(field, std::move(v), g.trunc()), lambda};
}

namespace {

FSeries embed_series(const FSeries& f, FieldRef to) {
  if (f.ctx() == to) return f;
  return map_coeffs(f, to, embedding(f.ctx(), to));
}

bool same_eps(const std::vector<FieldElement>& a, const std::vector<FieldElement>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].code() != b[i].code()) return false;
  }
  return true;
}

}  // namespace

std::vector<Solution<FieldElement>> enumerate_normal_forms(const FSeries& f, std::int64_t T, const NRule& rule,
                                                           std::size_t max_runs) {
  FSeries base = f;
  std::size_t runs = 0;
  for (;;) {
    std::vector<Solution<FieldElement>> found;
    std::vector<std::vector<std::size_t>> stack{{}};
    while (!stack.empty()) {
      std::vector<std::size_t> prefix = std::move(stack.back());
      stack.pop_back();
      if (++runs > max_runs) fail(Errc::ValidationError, "enumeration needs more than " + std::to_string(max_runs) + " runs");
      SolveOptions opts;
      opts.rule = rule;
      opts.choices = prefix;
      Solution<FieldElement> sol = normal_form(base, T, opts);
      for (std::size_t i = prefix.size(); i < sol.branching.size(); ++i) {
        for (std::size_t alt = 1; alt < sol.branching[i]; ++alt) {
          std::vector<std::size_t> child = prefix;
          child.resize(i, 0);
          child.push_back(alt);
          stack.push_back(std::move(child));
        }
      }
      found.push_back(std::move(sol));
    }
    unsigned k = base.ctx()->k();
    for (const auto& s : found) k = std::lcm(k, s.normal_form.ctx()->k());
    if (k == base.ctx()->k()) {
      std::vector<Solution<FieldElement>> out;
      for (auto& s : found) {
        const bool dup = std::any_of(out.begin(), out.end(), [&](const auto& o) { return same_eps(o.eps_tilde, s.eps_tilde); });
        if (!dup) out.push_back(std::move(s));
      }
      return out;
    }
    base = embed_series(base, field_create(base.ctx()->p(), k));
  }
}

BhardShape bhard_extract(const InvariantProfile& prof, const std::vector<FieldElement>& a) {
  if (prof.e == 0) fail(Errc::ValidationError, "the regrouped shape needs e >= 1");
  if (a.empty()) fail(Errc::ShapeViolation, "empty coefficient vector");
  const std::int64_t p = static_cast<std::int64_t>(prof.p);
  const std::int64_t r0 = prof.r0();
  FieldRef field = a.front().field();
  BhardShape out{{}, FieldElement::zero(field)};
  for (std::int64_t n = 0; n < static_cast<std::int64_t>(a.size()); ++n) {
    if (a[n].is_zero()) continue;
    if (n == r0) {
      out.b = a[n];
    } else if (n % p != 0) {
      fail(Errc::ShapeViolation, "a_" + std::to_string(n) + " != 0 with nu_p(n) = 0 and n != r_0");
    } else {
      const std::size_t s = static_cast<std::size_t>(n / p);
      if (out.a.size() <= s) out.a.resize(s + 1, FieldElement::zero(field));
      out.a[s] = a[n];
    }
  }
  const std::int64_t deg = static_cast<std::int64_t>(out.a.size()) - 1;
  if (deg * (p - 1) >= r0) fail(Errc::ShapeViolation, "deg a = " + std::to_string(deg) + " is not below r_0/(p-1)");
  return out;
}

NfConditions check_nf_conditions(const InvariantProfile& prof, const std::vector<FieldElement>& a, const NRule& rule) {
  auto at = [&](std::int64_t n) { return n < static_cast<std::int64_t>(a.size()) ? a[n] : FieldElement(); };
  auto zero = [&](std::int64_t n) { return n >= static_cast<std::int64_t>(a.size()) || a[n].is_zero(); };
  const std::int64_t p = static_cast<std::int64_t>(prof.p);
  const std::int64_t r0 = prof.r0();
  NfConditions out;
  out.leading = !a.empty() && at(0).is_one();
  out.low_zeros = true;
  out.witnesses = true;
  for (unsigned u = 0; u < prof.e; ++u) {
    for (std::int64_t n = 1; n < prof.r[u]; ++n) {
      if (nu_p(n, prof.p) == u && !zero(n)) out.low_zeros = false;
    }
    if (zero(prof.r[u])) out.witnesses = false;
  }
  out.fiber_zeros = true;
  if (prof.e > 0) {
    for (std::int64_t j = 1; j * (p - 1) < r0; ++j) {
      if (!zero(choose_n(prof, rule, j))) out.fiber_zeros = false;
    }
  }
  out.degree = true;
  for (std::int64_t n = 1; n < static_cast<std::int64_t>(a.size()); ++n) {
    const bool beyond = prof.e == 0 || n * (p - 1) >= p * r0;
    if (beyond && !a[n].is_zero()) out.degree = false;
  }
  return out;
}

FSeries bottcher_product(const FSeries& f, std::int64_t T) {
  const InvariantProfile prof = profile(f);
  if (prof.e != 0) fail(Errc::NotCoprime, "the product formula needs gcd(d, p) = 1");
  if (prof.d < 2) fail(Errc::ValidationError, "the product formula needs d >= 2");
  const FSeries ft = f.truncated(T);
  const GermData<FieldElement> data = germ_data(ft);
  if (!data.leading.is_one()) fail(Errc::ValidationError, "leading coefficient must be 1");
  FieldRef field = f.ctx();
  const std::int64_t tu = data.eps.trunc();
  if (tu < 0) fail(Errc::InsufficientPrecision, "order too small for the product");
  const FSeries one = FSeries::one(field);
  const FSeries eps = (data.eps - one).truncated(tu);
  const FSeries g = shift(data.eps, prof.d).truncated(tu);
  FSeries cur = t_operator_inverse(eps, prof.m);
  FSeries phi = FSeries::one(field, tu);
  std::int64_t dn = prof.d;
  while (!cur.is_zero_to_precision()) {
    phi = (phi * binomial_pow(one + cur, 1, dn, tu)).truncated(tu);
    cur = t_operator_inverse(compose(cur, g).truncated(tu), prof.m);
    dn *= prof.d;
  }
  return shift(phi, 1);
}

FSeries conjugate(const FSeries& f, const FSeries& phi, std::int64_t T) {
  const FSeries pt = phi.truncated(T);
  const FSeries inv = reversion(pt, T);
  return compose(pt, compose(f.truncated(T), inv)).truncated(T);
}

RandomConjugate random_conjugate(const FSeries& f, std::uint64_t seed, std::int64_t T) {
  std::mt19937_64 rng(seed);
  FieldRef field = f.ctx();
  const u128 q = field->order();
  std::vector<FieldElement> v(static_cast<std::size_t>(T + 1), FieldElement::zero(field));
  v[1] = FieldElement(field, 1 + static_cast<std::uint64_t>(rng() % static_cast<std::uint64_t>(q - 1)));
  for (std::int64_t k = 2; k <= T; ++k) v[k] = FieldElement(field, static_cast<std::uint64_t>(rng() % static_cast<std::uint64_t>(q)));
  const FSeries phi(field, std::move(v), kExact);
  return {conjugate(f, phi, T), phi};
}

}  // namespace germ
