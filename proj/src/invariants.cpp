#include "germ/invariants.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace germ {

namespace {

std::int64_t ipow(std::uint64_t p, unsigned k) {
  std::int64_t out = 1;
  for (unsigned i = 0; i < k; ++i) out *= static_cast<std::int64_t>(p);
  return out;
}

}  // namespace

std::string InvariantProfile::to_string() const {
  std::ostringstream os;
  os << "(m=" << m << ", d=" << d << ", e=" << e << ", r=(";
  for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
  os << "))";
  return os.str();
}

std::string rational_to_string(const Rational& q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

void validate_profile(const InvariantProfile& prof) {
  if (!is_prime(prof.p)) fail(Errc::ValidationError, "p must be prime");
  if (prof.d < 1) fail(Errc::ValidationError, "d must be >= 1");
  if (prof.d * ipow(prof.p, prof.m) < 2) fail(Errc::ValidationError, "d p^m must be >= 2");
  if (prof.e != nu_p(prof.d, prof.p)) fail(Errc::ValidationError, "e must equal nu_p(d)");
  if (prof.r.size() != prof.e + 1) fail(Errc::ValidationError, "r must have e + 1 entries");
  if (prof.r.back() != 0) fail(Errc::ValidationError, "r_e must be 0");
  for (std::size_t u = 1; u < prof.r.size(); ++u) {
    if (prof.r[u] > prof.r[u - 1]) fail(Errc::ValidationError, "r must be non-increasing");
    if (prof.r[u] < prof.r[u - 1] && u < prof.e && nu_p(prof.r[u], prof.p) != u) {
      fail(Errc::ValidationError, "a strict drop r_u < r_{u-1} needs nu_p(r_u) = u");
    }
  }
  if (prof.e > 0 && nu_p(prof.r[0], prof.p) != 0) fail(Errc::ValidationError, "r_0 must be prime to p");
}

JValues jays(const InvariantProfile& prof, std::int64_t n) {
  JValues out;
  const unsigned v = nu_p(n, prof.p);
  Rational best(0);
  for (unsigned k = 0; k <= prof.e; ++k) {
    Rational jk(0);
    if (k <= v && n > prof.r[k]) jk = Rational(n - prof.r[k], ipow(prof.p, k));
    out.per_k.push_back(jk);
    best = std::max(best, jk);
  }
  if (best.denominator() != 1) fail(Errc::Internal, "J(n) is not an integer");
  out.j = best.numerator();
  return out;
}

std::int64_t big_j(const InvariantProfile& prof, std::int64_t n) { return jays(prof, n).j; }

std::vector<std::int64_t> fiber(const InvariantProfile& prof, std::int64_t j) {
  std::vector<std::int64_t> out;
  if (j == 0) {
    for (std::int64_t n = 0; n <= prof.r0(); ++n) {
      if (big_j(prof, n) == 0) out.push_back(n);
    }
    return out;
  }
  for (unsigned k = 0; k <= prof.e; ++k) {
    const std::int64_t n = prof.r[k] + ipow(prof.p, k) * j;
    if (big_j(prof, n) == j) out.push_back(n);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::int64_t n_prime(const InvariantProfile& prof, std::int64_t j) {
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (unsigned k = 0; k <= prof.e; ++k) best = std::min(best, prof.r[k] + ipow(prof.p, k) * j);
  return best;
}

std::strong_ordering preceq_cmp(std::uint64_t p, unsigned e, std::int64_t n1, std::int64_t n2) {
  const unsigned a = std::min(nu_p(n1, p), e);
  const unsigned b = std::min(nu_p(n2, p), e);
  if (a != b) return a <=> b;
  return n1 <=> n2;
}

std::int64_t n_doubleprime(const InvariantProfile& prof, std::int64_t j) {
  const auto fib = fiber(prof, j);
  if (fib.empty()) fail(Errc::Internal, "empty fiber");
  std::int64_t best = fib.front();
  for (auto n : fib) {
    if (preceq_cmp(prof.p, prof.e, n, best) < 0) best = n;
  }
  return best;
}

Rational stable_threshold(const InvariantProfile& prof) {
  if (prof.e < 1) fail(Errc::ValidationError, "stable_threshold needs e >= 1");
  Rational best(0);
  for (unsigned k = 1; k <= prof.e; ++k) {
    best = std::max(best, Rational(prof.r0() - prof.r[k], ipow(prof.p, k) - 1));
  }
  return best;
}

CompositionBound compose_bound(const InvariantProfile& inner, const InvariantProfile& outer) {
  if (inner.p != outer.p) fail(Errc::ValidationError, "profiles over different characteristics");
  CompositionBound out;
  out.m = inner.m + outer.m;
  out.d = inner.d * outer.d;
  out.e = inner.e + outer.e;
  for (unsigned u = 0; u <= out.e; ++u) {
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    int hits = 0;
    for (unsigned k = 0; k <= outer.e; ++k) {
      if (k > u || u - k > inner.e) continue;
      const unsigned h = u - k;
      const std::int64_t val = inner.d * outer.r[k] + ipow(inner.p, k) * inner.r[h];
      if (val < best) {
        best = val;
        hits = 1;
      } else if (val == best) {
        ++hits;
      }
    }
    out.r_bound.push_back(best);
    out.certain.push_back(hits == 1 || u == 0 || u == out.e);
  }
  return out;
}

IterateProfile iterate_profile(const InvariantProfile& prof, unsigned n) {
  if (n < 1) fail(Errc::ValidationError, "iterate count must be >= 1");
  IterateProfile out;
  out.m = BigInt(prof.m) * n;
  out.e = BigInt(prof.e) * n;
  BigInt dn = 1;
  for (unsigned i = 0; i < n; ++i) dn *= prof.d;
  out.d = dn;
  if (prof.e == 0) {
    out.r0 = 0;
  } else {
    out.r0 = BigInt(prof.r0()) * (dn - 1) / (prof.d - 1);
  }
  return out;
}

FSeries germ_at_infinity(const std::vector<FieldElement>& coeffs, std::optional<std::int64_t> trunc) {
  std::int64_t deg = -1;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (!coeffs[i].is_zero()) deg = static_cast<std::int64_t>(i);
  }
  if (deg < 2) fail(Errc::DegreeTooSmall, "polynomial degree must be >= 2");
  FieldRef f = coeffs[static_cast<std::size_t>(deg)].field();
  for (const auto& c : coeffs) {
    if (c.field() != f && !c.field()->is_prime_field()) f = c.field();
  }
  const std::int64_t t = trunc.value_or(2 * deg + 1);
  std::vector<FieldElement> den;
  for (std::int64_t i = 0; i <= deg; ++i) den.push_back(FieldElement(f, coeffs[static_cast<std::size_t>(deg - i)].code()));
  const FSeries denom(f, std::move(den), kExact);
  const FSeries germ = shift(reciprocal(denom, t - deg), deg);
  const InvariantProfile prof = profile(germ);
  if (prof.r0() > prof.d) {
    fail(Errc::Internal, "germ at infinity has r_0 = " + std::to_string(prof.r0()) + " > d = " + std::to_string(prof.d));
  }
  return germ;
}

std::string jtable_tsv(const InvariantProfile& prof, std::int64_t n_max) {
  std::ostringstream os;
  os << "n";
  for (unsigned k = 0; k <= prof.e; ++k) os << "\tJ_" << k;
  os << "\tJ\n";
  for (std::int64_t n = 0; n <= n_max; ++n) {
    const JValues jv = jays(prof, n);
    os << n;
    bool is_r = false;
    for (unsigned k = 0; k <= prof.e; ++k) {
      os << "\t";
      if (prof.r[k] == n) {
        os << "x";
        is_r = true;
      } else if (jv.per_k[k] != Rational(0)) {
        os << rational_to_string(jv.per_k[k]);
      }
    }
    os << "\t";
    if (is_r) {
      os << "x";
    } else if (jv.j != 0) {
      os << jv.j;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace germ
