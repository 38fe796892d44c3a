#include "germ/analytic.hpp"

#include <sstream>

namespace germ {

std::int64_t truncation_target(const InvariantProfile& prof) {
  if (prof.e == 0) fail(Errc::ValidationError, "truncation target needs e >= 1");
  return minimal_order(prof) - 1;
}

std::int64_t GrowthCertificate::s_h(unsigned h) const {
  const std::int64_t ph = detail::ipow64(p, h);
  return s0 * ph - r0 * (ph - 1) / static_cast<std::int64_t>(p - 1);
}

std::int64_t GrowthCertificate::k_h(unsigned h) const {
  return detail::ipow64(p, h) * (s0 * static_cast<std::int64_t>(p - 1) - r0);
}

BigRational GrowthCertificate::t_h(unsigned h) const {
  BigRational t = s0;
  for (unsigned i = 0; i < h; ++i) t = BigRational(static_cast<std::int64_t>(p)) * t + eta;
  return t;
}

BigRational GrowthCertificate::delta_h(unsigned h) const { return (c - 1 - eta) / BigRational(k_h(h)); }

std::pair<unsigned, std::int64_t> GrowthCertificate::block(std::int64_t n) const {
  if (n < s0) fail(Errc::ValidationError, "block index needs n >= s_0");
  unsigned h = 0;
  while (s_h(h + 1) <= n) ++h;
  return {h, n - s_h(h)};
}

BigRational GrowthCertificate::c_n(std::int64_t n) const {
  if (n <= s0) return BigRational(n);
  const auto [h, k] = block(n);
  return BigRational(s0) + c * BigRational(n - s0) - BigRational(k) * delta_h(h);
}

BigRational GrowthCertificate::c_n_recursive(std::int64_t n) const {
  if (n <= s0) return BigRational(n);
  const auto [h, k] = block(n);
  return t_h(h) + BigRational(k) * (c - delta_h(h));
}

GrowthCertificate certificate(const InvariantProfile& prof, const std::vector<LaurentScalar>& phi, std::int64_t v) {
  if (prof.e == 0) fail(Errc::ValidationError, "certificate needs e >= 1");
  if (v < 0) fail(Errc::ValidationError, "val(eps_{r_0}) must be >= 0");
  GrowthCertificate cert;
  cert.p = prof.p;
  cert.m = prof.m;
  cert.r0 = prof.r0();
  cert.v = v;
  const std::int64_t p = static_cast<std::int64_t>(prof.p);
  cert.s0 = p * cert.r0 / (p - 1) + 1 - cert.r0;
  std::int64_t w = 1;
  for (std::int64_t n = 1; n <= cert.s0 && n < static_cast<std::int64_t>(phi.size()); ++n) {
    // a value known only to vanish can be as large as its error term
    const std::int64_t low = phi[n].val_lower_bound();
    if (low >= 0) continue;
    const std::int64_t neg = -low;
    w = std::max(w, (neg + n - 1) / n);
  }
  const std::int64_t pm = detail::ipow64(prof.p, prof.m);
  const BigRational base(cert.s0 * (p - 1) - cert.r0);
  for (;; ++w) {
    cert.W = w;
    cert.eta = BigRational(v) / BigRational(w * pm);
    cert.c = (BigRational(cert.s0 * (p - 1)) + cert.eta) / base;
    if (cert.eta < cert.c - 1) break;
  }
  return cert;
}

GrowthReport check_growth(const std::vector<LaurentScalar>& phi, const GrowthCertificate& cert) {
  GrowthReport rep;
  const BigRational w(cert.W);
  rep.B = w * cert.c;
  rep.A = w * BigRational(cert.s0) * (1 - cert.c);
  bool seen = false;
  for (std::int64_t n = 1; n < static_cast<std::int64_t>(phi.size()); ++n) {
    GrowthRow row;
    row.n = n;
    row.bound = w * cert.c_n(n);
    if (!phi[n].is_zero()) {
      row.neg_val = -phi[n].val();
      const BigRational ratio = BigRational(*row.neg_val) / row.bound;
      if (!seen || ratio > rep.max_ratio) rep.max_ratio = ratio;
      seen = true;
      if (BigRational(*row.neg_val) > row.bound && rep.ok) {
        rep.ok = false;
        rep.first_violation = n;
      }
    } else if (!phi[n].is_exact() && BigRational(-phi[n].abs_prec()) > row.bound && !rep.first_undetermined) {
      rep.ok = false;
      rep.first_undetermined = n;
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

std::string big_rational_to_string(const BigRational& q) {
  const auto num = boost::multiprecision::numerator(q);
  const auto den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

std::string growth_tsv(const GrowthReport& rep) {
  std::ostringstream os;
  os << "n\tneg_val\tbound\n";
  for (const auto& row : rep.rows) {
    os << row.n << "\t" << (row.neg_val ? std::to_string(*row.neg_val) : "") << "\t" << big_rational_to_string(row.bound)
       << "\n";
  }
  return os.str();
}

}  // namespace germ
