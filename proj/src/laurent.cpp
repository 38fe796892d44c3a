#include "germ/laurent.hpp"

#include <algorithm>
#include <sstream>

#include "germ/error.hpp"

namespace germ {

namespace {

std::int64_t sat_add(std::int64_t a, std::int64_t b) {
  if (a >= LaurentScalar::kInfinity || b >= LaurentScalar::kInfinity) return LaurentScalar::kInfinity;
  return a + b;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  return a >= 0 ? (a + b - 1) / b : -((-a) / b);
}

}  // namespace

LaurentScalar LaurentScalar::zero_to(LaurentContext ctx, std::int64_t abs_prec) {
  LaurentScalar x(ctx);
  x.abs_ = abs_prec;
  return x;
}

LaurentScalar LaurentScalar::constant(LaurentContext ctx, const FieldElement& c) { return monomial(ctx, 0, c); }

LaurentScalar LaurentScalar::from_int(LaurentContext ctx, std::int64_t n) {
  return constant(ctx, FieldElement::from_int(ctx.field, n));
}

LaurentScalar LaurentScalar::monomial(LaurentContext ctx, std::int64_t k, const FieldElement& c) {
  return from_digits(ctx, k, {c});
}

LaurentScalar LaurentScalar::from_digits(LaurentContext ctx, std::int64_t val, std::vector<FieldElement> digits,
                                         std::int64_t abs_prec) {
  LaurentScalar x(ctx);
  x.val_ = val;
  x.digits_ = std::move(digits);
  x.abs_ = abs_prec;
  for (auto& d : x.digits_) {
    if (d.field() != ctx.field) d = FieldElement(ctx.field, d.code());
  }
  x.normalize();
  return x;
}

void LaurentScalar::normalize() {
  if (val_ == kInfinity) {
    digits_.clear();
    return;
  }
  std::size_t lead = 0;
  while (lead < digits_.size() && digits_[lead].is_zero()) ++lead;
  if (lead == digits_.size()) {
    digits_.clear();
    val_ = kInfinity;
    return;
  }
  if (lead > 0) {
    digits_.erase(digits_.begin(), digits_.begin() + static_cast<std::ptrdiff_t>(lead));
    val_ += static_cast<std::int64_t>(lead);
  }
  if (abs_ != kInfinity && val_ >= abs_) {
    digits_.clear();
    val_ = kInfinity;
    return;
  }
  std::int64_t keep = abs_ == kInfinity ? kInfinity : abs_ - val_;
  if (static_cast<std::int64_t>(digits_.size()) > keep) digits_.resize(static_cast<std::size_t>(keep));
  while (!digits_.empty() && digits_.back().is_zero()) digits_.pop_back();
  if (static_cast<std::int64_t>(digits_.size()) > ctx_.cap) {
    digits_.resize(static_cast<std::size_t>(ctx_.cap));
    abs_ = std::min(abs_, val_ + ctx_.cap);
    while (!digits_.empty() && digits_.back().is_zero()) digits_.pop_back();
  }
  // inexact values never claim more than cap relative digits
  if (abs_ != kInfinity && abs_ - val_ > ctx_.cap) abs_ = val_ + ctx_.cap;
}

FieldElement LaurentScalar::coeff(std::int64_t k) const {
  if (k >= abs_) fail(Errc::PrecisionExhausted, "digit beyond known precision");
  if (is_zero() || k < val_) return FieldElement::zero(ctx_.field);
  const std::int64_t i = k - val_;
  return i < static_cast<std::int64_t>(digits_.size()) ? digits_[static_cast<std::size_t>(i)]
                                                       : FieldElement::zero(ctx_.field);
}

LaurentScalar operator+(const LaurentScalar& a, const LaurentScalar& b) {
  if (a.is_exact_zero()) return b;
  if (b.is_exact_zero()) return a;
  LaurentScalar out(a.ctx_);
  out.abs_ = std::min(a.abs_, b.abs_);
  if (a.is_zero() && b.is_zero()) return out;
  const std::int64_t v = std::min(a.val_, b.val_);
  std::int64_t end = std::max(a.is_zero() ? v : a.val_ + static_cast<std::int64_t>(a.digits_.size()),
                              b.is_zero() ? v : b.val_ + static_cast<std::int64_t>(b.digits_.size()));
  end = std::min(end, out.abs_);
  if (end <= v) return out;
  std::vector<FieldElement> d(static_cast<std::size_t>(end - v), FieldElement::zero(a.ctx_.field));
  auto accumulate = [&](const LaurentScalar& x, bool) {
    if (x.is_zero()) return;
    for (std::size_t i = 0; i < x.digits_.size(); ++i) {
      const std::int64_t pos = x.val_ + static_cast<std::int64_t>(i) - v;
      if (pos >= static_cast<std::int64_t>(d.size())) break;
      auto& slot = d[static_cast<std::size_t>(pos)];
      slot = FieldElement(a.ctx_.field, a.ctx_.field->add(slot.code(), x.digits_[i].code()));
    }
  };
  accumulate(a, true);
  accumulate(b, true);
  out.val_ = v;
  out.digits_ = std::move(d);
  out.normalize();
  return out;
}

LaurentScalar LaurentScalar::operator-() const {
  LaurentScalar out = *this;
  for (auto& d : out.digits_) d = -d;
  return out;
}

LaurentScalar operator*(const LaurentScalar& a, const LaurentScalar& b) {
  if (a.is_exact_zero() || b.is_exact_zero()) return LaurentScalar(a.ctx_);
  LaurentScalar out(a.ctx_);
  out.abs_ = std::min(sat_add(a.abs_, b.val_lower_bound()), sat_add(b.abs_, a.val_lower_bound()));
  if (a.is_zero() || b.is_zero()) return out;
  out.val_ = a.val_ + b.val_;
  std::int64_t rel = std::min<std::int64_t>(static_cast<std::int64_t>(a.digits_.size() + b.digits_.size()) - 1,
                                            a.ctx_.cap);
  if (out.abs_ != LaurentScalar::kInfinity) rel = std::min(rel, out.abs_ - out.val_);
  // digit convolution on raw codes
  const Field& F = *a.ctx_.field;
  std::vector<std::uint64_t> acc(static_cast<std::size_t>(std::max<std::int64_t>(rel, 0)), 0);
  // small prime fields accumulate unreduced products and reduce once
  const bool lazy = F.is_prime_field() && F.p() < (1ULL << 20);
  for (std::size_t i = 0; i < a.digits_.size() && static_cast<std::int64_t>(i) < rel; ++i) {
    const std::uint64_t ai = a.digits_[i].code();
    if (ai == 0) continue;
    for (std::size_t j = 0; j < b.digits_.size() && static_cast<std::int64_t>(i + j) < rel; ++j) {
      const std::uint64_t bj = b.digits_[j].code();
      if (lazy) acc[i + j] += ai * bj;
      else if (bj != 0) acc[i + j] = F.add(acc[i + j], F.mul(ai, bj));
    }
  }
  if (lazy) {
    for (auto& c : acc) c %= F.p();
  }
  std::vector<FieldElement> d;
  d.reserve(acc.size());
  for (auto c : acc) d.emplace_back(a.ctx_.field, c);
  // an exact product whose digits spill past the cap loses exactness
  if (out.abs_ == LaurentScalar::kInfinity &&
      static_cast<std::int64_t>(a.digits_.size() + b.digits_.size()) - 1 > a.ctx_.cap) {
    out.abs_ = out.val_ + a.ctx_.cap;
  }
  out.digits_ = std::move(d);
  out.normalize();
  return out;
}

LaurentScalar LaurentScalar::inverse() const {
  if (is_exact_zero()) fail(Errc::DivisionByZero, "inverse of zero");
  if (is_zero()) fail(Errc::PrecisionExhausted, "inverse of a value that vanishes to precision " + std::to_string(abs_));
  LaurentScalar out(ctx_);
  out.val_ = -val_;
  if (digits_.size() == 1 && is_exact()) {
    out.digits_ = {digits_[0].inverse()};
    out.abs_ = kInfinity;
    return out;
  }
  const std::int64_t rel = is_exact() ? ctx_.cap : std::min<std::int64_t>(abs_ - val_, ctx_.cap);
  std::vector<FieldElement> g(static_cast<std::size_t>(rel), FieldElement::zero(ctx_.field));
  const FieldElement inv0 = digits_[0].inverse();
  g[0] = inv0;
  for (std::int64_t n = 1; n < rel; ++n) {
    FieldElement acc = FieldElement::zero(ctx_.field);
    for (std::int64_t k = 1; k <= n && k < static_cast<std::int64_t>(digits_.size()); ++k) acc += digits_[k] * g[n - k];
    g[n] = -acc * inv0;
  }
  out.digits_ = std::move(g);
  out.abs_ = out.val_ + rel;
  out.normalize();
  return out;
}

LaurentScalar LaurentScalar::frobenius() const {
  const auto p = static_cast<std::int64_t>(ctx_.field->p());
  LaurentScalar out(ctx_);
  out.abs_ = abs_ == kInfinity ? kInfinity : abs_ * p;
  if (is_zero()) return out;
  out.val_ = val_ * p;
  std::vector<FieldElement> d((digits_.size() - 1) * static_cast<std::size_t>(p) + 1, FieldElement::zero(ctx_.field));
  for (std::size_t i = 0; i < digits_.size(); ++i) d[i * static_cast<std::size_t>(p)] = digits_[i].frobenius();
  out.digits_ = std::move(d);
  out.normalize();
  return out;
}

LaurentScalar LaurentScalar::frobenius_root(unsigned m) const {
  if (m == 0) return *this;
  std::int64_t q = 1;
  for (unsigned i = 0; i < m; ++i) q *= static_cast<std::int64_t>(ctx_.field->p());
  LaurentScalar out(ctx_);
  out.abs_ = abs_ == kInfinity ? kInfinity : ceil_div(abs_, q);
  if (is_zero()) return out;
  if (val_ % q != 0) {
    fail(Errc::UnsolvableRoot, "valuation " + std::to_string(val_) + " is not divisible by " + std::to_string(q));
  }
  std::vector<FieldElement> d;
  for (std::size_t i = 0; i < digits_.size(); ++i) {
    if (i % static_cast<std::size_t>(q) != 0) {
      if (!digits_[i].is_zero()) fail(Errc::UnsolvableRoot, "unit part is not a p^m-th power in F_q((t))");
      continue;
    }
    d.push_back(germ::frobenius_root(digits_[i], m));
  }
  out.val_ = val_ / q;
  out.digits_ = std::move(d);
  out.normalize();
  return out;
}

std::string LaurentScalar::to_string() const {
  std::ostringstream os;
  if (is_zero()) {
    os << "0";
  } else {
    bool first = true;
    for (std::size_t i = 0; i < digits_.size(); ++i) {
      if (digits_[i].is_zero()) continue;
      if (!first) os << " + ";
      first = false;
      os << digits_[i].to_string() << "*t^" << val_ + static_cast<std::int64_t>(i);
    }
  }
  if (!is_exact()) os << " + O(t^" << abs_ << ")";
  return os.str();
}

}  // namespace germ
