#include "germ/field.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>

#include "germ/error.hpp"

namespace germ {

// ---------------------------------------------------------------------------
// Field

Field::Field(std::uint64_t p, unsigned k, std::vector<std::uint64_t> modulus)
    : p_(p), k_(k), modulus_(std::move(modulus)) {
  order_ = 1;
  pow_p_.resize(k_);
  for (unsigned i = 0; i < k_; ++i) {
    pow_p_[i] = static_cast<std::uint64_t>(order_);
    order_ *= p_;
  }
  if (k_ >= 2 && order_ <= kTableLimit) build_tables();
}

std::string Field::describe() const {
  std::ostringstream os;
  os << "F_" << p_;
  if (k_ > 1) os << "^" << k_;
  return os.str();
}

std::vector<std::uint64_t> Field::digits(std::uint64_t code) const {
  std::vector<std::uint64_t> out(k_);
  if (k_ == 1) {
    out[0] = code;
    return out;
  }
  for (unsigned i = 0; i < k_; ++i) {
    out[i] = code % p_;
    code /= p_;
  }
  return out;
}

std::uint64_t Field::encode(std::span<const std::uint64_t> digits) const {
  if (digits.size() > k_) fail(Errc::ValidationError, "too many coordinates for " + describe());
  if (k_ == 1) return digits.empty() ? 0 : digits[0] % p_;
  std::uint64_t code = 0;
  for (std::size_t i = digits.size(); i-- > 0;) code = code * p_ + digits[i] % p_;
  return code;
}

std::uint64_t Field::add_digits(std::uint64_t a, std::uint64_t b, bool subtract) const {
  // k >= 2 implies p < 2^32, so per-digit sums fit comfortably
  std::uint64_t out = 0;
  for (unsigned i = 0; i < k_; ++i) {
    std::uint64_t da = a % p_, db = b % p_;
    a /= p_;
    b /= p_;
    std::uint64_t d = subtract ? (da + p_ - db) % p_ : (da + db) % p_;
    out += d * pow_p_[i];
  }
  return out;
}

std::uint64_t Field::mul_poly(std::uint64_t a, std::uint64_t b) const {
  std::array<std::uint64_t, 64> da{}, db{};
  std::array<std::uint64_t, 128> prod{};
  for (unsigned i = 0; i < k_; ++i) {
    da[i] = a % p_;
    a /= p_;
    db[i] = b % p_;
    b /= p_;
  }
  for (unsigned i = 0; i < k_; ++i) {
    if (da[i] == 0) continue;
    for (unsigned j = 0; j < k_; ++j) prod[i + j] = (prod[i + j] + da[i] * db[j]) % p_;
  }
  for (unsigned i = 2 * k_ - 2; i >= k_; --i) {
    std::uint64_t c = prod[i];
    if (c == 0) continue;
    prod[i] = 0;
    for (unsigned j = 0; j < k_; ++j) {
      // subtract c * modulus_j at position i - k + j
      prod[i - k_ + j] = (prod[i - k_ + j] + (p_ - c) * modulus_[j]) % p_;
    }
  }
  std::uint64_t out = 0;
  for (unsigned i = 0; i < k_; ++i) out += prod[i] * pow_p_[i];
  return out;
}

void Field::build_tables() {
  const std::uint64_t q = static_cast<std::uint64_t>(order_);
  const std::uint64_t group = q - 1;
  const auto primes = prime_divisors(group);
  auto slow_pow = [&](std::uint64_t base, std::uint64_t e) {
    std::uint64_t r = 1;
    while (e > 0) {
      if (e & 1) r = mul_poly(r, base);
      base = mul_poly(base, base);
      e >>= 1;
    }
    return r;
  };
  std::uint64_t g = 0;
  for (std::uint64_t cand = 2; cand < q; ++cand) {
    bool primitive = true;
    for (auto r : primes) {
      if (slow_pow(cand, group / r) == 1) {
        primitive = false;
        break;
      }
    }
    if (primitive) {
      g = cand;
      break;
    }
  }
  if (g == 0) fail(Errc::Internal, "no primitive element in " + describe());
  exp_.resize(group);
  log_.assign(q, 0);
  std::uint64_t x = 1;
  for (std::uint64_t i = 0; i < group; ++i) {
    exp_[i] = static_cast<std::uint32_t>(x);
    log_[x] = static_cast<std::uint32_t>(i);
    x = mul_poly(x, g);
  }
  zech_.assign(group, -1);
  for (std::uint64_t n = 0; n < group; ++n) {
    std::uint64_t s = add_digits(exp_[n], 1, false);
    zech_[n] = s == 0 ? -1 : static_cast<std::int32_t>(log_[s]);
  }
  log_minus_one_ = p_ == 2 ? 0 : static_cast<std::uint32_t>(group / 2);
  tables_ = true;
}

std::uint64_t Field::add(std::uint64_t a, std::uint64_t b) const {
  if (k_ == 1) return a >= p_ - b ? a - (p_ - b) : a + b;
  if (!tables_) return add_digits(a, b, false);
  if (a == 0) return b;
  if (b == 0) return a;
  const std::uint32_t group = static_cast<std::uint32_t>(exp_.size());
  std::uint32_t la = log_[a], lb = log_[b];
  std::uint32_t n = lb >= la ? lb - la : lb + group - la;
  std::int32_t z = zech_[n];
  if (z < 0) return 0;
  std::uint32_t e = la + static_cast<std::uint32_t>(z);
  if (e >= group) e -= group;
  return exp_[e];
}

std::uint64_t Field::neg(std::uint64_t a) const {
  if (a == 0) return 0;
  if (k_ == 1) return p_ - a;
  if (!tables_) return add_digits(0, a, true);
  const std::uint32_t group = static_cast<std::uint32_t>(exp_.size());
  std::uint32_t e = log_[a] + log_minus_one_;
  if (e >= group) e -= group;
  return exp_[e];
}

std::uint64_t Field::sub(std::uint64_t a, std::uint64_t b) const {
  if (k_ == 1) return a >= b ? a - b : a + (p_ - b);
  if (!tables_) return add_digits(a, b, true);
  return add(a, neg(b));
}

std::uint64_t Field::mul(std::uint64_t a, std::uint64_t b) const {
  if (a == 0 || b == 0) return 0;
  if (k_ == 1) return p_ < (1ULL << 32) ? a * b % p_ : mul_mod(a, b, p_);
  if (!tables_) return mul_poly(a, b);
  const std::uint32_t group = static_cast<std::uint32_t>(exp_.size());
  std::uint32_t e = log_[a] + log_[b];
  if (e >= group) e -= group;
  return exp_[e];
}

std::uint64_t Field::pow(std::uint64_t a, u128 e) const {
  if (e == 0) return 1;
  if (a == 0) return 0;
  if (k_ == 1) return pow_mod(a, e, p_);
  if (tables_) {
    const std::uint64_t group = exp_.size();
    std::uint64_t r = static_cast<std::uint64_t>(e % group);
    return exp_[(static_cast<std::uint64_t>(log_[a]) * r) % group];
  }
  // reduce the exponent modulo the multiplicative group order
  u128 group = order_ - 1;
  e %= group;
  if (e == 0) e = group;
  std::uint64_t r = 1;
  while (e > 0) {
    if (e & 1) r = mul_poly(r, a);
    a = mul_poly(a, a);
    e >>= 1;
  }
  return r;
}

std::uint64_t Field::inv(std::uint64_t a) const {
  if (a == 0) fail(Errc::DivisionByZero, "inverse of zero in " + describe());
  if (k_ == 1) return inv_mod(a, p_);
  if (tables_) {
    const std::uint32_t group = static_cast<std::uint32_t>(exp_.size());
    std::uint32_t l = log_[a];
    return exp_[l == 0 ? 0 : group - l];
  }
  return pow(a, order_ - 2);
}

// ---------------------------------------------------------------------------
// Registry

class FieldRegistry {
 public:
  static FieldRegistry& instance() {
    static FieldRegistry reg;
    return reg;
  }

  FieldRef intern(std::uint64_t p, unsigned k, std::vector<std::uint64_t> modulus) {
    std::lock_guard lock(mu_);
    auto key = std::make_pair(p, modulus);
    if (auto it = by_modulus_.find(key); it != by_modulus_.end()) return it->second;
    auto field = std::unique_ptr<Field>(new Field(p, k, std::move(modulus)));
    FieldRef ref = field.get();
    storage_.push_back(std::move(field));
    by_modulus_.emplace(std::move(key), ref);
    return ref;
  }

  std::optional<FieldRef> find_default(std::uint64_t p, unsigned k) {
    std::lock_guard lock(mu_);
    if (auto it = defaults_.find({p, k}); it != defaults_.end()) return it->second;
    return std::nullopt;
  }

  void set_default(std::uint64_t p, unsigned k, FieldRef f) {
    std::lock_guard lock(mu_);
    defaults_.emplace(std::make_pair(p, k), f);
  }

  std::optional<Embedding> find_embedding(FieldRef a, FieldRef b) {
    std::lock_guard lock(mu_);
    if (auto it = embeddings_.find({a, b}); it != embeddings_.end()) return it->second;
    return std::nullopt;
  }

  void set_embedding(const Embedding& e) {
    std::lock_guard lock(mu_);
    embeddings_.emplace(std::make_pair(e.from, e.to), e);
  }

 private:
  std::mutex mu_;
  std::vector<std::unique_ptr<Field>> storage_;
  std::map<std::pair<std::uint64_t, std::vector<std::uint64_t>>, FieldRef> by_modulus_;
  std::map<std::pair<std::uint64_t, unsigned>, FieldRef> defaults_;
  std::map<std::pair<FieldRef, FieldRef>, Embedding> embeddings_;
};

namespace {

bool order_fits(std::uint64_t p, unsigned k) {
  u128 q = 1;
  const u128 cap = static_cast<u128>(1) << 64;
  for (unsigned i = 0; i < k; ++i) {
    q *= p;
    if (q > cap) return false;
  }
  return true;
}

Poly lift_prime_poly(FieldRef fp, const std::vector<std::uint64_t>& c) {
  Poly out;
  out.reserve(c.size());
  for (auto v : c) out.emplace_back(fp, v % fp->p());
  return out;
}

// Rabin's irreducibility test over the prime field.
bool is_irreducible(FieldRef fp, const std::vector<std::uint64_t>& modulus) {
  const unsigned k = static_cast<unsigned>(modulus.size() - 1);
  if (k == 1) return true;
  const Poly f = lift_prime_poly(fp, modulus);
  const Poly x{FieldElement::zero(fp), FieldElement::one(fp)};
  const std::uint64_t p = fp->p();
  std::vector<Poly> frob_powers;  // x^(p^i) mod f for i = 1..k
  Poly h = x;
  for (unsigned i = 1; i <= k; ++i) {
    h = poly::powmod(h, p, f);
    frob_powers.push_back(h);
  }
  Poly last = poly::sub(frob_powers.back(), x);
  poly::trim(last);
  if (!last.empty()) return false;
  for (auto r : prime_divisors(k)) {
    Poly diff = poly::sub(frob_powers[k / r - 1], x);
    poly::trim(diff);
    if (diff.empty()) return false;
    if (poly::degree(poly::gcd(f, diff)) != 0) return false;
  }
  return true;
}

}  // namespace

FieldRef field_create(std::uint64_t p, unsigned k, std::optional<std::vector<std::uint64_t>> modulus) {
  if (!is_prime(p)) fail(Errc::CompositeP, std::to_string(p) + " is not prime");
  if (k == 0) fail(Errc::ValidationError, "extension degree must be >= 1");
  if (!order_fits(p, k)) {
    fail(Errc::FieldTooLarge, "p^k exceeds 2^64 for p=" + std::to_string(p) + ", k=" + std::to_string(k));
  }
  auto& reg = FieldRegistry::instance();
  if (!modulus) {
    if (auto f = reg.find_default(p, k)) return *f;
  }
  FieldRef fp = k == 1 && !modulus ? nullptr : field_create(p, 1);
  if (modulus) {
    auto& m = *modulus;
    if (m.size() != k + 1 || m.back() % p != 1) {
      fail(Errc::ValidationError, "modulus must be monic of degree " + std::to_string(k));
    }
    for (auto& c : m) c %= p;
    if (!is_irreducible(fp, m)) fail(Errc::ReducibleModulus, "modulus is reducible mod " + std::to_string(p));
    return reg.intern(p, k, m);
  }
  std::vector<std::uint64_t> m(k + 1, 0);
  m[k] = 1;
  if (k == 1) {
    FieldRef f = reg.intern(p, 1, m);
    reg.set_default(p, 1, f);
    return f;
  }
  // enumerate c_0 + c_1 p + ... in increasing order
  while (true) {
    if (m[0] != 0 && is_irreducible(fp, m)) break;
    unsigned i = 0;
    while (i < k && ++m[i] == p) m[i++] = 0;
    if (i == k) fail(Errc::Internal, "no irreducible polynomial found");
  }
  FieldRef f = reg.intern(p, k, m);
  reg.set_default(p, k, f);
  return f;
}

// ---------------------------------------------------------------------------
// FieldElement

namespace {

FieldRef common_field(const FieldElement& a, const FieldElement& b) {
  FieldRef fa = a.field(), fb = b.field();
  if (fa == fb) return fa;
  if (fa == nullptr || fb == nullptr) fail(Errc::Internal, "uninitialised field element");
  if (fa->p() == fb->p()) {
    if (fa->is_prime_field()) return fb;
    if (fb->is_prime_field()) return fa;
  }
  fail(Errc::IncompatibleFields, fa->describe() + " vs " + fb->describe());
}

}  // namespace

FieldElement FieldElement::from_coeffs(FieldRef f, std::span<const std::uint64_t> coeffs) {
  return {f, f->encode(coeffs)};
}

FieldElement FieldElement::generator(FieldRef f) {
  if (f->k() == 1) return from_int(f, -static_cast<std::int64_t>(f->modulus()[0] % f->p()));
  return {f, f->p()};
}

FieldElement FieldElement::inverse() const { return {field_, field_->inv(code_)}; }

FieldElement operator+(const FieldElement& a, const FieldElement& b) {
  FieldRef f = common_field(a, b);
  return {f, f->add(a.code_, b.code_)};
}

FieldElement operator-(const FieldElement& a, const FieldElement& b) {
  FieldRef f = common_field(a, b);
  return {f, f->sub(a.code_, b.code_)};
}

FieldElement operator*(const FieldElement& a, const FieldElement& b) {
  FieldRef f = common_field(a, b);
  return {f, f->mul(a.code_, b.code_)};
}

FieldElement operator/(const FieldElement& a, const FieldElement& b) {
  FieldRef f = common_field(a, b);
  return {f, f->mul(a.code_, f->inv(b.code_))};
}

bool operator==(const FieldElement& a, const FieldElement& b) {
  if (a.code_ != b.code_) return false;
  if (a.field_ == b.field_) return true;
  if (a.field_ == nullptr || b.field_ == nullptr) return false;
  return a.field_->p() == b.field_->p() && a.code_ < a.field_->p();
}

std::string FieldElement::to_string() const {
  if (field_ == nullptr) return "<null>";
  if (field_->is_prime_field()) return std::to_string(code_);
  std::ostringstream os;
  os << "[";
  auto d = coeffs();
  for (std::size_t i = 0; i < d.size(); ++i) os << (i ? "," : "") << d[i];
  os << "]";
  return os.str();
}

FieldElement frobenius_root(const FieldElement& x, unsigned m) {
  const unsigned k = x.field()->k();
  const unsigned steps = (k - m % k) % k;
  FieldElement y = x;
  for (unsigned i = 0; i < steps; ++i) y = y.frobenius();
  return y;
}

bool unity_relation(const FieldElement& zeta, u128 n) { return zeta.pow(n) == zeta; }

// ---------------------------------------------------------------------------
// Polynomials

namespace poly {

void trim(Poly& f) {
  while (!f.empty() && f.back().is_zero()) f.pop_back();
}

int degree(const Poly& f) {
  for (std::size_t i = f.size(); i-- > 0;) {
    if (!f[i].is_zero()) return static_cast<int>(i);
  }
  return -1;
}

Poly add(const Poly& a, const Poly& b) {
  const Poly& longer = a.size() >= b.size() ? a : b;
  const Poly& shorter = a.size() >= b.size() ? b : a;
  Poly out = longer;
  for (std::size_t i = 0; i < shorter.size(); ++i) out[i] += shorter[i];
  trim(out);
  return out;
}

Poly sub(const Poly& a, const Poly& b) {
  Poly nb = b;
  for (auto& c : nb) c = -c;
  return add(a, nb);
}

Poly mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  FieldRef f = common_field(a.front(), b.front());
  Poly out(a.size() + b.size() - 1, FieldElement::zero(f));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_zero()) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  trim(out);
  return out;
}

std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b) {
  Poly bt = b;
  trim(bt);
  if (bt.empty()) fail(Errc::DivisionByZero, "polynomial division by zero");
  Poly r = a;
  trim(r);
  const FieldRef f = bt.back().field();
  if (r.size() < bt.size()) return {{}, r};
  Poly q(r.size() - bt.size() + 1, FieldElement::zero(f));
  const FieldElement lead_inv = bt.back().inverse();
  for (std::size_t i = r.size(); i-- >= bt.size();) {
    if (r[i].is_zero()) {
      if (i == bt.size() - 1) break;
      continue;
    }
    FieldElement c = r[i] * lead_inv;
    const std::size_t shift = i - (bt.size() - 1);
    q[shift] = c;
    for (std::size_t j = 0; j < bt.size(); ++j) r[shift + j] -= c * bt[j];
    if (i == bt.size() - 1) break;
  }
  trim(q);
  trim(r);
  return {q, r};
}

Poly mod(const Poly& a, const Poly& b) { return divmod(a, b).second; }

Poly monic(const Poly& f) {
  Poly out = f;
  trim(out);
  if (out.empty()) return out;
  const FieldElement inv = out.back().inverse();
  for (auto& c : out) c *= inv;
  return out;
}

Poly gcd(Poly a, Poly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = mod(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a);
}

Poly powmod(const Poly& base, u128 e, const Poly& m) {
  const FieldRef f = m.back().field();
  Poly result{FieldElement::one(f)};
  Poly b = mod(base, m);
  while (e > 0) {
    if (e & 1) result = mod(mul(result, b), m);
    e >>= 1;
    if (e > 0) b = mod(mul(b, b), m);
  }
  return result;
}

FieldElement eval(const Poly& f, const FieldElement& z) {
  FieldElement acc = FieldElement::zero(z.field());
  for (std::size_t i = f.size(); i-- > 0;) acc = acc * z + f[i];
  return acc;
}

Poly map(const Poly& f, const Embedding& emb) {
  Poly out;
  out.reserve(f.size());
  for (const auto& c : f) out.push_back(emb(c));
  return out;
}

}  // namespace poly

// ---------------------------------------------------------------------------
// Embeddings

FieldElement Embedding::operator()(const FieldElement& x) const {
  if (x.field() == to) return x;
  if (x.field() != from) {
    if (x.field()->p() == to->p() && x.field()->is_prime_field()) return {to, x.code()};
    fail(Errc::IncompatibleFields, "element not in embedding source");
  }
  if (from->is_prime_field()) return {to, x.code()};
  auto d = x.coeffs();
  FieldElement acc = FieldElement::zero(to);
  for (std::size_t i = d.size(); i-- > 0;) acc = acc * image + FieldElement(to, d[i]);
  return acc;
}

Embedding embedding(FieldRef from, FieldRef to) {
  if (from == to) return {from, to, FieldElement::generator(to)};
  if (from->p() != to->p() || to->k() % from->k() != 0) {
    fail(Errc::IncompatibleFields, "no embedding " + from->describe() + " -> " + to->describe());
  }
  auto& reg = FieldRegistry::instance();
  if (auto e = reg.find_embedding(from, to)) return *e;
  Embedding e{from, to, FieldElement::zero(to)};
  if (!from->is_prime_field()) {
    Poly m;
    for (auto c : from->modulus()) m.emplace_back(to, c);
    auto roots = poly_roots(m, false, 0);
    e.image = roots.roots.front();
  } else {
    e.image = FieldElement::generator(from);
    e.image = FieldElement(to, e.image.code());
  }
  reg.set_embedding(e);
  return e;
}

// ---------------------------------------------------------------------------
// Root finding

namespace {

inline constexpr std::uint64_t kBruteForceLimit = 16;

void split_linear(const Poly& r, std::mt19937_64& rng, std::vector<FieldElement>& out) {
  const int deg = poly::degree(r);
  if (deg <= 0) return;
  const FieldRef f = r.back().field();
  if (deg == 1) {
    Poly m = poly::monic(r);
    out.push_back(-m[0]);
    return;
  }
  const std::uint64_t q_lo = static_cast<std::uint64_t>(std::min<u128>(f->order() - 1, ~0ULL));
  std::uniform_int_distribution<std::uint64_t> dist(0, q_lo);
  while (true) {
    FieldElement a(f, dist(rng));
    Poly w;
    if (f->p() != 2) {
      Poly base{a, FieldElement::one(f)};
      w = poly::powmod(base, (f->order() - 1) / 2, r);
      w = poly::sub(w, Poly{FieldElement::one(f)});
    } else {
      if (a.is_zero()) continue;
      Poly s = poly::mod(Poly{FieldElement::zero(f), a}, r);
      w = s;
      for (unsigned i = 1; i < f->k(); ++i) {
        s = poly::mod(poly::mul(s, s), r);
        w = poly::add(w, s);
      }
    }
    Poly g = poly::gcd(r, w);
    const int dg = poly::degree(g);
    if (dg > 0 && dg < deg) {
      split_linear(g, rng, out);
      split_linear(poly::divmod(r, g).first, rng, out);
      return;
    }
  }
}

std::vector<FieldElement> roots_in_field(const Poly& fpoly, std::uint64_t seed) {
  const FieldRef f = fpoly.back().field();
  std::vector<FieldElement> out;
  if (f->order() <= kBruteForceLimit) {
    const auto q = static_cast<std::uint64_t>(f->order());
    for (std::uint64_t c = 0; c < q; ++c) {
      FieldElement z(f, c);
      if (poly::eval(fpoly, z).is_zero()) out.push_back(z);
    }
    return out;
  }
  const Poly x{FieldElement::zero(f), FieldElement::one(f)};
  Poly xq = poly::powmod(x, f->order(), fpoly);
  Poly r = poly::gcd(fpoly, poly::sub(xq, x));
  std::mt19937_64 rng(seed);
  split_linear(r, rng, out);
  std::sort(out.begin(), out.end());
  return out;
}

Poly in_one_field(const Poly& coeffs) {
  Poly f = coeffs;
  poly::trim(f);
  if (f.empty()) fail(Errc::ValidationError, "zero polynomial has no well-defined root set");
  FieldRef field = f.back().field();
  for (const auto& c : f) {
    if (c.field() != field && !c.field()->is_prime_field()) {
      if (field->is_prime_field()) {
        field = c.field();
      } else {
        fail(Errc::IncompatibleFields, "polynomial coefficients in different fields");
      }
    }
  }
  for (auto& c : f) c = FieldElement(field, c.code());
  return f;
}

}  // namespace

unsigned root_extension_degree(const Poly& coeffs) {
  const Poly f = in_one_field(coeffs);
  const int deg = poly::degree(f);
  if (deg <= 0) fail(Errc::NoRootInField, "constant polynomial has no roots");
  const FieldRef field = f.back().field();
  const Poly x{FieldElement::zero(field), FieldElement::one(field)};
  Poly h = x;
  for (int s = 1; s <= deg; ++s) {
    h = poly::powmod(h, field->order(), f);
    Poly g = poly::gcd(f, poly::sub(h, x));
    if (poly::degree(g) > 0) return static_cast<unsigned>(s);
  }
  fail(Errc::Internal, "no irreducible factor found");
}

RootResult poly_roots(const Poly& coeffs, bool allow_extension, std::uint64_t seed) {
  const Poly f = in_one_field(coeffs);
  const FieldRef field = f.back().field();
  RootResult result;
  result.field = field;
  if (poly::degree(f) == 0) {
    if (!allow_extension) fail(Errc::NoRootInField, "nonzero constant polynomial");
    fail(Errc::NoRootInField, "nonzero constant polynomial has no roots in any extension");
  }
  result.roots = roots_in_field(f, seed);
  if (!result.roots.empty()) return result;
  if (!allow_extension) fail(Errc::NoRootInField, "no root in " + field->describe());
  const unsigned s = root_extension_degree(f);
  FieldRef bigger = field_create(field->p(), field->k() * s);
  Embedding emb = embedding(field, bigger);
  Poly mapped = poly::map(f, emb);
  result.roots = roots_in_field(mapped, seed);
  result.field = bigger;
  result.embedding = emb;
  if (result.roots.empty()) fail(Errc::Internal, "extension did not produce a root");
  return result;
}

}  // namespace germ
