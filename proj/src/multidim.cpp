#include "germ/multidim.hpp"

#include <algorithm>
#include <memory>
#include <mutex>
#include <sstream>

#include "germ/error.hpp"

namespace germ {

namespace {

void enumerate_degree(unsigned N, int d, unsigned i, Exponent& cur, std::vector<Exponent>& out) {
  if (i + 1 == N) {
    cur[i] = static_cast<unsigned>(d);
    out.push_back(cur);
    return;
  }
  for (int a = d; a >= 0; --a) {
    cur[i] = static_cast<unsigned>(a);
    enumerate_degree(N, d - a, i + 1, cur, out);
  }
}

int degree_of(const Exponent& e) {
  int d = 0;
  for (auto a : e) d += static_cast<int>(a);
  return d;
}

void check_compatible(const MultiSeries& a, const MultiSeries& b) {
  if (a.field() != b.field()) fail(Errc::IncompatibleFields, "multivariate series over different fields");
  if (a.nvars() != b.nvars()) fail(Errc::ValidationError, "multivariate series in different numbers of variables");
}

bool lazy_field(FieldRef f) { return f->is_prime_field() && f->p() < (1u << 16); }

// r[i + j] += a[i] b[j] over all pairs with deg i + deg j <= T.
std::vector<std::uint64_t> mul_codes(FieldRef f, const MonomialIndex& I, const std::vector<std::uint64_t>& a,
                                     const std::vector<std::uint64_t>& b) {
  const std::size_t n = I.size();
  std::vector<std::uint64_t> r(n, 0);
  std::vector<std::size_t> nzb;
  for (std::size_t j = 0; j < n; ++j) {
    if (b[j] != 0) nzb.push_back(j);
  }
  if (nzb.empty()) return r;
  const bool lazy = lazy_field(f);
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == 0) continue;
    const int room = I.T - I.deg[i];
    const std::uint64_t ci = I.code[i];
    for (std::size_t j : nzb) {
      if (I.deg[j] > room) break;
      const auto k = static_cast<std::size_t>(I.lookup[ci + I.code[j]]);
      if (lazy) r[k] += a[i] * b[j];
      else r[k] = f->add(r[k], f->mul(a[i], b[j]));
    }
  }
  if (lazy) {
    for (auto& x : r) x %= f->p();
  }
  return r;
}

std::vector<std::uint64_t> project(const MultiSeries& a, const MonomialIndex& to) {
  const MonomialIndex& from = a.index();
  std::vector<std::uint64_t> r(to.size(), 0);
  const std::size_t n = std::min(from.upto[static_cast<std::size_t>(std::min(from.T, to.T))], to.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a.codes()[i] != 0) r[static_cast<std::size_t>(to.find(from.exps[i]))] = a.codes()[i];
  }
  return r;
}

FieldElement signed_pow(const FieldElement& x, std::int64_t e) {
  if (e >= 0) return x.pow(static_cast<u128>(e));
  return x.inverse().pow(static_cast<u128>(-e));
}

// x^a times s, keeping degrees <= T.
MultiSeries shift(const MultiSeries& s, const Exponent& a, int T) {
  const int da = degree_of(a);
  const int t = std::min(T, s.trunc() + da);
  MultiSeries r(s.field(), s.nvars(), t);
  for (const auto& [e, c] : s.terms()) {
    Exponent sum = e;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += a[i];
    if (degree_of(sum) <= t) r.set(sum, c);
  }
  return r;
}

std::uint64_t nu_big(BigInt n, std::uint64_t p) {
  if (n == 0) return kNuInfinity;
  if (n < 0) n = -n;
  std::uint64_t v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

}  // namespace

// ---- MonomialIndex ----

std::int64_t MonomialIndex::find(const Exponent& e) const {
  if (e.size() != N) fail(Errc::ValidationError, "exponent has the wrong number of variables");
  if (degree_of(e) > T) return -1;
  std::uint64_t c = 0;
  std::uint64_t w = 1;
  for (unsigned i = 0; i < N; ++i) {
    c += e[i] * w;
    w *= base;
  }
  return lookup[c];
}

const MonomialIndex& MonomialIndex::get(unsigned N, int T) {
  if (N == 0) fail(Errc::ValidationError, "need at least one variable");
  if (T < 0) fail(Errc::ValidationError, "negative truncation");
  static std::mutex mu;
  static std::map<std::pair<unsigned, int>, std::unique_ptr<MonomialIndex>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{N, T}];
  if (slot) return *slot;
  const std::uint64_t base = static_cast<std::uint64_t>(T) + 1;
  std::uint64_t total = 1;
  for (unsigned i = 0; i < N; ++i) {
    total *= base;
    if (total > (1u << 24)) fail(Errc::ValidationError, "too many monomials for N=" + std::to_string(N) + ", T=" + std::to_string(T));
  }
  auto idx = std::make_unique<MonomialIndex>();
  idx->N = N;
  idx->T = T;
  idx->base = base;
  idx->lookup.assign(total, -1);
  Exponent cur(N, 0);
  for (int d = 0; d <= T; ++d) {
    enumerate_degree(N, d, 0, cur, idx->exps);
    idx->upto.push_back(idx->exps.size());
  }
  for (std::size_t i = 0; i < idx->exps.size(); ++i) {
    std::uint64_t c = 0;
    std::uint64_t w = 1;
    for (unsigned v = 0; v < N; ++v) {
      c += idx->exps[i][v] * w;
      w *= base;
    }
    idx->code.push_back(c);
    idx->deg.push_back(degree_of(idx->exps[i]));
    idx->lookup[c] = static_cast<std::int32_t>(i);
  }
  slot = std::move(idx);
  return *slot;
}

// ---- MultiSeries ----

MultiSeries::MultiSeries(FieldRef field, unsigned N, int T) : field_(field), idx_(&MonomialIndex::get(N, T)) {
  c_.assign(idx_->size(), 0);
}

MultiSeries MultiSeries::one(FieldRef field, unsigned N, int T) {
  MultiSeries r(field, N, T);
  r.c_[0] = 1;
  return r;
}

MultiSeries MultiSeries::var(FieldRef field, unsigned N, int T, unsigned i) {
  if (i >= N) fail(Errc::ValidationError, "variable index out of range");
  Exponent e(N, 0);
  e[i] = 1;
  return monomial(field, N, T, e, FieldElement::one(field));
}

MultiSeries MultiSeries::monomial(FieldRef field, unsigned N, int T, const Exponent& e, const FieldElement& c) {
  MultiSeries r(field, N, T);
  if (degree_of(e) <= T) r.set(e, c);
  return r;
}

MultiSeries MultiSeries::from_terms(FieldRef field, unsigned N, int T, const std::map<Exponent, FieldElement>& terms) {
  MultiSeries r(field, N, T);
  for (const auto& [e, c] : terms) {
    if (degree_of(e) <= T) r.set(e, c);
  }
  return r;
}

FieldElement MultiSeries::coeff(const Exponent& e) const {
  const std::int64_t i = idx_->find(e);
  if (i < 0) fail(Errc::InsufficientPrecision, "coefficient above the truncation");
  return {field_, c_[static_cast<std::size_t>(i)]};
}

void MultiSeries::set(const Exponent& e, const FieldElement& c) {
  if (c.field() != field_ && !c.is_zero()) {
    if (!(c.field()->p() == field_->p() && c.code() < field_->p())) fail(Errc::IncompatibleFields, "coefficient from another field");
  }
  const std::int64_t i = idx_->find(e);
  if (i < 0) fail(Errc::ValidationError, "exponent above the truncation");
  c_[static_cast<std::size_t>(i)] = c.code();
}

std::map<Exponent, FieldElement> MultiSeries::terms() const {
  std::map<Exponent, FieldElement> out;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] != 0) out.emplace(idx_->exps[i], FieldElement(field_, c_[i]));
  }
  return out;
}

bool MultiSeries::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](std::uint64_t x) { return x == 0; });
}

int MultiSeries::order() const {
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] != 0) return idx_->deg[i];
  }
  return idx_->T + 1;
}

MultiSeries MultiSeries::with_trunc(int T) const {
  const MonomialIndex& to = MonomialIndex::get(nvars(), T);
  return MultiSeries(field_, &to, project(*this, to));
}

MultiSeries operator+(const MultiSeries& a, const MultiSeries& b) {
  check_compatible(a, b);
  const MonomialIndex& I = a.trunc() <= b.trunc() ? a.index() : b.index();
  auto x = project(a, I);
  const auto y = project(b, I);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = a.field()->add(x[i], y[i]);
  return MultiSeries(a.field(), &I, std::move(x));
}

MultiSeries MultiSeries::operator-() const {
  auto x = c_;
  for (auto& v : x) v = field_->neg(v);
  return MultiSeries(field_, idx_, std::move(x));
}

MultiSeries operator-(const MultiSeries& a, const MultiSeries& b) { return a + (-b); }

MultiSeries operator*(const MultiSeries& a, const MultiSeries& b) {
  check_compatible(a, b);
  const MonomialIndex& I = a.trunc() <= b.trunc() ? a.index() : b.index();
  return MultiSeries(a.field(), &I, mul_codes(a.field(), I, project(a, I), project(b, I)));
}

MultiSeries operator*(const FieldElement& c, const MultiSeries& a) {
  auto x = a.c_;
  FieldRef f = a.field();
  if (c.field() != f && !(c.field()->p() == f->p() && c.code() < f->p())) {
    fail(Errc::IncompatibleFields, "scalar from another field");
  }
  const std::uint64_t k = c.code();
  for (auto& v : x) v = f->mul(v, k);
  return MultiSeries(f, a.idx_, std::move(x));
}

bool operator==(const MultiSeries& a, const MultiSeries& b) {
  return a.field_ == b.field_ && a.idx_ == b.idx_ && a.c_ == b.c_;
}

std::string MultiSeries::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    if (!first) os << " + ";
    first = false;
    os << FieldElement(field_, c_[i]).to_string();
    for (unsigned v = 0; v < nvars(); ++v) {
      const unsigned a = idx_->exps[i][v];
      if (a == 0) continue;
      os << "*x" << v;
      if (a > 1) os << "^" << a;
    }
  }
  if (first) os << "0";
  os << " + O(|x|^" << trunc() + 1 << ")";
  return os.str();
}

MultiSeries pow(const MultiSeries& a, u128 e) {
  MultiSeries result = MultiSeries::one(a.field(), a.nvars(), a.trunc());
  MultiSeries base = a;
  while (e > 0) {
    if (e & 1) result *= base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return result;
}

MultiSeries map_field(const MultiSeries& a, const Embedding& emb) {
  MultiSeries r(emb.to, a.nvars(), a.trunc());
  for (const auto& [e, c] : a.terms()) r.set(e, emb(c));
  return r;
}

int first_difference(const MultiSeries& a, const MultiSeries& b) {
  check_compatible(a, b);
  const MonomialIndex& I = a.trunc() <= b.trunc() ? a.index() : b.index();
  const auto x = project(a, I);
  const auto y = project(b, I);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != y[i]) return I.deg[i];
  }
  return -1;
}

// ---- composition ----

MultiMap compose(const MultiMap& hs, const MultiMap& F) {
  if (F.empty()) fail(Errc::ValidationError, "empty substitution");
  const unsigned N = static_cast<unsigned>(F.size());
  const unsigned M = F.front().nvars();
  FieldRef field = F.front().field();
  int T = F.front().trunc();
  for (const auto& g : F) {
    if (g.nvars() != M || g.field() != field) fail(Errc::ValidationError, "inconsistent substitution");
    if (g.constant_term().code() != 0) fail(Errc::CompositionWithUnit, "substituted series must vanish at 0");
    T = std::min(T, g.trunc());
  }
  for (const auto& h : hs) {
    if (h.nvars() != N) fail(Errc::ValidationError, "outer series needs one variable per substituted series");
    if (h.field() != field) fail(Errc::IncompatibleFields, "composition over different fields");
    T = std::min(T, h.trunc());
  }
  const MonomialIndex& In = MonomialIndex::get(N, T);
  const MonomialIndex& Im = MonomialIndex::get(M, T);
  std::vector<std::vector<std::uint64_t>> outer;
  for (const auto& h : hs) outer.push_back(project(h, In));
  std::vector<std::vector<std::uint64_t>> sub;
  for (const auto& g : F) sub.push_back(project(g, Im));

  // P_a = P_{a - e_i} * F_i with i the first nonzero variable of a.
  const std::size_t n = In.size();
  std::vector<char> needed(n, 0);
  std::vector<std::size_t> parent(n, 0);
  std::vector<unsigned> step(n, 0);
  for (std::size_t a = 1; a < n; ++a) {
    Exponent e = In.exps[a];
    unsigned i = 0;
    while (e[i] == 0) ++i;
    e[i] -= 1;
    parent[a] = static_cast<std::size_t>(In.find(e));
    step[a] = i;
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (const auto& h : outer) {
      if (h[a] != 0) needed[a] = 1;
    }
  }
  for (std::size_t a = n; a-- > 1;) {
    if (needed[a]) needed[parent[a]] = 1;
  }
  std::vector<std::vector<std::uint64_t>> P(n);
  P[0].assign(Im.size(), 0);
  P[0][0] = 1;
  for (std::size_t a = 1; a < n; ++a) {
    if (needed[a]) P[a] = mul_codes(field, Im, P[parent[a]], sub[step[a]]);
  }
  MultiMap out;
  for (const auto& h : outer) {
    std::vector<std::uint64_t> r(Im.size(), 0);
    for (std::size_t a = 0; a < n; ++a) {
      if (h[a] == 0) continue;
      for (std::size_t k = 0; k < r.size(); ++k) {
        if (P[a][k] != 0) r[k] = field->add(r[k], field->mul(h[a], P[a][k]));
      }
    }
    out.push_back(MultiSeries::zero(field, M, T));
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (r[k] != 0) out.back().set(Im.exps[k], FieldElement(field, r[k]));
    }
  }
  return out;
}

MultiSeries compose(const MultiSeries& h, const MultiMap& F) { return compose(MultiMap{h}, F).front(); }

MultiMap identity_map(FieldRef field, unsigned N, int T) {
  MultiMap id;
  for (unsigned i = 0; i < N; ++i) id.push_back(MultiSeries::var(field, N, T, i));
  return id;
}

MultiMap inverse_map(const MultiMap& F) {
  if (F.empty()) fail(Errc::ValidationError, "empty map");
  const unsigned N = static_cast<unsigned>(F.size());
  FieldRef field = F.front().field();
  int T = F.front().trunc();
  for (const auto& g : F) T = std::min(T, g.trunc());
  const MultiMap id = identity_map(field, N, T);
  MultiMap H;
  for (unsigned i = 0; i < N; ++i) {
    MultiSeries h = F[i].with_trunc(T) - id[i];
    if (h.order() < 2) fail(Errc::ValidationError, "inverse_map needs linear part equal to the identity");
    H.push_back(std::move(h));
  }
  // Ψ = x - H∘Ψ gains one degree per pass.
  MultiMap psi = id;
  for (int pass = 1; pass < T; ++pass) {
    const MultiMap hp = compose(H, psi);
    for (unsigned i = 0; i < N; ++i) psi[i] = id[i] - hp[i];
  }
  return psi;
}

// ---- exact matrices ----

namespace {

void check_square(std::size_t rows, const auto& A) {
  for (const auto& row : A) {
    if (row.size() != rows) fail(Errc::ValidationError, "matrix must be square");
  }
}

}  // namespace

RatMatrix to_rational(const IntMatrix& A) {
  RatMatrix R;
  for (const auto& row : A) {
    R.emplace_back();
    for (auto x : row) R.back().emplace_back(x);
  }
  return R;
}

BigInt determinant(const IntMatrix& A) {
  const std::size_t n = A.size();
  check_square(n, A);
  if (n == 0) return 1;
  // Fraction-free elimination (Bareiss).
  std::vector<std::vector<BigInt>> M(n, std::vector<BigInt>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) M[i][j] = A[i][j];
  }
  BigInt sign = 1;
  BigInt prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (M[k][k] == 0) {
      std::size_t r = k + 1;
      while (r < n && M[r][k] == 0) ++r;
      if (r == n) return 0;
      std::swap(M[k], M[r]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) / prev;
    }
    prev = M[k][k];
  }
  return sign * M[n - 1][n - 1];
}

std::size_t rank(const IntMatrix& A) {
  RatMatrix M = to_rational(A);
  const std::size_t rows = M.size();
  const std::size_t cols = rows ? M[0].size() : 0;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && M[piv][c] == BigRational(0)) ++piv;
    if (piv == rows) continue;
    std::swap(M[r], M[piv]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      const BigRational q = M[i][c] / M[r][c];
      for (std::size_t j = c; j < cols; ++j) M[i][j] -= q * M[r][j];
    }
    ++r;
  }
  return r;
}

RatMatrix inverse(const RatMatrix& A) {
  const std::size_t n = A.size();
  check_square(n, A);
  RatMatrix M = A;
  RatMatrix R(n, std::vector<BigRational>(n, BigRational(0)));
  for (std::size_t i = 0; i < n; ++i) R[i][i] = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && M[piv][c] == BigRational(0)) ++piv;
    if (piv == n) fail(Errc::SingularMatrix, "matrix is singular");
    std::swap(M[c], M[piv]);
    std::swap(R[c], R[piv]);
    const BigRational inv = BigRational(1) / M[c][c];
    for (std::size_t j = 0; j < n; ++j) {
      M[c][j] *= inv;
      R[c][j] *= inv;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || M[i][c] == BigRational(0)) continue;
      const BigRational q = M[i][c];
      for (std::size_t j = 0; j < n; ++j) {
        M[i][j] -= q * M[c][j];
        R[i][j] -= q * R[c][j];
      }
    }
  }
  return R;
}

RatMatrix multiply(const RatMatrix& A, const RatMatrix& B) {
  const std::size_t n = A.size();
  const std::size_t m = B.empty() ? 0 : B[0].size();
  RatMatrix C(n, std::vector<BigRational>(m, BigRational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    if (A[i].size() != B.size()) fail(Errc::ValidationError, "matrix shapes do not match");
    for (std::size_t k = 0; k < B.size(); ++k) {
      if (A[i][k] == BigRational(0)) continue;
      for (std::size_t j = 0; j < m; ++j) C[i][j] += A[i][k] * B[k][j];
    }
  }
  return C;
}

bool is_p_integral(const RatMatrix& M, std::uint64_t p) {
  for (const auto& row : M) {
    for (const auto& q : row) {
      const BigInt a = boost::multiprecision::numerator(q);
      if (a == 0) continue;
      if (nu_big(a, p) < nu_big(boost::multiprecision::denominator(q), p)) return false;
    }
  }
  return true;
}

PadicMatrixPower matrix_power_padic(const IntMatrix& D, std::uint64_t k, std::uint64_t p) {
  const std::size_t n = D.size();
  check_square(n, D);
  if (determinant(D) == 0) fail(Errc::SingularMatrix, "det D = 0");
  const RatMatrix inv = inverse(to_rational(D));
  RatMatrix M(n, std::vector<BigRational>(n, BigRational(0)));
  for (std::size_t i = 0; i < n; ++i) M[i][i] = 1;
  for (std::uint64_t i = 0; i < k; ++i) M = multiply(M, inv);
  PadicMatrixPower out;
  out.p_integral = is_p_integral(M, p);
  out.M = std::move(M);
  return out;
}

// ---- unit powers ----

MultiSeries unit_power(const MultiSeries& u, const BigRational& q) {
  FieldRef f = u.field();
  if (!u.constant_term().is_one()) fail(Errc::ValidationError, "unit_power needs u(0) = 1");
  const std::uint64_t p = f->p();
  const BigInt a = boost::multiprecision::numerator(q);
  const BigInt b = boost::multiprecision::denominator(q);
  if (a == 0) return MultiSeries::one(f, u.nvars(), u.trunc());
  if (nu_big(a, p) < nu_big(b, p)) fail(Errc::PadicObstruction, "exponent is not p-integral");
  // binom(q, n) = binom(x, n) mod p for n < p^L when q = x mod p^L.
  BigInt mod = p;
  while (mod <= u.trunc()) mod *= p;
  BigInt x = a % mod;
  if (x < 0) x += mod;
  BigInt binv = 1;
  {
    // b is a unit mod p^L; invert by extended Euclid.
    BigInt r0 = b % mod, r1 = mod, s0 = 1, s1 = 0;
    if (r0 < 0) r0 += mod;
    while (r1 != 0) {
      const BigInt t = r0 / r1;
      BigInt r2 = r0 - t * r1;
      BigInt s2 = s0 - t * s1;
      r0 = r1;
      r1 = r2;
      s0 = s1;
      s1 = s2;
    }
    binv = s0 % mod;
    if (binv < 0) binv += mod;
  }
  x = (x * binv) % mod;
  return pow(u, static_cast<u128>(static_cast<std::uint64_t>(x)));
}

MultiMap multi_unit_power(const MultiMap& u, const RatMatrix& M) {
  const std::size_t n = u.size();
  if (M.size() != n) fail(Errc::ValidationError, "exponent matrix has the wrong size");
  if (n == 0) return {};
  const std::uint64_t p = u.front().field()->p();
  if (!is_p_integral(M, p)) fail(Errc::PadicObstruction, "exponent matrix is not p-integral");
  MultiMap out;
  for (std::size_t j = 0; j < n; ++j) {
    MultiSeries acc = MultiSeries::one(u.front().field(), u.front().nvars(), u.front().trunc());
    for (std::size_t i = 0; i < n; ++i) {
      if (M[i].size() != n) fail(Errc::ValidationError, "exponent matrix must be square");
      if (M[i][j] == BigRational(0)) continue;
      acc *= unit_power(u[i], M[i][j]);
    }
    out.push_back(std::move(acc));
  }
  return out;
}

// ---- germs ----

int MultiGerm::trunc() const {
  int t = eps.empty() ? 0 : eps.front().trunc();
  for (const auto& e : eps) t = std::min(t, e.trunc());
  return t;
}

void MultiGerm::validate() const {
  const std::size_t n = C.size();
  if (n == 0) fail(Errc::ValidationError, "germ needs at least one component");
  if (D.size() != n || eps.size() != n) fail(Errc::ValidationError, "C, D and eps must have N entries");
  check_square(n, D);
  FieldRef f = field();
  for (const auto& c : C) {
    if (c.field() != f) fail(Errc::IncompatibleFields, "C entries over different fields");
    if (c.is_zero()) fail(Errc::ValidationError, "C entries must be nonzero");
  }
  for (const auto& e : eps) {
    if (e.field() != f) fail(Errc::IncompatibleFields, "eps over a different field");
    if (e.nvars() != n) fail(Errc::ValidationError, "eps must be series in N variables");
    if (!e.constant_term().is_zero()) fail(Errc::ValidationError, "eps must vanish at 0");
  }
  for (const auto& row : D) {
    for (auto x : row) {
      if (x < 0) fail(Errc::ValidationError, "D must have nonnegative entries");
    }
  }
  // Column j with sum 1 makes component j linear in a single variable.
  std::vector<std::int64_t> linear(n, -1);
  for (std::size_t j = 0; j < n; ++j) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < n; ++i) s += D[i][j];
    if (s == 0) fail(Errc::NotSuperattracting, "component " + std::to_string(j) + " does not vanish at 0");
    if (s == 1) {
      for (std::size_t i = 0; i < n; ++i) {
        if (D[i][j] == 1) linear[j] = static_cast<std::int64_t>(i);
      }
    }
  }
  for (std::size_t start = 0; start < n; ++start) {
    std::size_t steps = 0;
    std::int64_t j = static_cast<std::int64_t>(start);
    while (j >= 0 && linear[static_cast<std::size_t>(j)] >= 0) {
      j = linear[static_cast<std::size_t>(j)];
      if (++steps > n) fail(Errc::NotSuperattracting, "linear part is not nilpotent");
    }
  }
}

MultiMap MultiGerm::monomial_map(int T) const {
  MultiMap out;
  for (std::size_t j = 0; j < C.size(); ++j) {
    Exponent e(C.size());
    for (std::size_t i = 0; i < C.size(); ++i) e[i] = static_cast<unsigned>(D[i][j]);
    out.push_back(MultiSeries::monomial(field(), N(), T, e, C[j]));
  }
  return out;
}

MultiMap MultiGerm::to_map(int T) const {
  MultiMap out;
  for (std::size_t j = 0; j < C.size(); ++j) {
    Exponent e(C.size());
    for (std::size_t i = 0; i < C.size(); ++i) e[i] = static_cast<unsigned>(D[i][j]);
    const MultiSeries unit = MultiSeries::one(field(), N(), eps[j].trunc()) + eps[j];
    out.push_back(C[j] * shift(unit, e, T));
  }
  return out;
}

MultiGerm germ_from_map(const MultiMap& f) {
  if (f.empty()) fail(Errc::ValidationError, "empty map");
  const unsigned n = static_cast<unsigned>(f.size());
  MultiGerm g;
  g.D.assign(n, std::vector<std::int64_t>(n, 0));
  for (unsigned j = 0; j < n; ++j) {
    const auto terms = f[j].terms();
    if (terms.empty()) fail(Errc::ShapeViolation, "component " + std::to_string(j) + " vanishes to precision");
    Exponent a = terms.begin()->first;
    for (const auto& [e, c] : terms) {
      for (unsigned i = 0; i < n; ++i) a[i] = std::min(a[i], e[i]);
    }
    const auto lead = terms.find(a);
    if (lead == terms.end()) fail(Errc::ShapeViolation, "component " + std::to_string(j) + " is not a monomial times a unit");
    const FieldElement cinv = lead->second.inverse();
    MultiSeries eps(f[j].field(), n, f[j].trunc() - degree_of(a));
    for (const auto& [e, c] : terms) {
      if (e == a) continue;
      Exponent q = e;
      for (unsigned i = 0; i < n; ++i) q[i] -= a[i];
      eps.set(q, c * cinv);
    }
    for (unsigned i = 0; i < n; ++i) g.D[i][j] = a[i];
    g.C.push_back(lead->second);
    g.eps.push_back(std::move(eps));
  }
  return g;
}

MultiGerm map_field(const MultiGerm& f, const Embedding& emb) {
  MultiGerm g;
  g.D = f.D;
  for (const auto& c : f.C) g.C.push_back(emb(c));
  for (const auto& e : f.eps) g.eps.push_back(map_field(e, emb));
  return g;
}

int verify_multi_conjugacy(const MultiMap& f, const MultiMap& g, const MultiMap& Phi, int T) {
  MultiMap ft, gt, pt;
  for (const auto& s : f) ft.push_back(s.with_trunc(std::min(T, s.trunc())));
  for (const auto& s : g) gt.push_back(s.with_trunc(std::min(T, s.trunc())));
  for (const auto& s : Phi) pt.push_back(s.with_trunc(std::min(T, s.trunc())));
  const MultiMap lhs = compose(pt, ft);
  const MultiMap rhs = compose(gt, pt);
  int verified = T;
  for (std::size_t j = 0; j < lhs.size(); ++j) {
    verified = std::min(verified, std::min(lhs[j].trunc(), rhs[j].trunc()));
    const int d = first_difference(lhs[j], rhs[j]);
    if (d >= 0) verified = std::min(verified, d - 1);
  }
  return verified;
}

MonomialConjugacy monomial_conjugacy(const MultiGerm& f, int T) {
  f.validate();
  if (T < 1) fail(Errc::ValidationError, "total degree must be >= 1");
  const unsigned n = f.N();
  FieldRef field = f.field();
  const std::uint64_t p = field->p();
  const BigInt det = determinant(f.D);
  if (det == 0) fail(Errc::SingularMatrix, "det D = 0");
  if (det % p == 0) fail(Errc::DetDivisibleByP, "det D = " + det.str() + " is divisible by p = " + std::to_string(p));
  // φ is needed through degree T - 1.
  const int tp = T - 1;
  for (const auto& e : f.eps) {
    if (e.trunc() < tp) fail(Errc::InsufficientPrecision, "eps must be known through total degree T - 1");
  }
  MultiMap eps;
  for (const auto& e : f.eps) eps.push_back(e.with_trunc(tp));
  const MultiMap fmap = f.to_map(tp);
  const RatMatrix dinv = inverse(to_rational(f.D));
  RatMatrix M = to_rational(IntMatrix(n, std::vector<std::int64_t>(n, 0)));
  for (unsigned i = 0; i < n; ++i) M[i][i] = 1;

  MonomialConjugacy out;
  MultiMap phi(n, MultiSeries::one(field, n, tp));
  MultiMap iterate = identity_map(field, n, tp);
  const std::size_t cap = static_cast<std::size_t>(n) * static_cast<std::size_t>(tp + 2) + 1;
  for (std::size_t k = 1;; ++k) {
    const MultiMap e = tp >= 1 ? compose(eps, iterate) : eps;
    int ord = tp + 1;
    for (const auto& s : e) ord = std::min(ord, s.order());
    out.orders.push_back(ord);
    if (ord > tp) break;
    if (k > cap) fail(Errc::NotSuperattracting, "iterates do not contract");
    M = multiply(M, dinv);
    MultiMap units;
    for (const auto& s : e) units.push_back(MultiSeries::one(field, n, tp) + s);
    const MultiMap factor = multi_unit_power(units, M);
    for (unsigned j = 0; j < n; ++j) phi[j] *= factor[j];
    ++out.factors;
    iterate = compose(fmap, iterate);
  }
  for (unsigned j = 0; j < n; ++j) {
    Exponent e(n, 0);
    e[j] = 1;
    out.Phi.push_back(shift(phi[j], e, T));
  }
  out.verified = verify_multi_conjugacy(f.to_map(T), f.monomial_map(T), out.Phi, T);
  return out;
}

// ---- diagonal scaling ----

namespace {

// P A Q = S with P, Q unimodular and S diagonal with positive entries (A nonsingular).
void diagonalize(IntMatrix S, IntMatrix& P, IntMatrix& Q, std::vector<std::int64_t>& diag) {
  const std::size_t n = S.size();
  P.assign(n, std::vector<std::int64_t>(n, 0));
  Q.assign(n, std::vector<std::int64_t>(n, 0));
  for (std::size_t i = 0; i < n; ++i) P[i][i] = Q[i][i] = 1;
  for (std::size_t t = 0; t < n; ++t) {
    for (;;) {
      std::size_t br = n, bc = n;
      for (std::size_t i = t; i < n; ++i) {
        for (std::size_t j = t; j < n; ++j) {
          if (S[i][j] != 0 && (br == n || std::llabs(S[i][j]) < std::llabs(S[br][bc]))) {
            br = i;
            bc = j;
          }
        }
      }
      if (br == n) fail(Errc::SingularMatrix, "matrix is singular");
      std::swap(S[t], S[br]);
      std::swap(P[t], P[br]);
      for (std::size_t i = 0; i < n; ++i) {
        std::swap(S[i][t], S[i][bc]);
        std::swap(Q[i][t], Q[i][bc]);
      }
      bool clean = true;
      for (std::size_t i = t + 1; i < n; ++i) {
        const std::int64_t q = S[i][t] / S[t][t];
        for (std::size_t j = 0; j < n; ++j) {
          S[i][j] -= q * S[t][j];
          P[i][j] -= q * P[t][j];
        }
        if (S[i][t] != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        const std::int64_t q = S[t][j] / S[t][t];
        for (std::size_t i = 0; i < n; ++i) {
          S[i][j] -= q * S[i][t];
          Q[i][j] -= q * Q[i][t];
        }
        if (S[t][j] != 0) clean = false;
      }
      if (clean) break;
    }
    if (S[t][t] < 0) {
      for (std::size_t j = 0; j < n; ++j) {
        S[t][j] = -S[t][j];
        P[t][j] = -P[t][j];
      }
    }
  }
  diag.clear();
  for (std::size_t t = 0; t < n; ++t) diag.push_back(S[t][t]);
}

}  // namespace

DiagonalScaling diagonal_scaling(const std::vector<FieldElement>& C, const IntMatrix& D) {
  const std::size_t n = C.size();
  if (D.size() != n) fail(Errc::ValidationError, "C and D sizes differ");
  check_square(n, D);
  IntMatrix A = D;
  for (std::size_t i = 0; i < n; ++i) A[i][i] -= 1;
  DiagonalScaling out;
  if (determinant(A) == 0) {
    out.moduli_dimension = rank(A);
    return out;
  }
  // y^T A = c^T in exponent notation: with P A Q = S, z = y^T P^{-1} solves
  // z_i s_i = (c^T Q)_i and y^T = z^T P.
  IntMatrix P, Q;
  std::vector<std::int64_t> s;
  diagonalize(A, P, Q, s);
  std::vector<FieldElement> c;
  for (const auto& x : C) c.push_back(x.inverse());
  std::vector<FieldElement> w;
  for (std::size_t j = 0; j < n; ++j) {
    FieldElement acc = FieldElement::one(C.front().field());
    for (std::size_t i = 0; i < n; ++i) acc *= signed_pow(c[i], Q[i][j]);
    w.push_back(acc);
  }
  std::vector<FieldElement> z;
  for (std::size_t i = 0; i < n; ++i) {
    FieldRef f = w[i].field();
    Poly poly(static_cast<std::size_t>(s[i]) + 1, FieldElement::zero(f));
    poly[0] = -w[i];
    poly.back() = FieldElement::one(f);
    const RootResult rr = poly_roots(poly, true);
    if (rr.embedding) {
      const Embedding& emb = *rr.embedding;
      for (auto& x : w) x = emb(x);
      for (auto& x : z) x = emb(x);
      out.extension = out.extension ? Embedding{out.extension->from, emb.to, emb(out.extension->image)} : emb;
    }
    z.push_back(rr.roots.front());
  }
  std::vector<FieldElement> delta;
  for (std::size_t j = 0; j < n; ++j) {
    FieldElement acc = FieldElement::one(z.front().field());
    for (std::size_t i = 0; i < n; ++i) acc *= signed_pow(z[i], P[i][j]);
    delta.push_back(acc);
  }
  out.delta = std::move(delta);
  return out;
}

MultiGerm scale_germ(const MultiGerm& f, const std::vector<FieldElement>& delta) {
  const std::size_t n = f.C.size();
  if (delta.size() != n) fail(Errc::ValidationError, "scaling vector has the wrong size");
  MultiGerm g;
  g.D = f.D;
  for (std::size_t j = 0; j < n; ++j) {
    FieldElement c = f.C[j] * delta[j].inverse();
    for (std::size_t i = 0; i < n; ++i) c *= signed_pow(delta[i], f.D[i][j]);
    g.C.push_back(c);
    MultiSeries e(f.eps[j].field(), f.eps[j].nvars(), f.eps[j].trunc());
    for (const auto& [ex, coeff] : f.eps[j].terms()) {
      FieldElement k = coeff;
      for (std::size_t i = 0; i < n; ++i) k *= delta[i].pow(ex[i]);
      e.set(ex, k);
    }
    g.eps.push_back(std::move(e));
  }
  return g;
}

}  // namespace germ
