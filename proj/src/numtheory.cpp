#include "germ/numtheory.hpp"

#include <numeric>

#include "germ/error.hpp"

namespace germ {

unsigned nu_p(std::int64_t n, std::uint64_t p) {
  if (n == 0) return kNuInfinity;
  u128 v = n < 0 ? static_cast<u128>(-(n + 1)) + 1 : static_cast<u128>(n);
  unsigned k = 0;
  while (v % p == 0) {
    v /= p;
    ++k;
  }
  return k;
}

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t a, u128 e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (e > 0) {
    if (e & 1) r = mul_mod(r, a, m);
    a = mul_mod(a, a, m);
    e >>= 1;
  }
  return r;
}

std::uint64_t inv_mod(std::uint64_t a, std::uint64_t m) {
  // extended Euclid on signed 128-bit values
  __int128 t = 0, new_t = 1;
  __int128 r = m, new_r = a % m;
  while (new_r != 0) {
    __int128 q = r / new_r;
    __int128 tmp = t - q * new_t;
    t = new_t;
    new_t = tmp;
    tmp = r - q * new_r;
    r = new_r;
    new_r = tmp;
  }
  if (r != 1) fail(Errc::DivisionByZero, "element not invertible modulo " + std::to_string(m));
  if (t < 0) t += m;
  return static_cast<std::uint64_t>(t);
}

std::uint64_t residue(std::int64_t n, std::uint64_t p) {
  if (n >= 0) return static_cast<std::uint64_t>(n) % p;
  u128 mag = static_cast<u128>(-(n + 1)) + 1;
  std::uint64_t r = static_cast<std::uint64_t>(mag % p);
  return r == 0 ? 0 : p - r;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t small : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % small == 0) return n == small;
  }
  std::uint64_t d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // deterministic witness set for 64-bit inputs
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned i = 1; i < s; ++i) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::vector<std::uint64_t> prime_divisors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t q = 2; q * q <= n; ++q) {
    if (n % q == 0) {
      out.push_back(q);
      while (n % q == 0) n /= q;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

std::int64_t gcd_i64(std::int64_t a, std::int64_t b) { return std::gcd(a, b); }

namespace {

// Splits x = p^v * w and returns (v, w mod p).
std::pair<unsigned, std::uint64_t> split_p(__int128 x, std::uint64_t p) {
  unsigned v = 0;
  while (x % static_cast<__int128>(p) == 0) {
    x /= static_cast<__int128>(p);
    ++v;
  }
  __int128 r = x % static_cast<__int128>(p);
  if (r < 0) r += p;
  return {v, static_cast<std::uint64_t>(r)};
}

}  // namespace

std::vector<std::uint64_t> binomial_series_residues(std::int64_t a, std::int64_t b, std::uint64_t p,
                                                    std::size_t count) {
  if (b == 0) fail(Errc::ValidationError, "binomial exponent with zero denominator");
  if (b < 0) {
    a = -a;
    b = -b;
  }
  std::int64_t g = std::gcd(a, b);
  if (g != 0) {
    a /= g;
    b /= g;
  }
  if (b % static_cast<std::int64_t>(p) == 0) {
    fail(Errc::PadicObstruction, "exponent is not p-integral");
  }
  std::vector<std::uint64_t> out;
  out.reserve(count);
  // binom(a/b, n) = prod_{i<n} (a - i b) / (b (i + 1))
  std::uint64_t unit = 1;
  long long valuation = 0;
  bool vanished = false;
  for (std::size_t n = 0; n < count; ++n) {
    if (vanished) {
      out.push_back(0);
      continue;
    }
    out.push_back(valuation > 0 ? 0 : unit);
    __int128 num = static_cast<__int128>(a) - static_cast<__int128>(n) * b;
    if (num == 0) {
      vanished = true;
      continue;
    }
    __int128 den = static_cast<__int128>(b) * static_cast<__int128>(n + 1);
    auto [vn, un] = split_p(num, p);
    auto [vd, ud] = split_p(den, p);
    valuation += static_cast<long long>(vn) - static_cast<long long>(vd);
    if (valuation < 0 && n + 1 < count) {
      // cannot happen for p-integral exponents; treated as a bug signal
      fail(Errc::Internal, "negative valuation in binomial coefficient");
    }
    unit = mul_mod(mul_mod(unit, un, p), inv_mod(ud, p), p);
  }
  return out;
}

}  // namespace germ
