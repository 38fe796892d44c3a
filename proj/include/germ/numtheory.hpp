#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <limits>
#include <vector>

namespace germ {

using u128 = unsigned __int128;
using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Value of nu_p(0).
inline constexpr unsigned kNuInfinity = std::numeric_limits<unsigned>::max();

/// p-adic valuation of an integer; kNuInfinity for n = 0.
unsigned nu_p(std::int64_t n, std::uint64_t p);

bool is_prime(std::uint64_t n);

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t pow_mod(std::uint64_t a, u128 e, std::uint64_t m);
std::uint64_t inv_mod(std::uint64_t a, std::uint64_t m);

/// Reduces a (possibly negative) integer into [0, p).
std::uint64_t residue(std::int64_t n, std::uint64_t p);

/// Distinct prime divisors by trial division (fine for the sizes used here).
std::vector<std::uint64_t> prime_divisors(std::uint64_t n);

/// Residues mod p of binom(a/b, n) for n = 0..count-1, where a/b is a
/// p-integral rational with nu_p(b) = 0. The product formula is evaluated with
/// separate bookkeeping of the p-adic valuation of numerator and denominator,
/// so no factor divisible by p is ever inverted.
std::vector<std::uint64_t> binomial_series_residues(std::int64_t a, std::int64_t b, std::uint64_t p,
                                                    std::size_t count);

std::int64_t gcd_i64(std::int64_t a, std::int64_t b);

}  // namespace germ
