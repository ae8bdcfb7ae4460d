#pragma once

#include <cstdint>
#include <vector>

namespace torsion8 {

// Small-integer number theory shared by every module. All inputs are
// expected to fit comfortably in 64 bits (levels and field sizes are small).

bool is_prime(std::uint64_t n);

/// Primes p with lo <= p < hi, ascending.
std::vector<std::uint32_t> primes_in(std::uint64_t lo, std::uint64_t hi);

/// Distinct prime divisors of n (n >= 1), ascending.
std::vector<std::uint64_t> prime_divisors(std::uint64_t n);

/// Least non-negative residue of a mod m.
inline std::int64_t mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

std::int64_t gcd(std::int64_t a, std::int64_t b);

/// Inverse of a modulo m; throws std::domain_error when gcd(a, m) != 1.
std::int64_t inv_mod(std::int64_t a, std::int64_t m);

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m);

/// Least primitive root modulo the prime p.
std::uint64_t primitive_root(std::uint64_t p);

/// Floor of the square root, exact for all 64-bit inputs.
std::uint64_t isqrt(std::uint64_t n);

}  // namespace torsion8
