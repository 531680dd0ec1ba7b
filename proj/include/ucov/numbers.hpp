#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "ucov/errors.hpp"

namespace ucov {

bool is_prime(std::uint64_t n);

// Largest prime factor by trial division. n >= 2.
std::uint64_t largest_prime_factor(std::uint64_t n);

std::vector<std::uint64_t> prime_factors(std::uint64_t n);  // distinct, ascending

// q = p^a with p prime, a >= 1.
struct PrimePower {
  std::uint64_t p = 2;
  std::uint32_t a = 1;
  std::uint64_t q = 2;

  // Parses q into (p, a); throws std::invalid_argument if q is not a prime power.
  static PrimePower parse(std::uint64_t q);

  std::uint32_t gcd3() const { return static_cast<std::uint32_t>(std::gcd<std::uint64_t>(3, q + 1)); }
};

// All prime powers in [lo, hi], ascending.
std::vector<PrimePower> prime_powers_in(std::uint64_t lo, std::uint64_t hi);

struct Lemma7Result {
  std::uint64_t r = 0;  // largest prime divisor of q^2 - q + 1
  bool ok = false;      // r >= 5 and gcd(r, q^3 (q-1)(q+1)^2) = 1
};

// Number-theoretic check behind the existence of fixed-point-free elements:
// requires q > 2.
Lemma7Result lemma7_check(const PrimePower& q);

std::uint64_t ipow(std::uint64_t base, std::uint32_t exp);

}  // namespace ucov
