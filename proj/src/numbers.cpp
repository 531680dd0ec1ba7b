#include "ucov/numbers.hpp"

namespace ucov {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n < 4) return true;
  if (n % 2 == 0) return false;
  for (std::uint64_t d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

std::uint64_t largest_prime_factor(std::uint64_t n) {
  require(n >= 2, "largest_prime_factor: n must be >= 2");
  std::uint64_t best = 1;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    while (n % d == 0) {
      best = d;
      n /= d;
    }
  }
  if (n > 1) best = n;
  return best;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

PrimePower PrimePower::parse(std::uint64_t q) {
  require(q >= 2, "prime power must be >= 2");
  std::uint64_t p = q;
  for (std::uint64_t d = 2; d * d <= q; ++d) {
    if (q % d == 0) {
      p = d;
      break;
    }
  }
  PrimePower pp;
  pp.p = p;
  pp.a = 0;
  std::uint64_t x = q;
  while (x % p == 0) {
    x /= p;
    ++pp.a;
  }
  require(x == 1, "not a prime power");
  pp.q = q;
  return pp;
}

std::vector<PrimePower> prime_powers_in(std::uint64_t lo, std::uint64_t hi) {
  std::vector<PrimePower> out;
  for (std::uint64_t q = std::max<std::uint64_t>(lo, 2); q <= hi; ++q) {
    std::uint64_t p = q;
    for (std::uint64_t d = 2; d * d <= q; ++d) {
      if (q % d == 0) {
        p = d;
        break;
      }
    }
    if (!is_prime(p)) continue;
    std::uint64_t x = q;
    while (x % p == 0) x /= p;
    if (x == 1) out.push_back(PrimePower::parse(q));
  }
  return out;
}

Lemma7Result lemma7_check(const PrimePower& pp) {
  if (pp.q <= 2) throw std::domain_error("lemma7_check requires q > 2");
  const std::uint64_t q = pp.q;
  Lemma7Result res;
  res.r = largest_prime_factor(q * q - q + 1);
  // gcd(r, q^3 (q-1)(q+1)^2) = 1 iff r divides none of the factors; work mod r
  // to avoid overflow of the full product.
  const std::uint64_t r = res.r;
  auto mod = [r](std::uint64_t x) { return x % r; };
  std::uint64_t prod = mod(q);
  prod = mod(prod * mod(q));
  prod = mod(prod * mod(q));
  prod = mod(prod * mod(q - 1));
  prod = mod(prod * mod(q + 1));
  prod = mod(prod * mod(q + 1));
  res.ok = (r >= 5) && (prod != 0);
  return res;
}

std::uint64_t ipow(std::uint64_t base, std::uint32_t exp) {
  std::uint64_t r = 1;
  while (exp--) r *= base;
  return r;
}

}  // namespace ucov
