#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>
#include <vector>

#include "ucov/errors.hpp"

namespace ucov {

using BigInt = boost::multiprecision::cpp_int;

// Exact rational, always normalized with a positive denominator.
struct Rat {
  BigInt num{0};
  BigInt den{1};

  Rat() = default;
  Rat(long long n) : num(n) {}
  Rat(BigInt n) : num(std::move(n)) {}
  Rat(BigInt n, BigInt d);

  bool is_zero() const { return num == 0; }
  bool is_negative() const { return num < 0; }
  BigInt ceil() const;
  BigInt floor() const;
  double to_double() const;
  std::string str() const;

  friend Rat operator+(const Rat& a, const Rat& b);
  friend Rat operator-(const Rat& a, const Rat& b);
  friend Rat operator*(const Rat& a, const Rat& b);
  friend Rat operator/(const Rat& a, const Rat& b);
  friend bool operator==(const Rat& a, const Rat& b) { return a.num == b.num && a.den == b.den; }
  friend bool operator<(const Rat& a, const Rat& b) { return a.num * b.den < b.num * a.den; }
  friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
  friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }
  friend bool operator>=(const Rat& a, const Rat& b) { return !(a < b); }
};

// A set-cover instance over an implicit universe of items: item i must be
// covered by one of item_cols[i] (sorted column ids). item_weight carries the
// multiplicity of merged elements, for reporting only.
struct CoverInstance {
  std::uint32_t n_cols = 0;
  std::vector<std::vector<std::uint32_t>> item_cols;
  std::vector<std::uint64_t> item_weight;

  void validate() const;
};

struct LpResult {
  Rat value;                    // optimal fractional cover value (= packing dual)
  std::vector<Rat> item_duals;  // feasible packing certificate y >= 0, A^T y <= 1
  bool optimal = true;          // false if the pivot budget stopped the simplex
  std::uint64_t pivots = 0;
};

// Fractional set-cover lower bound via the dual packing LP, solved by a
// Bland-rule primal simplex over exact rationals (the all-zero packing is
// feasible, so no phase 1). ceil(value) <= sigma, and the returned duals are a
// self-contained certificate: any cover C satisfies |C| >= sum(item_duals).
LpResult lp_lower_bound(const CoverInstance& inst, std::uint64_t pivot_budget = 0);

enum class CertKind : std::uint8_t { LpTight, ClosedTree, Interval };

struct SigmaResult {
  std::uint64_t lower = 0;  // proven lower bound
  std::uint64_t upper = 0;  // best cover found
  bool exact() const { return lower == upper; }
  std::vector<std::uint32_t> cover_cols;  // a cover achieving `upper`
  Rat root_bound;                         // forced columns + core LP value
  std::uint64_t nodes = 0;
  CertKind cert = CertKind::Interval;
};

struct SolveParams {
  std::uint64_t node_budget = 0;      // 0 = unlimited
  std::uint64_t lp_pivot_budget = 0;  // 0 = unlimited
  bool use_lp = true;
};

// Exact minimum set cover by branch and bound: branches on the uncovered item
// with the fewest alive columns (ascending column id), bounds by a greedy
// incumbent, a column-disjoint packing bound, and the root LP. Deterministic:
// identical instances give identical node counts. On budget exhaustion the
// result is a bracketing interval, never a wrong exact claim.
SigmaResult exact_sigma(const CoverInstance& inst, const SolveParams& params = {});

// All covers of the given size, for small instances; no reductions are applied
// so duplicated columns yield distinct covers. Stops at `cap` covers and
// reports completeness through *complete.
std::vector<std::vector<std::uint32_t>> enumerate_covers(const CoverInstance& inst,
                                                         std::uint64_t size, std::uint64_t cap,
                                                         bool* complete);

// Greedy cover (most new items first, ties by column id).
std::vector<std::uint32_t> greedy_cover(const CoverInstance& inst);

bool is_cover(const CoverInstance& inst, const std::vector<std::uint32_t>& cols);

}  // namespace ucov
