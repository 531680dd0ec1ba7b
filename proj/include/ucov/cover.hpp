#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ucov/graph.hpp"
#include "ucov/group.hpp"
#include "ucov/setcover.hpp"

namespace ucov {

std::uint64_t k_formula(const PrimePower& q);  // 1 for p = 3, else 1 + q^3

// Theorem-2 style bound evaluation, exact integers throughout.
struct BoundsReport {
  std::uint64_t q = 0;
  bool theorem_range = false;  // q >= 7
  BigInt k, m, T;              // T = q^3 (q+1)^2 (q-1) / 3
  BigInt lower, upper;         // k + T and q^4+q^2+1-m+T
  BigInt lower_simple, upper_simple;
  double ratio_lower = 0, ratio_upper = 0;  // against q^6/3 (approximate)
};

BoundsReport bounds(const PrimePower& q);
std::vector<BoundsReport> bounds_table(std::uint64_t q_min, std::uint64_t q_max);

struct AsymptoticRow {
  std::uint64_t q;
  double ratio_lower, ratio_upper;
  bool within_envelope;  // |ratio - 1| <= 8/q (only claimed for q >= 7)
};
std::vector<AsymptoticRow> asymptotic_report(std::uint64_t q_max);

// ---------------------------------------------------------------------------
// The explicit cover: all absolute-point stabilizers, the nonabsolute-point
// stabilizers over the complement S' of a triangle-free set S, and all
// imaginary-triangle stabilizers.
struct CoverSpec {
  std::uint64_t q = 0;
  std::vector<std::uint32_t> s_ids;     // sorted S (nonabsolute point ids)
  std::vector<std::uint8_t> in_sprime;  // indexed by point id
  std::uint64_t n_abs = 0, n_sprime = 0, n_imag = 0;
  BigInt declared_size;
  std::uint64_t handle_count() const { return n_abs + n_sprime + n_imag; }
};

// S must arrive verified; an independent triangle re-check (orthogonal pair +
// polar completion) runs here anyway, and S vertices must be nonabsolute.
CoverSpec build_cover(const GroupTable& t, const UnitaryGeometry& geo, const ImagOrbit& orbit,
                      const VertexSubset& S);

struct CoverCertificate {
  bool ok = false;
  std::uint64_t type1 = 0, type2 = 0, type3 = 0;
  std::uint64_t covered = 0, total = 0;
  std::uint32_t witness_id = UINT32_MAX;  // first uncovered element if !ok
  std::string witness_reason;
};

CoverCertificate verify_cover(const CoverSpec& spec, const GroupTable& t,
                              const UnitaryGeometry& geo, const ImagOrbit& orbit,
                              unsigned jobs = 0);

// ---------------------------------------------------------------------------
// The counting argument behind the lower bound: Omega (the p-singular
// elements), the per-class maxima a_i of |H ∩ Omega|, and the inequality
// chain.
struct ClassBound {
  std::string name;
  bool enumerated = false;  // X1..X4 are enumerated, X5..X7 are order-arithmetic
  bool nonempty = false;
  std::uint64_t value = 0;  // enumerated a_i, or the analytic bound when not
  bool established = false; // value < a1 holds by the argument valid at this q
  std::string note;
};

struct LowerBoundCertificate {
  std::uint64_t q = 0;
  bool theorem_domain = false;  // q >= 7 (p != 3 is a precondition)
  std::uint64_t omega_size = 0;
  std::array<ClassBound, 7> classes;
  bool core_audit_ok = false;  // a1 = q^3-1, a2 = q^2-1, a4 = 0, enumerated a_i < a1
  bool full_audit_ok = false;  // every nonempty class established below a1
  BigInt implied_bound;        // q^3 + 1 + T
};

// Requires p != 3 (the paper's running assumption for this argument) and the
// exhaustive scale q <= 5. The orbit may be null at q = 2, where no element is
// fixed-point-free and the imaginary-triangle class is empty.
LowerBoundCertificate lower_bound_certificate(const GroupTable& t, const UnitaryGeometry& geo,
                                              const ImagOrbit* orbit, unsigned jobs = 0);

}  // namespace ucov
