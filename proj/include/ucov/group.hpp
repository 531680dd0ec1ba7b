#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ucov/geometry.hpp"

namespace ucov {

// 3x3 matrix over GF(q^2), row-major, entries as field indices. uint16 holds
// every supported coordinate field (q <= 8 for group work, so |GF(q^2)| <= 64).
using Mat3 = std::array<std::uint16_t, 9>;

inline constexpr Mat3 kIdentity{1, 0, 0, 0, 1, 0, 0, 0, 1};

Mat3 mat_mul(const Field& F, const Mat3& a, const Mat3& b);
V3 mat_apply(const Field& F, const Mat3& m, const V3& v);
std::uint32_t mat_det(const Field& F, const Mat3& m);
Mat3 mat_conj_transpose(const Field& F, const Mat3& m);
Mat3 mat_scale(const Field& F, const Mat3& m, std::uint32_t s);
Mat3 mat_pow(const Field& F, Mat3 m, std::uint64_t e);
Mat3 mat_inverse(const Field& F, const Mat3& m);  // adjugate / det

// conj-transpose(M) * M = I under the standard form.
bool is_unitary(const Field& F, const Mat3& m);

// Characteristic polynomial x^3 - tr x^2 + s2 x - det, coefficients
// constant-first: {-det, s2, -tr, 1}.
std::array<std::uint32_t, 4> char_poly(const Field& F, const Mat3& m);

// Streams every element of SU3(q) exactly once, enumerating orthonormal
// frames: c1 over norm-1 vectors, c2 over norm-1 vectors of perp(c1), c3 the
// unique determinant-1 completion. Vector order is ascending packed index, so
// the stream is deterministic. Returns the number of matrices emitted.
std::uint64_t for_each_su3(const Field& F, const std::function<void(const Mat3&)>& fn);

// U3(q) fully enumerated: canonical center-coset representatives (least
// entry-lexicographic among the gcd(3,q+1) scalar multiples by the cube roots
// of unity in SU3(q)), sorted. Immutable after build.
class GroupTable {
 public:
  static GroupTable build(PrimePower q, unsigned jobs = 0);

  const PrimePower& prime_power() const { return q_; }
  const Field& field() const { return *F_; }
  std::uint64_t order() const { return elems_.size(); }
  const std::vector<Mat3>& elements() const { return elems_; }
  const Mat3& mat(std::uint32_t id) const { return elems_[id]; }

  std::uint32_t n_center_scalars() const { return n_center_; }
  const std::array<std::uint32_t, 3>& center_scalars() const { return center_; }

  Mat3 canonical(const Mat3& su) const;
  std::uint32_t id_of(const Mat3& su) const;  // canonicalizes, then looks up
  std::uint32_t identity_id() const { return id_; }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t inverse(std::uint32_t a) const;
  std::uint64_t element_order(std::uint32_t a) const;

  static std::uint64_t expected_su_order(const PrimePower& q);
  static std::uint64_t expected_order(const PrimePower& q);

  // Internal: used by the cache loader.
  static GroupTable adopt(PrimePower q, std::vector<Mat3> sorted_elems);

 private:
  GroupTable() = default;
  void finish();

  PrimePower q_;
  std::shared_ptr<const Field> F_;
  std::vector<Mat3> elems_;
  std::array<std::uint32_t, 3> center_{};
  std::uint32_t n_center_ = 1;
  std::uint32_t id_ = 0;
};

// ---------------------------------------------------------------------------
// Element classification (Types 1-3 by fixed geometry in PG(2, q^2)).

enum class ElementKind : std::uint8_t { Type1, Type2, Type3 };

struct Classification {
  ElementKind kind;
  // Type1: one absolute fixed point (witness). Type2: the fixed self-polar
  // triangle. Type3: neither.
  std::uint32_t absolute_witness = 0;
  Triangle triangle{{0, 0, 0}};
};

// Full fixed-point data, for censuses and exhaustive checks.
struct FixedPointData {
  ElementKind kind;
  std::vector<std::uint32_t> fixed_points;     // all fixed points in PG(2,q^2)
  std::vector<std::uint32_t> fixed_absolute;   // the absolute ones among them
  Triangle triangle{{0, 0, 0}};                // valid iff kind == Type2
};

Classification classify(const UnitaryGeometry& geo, const Mat3& m);
FixedPointData classify_full(const UnitaryGeometry& geo, const Mat3& m);

struct TypeCensus {
  std::uint64_t type1 = 0, type2 = 0, type3 = 0;
  std::uint64_t total() const { return type1 + type2 + type3; }
};
TypeCensus type_census(const GroupTable& t, const UnitaryGeometry& geo, unsigned jobs = 0);

// ---------------------------------------------------------------------------
// The imaginary-triangle construction for Type3 elements.

struct BigTriangle {
  std::array<std::uint64_t, 3> key;  // sorted packed normalized PG(2,q^6) points
  bool operator==(const BigTriangle&) const = default;
  auto operator<=>(const BigTriangle&) const = default;
};

struct ImagTriangleData {
  std::uint32_t alpha;                 // eigenvalue in GF(q^6), least-index root
  std::uint32_t D;                     // the Vandermonde-style scale factor
  std::array<V3, 3> evecs;             // e0, e1, e2 over GF(q^6)
  BigTriangle triangle;                // [e0],[e1],[e2]
  Mat3 Z;                              // SU3(q) matrix of order q^2-q+1
  std::uint32_t sigma_id;              // canonical id of the image of Z
  std::uint64_t sigma_order;           // (q^2-q+1)/gcd(3,q+1)
  std::uint64_t power;                 // g = sigma^power in U3(q)
};

// Builds the data for a Type3 element and verifies every claim along the way
// (eigenvalue relations, self-polarity under the extended form, Z's entries
// descending to GF(q^2), orders, membership g in <sigma>). Throws
// invariant_violation on any mismatch and std::invalid_argument for non-Type3
// input.
ImagTriangleData imaginary_triangle(const GroupTable& t, const UnitaryGeometry& geo,
                                    const Mat3& g, const Field& F6);

// The orbit of imaginary triangles plus the membership map that realizes
// "every Type3 element lies in the pointwise stabilizer of exactly one
// imaginary triangle": elem_to_triangle[id] is an index into `triangles`
// (UINT32_MAX for non-Type3 elements).
struct ImagOrbit {
  std::vector<BigTriangle> triangles;        // sorted
  std::vector<std::uint32_t> elem_to_triangle;
  std::uint32_t seed_id = 0;                 // the Type3 element used to seed
  Mat3 seed_Z{};                             // its pointwise-stabilizer generator
};

ImagOrbit build_imag_orbit(const GroupTable& t, const UnitaryGeometry& geo, const Field& F6,
                           unsigned jobs = 0);

// Setwise stabilizer test of a big triangle for a (projective) element.
bool stabilizes_big_triangle(const Field& F2, const Field& F6, const Mat3& m,
                             const BigTriangle& tri);

// ---------------------------------------------------------------------------
// Subgroups of U3(q) given as member-id sets.

struct SubgroupHandle {
  enum class Kind : std::uint8_t { AbsPoint, NonAbsPoint, Triangle, ImagTriangle, Explicit };
  Kind kind;
  std::uint32_t point = 0;       // AbsPoint / NonAbsPoint
  Triangle triangle{{0, 0, 0}};  // Triangle
  BigTriangle big{};             // ImagTriangle
  std::vector<std::uint32_t> explicit_ids;
};

std::vector<std::uint32_t> stabilizer_members(const SubgroupHandle& h, const GroupTable& t,
                                              const UnitaryGeometry& geo, const Field* F6,
                                              unsigned jobs = 0);

// Expected orders of the four geometric stabilizer classes.
std::uint64_t abs_point_stab_order(const PrimePower& q);
std::uint64_t nonabs_point_stab_order(const PrimePower& q);
std::uint64_t triangle_stab_order(const PrimePower& q);
std::uint64_t imag_triangle_stab_order(const PrimePower& q);

// ---------------------------------------------------------------------------
// Censuses over the table.

// All p-singular nonidentity elements (the union of the Sylow p-subgroups),
// as a flag vector indexed by element id.
std::vector<std::uint8_t> omega_flags(const GroupTable& t, unsigned jobs = 0);

struct SylowReport {
  std::uint64_t count = 0;            // number of Sylow p-subgroups (= q^3+1)
  std::uint64_t subgroup_order = 0;   // q^3
  std::uint64_t union_size = 0;       // q^6-1 nonidentity elements
  bool intersections_trivial = false;
  bool nonabelian = false;
  std::uint64_t exponent = 0;         // p for odd p, 4 for p = 2
};
SylowReport sylow_p_census(const GroupTable& t, const UnitaryGeometry& geo, unsigned jobs = 0);

// Sylow p-subgroup attached to one absolute point: the p-elements of its
// stabilizer.
std::vector<std::uint32_t> sylow_p_subgroup(const GroupTable& t, const UnitaryGeometry& geo,
                                            std::uint32_t absolute_point);

// Brute-force normalizer of a subgroup given as a closed member set.
std::vector<std::uint32_t> normalizer(const std::vector<std::uint32_t>& sub, const GroupTable& t);

bool is_closed_subgroup(const std::vector<std::uint32_t>& sub, const GroupTable& t);

// |Omega ∩ Stab(P)| for a nonabsolute point P; the elation count q^2 - 1.
std::uint64_t elation_census(const GroupTable& t, const UnitaryGeometry& geo,
                             const std::vector<std::uint8_t>& omega, std::uint32_t nonabs_point);

}  // namespace ucov
