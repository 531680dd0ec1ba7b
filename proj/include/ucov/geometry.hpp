#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "ucov/field.hpp"

namespace ucov {

using V3 = std::array<std::uint32_t, 3>;  // coordinate triple of field indices

// Lightweight Hermitian machinery over any even-degree field context F =
// GF(s^2) with bar(x) = x^s. Works on raw coordinate triples without
// materializing the plane, so it also serves the GF(q^6) extension where the
// point set is far too large to enumerate.
struct Herm {
  const Field* F;

  explicit Herm(const Field& fld) : F(&fld) {
    require(fld.degree() % 2 == 0, "hermitian form needs an even-degree context");
  }

  // The standard form sum_i x_i bar(y_i); sesquilinear in x,
  // form(y,x) = bar(form(x,y)).
  std::uint32_t form(const V3& x, const V3& y) const {
    std::uint32_t s = 0;
    for (int i = 0; i < 3; ++i) s = F->add(s, F->mul(x[i], F->conj(y[i])));
    return s;
  }

  bool is_zero(const V3& v) const { return !v[0] && !v[1] && !v[2]; }

  // Scales so the first nonzero coordinate is 1 (the unique representative of
  // the projective point).
  V3 normalize(V3 v) const {
    for (int i = 0; i < 3; ++i) {
      if (v[i]) {
        std::uint32_t s = F->inv(v[i]);
        return {F->mul(s, v[0]), F->mul(s, v[1]), F->mul(s, v[2])};
      }
    }
    throw std::invalid_argument("cannot normalize the zero vector");
  }

  bool is_absolute(const V3& v) const { return form(v, v) == 0; }

  // v such that form(v, a) = form(v, b) = 0: the conjugated cross product.
  V3 orthogonal_complement(const V3& a, const V3& b) const {
    V3 u{F->conj(a[0]), F->conj(a[1]), F->conj(a[2])};
    V3 w{F->conj(b[0]), F->conj(b[1]), F->conj(b[2])};
    return {F->sub(F->mul(u[1], w[2]), F->mul(u[2], w[1])),
            F->sub(F->mul(u[2], w[0]), F->mul(u[0], w[2])),
            F->sub(F->mul(u[0], w[1]), F->mul(u[1], w[0]))};
  }

  // Packed key of a normalized triple: (a*Q + b)*Q + c. Fits 64 bits for every
  // supported cardinality (11^18 < 2^63).
  std::uint64_t pack(const V3& v) const {
    const std::uint64_t Q = F->size();
    return (std::uint64_t(v[0]) * Q + v[1]) * Q + v[2];
  }
  V3 unpack(std::uint64_t key) const {
    const std::uint64_t Q = F->size();
    V3 v;
    v[2] = static_cast<std::uint32_t>(key % Q);
    key /= Q;
    v[1] = static_cast<std::uint32_t>(key % Q);
    v[0] = static_cast<std::uint32_t>(key / Q);
    return v;
  }

  // Least-index scalar c with c^(s+1) = a; a must be a nonzero element of the
  // fixed subfield (the norm map onto GF(s)* is surjective).
  std::uint32_t solve_norm(std::uint32_t a) const;
};

// Three point ids, stored sorted; vertices must be non-collinear.
struct Triangle {
  std::array<std::uint32_t, 3> v;
  bool operator==(const Triangle&) const = default;
  auto operator<=>(const Triangle&) const = default;
};

// PG(2, q^2) with the standard unitary polarity, fully enumerated. Point ids
// are assigned in ascending packed-coordinate order of the normalized triples;
// line j is the set {P : <P, coords(j)> = 0} (plain dot product), so the polar
// line of point i is the line whose dual coordinates are conj(coords(i)).
class UnitaryGeometry {
 public:
  explicit UnitaryGeometry(PrimePower q);

  const PrimePower& prime_power() const { return q_; }
  const Field& field() const { return *F_; }
  const Herm& herm() const { return herm_; }

  std::uint32_t n_points() const { return static_cast<std::uint32_t>(pts_.size()); }
  const V3& coords(std::uint32_t id) const { return pts_[id]; }
  std::uint32_t id_of(const V3& any) const;  // normalizes, then looks up
  bool absolute(std::uint32_t id) const { return absolute_[id]; }
  std::uint32_t n_absolute() const { return n_absolute_; }

  // The polarity as an id permutation: point i <-> line i' (ids share the
  // coordinate space). perp(perp(i)) == i.
  std::uint32_t perp(std::uint32_t id) const { return perp_[id]; }

  bool incident(std::uint32_t point, std::uint32_t line) const {
    std::uint32_t s = 0;
    for (int i = 0; i < 3; ++i) s = F_->add(s, F_->mul(pts_[point][i], pts_[line][i]));
    return s == 0;
  }
  bool orthogonal(std::uint32_t a, std::uint32_t b) const {
    return herm_.form(pts_[a], pts_[b]) == 0;
  }

  std::vector<std::uint32_t> points_on_line(std::uint32_t line) const;
  std::uint32_t line_absolute_count(std::uint32_t line) const;
  std::vector<std::uint32_t> absolute_points() const;

  bool is_self_polar(const Triangle& t) const;

  // Complete, duplicate-free enumeration; count must be
  // q^2 (q^2-q+1)(q^2-q)/6 (validated by the test suite before any other use).
  std::vector<Triangle> self_polar_triangles() const;

  // Orthonormal basis (e0, e1, e2) with [e0] = P, deterministic: e1 comes from
  // the least-id point of perp(P) with nonzero norm, scalars from the
  // least-index solution of the norm equation.
  std::array<V3, 3> extend_to_orthonormal_basis(std::uint32_t id) const;

 private:
  PrimePower q_;
  std::shared_ptr<const Field> F_;  // GF(q^2)
  Herm herm_;
  std::vector<V3> pts_;
  std::vector<std::int32_t> id_by_packed_;
  std::vector<std::uint8_t> absolute_;
  std::vector<std::uint32_t> perp_;
  std::uint32_t n_absolute_ = 0;
};

}  // namespace ucov
