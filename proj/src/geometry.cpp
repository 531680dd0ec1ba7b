#include "ucov/geometry.hpp"

#include <algorithm>

namespace ucov {

std::uint32_t Herm::solve_norm(std::uint32_t a) const {
  require(a != 0, "norm equation needs a nonzero target");
  const std::uint64_t s = F->conj_exponent();
  require(F->pow(a, s) == a, "norm target must lie in the fixed subfield");
  for (std::uint64_t c = 1; c < F->size(); ++c)
    if (F->pow(static_cast<std::uint32_t>(c), s + 1) == a) return static_cast<std::uint32_t>(c);
  throw invariant_violation("norm map failed to be surjective");
}

UnitaryGeometry::UnitaryGeometry(PrimePower q)
    : q_(q), F_(Field::make(q.p, 2 * q.a)), herm_(*F_) {
  const std::uint64_t Q = F_->size();
  if (Q > 81) throw resource_limit("plane enumeration capped at q <= 9");
  pts_.reserve(Q * Q + Q + 1);
  id_by_packed_.assign(Q * Q * Q, -1);
  for (std::uint64_t a = 0; a < Q; ++a)
    for (std::uint64_t b = 0; b < Q; ++b)
      for (std::uint64_t c = 0; c < Q; ++c) {
        V3 v{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
             static_cast<std::uint32_t>(c)};
        if (herm_.is_zero(v)) continue;
        // keep only normalized representatives
        int first = v[0] ? 0 : (v[1] ? 1 : 2);
        if (v[first] != 1) continue;
        id_by_packed_[herm_.pack(v)] = static_cast<std::int32_t>(pts_.size());
        pts_.push_back(v);
      }
  check_invariant(pts_.size() == Q * Q + Q + 1, "projective point count mismatch");

  absolute_.resize(pts_.size());
  perp_.resize(pts_.size());
  for (std::uint32_t i = 0; i < pts_.size(); ++i) {
    absolute_[i] = herm_.is_absolute(pts_[i]);
    n_absolute_ += absolute_[i];
    V3 c{F_->conj(pts_[i][0]), F_->conj(pts_[i][1]), F_->conj(pts_[i][2])};
    perp_[i] = id_of(c);
  }
}

std::uint32_t UnitaryGeometry::id_of(const V3& any) const {
  V3 n = herm_.normalize(any);
  std::int32_t id = id_by_packed_[herm_.pack(n)];
  check_invariant(id >= 0, "point lookup failed");
  return static_cast<std::uint32_t>(id);
}

std::vector<std::uint32_t> UnitaryGeometry::points_on_line(std::uint32_t line) const {
  std::vector<std::uint32_t> out;
  out.reserve(F_->size() + 1);
  for (std::uint32_t p = 0; p < pts_.size(); ++p)
    if (incident(p, line)) out.push_back(p);
  return out;
}

std::uint32_t UnitaryGeometry::line_absolute_count(std::uint32_t line) const {
  std::uint32_t n = 0;
  for (std::uint32_t p : points_on_line(line)) n += absolute_[p];
  return n;
}

std::vector<std::uint32_t> UnitaryGeometry::absolute_points() const {
  std::vector<std::uint32_t> out;
  out.reserve(n_absolute_);
  for (std::uint32_t i = 0; i < pts_.size(); ++i)
    if (absolute_[i]) out.push_back(i);
  return out;
}

bool UnitaryGeometry::is_self_polar(const Triangle& t) const {
  if (t.v[0] == t.v[1] || t.v[1] == t.v[2] || t.v[0] == t.v[2]) return false;
  for (int i = 0; i < 3; ++i) {
    if (absolute_[t.v[i]]) return false;
    if (!orthogonal(t.v[i], t.v[(i + 1) % 3])) return false;
  }
  return true;
}

std::vector<Triangle> UnitaryGeometry::self_polar_triangles() const {
  std::vector<Triangle> out;
  for (std::uint32_t i = 0; i < pts_.size(); ++i) {
    if (absolute_[i]) continue;
    for (std::uint32_t j = i + 1; j < pts_.size(); ++j) {
      if (absolute_[j] || !orthogonal(i, j)) continue;
      // third vertex: the unique point orthogonal to both; nondegeneracy of
      // the full form makes it nonabsolute automatically
      V3 r = herm_.orthogonal_complement(pts_[i], pts_[j]);
      std::uint32_t rid = id_of(r);
      check_invariant(!absolute_[rid], "orthogonal completion of a frame was absolute");
      if (rid > j) out.push_back({{i, j, rid}});
    }
  }
  return out;
}

std::array<V3, 3> UnitaryGeometry::extend_to_orthonormal_basis(std::uint32_t id) const {
  require(!absolute_[id], "cannot extend an absolute point to an orthonormal basis");
  const Field& F = *F_;
  auto unit_scale = [&](const V3& v) {
    std::uint32_t n = herm_.form(v, v);
    std::uint32_t c = herm_.solve_norm(F.inv(n));
    return V3{F.mul(c, v[0]), F.mul(c, v[1]), F.mul(c, v[2])};
  };
  V3 e0 = unit_scale(pts_[id]);
  // least-id point on perp(P) with nonzero norm
  std::uint32_t line = perp_[id];
  std::uint32_t pick = n_points();
  for (std::uint32_t p = 0; p < pts_.size(); ++p) {
    if (!incident(p, line) || absolute_[p]) continue;
    pick = p;
    break;
  }
  check_invariant(pick < n_points(), "polar line held no nonabsolute point");
  V3 e1 = unit_scale(pts_[pick]);
  V3 e2 = unit_scale(herm_.orthogonal_complement(e0, e1));
  return {e0, e1, e2};
}

}  // namespace ucov
