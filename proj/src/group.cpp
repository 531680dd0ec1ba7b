#include "ucov/group.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <map>
#include <unordered_map>

#include "ucov/parallel.hpp"

namespace ucov {

namespace {

// Matrix helpers templated on the entry width: uint16 for stored GF(q^2)
// group elements, uint32 for GF(q^6) work.
template <typename E>
std::array<E, 9> tmul(const Field& F, const std::array<E, 9>& a, const std::array<E, 9>& b) {
  std::array<E, 9> r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      std::uint32_t s = F.mul(a[3 * i], b[j]);
      s = F.add(s, F.mul(a[3 * i + 1], b[3 + j]));
      s = F.add(s, F.mul(a[3 * i + 2], b[6 + j]));
      r[3 * i + j] = static_cast<E>(s);
    }
  return r;
}

template <typename E>
V3 tapply(const Field& F, const std::array<E, 9>& m, const V3& v) {
  V3 r;
  for (int i = 0; i < 3; ++i)
    r[i] = F.add(F.add(F.mul(m[3 * i], v[0]), F.mul(m[3 * i + 1], v[1])),
                 F.mul(m[3 * i + 2], v[2]));
  return r;
}

template <typename E>
std::uint32_t tdet(const Field& F, const std::array<E, 9>& m) {
  auto d2 = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
    return F.sub(F.mul(a, d), F.mul(b, c));
  };
  std::uint32_t det = F.mul(m[0], d2(m[4], m[5], m[7], m[8]));
  det = F.sub(det, F.mul(m[1], d2(m[3], m[5], m[6], m[8])));
  det = F.add(det, F.mul(m[2], d2(m[3], m[4], m[6], m[7])));
  return det;
}

template <typename E>
std::array<E, 9> tinverse(const Field& F, const std::array<E, 9>& m) {
  auto d2 = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
    return F.sub(F.mul(a, d), F.mul(b, c));
  };
  std::uint32_t det = tdet(F, m);
  require(det != 0, "matrix is singular");
  std::uint32_t s = F.inv(det);
  std::array<E, 9> r;
  r[0] = static_cast<E>(F.mul(s, d2(m[4], m[5], m[7], m[8])));
  r[1] = static_cast<E>(F.mul(s, F.neg(d2(m[1], m[2], m[7], m[8]))));
  r[2] = static_cast<E>(F.mul(s, d2(m[1], m[2], m[4], m[5])));
  r[3] = static_cast<E>(F.mul(s, F.neg(d2(m[3], m[5], m[6], m[8]))));
  r[4] = static_cast<E>(F.mul(s, d2(m[0], m[2], m[6], m[8])));
  r[5] = static_cast<E>(F.mul(s, F.neg(d2(m[0], m[2], m[3], m[5]))));
  r[6] = static_cast<E>(F.mul(s, d2(m[3], m[4], m[6], m[7])));
  r[7] = static_cast<E>(F.mul(s, F.neg(d2(m[0], m[1], m[6], m[7]))));
  r[8] = static_cast<E>(F.mul(s, d2(m[0], m[1], m[3], m[4])));
  return r;
}

using WMat3 = std::array<std::uint32_t, 9>;

WMat3 embed_mat(const Mat3& m, const std::vector<std::uint32_t>& tab) {
  WMat3 r;
  for (int i = 0; i < 9; ++i) r[i] = tab[m[i]];
  return r;
}

}  // namespace

Mat3 mat_mul(const Field& F, const Mat3& a, const Mat3& b) { return tmul(F, a, b); }
V3 mat_apply(const Field& F, const Mat3& m, const V3& v) { return tapply(F, m, v); }
std::uint32_t mat_det(const Field& F, const Mat3& m) { return tdet(F, m); }
Mat3 mat_inverse(const Field& F, const Mat3& m) { return tinverse(F, m); }

Mat3 mat_conj_transpose(const Field& F, const Mat3& m) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[3 * i + j] = static_cast<std::uint16_t>(F.conj(m[3 * j + i]));
  return r;
}

Mat3 mat_scale(const Field& F, const Mat3& m, std::uint32_t s) {
  Mat3 r;
  for (int i = 0; i < 9; ++i) r[i] = static_cast<std::uint16_t>(F.mul(s, m[i]));
  return r;
}

Mat3 mat_pow(const Field& F, Mat3 m, std::uint64_t e) {
  Mat3 r = kIdentity;
  while (e) {
    if (e & 1) r = mat_mul(F, r, m);
    m = mat_mul(F, m, m);
    e >>= 1;
  }
  return r;
}

bool is_unitary(const Field& F, const Mat3& m) {
  return mat_mul(F, mat_conj_transpose(F, m), m) == kIdentity;
}

std::array<std::uint32_t, 4> char_poly(const Field& F, const Mat3& m) {
  auto d2 = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
    return F.sub(F.mul(a, d), F.mul(b, c));
  };
  std::uint32_t tr = F.add(F.add(m[0], m[4]), m[8]);
  std::uint32_t s2 = F.add(F.add(d2(m[4], m[5], m[7], m[8]), d2(m[0], m[2], m[6], m[8])),
                           d2(m[0], m[1], m[3], m[4]));
  std::uint32_t det = tdet(F, m);
  return {F.neg(det), s2, F.neg(tr), 1};
}

std::uint64_t for_each_su3(const Field& F, const std::function<void(const Mat3&)>& fn) {
  const Herm h(F);
  const std::uint64_t Q = F.size();
  std::vector<V3> unit;  // norm-1 vectors in packed ascending order
  for (std::uint64_t a = 0; a < Q; ++a)
    for (std::uint64_t b = 0; b < Q; ++b)
      for (std::uint64_t c = 0; c < Q; ++c) {
        V3 v{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
             static_cast<std::uint32_t>(c)};
        if (h.form(v, v) == 1) unit.push_back(v);
      }
  std::uint64_t count = 0;
  for (const V3& c1 : unit) {
    // basis of the hermitian perp of c1: plain-dot null space of conj(c1)
    V3 w{F.conj(c1[0]), F.conj(c1[1]), F.conj(c1[2])};
    int piv = w[0] ? 0 : (w[1] ? 1 : 2);
    std::uint32_t pinv = F.inv(w[piv]);
    std::array<V3, 2> basis;
    int bi = 0;
    for (int j = 0; j < 3; ++j) {
      if (j == piv) continue;
      V3 u{0, 0, 0};
      u[j] = 1;
      u[piv] = F.neg(F.mul(pinv, w[j]));
      basis[bi++] = u;
    }
    for (std::uint64_t s = 0; s < Q; ++s)
      for (std::uint64_t t = 0; t < Q; ++t) {
        if (!s && !t) continue;
        V3 c2;
        for (int i = 0; i < 3; ++i)
          c2[i] = F.add(F.mul(static_cast<std::uint32_t>(s), basis[0][i]),
                        F.mul(static_cast<std::uint32_t>(t), basis[1][i]));
        if (h.form(c2, c2) != 1) continue;
        V3 c3 = h.orthogonal_complement(c1, c2);
        Mat3 m;
        for (int i = 0; i < 3; ++i) {
          m[3 * i] = static_cast<std::uint16_t>(c1[i]);
          m[3 * i + 1] = static_cast<std::uint16_t>(c2[i]);
          m[3 * i + 2] = static_cast<std::uint16_t>(c3[i]);
        }
        // det currently equals det(c1 c2 w) with conj-transposed gram
        // diag(1,1,n); scaling c3 by 1/det lands in SU3.
        std::uint32_t det = tdet(F, m);
        std::uint32_t s3 = F.inv(det);
        for (int i = 0; i < 3; ++i) m[3 * i + 2] = static_cast<std::uint16_t>(F.mul(s3, m[3 * i + 2]));
        fn(m);
        ++count;
      }
  }
  return count;
}

std::uint64_t GroupTable::expected_su_order(const PrimePower& q) {
  return q.q * q.q * q.q * (q.q * q.q * q.q + 1) * (q.q * q.q - 1);
}

std::uint64_t GroupTable::expected_order(const PrimePower& q) {
  return expected_su_order(q) / q.gcd3();
}

Mat3 GroupTable::canonical(const Mat3& su) const {
  Mat3 best = su;
  for (std::uint32_t i = 1; i < n_center_; ++i) {
    Mat3 alt = mat_scale(*F_, su, center_[i]);
    if (alt < best) best = alt;
  }
  return best;
}

void GroupTable::finish() {
  n_center_ = 0;
  for (std::uint32_t w = 1; w < F_->size(); ++w)
    if (F_->pow(w, 3) == 1 && F_->pow(w, q_.q + 1) == 1) center_[n_center_++] = w;
  check_invariant(n_center_ == q_.gcd3(), "center size mismatch");
  // center_[0] must be 1 so canonical() can skip it
  std::sort(center_.begin(), center_.begin() + n_center_);
  check_invariant(center_[0] == 1, "center does not contain 1");
  id_ = id_of(kIdentity);
}

GroupTable GroupTable::build(PrimePower q, unsigned jobs) {
  if (q.q > 8) throw resource_limit("group enumeration capped at q <= 8");
  GroupTable t;
  t.q_ = q;
  t.F_ = Field::make(q.p, 2 * q.a);
  const Field& F = *t.F_;

  t.n_center_ = 0;
  for (std::uint32_t w = 1; w < F.size(); ++w)
    if (F.pow(w, 3) == 1 && F.pow(w, q.q + 1) == 1) t.center_[t.n_center_++] = w;
  std::sort(t.center_.begin(), t.center_.begin() + t.n_center_);

  const Herm h(F);
  const std::uint64_t Q = F.size();
  std::vector<V3> unit;
  for (std::uint64_t a = 0; a < Q; ++a)
    for (std::uint64_t b = 0; b < Q; ++b)
      for (std::uint64_t c = 0; c < Q; ++c) {
        V3 v{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
             static_cast<std::uint32_t>(c)};
        if (h.form(v, v) == 1) unit.push_back(v);
      }

  if (jobs == 0) jobs = default_jobs();
  std::vector<std::vector<Mat3>> parts(jobs ? jobs : 1);
  const std::uint64_t expected = expected_order(q);
  parallel_chunks(unit.size(), jobs, [&](std::uint64_t lo, std::uint64_t hi, unsigned w) {
    auto& out = parts[w];
    out.reserve(expected / jobs + 1024);
    for (std::uint64_t ci = lo; ci < hi; ++ci) {
      const V3& c1 = unit[ci];
      V3 wv{F.conj(c1[0]), F.conj(c1[1]), F.conj(c1[2])};
      int piv = wv[0] ? 0 : (wv[1] ? 1 : 2);
      std::uint32_t pinv = F.inv(wv[piv]);
      std::array<V3, 2> basis;
      int bi = 0;
      for (int j = 0; j < 3; ++j) {
        if (j == piv) continue;
        V3 u{0, 0, 0};
        u[j] = 1;
        u[piv] = F.neg(F.mul(pinv, wv[j]));
        basis[bi++] = u;
      }
      for (std::uint64_t s = 0; s < Q; ++s)
        for (std::uint64_t tt = 0; tt < Q; ++tt) {
          if (!s && !tt) continue;
          V3 c2;
          for (int i = 0; i < 3; ++i)
            c2[i] = F.add(F.mul(static_cast<std::uint32_t>(s), basis[0][i]),
                          F.mul(static_cast<std::uint32_t>(tt), basis[1][i]));
          if (h.form(c2, c2) != 1) continue;
          V3 c3 = h.orthogonal_complement(c1, c2);
          Mat3 m;
          for (int i = 0; i < 3; ++i) {
            m[3 * i] = static_cast<std::uint16_t>(c1[i]);
            m[3 * i + 1] = static_cast<std::uint16_t>(c2[i]);
            m[3 * i + 2] = static_cast<std::uint16_t>(c3[i]);
          }
          std::uint32_t det = tdet(F, m);
          std::uint32_t s3 = F.inv(det);
          for (int i = 0; i < 3; ++i)
            m[3 * i + 2] = static_cast<std::uint16_t>(F.mul(s3, m[3 * i + 2]));
          // keep only coset-canonical representatives
          bool keep = true;
          for (std::uint32_t ci2 = 1; ci2 < t.n_center_; ++ci2)
            if (mat_scale(F, m, t.center_[ci2]) < m) {
              keep = false;
              break;
            }
          if (keep) out.push_back(m);
        }
    }
  });

  std::size_t total = 0;
  for (auto& p : parts) total += p.size();
  t.elems_.reserve(total);
  for (auto& p : parts) {
    t.elems_.insert(t.elems_.end(), p.begin(), p.end());
    p.clear();
    p.shrink_to_fit();
  }
  std::sort(t.elems_.begin(), t.elems_.end());
  check_invariant(t.elems_.size() == expected, "U3(q) order mismatch");
  check_invariant(std::adjacent_find(t.elems_.begin(), t.elems_.end()) == t.elems_.end(),
                  "duplicate canonical representatives");
  t.id_ = t.id_of(kIdentity);
  return t;
}

GroupTable GroupTable::adopt(PrimePower q, std::vector<Mat3> sorted_elems) {
  GroupTable t;
  t.q_ = q;
  t.F_ = Field::make(q.p, 2 * q.a);
  t.elems_ = std::move(sorted_elems);
  check_invariant(t.elems_.size() == expected_order(q), "adopted table has wrong order");
  check_invariant(std::is_sorted(t.elems_.begin(), t.elems_.end()), "adopted table not sorted");
  t.finish();
  return t;
}

std::uint32_t GroupTable::id_of(const Mat3& su) const {
  Mat3 c = canonical(su);
  auto it = std::lower_bound(elems_.begin(), elems_.end(), c);
  check_invariant(it != elems_.end() && *it == c, "element not found in group table");
  return static_cast<std::uint32_t>(it - elems_.begin());
}

std::uint32_t GroupTable::mul(std::uint32_t a, std::uint32_t b) const {
  return id_of(mat_mul(*F_, elems_[a], elems_[b]));
}

std::uint32_t GroupTable::inverse(std::uint32_t a) const {
  return id_of(mat_inverse(*F_, elems_[a]));
}

std::uint64_t GroupTable::element_order(std::uint32_t a) const {
  std::uint32_t x = a;
  std::uint64_t o = 1;
  while (x != id_) {
    x = mul(x, a);
    ++o;
  }
  return o;
}

// ---------------------------------------------------------------------------

namespace {

// Nonzero null vector of a rank-2 matrix: the first nonzero pairwise cross
// product of its rows (plain cross product; the field is commutative).
bool null_vector_rank2(const Field& F, const std::array<std::uint32_t, 9>& A, V3& out) {
  auto row = [&](int i) { return V3{A[3 * i], A[3 * i + 1], A[3 * i + 2]}; };
  auto cross = [&](const V3& u, const V3& w) {
    return V3{F.sub(F.mul(u[1], w[2]), F.mul(u[2], w[1])),
              F.sub(F.mul(u[2], w[0]), F.mul(u[0], w[2])),
              F.sub(F.mul(u[0], w[1]), F.mul(u[1], w[0]))};
  };
  for (auto [i, j] : {std::pair{0, 1}, {0, 2}, {1, 2}}) {
    V3 c = cross(row(i), row(j));
    if (c[0] || c[1] || c[2]) {
      out = c;
      return true;
    }
  }
  return false;
}

// Walks the q^2+1 projective points of the line {v : r . v = 0} (plain dot).
template <typename Fn>
void for_each_point_on_line(const Field& F, const V3& r, Fn&& fn) {
  int piv = r[0] ? 0 : (r[1] ? 1 : 2);
  std::uint32_t pinv = F.inv(r[piv]);
  std::array<V3, 2> basis;
  int bi = 0;
  for (int j = 0; j < 3; ++j) {
    if (j == piv) continue;
    V3 u{0, 0, 0};
    u[j] = 1;
    u[piv] = F.neg(F.mul(pinv, r[j]));
    basis[bi++] = u;
  }
  // projective parameterization: basis[0] + t basis[1], and basis[1]
  for (std::uint64_t t = 0; t < F.size(); ++t) {
    V3 v;
    for (int i = 0; i < 3; ++i)
      v[i] = F.add(basis[0][i], F.mul(static_cast<std::uint32_t>(t), basis[1][i]));
    fn(v);
  }
  fn(basis[1]);
}

struct EigenData {
  std::uint32_t value;
  int space_dim;  // 1, 2 or 3
  V3 vec;         // a representative eigenvector when space_dim == 1
  V3 line;        // dual coords of the fixed line when space_dim == 2
};

std::vector<EigenData> eigen_analysis(const Field& F, const Mat3& m) {
  auto cp = char_poly(F, m);
  std::vector<EigenData> out;
  for (std::uint64_t lam = 0; lam < F.size(); ++lam) {
    // evaluate the characteristic polynomial
    std::uint32_t x = static_cast<std::uint32_t>(lam);
    std::uint32_t v = cp[3];
    v = F.add(F.mul(v, x), cp[2]);
    v = F.add(F.mul(v, x), cp[1]);
    v = F.add(F.mul(v, x), cp[0]);
    if (v != 0) continue;
    std::array<std::uint32_t, 9> A;
    for (int i = 0; i < 9; ++i) A[i] = m[i];
    for (int i = 0; i < 3; ++i) A[4 * i] = F.sub(A[4 * i], x);
    EigenData e;
    e.value = x;
    V3 nv;
    if (null_vector_rank2(F, A, nv)) {
      e.space_dim = 1;
      e.vec = nv;
    } else {
      // all 2x2 minors vanish: rank <= 1
      bool zero = std::all_of(A.begin(), A.end(), [](std::uint32_t t) { return t == 0; });
      if (zero) {
        e.space_dim = 3;
      } else {
        e.space_dim = 2;
        for (int i = 0; i < 3; ++i) {
          V3 r{A[3 * i], A[3 * i + 1], A[3 * i + 2]};
          if (r[0] || r[1] || r[2]) {
            e.line = r;
            break;
          }
        }
      }
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace

Classification classify(const UnitaryGeometry& geo, const Mat3& m) {
  const Field& F = geo.field();
  const Herm& h = geo.herm();
  auto eigen = eigen_analysis(F, m);
  Classification c;
  if (eigen.empty()) {
    c.kind = ElementKind::Type3;
    return c;
  }
  std::array<std::uint32_t, 3> fixed{};
  int nfixed = 0;
  for (const auto& e : eigen) {
    if (e.space_dim == 1) {
      if (h.is_absolute(e.vec)) {
        c.kind = ElementKind::Type1;
        c.absolute_witness = geo.id_of(e.vec);
        return c;
      }
      check_invariant(nfixed < 3, "more than three one-dimensional eigenspaces");
      fixed[nfixed++] = geo.id_of(e.vec);
    } else {
      // a whole fixed line: every line carries an absolute point
      std::uint32_t witness = geo.n_points();
      if (e.space_dim == 3) {
        witness = geo.absolute_points().front();
      } else {
        for_each_point_on_line(F, e.line, [&](const V3& v) {
          if (witness == geo.n_points() && h.is_absolute(v)) witness = geo.id_of(v);
        });
      }
      check_invariant(witness < geo.n_points(), "fixed line with no absolute point");
      c.kind = ElementKind::Type1;
      c.absolute_witness = witness;
      return c;
    }
  }
  // only nonabsolute 1-dim eigenspaces remain: Theorem 6 territory
  check_invariant(nfixed == 3, "type 2 element with != 3 fixed points");
  std::sort(fixed.begin(), fixed.end());
  c.kind = ElementKind::Type2;
  c.triangle = Triangle{fixed};
  check_invariant(geo.is_self_polar(c.triangle), "type 2 fixed triangle not self-polar");
  return c;
}

FixedPointData classify_full(const UnitaryGeometry& geo, const Mat3& m) {
  const Field& F = geo.field();
  const Herm& h = geo.herm();
  auto eigen = eigen_analysis(F, m);
  FixedPointData d;
  for (const auto& e : eigen) {
    if (e.space_dim == 1) {
      d.fixed_points.push_back(geo.id_of(e.vec));
    } else if (e.space_dim == 2) {
      for_each_point_on_line(F, e.line, [&](const V3& v) { d.fixed_points.push_back(geo.id_of(v)); });
    } else {
      for (std::uint32_t p = 0; p < geo.n_points(); ++p) d.fixed_points.push_back(p);
    }
  }
  std::sort(d.fixed_points.begin(), d.fixed_points.end());
  d.fixed_points.erase(std::unique(d.fixed_points.begin(), d.fixed_points.end()),
                       d.fixed_points.end());
  for (auto p : d.fixed_points)
    if (geo.absolute(p)) d.fixed_absolute.push_back(p);
  if (d.fixed_points.empty()) {
    d.kind = ElementKind::Type3;
  } else if (!d.fixed_absolute.empty()) {
    d.kind = ElementKind::Type1;
  } else {
    d.kind = ElementKind::Type2;
    check_invariant(d.fixed_points.size() == 3, "type 2 element with != 3 fixed points");
    Triangle t{{d.fixed_points[0], d.fixed_points[1], d.fixed_points[2]}};
    check_invariant(geo.is_self_polar(t), "type 2 fixed triangle not self-polar");
    d.triangle = t;
  }
  (void)h;
  return d;
}

TypeCensus type_census(const GroupTable& t, const UnitaryGeometry& geo, unsigned jobs) {
  if (jobs == 0) jobs = default_jobs();
  std::vector<TypeCensus> parts(jobs);
  parallel_chunks(t.order(), jobs, [&](std::uint64_t lo, std::uint64_t hi, unsigned w) {
    for (std::uint64_t i = lo; i < hi; ++i) {
      auto c = classify(geo, t.mat(static_cast<std::uint32_t>(i)));
      if (c.kind == ElementKind::Type1) ++parts[w].type1;
      else if (c.kind == ElementKind::Type2) ++parts[w].type2;
      else ++parts[w].type3;
    }
  });
  TypeCensus total;
  for (const auto& p : parts) {
    total.type1 += p.type1;
    total.type2 += p.type2;
    total.type3 += p.type3;
  }
  return total;
}

// ---------------------------------------------------------------------------

namespace {

std::uint32_t inverse_embed(std::uint32_t big, const Field& from, const Field& into) {
  const auto& tab = embedding(from, into);
  for (std::uint32_t x = 0; x < tab.size(); ++x)
    if (tab[x] == big) return x;
  throw invariant_violation("element not in the embedded subfield");
}

}  // namespace

ImagTriangleData imaginary_triangle(const GroupTable& t, const UnitaryGeometry& geo,
                                    const Mat3& g, const Field& F6) {
  const Field& F2 = t.field();
  const PrimePower& pp = t.prime_power();
  const std::uint64_t q = pp.q;
  require(F6.p() == pp.p && F6.degree() == 6 * pp.a, "F6 must be GF(q^6)");

  auto cls = classify(geo, g);
  require(cls.kind == ElementKind::Type3, "imaginary_triangle needs a Type3 element");

  const auto& emb = embedding(F2, F6);
  auto cp = char_poly(F2, g);
  Poly chat(F6, {emb[cp[0]], emb[cp[1]], emb[cp[2]], emb[cp[3]]});

  // Roots live in the order-(q^2-q+1) subgroup of GF(q^6)*; scan it first and
  // fall back to the full field so a falsified claim surfaces as a fault.
  const std::uint64_t s_full = q * q - q + 1;
  std::vector<std::uint32_t> roots;
  {
    std::uint32_t zeta0 = F6.pow(F6.generator(), (F6.size() - 1) / s_full);
    std::uint32_t x = 1;
    for (std::uint64_t i = 0; i < s_full; ++i) {
      if (chat.eval(x) == 0) roots.push_back(x);
      x = F6.mul(x, zeta0);
    }
    if (roots.size() != 3) {
      roots = find_roots(chat);
      check_invariant(roots.size() == 3, "type 3 characteristic polynomial did not split");
      throw invariant_violation("eigenvalue escaped the order-(q^2-q+1) subgroup");
    }
  }
  std::sort(roots.begin(), roots.end());
  ImagTriangleData out;
  out.alpha = roots[0];
  const std::uint32_t alpha = out.alpha;
  const std::uint64_t q2 = q * q, q4 = q2 * q2;
  check_invariant(F6.pow(alpha, q4 + q2 + 1) == 1, "alpha^(q^4+q^2+1) != 1");
  check_invariant(F6.pow(alpha, s_full) == 1, "alpha^(q^2-q+1) != 1");
  check_invariant(F6.pow(alpha, q2 - 1) != 1, "alpha unexpectedly in GF(q^2)");
  {
    std::vector<std::uint32_t> expect{alpha, F6.pow(alpha, q2), F6.pow(alpha, q4)};
    std::sort(expect.begin(), expect.end());
    check_invariant(expect == roots, "eigenvalues are not alpha, alpha^q2, alpha^q4");
  }

  // Cyclic basis b0=(1,0,0), b1=g b0, b2=g b1 (any nonzero vector is cyclic
  // because the characteristic polynomial is irreducible).
  V3 b0{1, 0, 0};
  V3 b1 = mat_apply(F2, g, b0);
  V3 b2 = mat_apply(F2, g, b1);
  Mat3 Qm;  // columns b0 b1 b2, over GF(q^2)
  for (int i = 0; i < 3; ++i) {
    Qm[3 * i] = static_cast<std::uint16_t>(b0[i]);
    Qm[3 * i + 1] = static_cast<std::uint16_t>(b1[i]);
    Qm[3 * i + 2] = static_cast<std::uint16_t>(b2[i]);
  }
  check_invariant(mat_det(F2, Qm) != 0, "cyclic vector failed to give a basis");
  WMat3 Qh = embed_mat(Qm, emb);
  WMat3 gh = embed_mat(g, emb);

  // D and the explicit eigenvector formulas, expressed in b-coordinates.
  auto ap = [&](std::uint64_t e) { return F6.pow(alpha, e); };
  std::uint32_t D = F6.mul(F6.mul(F6.sub(ap(q4), ap(q2)), F6.sub(ap(q4), ap(1))),
                           F6.sub(ap(q2), ap(1)));
  check_invariant(D != 0, "eigenvalue discriminant vanished");
  out.D = D;
  std::uint32_t Dinv = F6.inv(D);
  auto bc = [&](std::uint64_t e1, std::uint64_t e2) { return F6.sub(ap(e1), ap(e2)); };
  std::array<V3, 3> coords = {
      V3{bc(2 * q4 + q2, q4 + 2 * q2), bc(2 * q2, 2 * q4), bc(q4, q2)},
      V3{bc(q4 + 2, 2 * q4 + 1), bc(2 * q4, 2), bc(1, q4)},
      V3{bc(2 * q2 + 1, q2 + 2), bc(2, 2 * q2), bc(q2, 1)}};
  const Herm h6(F6);
  std::array<std::uint64_t, 3> eigvals{ap(1), ap(q2), ap(q4)};
  for (int i = 0; i < 3; ++i) {
    V3 bcoord{F6.mul(Dinv, coords[i][0]), F6.mul(Dinv, coords[i][1]), F6.mul(Dinv, coords[i][2])};
    V3 e = tapply(F6, Qh, bcoord);
    check_invariant(!h6.is_zero(e), "eigenvector formula produced zero");
    // the cross-check guarding the eigenvalue/eigenvector wording
    V3 img = tapply(F6, gh, e);
    V3 scaled{F6.mul(static_cast<std::uint32_t>(eigvals[i]), e[0]),
              F6.mul(static_cast<std::uint32_t>(eigvals[i]), e[1]),
              F6.mul(static_cast<std::uint32_t>(eigvals[i]), e[2])};
    check_invariant(img == scaled, "explicit eigenvector fails T e = alpha^(q^2i) e");
    out.evecs[i] = e;
  }

  // self-polarity under the extended form
  for (int i = 0; i < 3; ++i) {
    check_invariant(h6.form(out.evecs[i], out.evecs[i]) != 0, "imaginary vertex is absolute");
    check_invariant(h6.form(out.evecs[i], out.evecs[(i + 1) % 3]) == 0,
                    "imaginary vertices not orthogonal");
  }
  for (int i = 0; i < 3; ++i) out.triangle.key[i] = h6.pack(h6.normalize(out.evecs[i]));
  std::sort(out.triangle.key.begin(), out.triangle.key.end());

  // Z = A^{-1} diag(zeta, zeta^q2, zeta^q4) A in b-coordinates, pulled back to
  // GF(q^2) and conjugated into the standard basis.
  std::uint32_t zeta = F6.pow(F6.generator(), (F6.size() - 1) / s_full);
  check_invariant(F6.element_order(zeta) == s_full, "zeta order mismatch");
  WMat3 A{1, alpha, F6.mul(alpha, alpha),
          1, static_cast<std::uint32_t>(ap(q2)), static_cast<std::uint32_t>(ap(2 * q2)),
          1, static_cast<std::uint32_t>(ap(q4)), static_cast<std::uint32_t>(ap(2 * q4))};
  WMat3 diag{zeta, 0, 0, 0, F6.pow(zeta, q2), 0, 0, 0, F6.pow(zeta, q4)};
  WMat3 Zb = tmul(F6, tmul(F6, tinverse(F6, A), diag), A);
  Mat3 Zb2;
  for (int i = 0; i < 9; ++i) {
    check_invariant(F6.pow(Zb[i], q2) == Zb[i], "Z entry escapes GF(q^2)");
    Zb2[i] = static_cast<std::uint16_t>(inverse_embed(Zb[i], F2, F6));
  }
  Mat3 Z = mat_mul(F2, mat_mul(F2, Qm, Zb2), mat_inverse(F2, Qm));
  check_invariant(is_unitary(F2, Z), "Z is not unitary");
  check_invariant(mat_det(F2, Z) == 1, "Z determinant != 1");
  check_invariant(mat_pow(F2, Z, s_full) == kIdentity, "Z^(q^2-q+1) != 1");
  for (auto ell : prime_factors(s_full))
    check_invariant(mat_pow(F2, Z, s_full / ell) != kIdentity, "Z order proper divisor");
  // Z fixes the triangle pointwise
  WMat3 Zh = embed_mat(Z, emb);
  for (int i = 0; i < 3; ++i) {
    V3 img = tapply(F6, Zh, out.evecs[i]);
    check_invariant(h6.pack(h6.normalize(img)) == h6.pack(h6.normalize(out.evecs[i])),
                    "Z does not fix the imaginary triangle pointwise");
  }
  out.Z = Z;

  // g = Z^m with alpha = zeta^m
  std::uint64_t m = 0;
  {
    std::uint32_t x = 1;
    bool found = false;
    for (std::uint64_t i = 0; i < s_full; ++i) {
      if (x == alpha) {
        m = i;
        found = true;
        break;
      }
      x = F6.mul(x, zeta);
    }
    check_invariant(found, "alpha not a power of zeta");
  }
  check_invariant(mat_pow(F2, Z, m) == g, "g is not the expected power of Z");
  out.power = m;

  out.sigma_id = t.id_of(Z);
  out.sigma_order = t.element_order(out.sigma_id);
  check_invariant(out.sigma_order == s_full / pp.gcd3(), "sigma order != (q^2-q+1)/gcd(3,q+1)");
  return out;
}

bool stabilizes_big_triangle(const Field& F2, const Field& F6, const Mat3& m,
                             const BigTriangle& tri) {
  const Herm h6(F6);
  WMat3 mh = embed_mat(m, embedding(F2, F6));
  std::array<std::uint64_t, 3> img;
  for (int i = 0; i < 3; ++i) {
    V3 v = h6.unpack(tri.key[i]);
    img[i] = h6.pack(h6.normalize(tapply(F6, mh, v)));
  }
  std::sort(img.begin(), img.end());
  return img == tri.key;
}

ImagOrbit build_imag_orbit(const GroupTable& t, const UnitaryGeometry& geo, const Field& F6,
                           unsigned jobs) {
  const Field& F2 = t.field();
  const PrimePower& pp = t.prime_power();
  if (jobs == 0) jobs = default_jobs();

  // Seed: least-id Type3 element.
  std::uint32_t seed = 0;
  bool found = false;
  for (std::uint64_t i = 0; i < t.order(); ++i) {
    if (classify(geo, t.mat(static_cast<std::uint32_t>(i))).kind == ElementKind::Type3) {
      seed = static_cast<std::uint32_t>(i);
      found = true;
      break;
    }
  }
  require(found, "group has no Type3 elements (q = 2)");
  auto seed_data = imaginary_triangle(t, geo, t.mat(seed), F6);

  ImagOrbit orbit;
  orbit.seed_id = seed;
  orbit.seed_Z = seed_data.Z;

  const Herm h6(F6);
  const auto& etab = embedding(F2, F6);
  const std::array<std::uint64_t, 3>& base = seed_data.triangle.key;
  std::array<V3, 3> base_v;
  for (int i = 0; i < 3; ++i) base_v[i] = h6.unpack(base[i]);

  // Orbit pass: each worker maps its id range; merged keeping the least
  // transporter id per triangle for determinism.
  struct Hit {
    BigTriangle tri;
    std::uint32_t transporter;
  };
  std::vector<std::vector<Hit>> parts(jobs);
  parallel_chunks(t.order(), jobs, [&](std::uint64_t lo, std::uint64_t hi, unsigned w) {
    std::unordered_map<std::uint64_t, std::size_t> seen;  // key[0]+key[1] hash probe
    auto& out = parts[w];
    for (std::uint64_t i = lo; i < hi; ++i) {
      WMat3 mh = embed_mat(t.mat(static_cast<std::uint32_t>(i)), etab);
      BigTriangle tri;
      for (int v = 0; v < 3; ++v) tri.key[v] = h6.pack(h6.normalize(tapply(F6, mh, base_v[v])));
      std::sort(tri.key.begin(), tri.key.end());
      std::uint64_t probe = tri.key[0] * 1000003u ^ tri.key[1] * 10007u ^ tri.key[2];
      auto it = seen.find(probe);
      if (it != seen.end() && out[it->second].tri == tri) continue;
      seen[probe] = out.size();
      out.push_back({tri, static_cast<std::uint32_t>(i)});
    }
  });
  std::map<BigTriangle, std::uint32_t> transporter;
  for (const auto& part : parts)
    for (const auto& hit : part) {
      auto it = transporter.find(hit.tri);
      if (it == transporter.end() || hit.transporter < it->second)
        transporter[hit.tri] = hit.transporter;
    }

  const std::uint64_t expected =
      pp.q * pp.q * pp.q * (pp.q + 1) * (pp.q + 1) * (pp.q - 1) / 3;
  check_invariant(transporter.size() == expected,
                  "imaginary triangle class size != q^3(q+1)^2(q-1)/3");

  orbit.triangles.reserve(transporter.size());
  for (const auto& [tri, g] : transporter) orbit.triangles.push_back(tri);

  // Membership map: powers of the conjugated pointwise stabilizer generator.
  orbit.elem_to_triangle.assign(t.order(), UINT32_MAX);
  std::vector<std::pair<BigTriangle, std::uint32_t>> items(transporter.begin(), transporter.end());
  std::atomic<bool> collision{false};
  parallel_chunks(items.size(), jobs, [&](std::uint64_t lo, std::uint64_t hi, unsigned) {
    for (std::uint64_t ti = lo; ti < hi; ++ti) {
      const auto& [tri, gid] = items[ti];
      std::uint32_t tri_index = static_cast<std::uint32_t>(
          std::lower_bound(orbit.triangles.begin(), orbit.triangles.end(), tri) -
          orbit.triangles.begin());
      Mat3 gm = t.mat(gid);
      Mat3 z = mat_mul(F2, mat_mul(F2, gm, seed_data.Z), mat_inverse(F2, gm));
      Mat3 x = z;
      const std::uint64_t s_full = pp.q * pp.q - pp.q + 1;
      for (std::uint64_t k = 1; k < s_full; ++k) {
        if (classify(geo, x).kind == ElementKind::Type3) {
          std::uint32_t id = t.id_of(x);
          std::atomic_ref<std::uint32_t> cell(orbit.elem_to_triangle[id]);
          std::uint32_t prev = cell.exchange(tri_index);
          if (prev != UINT32_MAX && prev != tri_index) collision.store(true);
        }
        x = mat_mul(F2, x, z);
      }
      check_invariant(x == kIdentity, "conjugated Z has wrong order");
    }
  });
  check_invariant(!collision.load(),
                  "type 3 element attached to two distinct imaginary triangles");
  return orbit;
}

// ---------------------------------------------------------------------------

std::uint64_t abs_point_stab_order(const PrimePower& q) {
  return q.q * q.q * q.q * (q.q + 1) * (q.q - 1) / q.gcd3();
}
std::uint64_t nonabs_point_stab_order(const PrimePower& q) {
  return q.q * (q.q + 1) * (q.q + 1) * (q.q - 1) / q.gcd3();
}
std::uint64_t triangle_stab_order(const PrimePower& q) {
  return 6 * (q.q + 1) * (q.q + 1) / q.gcd3();
}
std::uint64_t imag_triangle_stab_order(const PrimePower& q) {
  return 3 * (q.q * q.q - q.q + 1) / q.gcd3();
}

std::vector<std::uint32_t> stabilizer_members(const SubgroupHandle& h, const GroupTable& t,
                                              const UnitaryGeometry& geo, const Field* F6,
                                              unsigned jobs) {
  if (h.kind == SubgroupHandle::Kind::Explicit) return h.explicit_ids;
  if (jobs == 0) jobs = default_jobs();
  const Field& F = t.field();
  std::vector<std::vector<std::uint32_t>> parts(jobs);
  auto fixes_point = [&](const Mat3& m, std::uint32_t pid) {
    V3 img = mat_apply(F, m, geo.coords(pid));
    return geo.id_of(img) == pid;
  };
  parallel_chunks(t.order(), jobs, [&](std::uint64_t lo, std::uint64_t hi, unsigned w) {
    for (std::uint64_t i = lo; i < hi; ++i) {
      const Mat3& m = t.mat(static_cast<std::uint32_t>(i));
      bool in = false;
      switch (h.kind) {
        case SubgroupHandle::Kind::AbsPoint:
        case SubgroupHandle::Kind::NonAbsPoint:
          in = fixes_point(m, h.point);
          break;
        case SubgroupHandle::Kind::Triangle: {
          std::array<std::uint32_t, 3> img;
          for (int v = 0; v < 3; ++v)
            img[v] = geo.id_of(mat_apply(F, m, geo.coords(h.triangle.v[v])));
          std::sort(img.begin(), img.end());
          in = img == h.triangle.v;
          break;
        }
        case SubgroupHandle::Kind::ImagTriangle:
          require(F6 != nullptr, "imaginary triangle membership needs GF(q^6)");
          in = stabilizes_big_triangle(F, *F6, m, h.big);
          break;
        case SubgroupHandle::Kind::Explicit:
          break;
      }
      if (in) parts[w].push_back(static_cast<std::uint32_t>(i));
    }
  });
  std::vector<std::uint32_t> out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::uint8_t> omega_flags(const GroupTable& t, unsigned jobs) {
  const Field& F = t.field();
  const std::uint64_t q3 = t.prime_power().q * t.prime_power().q * t.prime_power().q;
  if (jobs == 0) jobs = default_jobs();
  std::vector<std::uint8_t> flags(t.order(), 0);
  parallel_chunks(t.order(), jobs, [&](std::uint64_t lo, std::uint64_t hi, unsigned) {
    for (std::uint64_t i = lo; i < hi; ++i) {
      Mat3 p = mat_pow(F, t.mat(static_cast<std::uint32_t>(i)), q3);
      flags[i] = (t.canonical(p) == t.mat(t.identity_id())) &&
                 (static_cast<std::uint32_t>(i) != t.identity_id());
    }
  });
  return flags;
}

std::vector<std::uint32_t> sylow_p_subgroup(const GroupTable& t, const UnitaryGeometry& geo,
                                            std::uint32_t absolute_point) {
  require(geo.absolute(absolute_point), "sylow subgroup is attached to an absolute point");
  const Field& F = t.field();
  const std::uint64_t q3 = t.prime_power().q * t.prime_power().q * t.prime_power().q;
  std::vector<std::uint32_t> out;
  for (std::uint64_t i = 0; i < t.order(); ++i) {
    const Mat3& m = t.mat(static_cast<std::uint32_t>(i));
    V3 img = mat_apply(F, m, geo.coords(absolute_point));
    if (geo.id_of(img) != absolute_point) continue;
    if (t.canonical(mat_pow(F, m, q3)) == t.mat(t.identity_id()))
      out.push_back(static_cast<std::uint32_t>(i));
  }
  return out;
}

SylowReport sylow_p_census(const GroupTable& t, const UnitaryGeometry& geo, unsigned jobs) {
  const PrimePower& pp = t.prime_power();
  const Field& F = t.field();
  const std::uint64_t q3 = pp.q * pp.q * pp.q;
  SylowReport rep;
  rep.subgroup_order = q3;
  rep.count = geo.n_absolute();

  // One pass: each nonidentity p-singular element fixes exactly one absolute
  // point (its Sylow subgroup); a second absolute fixed point would mean two
  // Sylow subgroups share it, so uniqueness here IS the trivial-intersection
  // claim.
  if (jobs == 0) jobs = default_jobs();
  std::vector<std::uint64_t> bucket(geo.n_points(), 0);
  std::atomic<bool> unique_home{true};
  std::atomic<std::uint64_t> union_size{0};
  std::vector<std::vector<std::uint64_t>> buckets(jobs,
                                                  std::vector<std::uint64_t>(geo.n_points(), 0));
  parallel_chunks(t.order(), jobs, [&](std::uint64_t lo, std::uint64_t hi, unsigned w) {
    for (std::uint64_t i = lo; i < hi; ++i) {
      if (i == t.identity_id()) continue;
      const Mat3& m = t.mat(static_cast<std::uint32_t>(i));
      if (t.canonical(mat_pow(F, m, q3)) != t.mat(t.identity_id())) continue;
      auto full = classify_full(geo, m);
      if (full.fixed_absolute.size() != 1) unique_home.store(false);
      check_invariant(!full.fixed_absolute.empty(), "p-singular element fixes no absolute point");
      ++buckets[w][full.fixed_absolute.front()];
      union_size.fetch_add(1);
    }
  });
  for (const auto& b : buckets)
    for (std::uint32_t p = 0; p < geo.n_points(); ++p) bucket[p] += b[p];
  rep.union_size = union_size.load();
  rep.intersections_trivial = unique_home.load();
  for (std::uint32_t p = 0; p < geo.n_points(); ++p) {
    if (geo.absolute(p))
      check_invariant(bucket[p] == q3 - 1, "Sylow subgroup size != q^3 - 1 nonidentity");
    else
      check_invariant(bucket[p] == 0, "p-singular element charged to a nonabsolute point");
  }

  // nonabelian and exponent, from one explicit subgroup
  auto s0 = sylow_p_subgroup(t, geo, geo.absolute_points().front());
  check_invariant(s0.size() == q3, "Sylow subgroup order != q^3");
  rep.nonabelian = false;
  for (std::size_t i = 0; i < s0.size() && !rep.nonabelian; ++i)
    for (std::size_t j = i + 1; j < s0.size(); ++j) {
      if (mat_mul(F, t.mat(s0[i]), t.mat(s0[j])) != mat_mul(F, t.mat(s0[j]), t.mat(s0[i]))) {
        rep.nonabelian = true;
        break;
      }
    }
  rep.exponent = 1;
  for (auto id : s0) rep.exponent = std::max(rep.exponent, t.element_order(id));
  return rep;
}

bool is_closed_subgroup(const std::vector<std::uint32_t>& sub, const GroupTable& t) {
  std::vector<std::uint32_t> sorted = sub;
  std::sort(sorted.begin(), sorted.end());
  for (auto a : sub)
    for (auto b : sub)
      if (!std::binary_search(sorted.begin(), sorted.end(), t.mul(a, b))) return false;
  return true;
}

std::vector<std::uint32_t> normalizer(const std::vector<std::uint32_t>& sub, const GroupTable& t) {
  require(is_closed_subgroup(sub, t), "normalizer requires a closed subgroup");
  std::vector<std::uint32_t> sorted = sub;
  std::sort(sorted.begin(), sorted.end());
  const Field& F = t.field();
  std::vector<std::uint32_t> out;
  for (std::uint64_t g = 0; g < t.order(); ++g) {
    const Mat3& gm = t.mat(static_cast<std::uint32_t>(g));
    Mat3 gi = mat_inverse(F, gm);
    bool normalizes = true;
    for (auto s : sorted) {
      Mat3 c = mat_mul(F, mat_mul(F, gm, t.mat(s)), gi);
      if (!std::binary_search(sorted.begin(), sorted.end(), t.id_of(c))) {
        normalizes = false;
        break;
      }
    }
    if (normalizes) out.push_back(static_cast<std::uint32_t>(g));
  }
  return out;
}

std::uint64_t elation_census(const GroupTable& t, const UnitaryGeometry& geo,
                             const std::vector<std::uint8_t>& omega, std::uint32_t nonabs_point) {
  require(!geo.absolute(nonabs_point), "elation census is about nonabsolute points");
  const Field& F = t.field();
  std::uint64_t n = 0;
  for (std::uint64_t i = 0; i < t.order(); ++i) {
    if (!omega[i]) continue;
    V3 img = mat_apply(F, t.mat(static_cast<std::uint32_t>(i)), geo.coords(nonabs_point));
    if (geo.id_of(img) == nonabs_point) ++n;
  }
  return n;
}

}  // namespace ucov
