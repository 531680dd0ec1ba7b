#include "ucov/cover.hpp"

#include <algorithm>
#include <atomic>

#include "ucov/parallel.hpp"

namespace ucov {

std::uint64_t k_formula(const PrimePower& q) {
  return q.p == 3 ? 1 : 1 + q.q * q.q * q.q;
}

namespace {

BigInt big_T(std::uint64_t q) {
  return BigInt(q) * q * q * (BigInt(q) + 1) * (BigInt(q) + 1) * (BigInt(q) - 1) / 3;
}

double ratio_to_q6_over_3(const BigInt& v, std::uint64_t q) {
  BigInt q6 = BigInt(q) * q * q * q * q * q;
  return 3.0 * v.convert_to<double>() / q6.convert_to<double>();
}

}  // namespace

BoundsReport bounds(const PrimePower& pp) {
  const std::uint64_t q = pp.q;
  BoundsReport r;
  r.q = q;
  r.theorem_range = q >= 7;
  r.k = BigInt(k_formula(pp));
  r.m = BigInt(m_formula(pp));
  r.T = big_T(q);
  BigInt q2 = BigInt(q) * q, q3 = q2 * q, q4 = q3 * q;
  r.lower = r.k + r.T;
  r.upper = q4 + q2 + 1 - r.m + r.T;
  r.lower_simple = 1 + r.T;
  r.upper_simple = q4 - q3 - q2 + 2 * q + 2 + r.T;
  check_invariant(r.lower <= r.upper, "lower bound exceeds upper bound");
  check_invariant(r.lower_simple <= r.lower, "simplified lower not a relaxation");
  if (r.theorem_range)
    check_invariant(r.upper <= r.upper_simple, "simplified upper not a relaxation");
  r.ratio_lower = ratio_to_q6_over_3(r.lower, q);
  r.ratio_upper = ratio_to_q6_over_3(r.upper, q);
  return r;
}

std::vector<BoundsReport> bounds_table(std::uint64_t q_min, std::uint64_t q_max) {
  std::vector<BoundsReport> out;
  for (const auto& pp : prime_powers_in(q_min, q_max)) out.push_back(bounds(pp));
  return out;
}

std::vector<AsymptoticRow> asymptotic_report(std::uint64_t q_max) {
  std::vector<AsymptoticRow> out;
  for (const auto& pp : prime_powers_in(2, q_max)) {
    auto b = bounds(pp);
    AsymptoticRow row;
    row.q = pp.q;
    row.ratio_lower = b.ratio_lower;
    row.ratio_upper = b.ratio_upper;
    double tol = 8.0 / static_cast<double>(pp.q);
    row.within_envelope =
        std::abs(row.ratio_lower - 1.0) <= tol && std::abs(row.ratio_upper - 1.0) <= tol;
    out.push_back(row);
  }
  return out;
}

// ---------------------------------------------------------------------------

CoverSpec build_cover(const GroupTable& t, const UnitaryGeometry& geo, const ImagOrbit& orbit,
                      const VertexSubset& S) {
  require(S.verified_trifree, "cover refuses an unverified S");
  const std::uint64_t q = t.prime_power().q;
  require(q >= 3, "imaginary-triangle covers need q >= 3");

  CoverSpec spec;
  spec.q = q;
  spec.s_ids = S.ids;
  std::sort(spec.s_ids.begin(), spec.s_ids.end());
  std::vector<std::uint8_t> in_s(geo.n_points(), 0);
  for (auto v : spec.s_ids) {
    require(v < geo.n_points(), "S vertex out of range");
    require(!geo.absolute(v), "S must consist of nonabsolute points");
    in_s[v] = 1;
  }

  spec.in_sprime.assign(geo.n_points(), 0);
  for (std::uint32_t p = 0; p < geo.n_points(); ++p)
    if (!geo.absolute(p) && !in_s[p]) spec.in_sprime[p] = 1;
  spec.n_abs = geo.n_absolute();
  spec.n_sprime = 0;
  for (auto f : spec.in_sprime) spec.n_sprime += f;
  spec.n_imag = orbit.triangles.size();
  spec.declared_size = BigInt(q) * q * q * q + BigInt(q) * q + 1 - spec.s_ids.size() + big_T(q);
  check_invariant(BigInt(spec.handle_count()) == spec.declared_size,
                  "cover size formula mismatch");
  return spec;
}

CoverCertificate verify_cover(const CoverSpec& spec, const GroupTable& t,
                              const UnitaryGeometry& geo, const ImagOrbit& orbit, unsigned jobs) {
  require(spec.q == t.prime_power().q, "cover and table disagree on q");
  if (jobs == 0) jobs = default_jobs();

  struct Part {
    std::uint64_t t1 = 0, t2 = 0, t3 = 0, covered = 0;
    std::uint32_t witness = UINT32_MAX;
    std::string reason;
  };
  std::vector<Part> parts(jobs);
  parallel_chunks(t.order(), jobs, [&](std::uint64_t lo, std::uint64_t hi, unsigned w) {
    Part& part = parts[w];
    for (std::uint64_t i = lo; i < hi; ++i) {
      auto cls = classify(geo, t.mat(static_cast<std::uint32_t>(i)));
      bool ok = false;
      switch (cls.kind) {
        case ElementKind::Type1:
          ++part.t1;
          // every absolute point's stabilizer is in the cover
          ok = geo.absolute(cls.absolute_witness);
          if (!ok && part.witness == UINT32_MAX) part.reason = "type 1 witness not absolute";
          break;
        case ElementKind::Type2: {
          ++part.t2;
          // needs a vertex of its fixed triangle in S'
          for (auto v : cls.triangle.v) ok = ok || spec.in_sprime[v];
          if (!ok && part.witness == UINT32_MAX)
            part.reason = "type 2 element fixes a triangle entirely inside S";
          break;
        }
        case ElementKind::Type3:
          ++part.t3;
          // its imaginary triangle is in the cover's class by construction
          ok = orbit.elem_to_triangle[i] != UINT32_MAX;
          if (!ok && part.witness == UINT32_MAX)
            part.reason = "type 3 element missing from the stabilizer class map";
          break;
      }
      if (ok) ++part.covered;
      else if (part.witness == UINT32_MAX) part.witness = static_cast<std::uint32_t>(i);
    }
  });

  CoverCertificate cert;
  cert.total = t.order();
  for (const auto& p : parts) {
    cert.type1 += p.t1;
    cert.type2 += p.t2;
    cert.type3 += p.t3;
    cert.covered += p.covered;
    if (p.witness < cert.witness_id) {
      cert.witness_id = p.witness;
      cert.witness_reason = p.reason;
    }
  }
  cert.ok = cert.covered == cert.total;
  check_invariant(cert.type1 + cert.type2 + cert.type3 == cert.total, "census does not add up");
  return cert;
}

// ---------------------------------------------------------------------------

namespace {

bool is_square_in_gf(const Field& f, std::uint32_t x) {
  if (x == 0) return true;
  return f.pow(x, (f.size() - 1) / 2) == 1;
}

}  // namespace

LowerBoundCertificate lower_bound_certificate(const GroupTable& t, const UnitaryGeometry& geo,
                                              const ImagOrbit* orbit, unsigned jobs) {
  const PrimePower& pp = t.prime_power();
  const std::uint64_t q = pp.q;
  if (pp.p == 3) throw std::domain_error("the counting argument assumes p != 3");
  if (q > 5) throw resource_limit("exhaustive a_i audit capped at q <= 5");
  if (jobs == 0) jobs = default_jobs();

  LowerBoundCertificate cert;
  cert.q = q;
  cert.theorem_domain = q >= 7;
  const std::uint64_t q2 = q * q, q3 = q2 * q;
  const std::uint64_t a1_expected = q3 - 1, a2_expected = q2 - 1;

  auto omega = omega_flags(t, jobs);
  for (auto f : omega) cert.omega_size += f;
  check_invariant(cert.omega_size == q3 * q3 - 1, "Omega size != q^6 - 1");

  // X1/X2: bucket each p-singular element onto the points it fixes.
  std::vector<std::uint64_t> bucket(geo.n_points(), 0);
  for (std::uint64_t i = 0; i < t.order(); ++i) {
    if (!omega[i]) continue;
    auto full = classify_full(geo, t.mat(static_cast<std::uint32_t>(i)));
    for (auto p : full.fixed_points) ++bucket[p];
  }
  std::uint64_t a1 = 0, a2 = 0;
  for (std::uint32_t p = 0; p < geo.n_points(); ++p) {
    if (geo.absolute(p)) a1 = std::max(a1, bucket[p]);
    else a2 = std::max(a2, bucket[p]);
  }

  // X3: setwise stabilizers of self-polar triangles, full enumeration.
  std::uint64_t a3 = 0;
  {
    auto tris = geo.self_polar_triangles();
    const Field& F = t.field();
    std::vector<std::uint64_t> per_tri(tris.size(), 0);
    for (std::uint64_t i = 0; i < t.order(); ++i) {
      if (!omega[i]) continue;
      const Mat3& m = t.mat(static_cast<std::uint32_t>(i));
      for (std::size_t k = 0; k < tris.size(); ++k) {
        std::array<std::uint32_t, 3> img;
        for (int v = 0; v < 3; ++v)
          img[v] = geo.id_of(mat_apply(F, m, geo.coords(tris[k].v[v])));
        std::sort(img.begin(), img.end());
        if (img == tris[k].v) ++per_tri[k];
      }
    }
    for (auto c : per_tri) a3 = std::max(a3, c);
  }

  // X4: one representative imaginary-triangle stabilizer; |H ∩ Omega| is
  // constant on the conjugacy class because Omega is conjugation-invariant.
  std::uint64_t a4 = 0;
  const bool has_imag = orbit && !orbit->triangles.empty();
  if (has_imag) {
    const Field& F2 = t.field();
    auto F6 = Field::make(pp.p, 6 * pp.a);
    const BigTriangle& rep = orbit->triangles.front();
    for (std::uint64_t i = 0; i < t.order(); ++i) {
      if (!omega[i]) continue;
      if (stabilizes_big_triangle(F2, *F6, t.mat(static_cast<std::uint32_t>(i)), rep)) ++a4;
    }
  }

  cert.classes[0] = {"X1 absolute-point stabilizers", true, true, a1, a1 == a1_expected,
                     "enumerated over every absolute point"};
  cert.classes[1] = {"X2 nonabsolute-point stabilizers", true, true, a2,
                     a2 == a2_expected && a2 < a1, "enumerated over every nonabsolute point"};
  cert.classes[2] = {"X3 triangle stabilizers", true, true, a3, a3 < a1,
                     "enumerated over every self-polar triangle"};
  cert.classes[3] = {"X4 imaginary-triangle stabilizers", has_imag, has_imag, a4, a4 == 0,
                     has_imag ? "representative stabilizer; constant on the conjugacy class"
                              : "no fixed-point-free elements at this q"};

  // X5: subfield subgroups, q = q0^k with k odd >= 3.
  {
    bool nonempty = false;
    std::uint64_t bound = 0;
    for (std::uint32_t k = 3; k <= pp.a; k += 2) {
      if (pp.a % k) continue;
      std::uint64_t q0 = ipow(pp.p, pp.a / k);
      nonempty = true;
      bound = std::max(bound, ipow(q0, 6) - 1);
    }
    cert.classes[4] = {"X5 subfield subgroups", false, nonempty, bound,
                       !nonempty || bound < a1_expected, "bound q0^6 - 1"};
  }
  // X6: conic stabilizers, p odd.
  {
    bool nonempty = pp.p != 2;
    std::uint64_t bound = nonempty ? (q - 1) * (q2 - 1) : 0;
    cert.classes[5] = {"X6 conic stabilizers", false, nonempty, bound,
                       !nonempty || bound < a1_expected, "bound (q-1)(q^2-1)"};
  }
  // X7: exceptional maximal subgroups; order-p element counts per type.
  {
    bool nonempty = false;
    std::uint64_t bound = 0;
    std::string note = "types present:";
    bool resolvable = true;
    if (pp.p != 2) {
      auto fq = Field::make(pp.p, pp.a);
      std::uint32_t minus7 = fq->neg(static_cast<std::uint32_t>(7 % pp.p));
      bool has168 = !is_square_in_gf(*fq, minus7);
      bool hessian = (q + 1) % 3 == 0;
      bool has360 = is_square_in_gf(*fq, static_cast<std::uint32_t>(5 % pp.p)) && (q - 1) % 3 != 0;
      bool has720 = pp.p == 5 && pp.a % 2 == 1;
      if (has168) {
        nonempty = true;
        note += " L3(2)";
        bound = std::max<std::uint64_t>(bound, pp.p == 7 ? 48 : 0);
      }
      if (hessian) {
        nonempty = true;
        note += " Hessian";
        // orders 36/72/216 are {2,3}-groups: no elements of order p >= 5
      }
      if (has360) {
        nonempty = true;
        note += " A6";
        bound = std::max<std::uint64_t>(bound, pp.p == 5 ? 144 : 0);
      }
      if (has720) {
        nonempty = true;
        note += " A6.2 A7";
        bound = std::max<std::uint64_t>(bound, 504);
        // the argument resolves A7 through p = 5, q >= 7 => q >= 25
        resolvable = q >= 25;
      }
    }
    if (!nonempty) note = "empty";
    cert.classes[6] = {"X7 exceptional subgroups", false, nonempty, bound,
                       !nonempty || (resolvable && bound < a1_expected), note};
  }

  cert.core_audit_ok = a1 == a1_expected && a2 == a2_expected && a4 == 0 && a2 < a1 && a3 < a1;
  cert.full_audit_ok = cert.core_audit_ok;
  for (const auto& c : cert.classes) cert.full_audit_ok = cert.full_audit_ok && c.established;

  // The chain: sum a_i x_i >= q^6 - 1 with a_i <= a1 gives
  // sum x_i >= ceil((q^6-1)/(q^3-1)) = q^3 + 1, plus the forced x4 = T.
  BigInt q6m1 = BigInt(q3) * q3 - 1;
  BigInt chain = q6m1 / (q3 - 1) + (q6m1 % (q3 - 1) == 0 ? 0 : 1);
  check_invariant(chain == BigInt(q3) + 1, "inequality chain does not reduce to q^3 + 1");
  cert.implied_bound = chain + big_T(q);
  return cert;
}

}  // namespace ucov
