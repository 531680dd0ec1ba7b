#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <memory>

#include "ucov/cover.hpp"

using namespace ucov;

namespace {
struct Ctx {
  PrimePower pp;
  std::unique_ptr<UnitaryGeometry> geo;
  GroupTable table;
  std::shared_ptr<const Field> F6;
  ImagOrbit orbit;
};
Ctx& ctx(std::uint64_t q) {
  static std::map<std::uint64_t, std::unique_ptr<Ctx>> cache;
  auto it = cache.find(q);
  if (it == cache.end()) {
    auto pp = PrimePower::parse(q);
    auto geo = std::make_unique<UnitaryGeometry>(pp);
    auto table = GroupTable::build(pp);
    auto F6 = Field::make(pp.p, 6 * pp.a);
    auto orbit = build_imag_orbit(table, *geo, *F6);
    auto c = std::make_unique<Ctx>(
        Ctx{pp, std::move(geo), std::move(table), F6, std::move(orbit)});
    it = cache.emplace(q, std::move(c)).first;
  }
  return *it->second;
}
}  // namespace

TEST_CASE("k formula") {
  CHECK(k_formula(PrimePower::parse(9)) == 1);
  CHECK(k_formula(PrimePower::parse(27)) == 1);
  CHECK(k_formula(PrimePower::parse(7)) == 344);
  CHECK(k_formula(PrimePower::parse(8)) == 513);
}

TEST_CASE("bounds spot values") {
  auto b7 = bounds(PrimePower::parse(7));
  CHECK(b7.T == 43904);
  CHECK(b7.lower == 44248);
  CHECK(b7.upper == 45669);
  auto b8 = bounds(PrimePower::parse(8));
  CHECK(b8.lower == 97281);
  CHECK(b8.upper == 98881);
  auto b9 = bounds(PrimePower::parse(9));
  CHECK(b9.lower == 194401);
  CHECK(b9.upper == 200171);
  CHECK(b9.k == 1);
  CHECK(b9.m == 872);
}

TEST_CASE("bounds invariants across 7 <= q <= 1024") {
  auto rows = bounds_table(7, 1024);
  CHECK(rows.size() == prime_powers_in(7, 1024).size());
  for (const auto& r : rows) {
    CHECK(r.lower <= r.upper);
    CHECK(r.lower_simple <= r.lower);
    CHECK(r.upper <= r.upper_simple);
    // independent big-integer re-evaluation of the closed forms
    BigInt q(r.q), q2 = q * q, q3 = q2 * q, q4 = q3 * q;
    BigInt T = q3 * (q + 1) * (q + 1) * (q - 1) / 3;
    CHECK(r.T == T);
    CHECK(r.lower == r.k + T);
    CHECK(r.upper == q4 + q2 + 1 - r.m + T);
  }
}

TEST_CASE("asymptotic envelope |ratio - 1| <= 8/q for q >= 7") {
  for (const auto& row : asymptotic_report(1024)) {
    if (row.q >= 7) CHECK(row.within_envelope);
  }
  // spot: q = 7 upper ratio
  auto b7 = bounds(PrimePower::parse(7));
  CHECK(b7.ratio_upper == doctest::Approx(45669.0 * 3 / 117649.0).epsilon(1e-12));
}

TEST_CASE("cover with S = empty at q = 3: 379 handles, full coverage") {
  auto& c = ctx(3);
  VertexSubset empty;
  empty.verified_trifree = true;
  auto spec = build_cover(c.table, *c.geo, c.orbit, empty);
  CHECK(spec.n_abs == 28);
  CHECK(spec.n_sprime == 63);
  CHECK(spec.n_imag == 288);
  CHECK(spec.handle_count() == 379);
  CHECK(spec.declared_size == 379);

  auto cert = verify_cover(spec, c.table, *c.geo, c.orbit);
  CHECK(cert.ok);
  CHECK(cert.covered == 6048);
  CHECK(cert.total == 6048);
  CHECK(cert.type1 == 3942);
  CHECK(cert.type2 == 378);
  CHECK(cert.type3 == 1728);
}

TEST_CASE("cover size shrinks by one per S vertex") {
  auto& c = ctx(3);
  VertexSubset s;
  s.verified_trifree = true;
  std::uint32_t v = 0;
  while (c.geo->absolute(v)) ++v;
  s.ids = {v};
  auto spec = build_cover(c.table, *c.geo, c.orbit, s);
  CHECK(spec.handle_count() == 378);
  auto cert = verify_cover(spec, c.table, *c.geo, c.orbit);
  CHECK(cert.ok);  // a single vertex is always triangle-free
}

TEST_CASE("adversarial S containing a self-polar triangle yields a type 2 witness") {
  auto& c = ctx(3);
  auto tris = c.geo->self_polar_triangles();
  VertexSubset bad;
  bad.ids.assign(tris[0].v.begin(), tris[0].v.end());
  bad.verified_trifree = true;  // forged flag: verification must still catch it
  auto spec = build_cover(c.table, *c.geo, c.orbit, bad);
  auto cert = verify_cover(spec, c.table, *c.geo, c.orbit);
  CHECK_FALSE(cert.ok);
  CHECK(cert.witness_id != UINT32_MAX);
  CHECK(cert.covered < cert.total);
  // the witness is a type 2 element fixing exactly that triangle
  auto cls = classify(*c.geo, c.table.mat(cert.witness_id));
  CHECK(cls.kind == ElementKind::Type2);
  CHECK(cls.triangle == tris[0]);

  VertexSubset unverified;
  CHECK_THROWS_AS(build_cover(c.table, *c.geo, c.orbit, unverified), std::invalid_argument);
}

TEST_CASE("cover with S = empty at q = 4") {
  auto& c = ctx(4);
  VertexSubset empty;
  empty.verified_trifree = true;
  auto spec = build_cover(c.table, *c.geo, c.orbit, empty);
  CHECK(spec.n_abs == 65);
  CHECK(spec.n_sprime == 208);
  CHECK(spec.n_imag == 1600);
  auto cert = verify_cover(spec, c.table, *c.geo, c.orbit);
  CHECK(cert.ok);
}

TEST_CASE("lower bound certificate at q = 4") {
  auto& c = ctx(4);
  auto cert = lower_bound_certificate(c.table, *c.geo, &c.orbit);
  CHECK(cert.omega_size == 4095);
  CHECK(cert.classes[0].value == 63);   // a1 = q^3 - 1
  CHECK(cert.classes[1].value == 15);   // a2 = q^2 - 1
  CHECK(cert.classes[3].value == 0);    // a4 = 0
  CHECK(cert.classes[2].value < 63);    // a3 < a1
  CHECK(cert.core_audit_ok);
  CHECK(cert.full_audit_ok);            // p = 2: X6 and X7 are empty
  CHECK_FALSE(cert.theorem_domain);     // q = 4 < 7: advisory
  CHECK(cert.implied_bound == 65 + 1600);
}

TEST_CASE("lower bound certificate at q = 2 (advisory: census identities only)") {
  // no fixed-point-free elements at q = 2, so the orbit is absent
  auto pp = PrimePower::parse(2);
  UnitaryGeometry geo(pp);
  auto table = GroupTable::build(pp);
  auto cert = lower_bound_certificate(table, geo, nullptr);
  CHECK(cert.omega_size == 63);
  CHECK(cert.classes[0].value == 7);  // a1 = q^3 - 1
  CHECK(cert.classes[1].value == 3);  // a2 = q^2 - 1
  CHECK(cert.classes[3].value == 0);
  CHECK_FALSE(cert.theorem_domain);
  // the q=2 triangle stabilizers hold 9 involutions, more than a1 = 7: the
  // audit honestly fails outside the theorem's q >= 7 domain
  CHECK(cert.classes[2].value == 9);
  CHECK_FALSE(cert.core_audit_ok);
  CHECK(cert.implied_bound == 9 + 24);
}

TEST_CASE("lower bound certificate rejects p = 3") {
  auto& c = ctx(3);
  CHECK_THROWS_AS(lower_bound_certificate(c.table, *c.geo, &c.orbit), std::domain_error);
}
