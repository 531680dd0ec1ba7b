#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <memory>
#include <random>
#include <set>

#include "ucov/group.hpp"

using namespace ucov;

namespace {

struct Ctx {
  PrimePower pp;
  std::unique_ptr<UnitaryGeometry> geo;
  GroupTable table;
  std::shared_ptr<const Field> F6;
};

Ctx& ctx(std::uint64_t q) {
  static std::map<std::uint64_t, std::unique_ptr<Ctx>> cache;
  auto it = cache.find(q);
  if (it == cache.end()) {
    auto pp = PrimePower::parse(q);
    auto c = std::make_unique<Ctx>(Ctx{pp, std::make_unique<UnitaryGeometry>(pp),
                                       GroupTable::build(pp), Field::make(pp.p, 6 * pp.a)});
    it = cache.emplace(q, std::move(c)).first;
  }
  return *it->second;
}

}  // namespace

TEST_CASE("is_unitary") {
  auto& c = ctx(3);
  const Field& F = c.table.field();
  CHECK(is_unitary(F, kIdentity));
  // diag(l, m, (lm)^-1) with l^(q+1) = m^(q+1) = 1
  std::uint32_t mu = 0;
  for (std::uint32_t x = 2; x < F.size(); ++x)
    if (F.element_order(x) == c.pp.q + 1) {
      mu = x;
      break;
    }
  REQUIRE(mu != 0);
  Mat3 d{1, 0, 0, 0, static_cast<std::uint16_t>(mu), 0, 0, 0,
         static_cast<std::uint16_t>(F.inv(mu))};
  CHECK(is_unitary(F, d));
  CHECK(mat_det(F, d) == 1);
  // diag(g, 1, 1) with g a generator is not unitary for q > 2
  Mat3 bad = kIdentity;
  bad[0] = static_cast<std::uint16_t>(F.generator());
  CHECK_FALSE(is_unitary(F, bad));
}

TEST_CASE("SU3 enumeration counts and contracts") {
  for (std::uint64_t q : {2, 3}) {
    auto& c = ctx(q);
    const Field& F = c.table.field();
    std::uint64_t n = 0;
    std::uint64_t checked = 0;
    n = for_each_su3(F, [&](const Mat3& m) {
      if (checked < 500) {
        CHECK(is_unitary(F, m));
        CHECK(mat_det(F, m) == 1);
        ++checked;
      }
    });
    CHECK(n == GroupTable::expected_su_order(c.pp));
  }
  CHECK(GroupTable::expected_su_order(PrimePower::parse(2)) == 216);
  CHECK(GroupTable::expected_su_order(PrimePower::parse(3)) == 6048);
}

TEST_CASE("U3(q) table orders") {
  CHECK(ctx(2).table.order() == 72);
  CHECK(ctx(3).table.order() == 6048);
  CHECK(ctx(4).table.order() == 62400);
  CHECK(ctx(5).table.order() == 126000);
  CHECK(GroupTable::expected_order(PrimePower::parse(7)) == 5663616);
  CHECK_THROWS_AS(GroupTable::build(PrimePower::parse(9)), resource_limit);
}

TEST_CASE("group closure and inverses on random samples") {
  for (std::uint64_t q : {2, 3, 5}) {
    auto& c = ctx(q);
    std::mt19937_64 rng(q);
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(c.table.order() - 1));
    for (int i = 0; i < 2000; ++i) {
      std::uint32_t a = pick(rng), b = pick(rng);
      std::uint32_t ab = c.table.mul(a, b);
      CHECK(ab < c.table.order());
      CHECK(c.table.mul(c.table.inverse(a), a) == c.table.identity_id());
      CHECK(c.table.mul(c.table.inverse(ab), c.table.mul(a, b)) == c.table.identity_id());
    }
  }
}

TEST_CASE("classification: identity, torus element, order-7 elements at q=3") {
  auto& c = ctx(3);
  const Field& F = c.table.field();
  auto id_cls = classify(*c.geo, kIdentity);
  CHECK(id_cls.kind == ElementKind::Type1);

  // diag(1, mu, mu^-1) with |mu| = q+1 fixes the standard frame
  std::uint32_t mu = 0;
  for (std::uint32_t x = 2; x < F.size(); ++x)
    if (F.element_order(x) == 4) {
      mu = x;
      break;
    }
  Mat3 d{1, 0, 0, 0, static_cast<std::uint16_t>(mu), 0, 0, 0,
         static_cast<std::uint16_t>(F.inv(mu))};
  auto cls = classify(*c.geo, d);
  CHECK(cls.kind == ElementKind::Type2);
  Triangle frame{{c.geo->id_of({1, 0, 0}), c.geo->id_of({0, 1, 0}), c.geo->id_of({0, 0, 1})}};
  std::sort(frame.v.begin(), frame.v.end());
  CHECK(cls.triangle == frame);

  // every element of order 7 classifies Type3
  std::uint64_t order7 = 0;
  for (std::uint32_t i = 0; i < c.table.order(); ++i) {
    if (c.table.element_order(i) == 7) {
      ++order7;
      if (order7 <= 50) CHECK(classify(*c.geo, c.table.mat(i)).kind == ElementKind::Type3);
    }
  }
  CHECK(order7 == 1728);
}

TEST_CASE("type census: frozen regression values for q=2 and q=3") {
  auto c2 = type_census(ctx(2).table, *ctx(2).geo);
  CHECK(c2.type1 == 64);
  CHECK(c2.type2 == 8);
  CHECK(c2.type3 == 0);  // reported, not asserted by the theory (q = 2)
  CHECK(c2.total() == 72);

  auto c3 = type_census(ctx(3).table, *ctx(3).geo);
  CHECK(c3.type1 == 3942);
  CHECK(c3.type2 == 378);
  CHECK(c3.type3 == 1728);
  CHECK(c3.total() == 6048);
}

TEST_CASE("census identities at q=4: type2 = 6 per triangle, type3 = (s-1) per imaginary triangle") {
  auto& c = ctx(4);
  auto census = type_census(c.table, *c.geo);
  CHECK(census.total() == c.table.order());
  CHECK(census.type3 > 0);  // existence for q > 2
  // 416 self-polar triangles, each fixed by exactly the distinct-eigenvalue
  // torus elements; 1600 imaginary triangles with cyclic sigma of order 13
  CHECK(census.type3 == 1600 * 12);
  CHECK(census.type2 == 416 * 12);
}

TEST_CASE("classify is constant on conjugacy classes (samples)") {
  auto& c = ctx(3);
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(c.table.order() - 1));
  const Field& F = c.table.field();
  for (int i = 0; i < 300; ++i) {
    std::uint32_t g = pick(rng), h = pick(rng);
    Mat3 hm = c.table.mat(h);
    Mat3 conj = mat_mul(F, mat_mul(F, hm, c.table.mat(g)), mat_inverse(F, hm));
    CHECK(classify(*c.geo, conj).kind == classify(*c.geo, c.table.mat(g)).kind);
  }
}

TEST_CASE("Theorem 6 exactness: every Type2 element fixes exactly 3 points forming a self-polar triangle") {
  for (std::uint64_t q : {2, 3, 4}) {
    auto& c = ctx(q);
    std::uint64_t checked = 0;
    for (std::uint32_t i = 0; i < c.table.order(); ++i) {
      auto full = classify_full(*c.geo, c.table.mat(i));
      if (full.kind != ElementKind::Type2) continue;
      CHECK(full.fixed_points.size() == 3);
      CHECK(full.fixed_absolute.empty());
      CHECK(c.geo->is_self_polar(full.triangle));
      ++checked;
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("stabilizer orders match the maximal-subgroup formulas") {
  // q=3: 216, 96, 96, 21 / q=5 absolute: 1000
  auto& c3 = ctx(3);
  CHECK(abs_point_stab_order(c3.pp) == 216);
  CHECK(nonabs_point_stab_order(c3.pp) == 96);
  CHECK(triangle_stab_order(c3.pp) == 96);
  CHECK(imag_triangle_stab_order(c3.pp) == 21);
  CHECK(abs_point_stab_order(PrimePower::parse(5)) == 1000);

  auto abs_pts = c3.geo->absolute_points();
  SubgroupHandle h1{SubgroupHandle::Kind::AbsPoint, abs_pts[0]};
  auto m1 = stabilizer_members(h1, c3.table, *c3.geo, nullptr);
  CHECK(m1.size() == 216);

  std::uint32_t nonabs = 0;
  while (c3.geo->absolute(nonabs)) ++nonabs;
  SubgroupHandle h2{SubgroupHandle::Kind::NonAbsPoint, nonabs};
  auto m2 = stabilizer_members(h2, c3.table, *c3.geo, nullptr);
  CHECK(m2.size() == 96);

  auto tris = c3.geo->self_polar_triangles();
  SubgroupHandle h3{SubgroupHandle::Kind::Triangle};
  h3.triangle = tris[0];
  auto m3 = stabilizer_members(h3, c3.table, *c3.geo, nullptr);
  CHECK(m3.size() == 96);

  // identity belongs to every stabilizer
  CHECK(std::count(m1.begin(), m1.end(), c3.table.identity_id()) == 1);
  CHECK(std::count(m2.begin(), m2.end(), c3.table.identity_id()) == 1);
  CHECK(std::count(m3.begin(), m3.end(), c3.table.identity_id()) == 1);
}

TEST_CASE("imaginary triangle construction at q=3") {
  auto& c = ctx(3);
  // find an order-7 (Type3) element
  std::uint32_t g = 0;
  while (classify(*c.geo, c.table.mat(g)).kind != ElementKind::Type3) ++g;
  auto data = imaginary_triangle(c.table, *c.geo, c.table.mat(g), *c.F6);
  CHECK(data.sigma_order == 7);
  CHECK(c.F6->pow(data.alpha, 7) == 1);
  CHECK(data.triangle.key[0] < data.triangle.key[1]);
  CHECK(data.triangle.key[1] < data.triangle.key[2]);
  // Z descends to GF(q^2), has order 7, and its image's stabilizer covers g
  CHECK(mat_pow(c.table.field(), data.Z, 7) == kIdentity);
  CHECK(mat_pow(c.table.field(), data.Z, data.power) == c.table.mat(g));

  // the imaginary-triangle stabilizer has the Mitchell order 21
  SubgroupHandle h{SubgroupHandle::Kind::ImagTriangle};
  h.big = data.triangle;
  auto members = stabilizer_members(h, c.table, *c.geo, c.F6.get());
  CHECK(members.size() == 21);

  CHECK_THROWS_AS(imaginary_triangle(c.table, *c.geo, kIdentity, *c.F6), std::invalid_argument);
}

TEST_CASE("Theorem 8 exhaustively at q=3,4: alpha relations and sigma membership") {
  for (std::uint64_t q : {3, 4}) {
    auto& c = ctx(q);
    const std::uint64_t s = (q * q - q + 1) / c.pp.gcd3();
    std::uint64_t seen = 0;
    for (std::uint32_t i = 0; i < c.table.order() && seen < 400; ++i) {
      if (classify(*c.geo, c.table.mat(i)).kind != ElementKind::Type3) continue;
      ++seen;
      auto data = imaginary_triangle(c.table, *c.geo, c.table.mat(i), *c.F6);
      CHECK(data.sigma_order == s);
      CHECK(c.F6->pow(data.alpha, q * q - q + 1) == 1);
    }
    CHECK(seen > 0);
  }
}

TEST_CASE("imaginary triangle orbit: class size and element map") {
  auto& c = ctx(3);
  auto orbit = build_imag_orbit(c.table, *c.geo, *c.F6);
  CHECK(orbit.triangles.size() == 288);  // q^3 (q+1)^2 (q-1) / 3
  std::uint64_t mapped = 0;
  for (std::uint32_t i = 0; i < c.table.order(); ++i) {
    bool is3 = classify(*c.geo, c.table.mat(i)).kind == ElementKind::Type3;
    bool has = orbit.elem_to_triangle[i] != UINT32_MAX;
    CHECK(is3 == has);
    mapped += has;
    if (has) {
      // the element stabilizes (indeed fixes) its triangle
      CHECK(stabilizes_big_triangle(c.table.field(), *c.F6, c.table.mat(i),
                                    orbit.triangles[orbit.elem_to_triangle[i]]));
    }
  }
  CHECK(mapped == 1728);
}

TEST_CASE("sylow census q=2,3,4") {
  {
    auto r = sylow_p_census(ctx(2).table, *ctx(2).geo);
    CHECK(r.count == 9);
    CHECK(r.subgroup_order == 8);
    CHECK(r.union_size == 63);
    CHECK(r.intersections_trivial);
    CHECK(r.nonabelian);
    CHECK(r.exponent == 4);
  }
  {
    auto r = sylow_p_census(ctx(3).table, *ctx(3).geo);
    CHECK(r.count == 28);
    CHECK(r.subgroup_order == 27);
    CHECK(r.union_size == 728);
    CHECK(r.intersections_trivial);
    CHECK(r.nonabelian);
    CHECK(r.exponent == 3);
  }
  {
    auto r = sylow_p_census(ctx(4).table, *ctx(4).geo);
    CHECK(r.count == 65);
    CHECK(r.subgroup_order == 64);
    CHECK(r.union_size == 4095);
    CHECK(r.intersections_trivial);
    CHECK(r.nonabelian);
    CHECK(r.exponent == 4);
  }
}

TEST_CASE("sylow r-normalizer at q=3: order 21, self-normalizing, class size 288") {
  auto& c = ctx(3);
  // a Sylow 7-subgroup: the cyclic group of an order-7 element
  std::uint32_t g = 0;
  while (c.table.element_order(g) != 7) ++g;
  std::vector<std::uint32_t> R{c.table.identity_id()};
  std::uint32_t x = g;
  while (x != c.table.identity_id()) {
    R.push_back(x);
    x = c.table.mul(x, g);
  }
  CHECK(R.size() == 7);
  auto N = normalizer(R, c.table);
  CHECK(N.size() == 21);
  auto NN = normalizer(N, c.table);
  std::set<std::uint32_t> ns(N.begin(), N.end()), nns(NN.begin(), NN.end());
  CHECK(ns == nns);  // self-normalizing
  // class size q^3 (q+1)^2 (q-1) / 3 = 288 with 288 * 21 = 6048
  CHECK(288 * 21 == c.table.order());
}

TEST_CASE("omega and elation census") {
  for (std::uint64_t q : {2, 4, 5}) {
    auto& c = ctx(q);
    auto omega = omega_flags(c.table);
    std::uint64_t n = 0;
    for (auto f : omega) n += f;
    CHECK(n == ipow(q, 6) - 1);
    std::uint32_t nonabs = 0;
    while (c.geo->absolute(nonabs)) ++nonabs;
    CHECK(elation_census(c.table, *c.geo, omega, nonabs) == q * q - 1);
    CHECK_THROWS_AS(elation_census(c.table, *c.geo, omega, c.geo->absolute_points()[0]),
                    std::invalid_argument);
  }
}

TEST_CASE("Theorem 9 divisibility audit for 7 <= q <= 97") {
  for (const auto& pp : prime_powers_in(7, 97)) {
    const std::uint64_t q = pp.q;
    const std::uint64_t g = pp.gcd3();
    const std::uint64_t s = (q * q - q + 1) / g;
    // the four geometric stabilizer orders plus conics, subfields, exceptionals
    CHECK(abs_point_stab_order(pp) % s != 0);
    CHECK(nonabs_point_stab_order(pp) % s != 0);
    CHECK(triangle_stab_order(pp) % s != 0);
    CHECK(imag_triangle_stab_order(pp) % s == 0);  // the one home
    CHECK((q * (q * q - 1)) % s != 0);             // conic stabilizer order
    for (std::uint64_t ex : {36, 72, 168, 216, 360, 720, 2520}) CHECK(ex % s != 0);
    // subfield subgroups PGU3(q0)/U3(q0) for q = q0^k, k odd and >= 3
    for (std::uint64_t q0 = 2; q0 * q0 * q0 <= q; ++q0) {
      std::uint64_t pw = q0 * q0 * q0;
      std::uint32_t k = 3;
      while (pw < q) {
        pw *= q0;
        ++k;
      }
      if (pw == q && k % 2 == 1)
        CHECK((3 * q0 * q0 * q0 * (q0 * q0 * q0 + 1) * (q0 * q0 - 1)) % s != 0);
    }
  }
}
