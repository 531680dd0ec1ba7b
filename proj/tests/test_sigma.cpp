#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <memory>

#include "ucov/sigma.hpp"

using namespace ucov;

TEST_CASE("group models: orders and structure") {
  auto s3 = FiniteGroupModel::symmetric3();
  CHECK(s3.size() == 6);
  CHECK_FALSE(s3.is_cyclic());

  auto q8 = FiniteGroupModel::quaternion8();
  CHECK(q8.size() == 8);
  CHECK(q8.element_order(1) == 2);  // -1
  CHECK(q8.element_order(2) == 4);  // i
  CHECK(q8.center() == std::vector<std::uint32_t>{0, 1});

  auto sl23 = FiniteGroupModel::special_linear2(3);
  CHECK(sl23.size() == 24);
  CHECK_FALSE(sl23.is_perfect());

  auto l23 = FiniteGroupModel::projective_sl2(3);
  CHECK(l23.size() == 12);  // A4

  auto sl25 = FiniteGroupModel::special_linear2(5);
  CHECK(sl25.size() == 120);
  CHECK(sl25.is_perfect());

  auto a5 = FiniteGroupModel::projective_sl2(5);
  CHECK(a5.size() == 60);

  auto c6 = FiniteGroupModel::cyclic(6);
  CHECK(c6.is_cyclic());
}

TEST_CASE("sigma of small groups") {
  CHECK(sigma_brute(FiniteGroupModel::symmetric3()).sigma == 4);
  CHECK(sigma_brute(FiniteGroupModel::quaternion8()).sigma == 3);
  CHECK(sigma_brute(FiniteGroupModel::special_linear2(3)).sigma == 5);
  CHECK(sigma_brute(FiniteGroupModel::projective_sl2(3)).sigma == 5);
  CHECK_THROWS_AS(sigma_brute(FiniteGroupModel::cyclic(6)), std::domain_error);
}

TEST_CASE("sym(3) maximal structure: one order-3 and three order-2 subgroups") {
  auto maximals = all_maximal_subgroups_brute(FiniteGroupModel::symmetric3());
  CHECK(maximals.complete);
  std::map<std::uint64_t, std::uint64_t> inv(maximals.inventory.begin(), maximals.inventory.end());
  CHECK(inv[3] == 1);
  CHECK(inv[2] == 3);
}

TEST_CASE("sigma(U3(2)) = 3") {
  auto pp = PrimePower::parse(2);
  auto table = std::make_shared<GroupTable>(GroupTable::build(pp));
  auto g = FiniteGroupModel::from_unitary(table);
  auto out = sigma_brute(g);
  CHECK(out.exact);
  CHECK(out.sigma == 3);
}

TEST_CASE("quotient lemma: SL2(3) with its center") {
  auto g = FiniteGroupModel::special_linear2(3);
  auto z = g.center();
  REQUIRE(z.size() == 2);
  auto rep = quotient_sigma_check(g, z);
  CHECK(rep.sigma_g == 5);
  CHECK(rep.sigma_quotient == 5);  // L2(3) = A4
  CHECK(rep.equality);
  CHECK(rep.inequality_holds);
  CHECK(rep.witness == QuotientCheckReport::WitnessStatus::Found);
}

TEST_CASE("quotient lemma: U3(2) onto the Klein four-group") {
  auto pp = PrimePower::parse(2);
  auto table = std::make_shared<GroupTable>(GroupTable::build(pp));
  auto g = FiniteGroupModel::from_unitary(table);
  auto commutator = g.commutator_subgroup();
  CHECK(commutator.size() == 18);  // G/[G,G] is Klein four
  auto rep = quotient_sigma_check(g, commutator);
  CHECK(rep.sigma_g == 3);
  CHECK(rep.sigma_quotient == 3);
  CHECK(rep.equality);
}

TEST_CASE("cyclic quotient sentinel") {
  auto g = FiniteGroupModel::cyclic(6);
  auto rep = quotient_sigma_check(g, {0});
  CHECK(rep.sigma_quotient == kSigmaInfinite);
  CHECK(rep.quotient_cyclic);

  // a noncyclic group with a cyclic quotient: S3 / A3 = C2
  auto s3 = FiniteGroupModel::symmetric3();
  std::vector<std::uint32_t> a3;
  for (std::uint32_t x = 0; x < 6; ++x)
    if (s3.element_order(x) != 2) a3.push_back(x);
  std::sort(a3.begin(), a3.end());
  REQUIRE(a3.size() == 3);
  auto rep2 = quotient_sigma_check(s3, a3);
  CHECK(rep2.sigma_g == 4);
  CHECK(rep2.sigma_quotient == kSigmaInfinite);
  CHECK(rep2.inequality_holds);
  CHECK_FALSE(rep2.equality);
}

TEST_CASE("perfect transfer: SL2(5) vs A5") {
  auto g = FiniteGroupModel::special_linear2(5);
  auto rep = perfect_transfer_check(g);
  CHECK(rep.perfect);
  CHECK(rep.maximals_contain_center);
  CHECK(rep.sigma_g == rep.sigma_g_mod_center);
  CHECK(rep.equality);
  // both sides solved independently; A5's covering number is 10
  CHECK(rep.sigma_g == 10);
}

TEST_CASE("perfect transfer hypothesis fails for SL2(3) but equality holds anyway") {
  auto g = FiniteGroupModel::special_linear2(3);
  auto rep = perfect_transfer_check(g);
  CHECK_FALSE(rep.perfect);
  CHECK(rep.sigma_g == 5);
  CHECK(rep.sigma_g_mod_center == 5);
}

TEST_CASE("abelian groups: every maximal subgroup contains the commutator subgroup") {
  auto g = FiniteGroupModel::from_mul_table(4, {0, 1, 2, 3, 1, 0, 3, 2, 2, 3, 0, 1, 3, 2, 1, 0});
  CHECK(g.commutator_subgroup() == std::vector<std::uint32_t>{0});
  auto maximals = all_maximal_subgroups_brute(g);
  CHECK(maximals.subs.size() == 3);  // Klein four: sigma = 3
  auto out = sigma_brute(g);
  CHECK(out.sigma == 3);
}

TEST_CASE("harvest U3(2): inventory includes the order-36 class") {
  auto pp = PrimePower::parse(2);
  auto geo = std::make_unique<UnitaryGeometry>(pp);
  auto table = std::make_shared<GroupTable>(GroupTable::build(pp));
  auto F6 = Field::make(2, 6);
  // q = 2 has no type 3 elements; harvest takes the orbit only for q > 2.
  // Use the brute lattice instead to cross-check the inventory.
  auto g = FiniteGroupModel::from_unitary(table);
  auto brute = all_maximal_subgroups_brute(g);
  std::map<std::uint64_t, std::uint64_t> inv(brute.inventory.begin(), brute.inventory.end());
  CHECK(inv.count(36) == 1);
  CHECK(inv[36] == 3);  // the three index-2 subgroups over the Klein image
  CHECK(inv.count(8) == 1);
  CHECK(inv[8] == 9);   // the Sylow-2 = absolute point stabilizers
}

TEST_CASE("harvest U3(3): classes and sigma = 64") {
  auto pp = PrimePower::parse(3);
  UnitaryGeometry geo(pp);
  auto table = std::make_shared<GroupTable>(GroupTable::build(pp));
  auto F6 = Field::make(3, 6);
  auto orbit = build_imag_orbit(*table, geo, *F6);
  auto model = FiniteGroupModel::from_unitary(table);
  HarvestParams params;
  params.seed = 1;
  params.samples_per_rep = 800;
  auto maximals = harvest_maximals_u3(*table, geo, *F6, orbit, model, params);
  CHECK(maximals.complete);
  std::map<std::uint64_t, std::uint64_t> inv(maximals.inventory.begin(), maximals.inventory.end());
  CHECK(inv[216] == 28);   // absolute point stabilizers
  CHECK(inv[96] == 126);   // nonabsolute point stabilizers + triangle stabilizers
  CHECK(inv.count(168));   // the L3(2) class (-7 is a nonsquare mod 3)
  // Frozen regression: one class of 36; the exhaustive <z,x> scan over a fixed
  // order-7 z confirms each Sylow-7 lies in exactly one order-168 subgroup
  // (36 * 8 = 288 Sylow-7s).
  CHECK(inv[168] == 36);
  CHECK(inv.count(21) == 0);  // imaginary-triangle stabilizers sit inside L3(2)s here

  auto out = sigma_of(model, maximals);
  CHECK(out.exact);
  CHECK(out.sigma == 64);
}
