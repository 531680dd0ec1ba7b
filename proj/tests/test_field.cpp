#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "ucov/field.hpp"

using namespace ucov;

TEST_CASE("prime power parsing and lemma 7") {
  CHECK(PrimePower::parse(8).p == 2);
  CHECK(PrimePower::parse(8).a == 3);
  CHECK(PrimePower::parse(9).p == 3);
  CHECK_THROWS_AS(PrimePower::parse(6), std::invalid_argument);
  CHECK_THROWS_AS(PrimePower::parse(1), std::invalid_argument);

  auto l3 = lemma7_check(PrimePower::parse(3));
  CHECK(l3.r == 7);
  CHECK(l3.ok);
  auto l8 = lemma7_check(PrimePower::parse(8));
  CHECK(l8.r == 19);  // 57 = 3 * 19
  CHECK(l8.ok);
  auto l4 = lemma7_check(PrimePower::parse(4));
  CHECK(l4.r == 13);
  CHECK(l4.ok);
  CHECK_THROWS_AS(lemma7_check(PrimePower::parse(2)), std::domain_error);
}

TEST_CASE("lemma 7 holds for every prime power 2 < q <= 10^4") {
  for (const auto& pp : prime_powers_in(3, 10000)) {
    auto res = lemma7_check(pp);
    CHECK(res.ok);
  }
}

TEST_CASE("canonical moduli") {
  auto f4 = Field::make(2, 2);
  CHECK(f4->modulus() == std::vector<std::uint32_t>{1, 1, 1});  // x^2 + x + 1
  auto f9 = Field::make(3, 2);
  CHECK(f9->modulus() == std::vector<std::uint32_t>{1, 0, 1});  // x^2 + 1
  auto f5 = Field::make(5, 1);
  CHECK(f5->modulus() == std::vector<std::uint32_t>{0, 1});  // x, prime-field placeholder
  CHECK(f5->add(3, 4) == 2);
  CHECK(f5->mul(3, 4) == 2);

  CHECK_THROWS_AS(Field::make(6, 1), std::invalid_argument);
  CHECK_THROWS_AS(Field::make(13, 6), resource_limit);  // 13^6 > 11^6
}

TEST_CASE("field axioms exhaustively for p^k <= 81") {
  for (auto [p, k] : {std::pair<std::uint64_t, std::uint32_t>{2, 2},
                      {2, 4}, {3, 2}, {3, 4}, {2, 6}, {7, 2}}) {
    auto f = Field::make(p, k);
    const std::uint64_t n = f->size();
    for (std::uint32_t x = 0; x < n; ++x) {
      CHECK(f->add(x, 0) == x);
      CHECK(f->mul(x, 1) == x);
      CHECK(f->add(x, f->neg(x)) == 0);
      if (x) CHECK(f->mul(x, f->inv(x)) == 1);
      for (std::uint32_t y = 0; y < n; ++y) {
        CHECK(f->add(x, y) == f->add(y, x));
        CHECK(f->mul(x, y) == f->mul(y, x));
        for (std::uint32_t z = 0; z < std::min<std::uint64_t>(n, 16); ++z) {
          CHECK(f->mul(x, f->add(y, z)) == f->add(f->mul(x, y), f->mul(x, z)));
          CHECK(f->mul(x, f->mul(y, z)) == f->mul(f->mul(x, y), z));
        }
      }
    }
  }
}

TEST_CASE("frobenius is a field automorphism on samples") {
  std::mt19937_64 rng(7);
  for (auto [p, k] : {std::pair<std::uint64_t, std::uint32_t>{3, 6}, {5, 4}, {7, 4}, {11, 2}}) {
    auto f = Field::make(p, k);
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(f->size() - 1));
    for (int i = 0; i < 500; ++i) {
      std::uint32_t x = pick(rng), y = pick(rng);
      CHECK(f->frobenius(f->add(x, y)) == f->add(f->frobenius(x), f->frobenius(y)));
      CHECK(f->frobenius(f->mul(x, y)) == f->mul(f->frobenius(x), f->frobenius(y)));
    }
  }
}

TEST_CASE("conjugation is an involution fixing exactly the index-2 subfield") {
  for (auto [p, k] : {std::pair<std::uint64_t, std::uint32_t>{2, 2}, {3, 2}, {2, 4}, {5, 2}, {7, 2}, {3, 4}}) {
    auto f = Field::make(p, k);
    std::uint64_t fixed = 0;
    for (std::uint32_t x = 0; x < f->size(); ++x) {
      CHECK(f->conj(f->conj(x)) == x);
      if (f->conj(x) == x) ++fixed;
      // ring homomorphism on a couple of partners
      for (std::uint32_t y : {std::uint32_t(1), std::uint32_t(x / 2)}) {
        CHECK(f->conj(f->add(x, y)) == f->add(f->conj(x), f->conj(y)));
        CHECK(f->conj(f->mul(x, y)) == f->mul(f->conj(x), f->conj(y)));
      }
    }
    CHECK(fixed == ipow(p, k / 2));  // exactly the subfield GF(p^(k/2))
  }
}

TEST_CASE("GF(9): conj(i) = -i for i a root of x^2+1") {
  auto f9 = Field::make(3, 2);
  // index 3 encodes the coefficient vector (0,1), i.e. the class of x
  std::uint32_t i = 3;
  CHECK(f9->mul(i, i) == f9->neg(1));  // i^2 = -1
  CHECK(f9->conj(i) == f9->neg(i));
}

TEST_CASE("norm maps into the subfield and its kernel has q+1 elements") {
  for (auto [p, k, q] : {std::tuple<std::uint64_t, std::uint32_t, std::uint64_t>{3, 2, 3},
                         {2, 4, 4}, {5, 2, 5}}) {
    auto f = Field::make(p, k);
    CHECK(f->norm(0) == 0);
    CHECK(f->norm(1) == 1);
    std::uint64_t kernel = 0;
    for (std::uint32_t x = 1; x < f->size(); ++x) {
      CHECK(f->in_subfield(f->norm(x), k / 2));
      if (f->norm(x) == 1) ++kernel;
      std::uint32_t y = (x * 7 + 1) % static_cast<std::uint32_t>(f->size());
      if (y) CHECK(f->norm(f->mul(x, y)) == f->mul(f->norm(x), f->norm(y)));
    }
    CHECK(kernel == q + 1);
  }
}

TEST_CASE("embedding GF(4) -> GF(64) is a ring homomorphism") {
  auto small = Field::make(2, 2);
  auto big = Field::make(2, 6);
  const auto& tab = embedding(*small, *big);
  CHECK(tab[0] == 0);
  CHECK(tab[1] == 1);
  for (std::uint32_t x = 0; x < 4; ++x)
    for (std::uint32_t y = 0; y < 4; ++y) {
      CHECK(tab[small->mul(x, y)] == big->mul(tab[x], tab[y]));
      CHECK(tab[small->add(x, y)] == big->add(tab[x], tab[y]));
    }
  // injectivity
  std::set<std::uint32_t> img(tab.begin(), tab.end());
  CHECK(img.size() == 4);
}

TEST_CASE("image of GF(9)* in GF(9^3)* is exactly the order-dividing-8 elements") {
  auto small = Field::make(3, 2);
  auto big = Field::make(3, 6);
  const auto& tab = embedding(*small, *big);
  std::set<std::uint32_t> img;
  for (std::uint32_t x = 1; x < 9; ++x) img.insert(tab[x]);
  std::set<std::uint32_t> order8;
  for (std::uint32_t x = 1; x < big->size(); ++x)
    if (big->pow(x, 8) == 1) order8.insert(x);
  CHECK(img == order8);
}

TEST_CASE("embedding composes along the tower GF(q) -> GF(q^2) -> GF(q^6)") {
  auto f3 = Field::make(3, 1);
  auto f9 = Field::make(3, 2);
  auto f36 = Field::make(3, 6);
  for (std::uint32_t x = 0; x < 3; ++x)
    CHECK(embed(embed(x, *f3, *f9), *f9, *f36) == embed(x, *f3, *f36));
}

TEST_CASE("find_roots") {
  auto f9 = Field::make(3, 2);
  Poly g(*f9, {1, 0, 1});  // x^2 + 1: roots i, -i
  auto roots = find_roots(g);
  REQUIRE(roots.size() == 2);
  CHECK(((roots[0] == 3 && roots[1] == 6) || (roots[0] == 6 && roots[1] == 3)));

  Poly lin(*f9, {f9->neg(1), 1});  // x - 1
  CHECK(find_roots(lin) == std::vector<std::uint32_t>{1});

  // an irreducible quadratic has no roots
  bool found_irreducible = false;
  for (std::uint32_t a = 0; a < 9 && !found_irreducible; ++a)
    for (std::uint32_t b = 0; b < 9; ++b) {
      Poly h(*f9, {a, b, 1});
      if (is_irreducible(h)) {
        CHECK(find_roots(h).empty());
        found_irreducible = true;
        break;
      }
    }
  CHECK(found_irreducible);

  // multiplicity: (x-1)^2 (x-2) over GF(7)
  auto f7 = Field::make(7, 1);
  Poly m = Poly::x_minus(*f7, 1) * Poly::x_minus(*f7, 1) * Poly::x_minus(*f7, 2);
  auto r = find_roots(m);
  CHECK(r == std::vector<std::uint32_t>{1, 1, 2});
}

TEST_CASE("tilde: linear case and error paths") {
  auto f9 = Field::make(3, 2);
  for (std::uint32_t lam = 1; lam < 9; ++lam) {
    Poly g = Poly::x_minus(*f9, lam);
    Poly t = poly_tilde(g);
    // x - conj(lam)^{-1}
    CHECK(t.degree() == 1);
    CHECK(t.c[0] == f9->neg(f9->inv(f9->conj(lam))));
  }
  CHECK_THROWS(poly_tilde(Poly(*f9, {0, 1})));       // zero constant term
  CHECK_THROWS(poly_tilde(Poly(*f9, {1, 2})));       // not monic
}

TEST_CASE("tilde involution and multiplicativity on random monic pairs") {
  for (std::uint64_t q : {2, 3, 4, 5}) {
    auto pp = PrimePower::parse(q);
    auto f = Field::make(pp.p, 2 * pp.a);  // GF(q^2)
    std::mt19937_64 rng(q);
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(f->size() - 1));
    std::uniform_int_distribution<int> degree(1, 4);
    auto random_monic = [&]() {
      int n = degree(rng);
      std::vector<std::uint32_t> c(n + 1);
      c[n] = 1;
      c[0] = 1 + pick(rng) % static_cast<std::uint32_t>(f->size() - 1);  // nonzero constant
      for (int i = 1; i < n; ++i) c[i] = pick(rng);
      return Poly(*f, std::move(c));
    };
    for (int it = 0; it < 10000; ++it) {
      Poly g = random_monic(), h = random_monic();
      Poly tg = poly_tilde(g);
      CHECK(poly_tilde(tg) == g);
      CHECK(poly_tilde(g * h) == tg * poly_tilde(h));
    }
  }
}

TEST_CASE("Ennola parity: no monic irreducible quadratic with g(0)!=0 is tilde-fixed") {
  for (std::uint64_t q : {2, 3, 4, 5}) {
    auto pp = PrimePower::parse(q);
    auto f = Field::make(pp.p, 2 * pp.a);
    for (std::uint32_t b = 0; b < f->size(); ++b)
      for (std::uint32_t a = 1; a < f->size(); ++a) {  // nonzero constant term
        Poly g(*f, {a, b, 1});
        if (!is_irreducible(g)) continue;
        CHECK(poly_tilde(g).c != g.c);
      }
  }
}

TEST_CASE("Ennola cubics: tilde-fixed irreducible cubics have roots with xi^(q^3+1) = 1") {
  for (std::uint64_t q : {2, 3, 4}) {
    auto pp = PrimePower::parse(q);
    auto f2 = Field::make(pp.p, 2 * pp.a);
    auto f6 = Field::make(pp.p, 6 * pp.a);
    const auto& emb = embedding(*f2, *f6);
    int seen = 0;
    for (std::uint64_t enc = 0; enc < f2->size() * f2->size() * f2->size(); ++enc) {
      std::uint32_t a = static_cast<std::uint32_t>(enc % f2->size());
      std::uint32_t b = static_cast<std::uint32_t>((enc / f2->size()) % f2->size());
      std::uint32_t c = static_cast<std::uint32_t>(enc / (f2->size() * f2->size()));
      if (a == 0) continue;
      Poly g(*f2, {a, b, c, 1});
      if (!is_irreducible(g) || !(poly_tilde(g) == g)) continue;
      ++seen;
      Poly gh(*f6, {emb[a], emb[b], emb[c], 1});
      auto roots = find_roots(gh);
      REQUIRE(roots.size() == 3);
      for (auto xi : roots) CHECK(f6->pow(xi, ipow(q, 3) + 1) == 1);
    }
    CHECK(seen > 0);
  }
}

TEST_CASE("big-field fallback path above the exp/log budget") {
  auto f = Field::make(11, 6);  // 11^6 > 2^20: no tables
  CHECK_FALSE(f->has_tables());
  CHECK(f->size() == 1771561);
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::uint32_t> pick(1, static_cast<std::uint32_t>(f->size() - 1));
  for (int i = 0; i < 50; ++i) {
    std::uint32_t x = pick(rng), y = pick(rng);
    CHECK(f->mul(x, f->inv(x)) == 1);
    CHECK(f->mul(f->mul(x, y), f->inv(y)) == x);
    CHECK(f->pow(x, f->size() - 1) == 1);
    CHECK(f->conj(f->conj(x)) == x);
  }
}
