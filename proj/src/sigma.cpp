#include "ucov/sigma.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "ucov/parallel.hpp"

namespace ucov {

// ---------------------------------------------------------------------------
// FiniteGroupModel

void FiniteGroupModel::finish_inverses() {
  inv_.assign(n_, 0);
  for (std::uint32_t a = 0; a < n_; ++a) {
    std::uint32_t x = a;  // walk a, a^2, ... until a*x = e, leaving x = a^(ord-1)
    while (mul(a, x) != id_) x = mul(x, a);
    inv_[a] = x;
  }
  for (std::uint32_t a = 0; a < n_; ++a)
    check_invariant(mul(a, inv_[a]) == id_ && mul(inv_[a], a) == id_, "inverse map broken");
}

std::uint64_t FiniteGroupModel::element_order(std::uint32_t a) const {
  std::uint64_t o = 1;
  std::uint32_t x = a;
  while (x != id_) {
    x = mul(x, a);
    ++o;
  }
  return o;
}

FiniteGroupModel FiniteGroupModel::from_mul_table(std::uint32_t n, std::vector<std::uint32_t> table) {
  require(table.size() == std::uint64_t(n) * n, "multiplication table size mismatch");
  FiniteGroupModel g;
  g.n_ = n;
  g.dense_ = std::move(table);
  // identity: the unique e with e*x = x for all x
  g.id_ = n;
  for (std::uint32_t e = 0; e < n && g.id_ == n; ++e) {
    bool ok = true;
    for (std::uint32_t x = 0; x < n; ++x)
      if (g.dense_[std::uint64_t(e) * n + x] != x) {
        ok = false;
        break;
      }
    if (ok) g.id_ = e;
  }
  require(g.id_ < n, "table has no identity");
  g.finish_inverses();
  return g;
}

FiniteGroupModel FiniteGroupModel::from_function(
    std::uint32_t n, std::uint32_t identity,
    std::function<std::uint32_t(std::uint32_t, std::uint32_t)> fn) {
  FiniteGroupModel g;
  g.n_ = n;
  g.id_ = identity;
  if (n <= kDenseLimit) {
    g.dense_.resize(std::uint64_t(n) * n);
    parallel_chunks(n, default_jobs(), [&](std::uint64_t lo, std::uint64_t hi, unsigned) {
      for (std::uint64_t a = lo; a < hi; ++a)
        for (std::uint32_t b = 0; b < n; ++b)
          g.dense_[a * n + b] = fn(static_cast<std::uint32_t>(a), b);
    });
  } else {
    g.fn_ = std::move(fn);
  }
  g.finish_inverses();
  return g;
}

FiniteGroupModel FiniteGroupModel::cyclic(std::uint32_t n) {
  std::vector<std::uint32_t> t(std::uint64_t(n) * n);
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = 0; b < n; ++b) t[std::uint64_t(a) * n + b] = (a + b) % n;
  return from_mul_table(n, std::move(t));
}

FiniteGroupModel FiniteGroupModel::quaternion8() {
  // elements: sign s in {0,1} (for +,-) and basis b in {1,i,j,k}; id = 2b + s
  // basis products: rows/cols 1,i,j,k with i*j=+k, j*k=+i, k*i=+j and squares -1
  static const int basis[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
  static const int sign[4][4] = {{0, 0, 0, 0}, {0, 1, 0, 1}, {0, 1, 1, 0}, {0, 0, 1, 1}};
  std::vector<std::uint32_t> t(64);
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) {
      int sa = a & 1, ba = a >> 1, sb = b & 1, bb = b >> 1;
      t[a * 8 + b] =
          static_cast<std::uint32_t>(2 * basis[ba][bb] + ((sa + sb + sign[ba][bb]) & 1));
    }
  return from_mul_table(8, std::move(t));
}

namespace {

struct Lin2 {
  std::shared_ptr<const Field> F;
  std::vector<std::array<std::uint32_t, 4>> mats;  // sorted by packed value
  std::vector<std::int32_t> id_by_packed;

  std::uint64_t pack(const std::array<std::uint32_t, 4>& m) const {
    const std::uint64_t Q = F->size();
    return ((std::uint64_t(m[0]) * Q + m[1]) * Q + m[2]) * Q + m[3];
  }
  std::array<std::uint32_t, 4> mul(const std::array<std::uint32_t, 4>& a,
                                   const std::array<std::uint32_t, 4>& b) const {
    return {F->add(F->mul(a[0], b[0]), F->mul(a[1], b[2])),
            F->add(F->mul(a[0], b[1]), F->mul(a[1], b[3])),
            F->add(F->mul(a[2], b[0]), F->mul(a[3], b[2])),
            F->add(F->mul(a[2], b[1]), F->mul(a[3], b[3]))};
  }
};

Lin2 make_sl2(std::uint64_t q, bool projective) {
  auto pp = PrimePower::parse(q);
  Lin2 L;
  L.F = Field::make(pp.p, pp.a);
  const Field& F = *L.F;
  const std::uint64_t Q = F.size();
  std::uint32_t minus1 = F.neg(1);
  for (std::uint64_t a = 0; a < Q; ++a)
    for (std::uint64_t b = 0; b < Q; ++b)
      for (std::uint64_t c = 0; c < Q; ++c)
        for (std::uint64_t d = 0; d < Q; ++d) {
          std::array<std::uint32_t, 4> m{
              static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
              static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(d)};
          if (F.sub(F.mul(m[0], m[3]), F.mul(m[1], m[2])) != 1) continue;
          if (projective && minus1 != 1) {
            std::array<std::uint32_t, 4> neg{F.mul(minus1, m[0]), F.mul(minus1, m[1]),
                                             F.mul(minus1, m[2]), F.mul(minus1, m[3])};
            if (L.pack(neg) < L.pack(m)) continue;  // keep the least of {M, -M}
          }
          L.mats.push_back(m);
        }
  std::sort(L.mats.begin(), L.mats.end(),
            [&](const auto& x, const auto& y) { return L.pack(x) < L.pack(y); });
  L.id_by_packed.assign(Q * Q * Q * Q, -1);
  for (std::uint32_t i = 0; i < L.mats.size(); ++i)
    L.id_by_packed[L.pack(L.mats[i])] = static_cast<std::int32_t>(i);
  return L;
}

}  // namespace

FiniteGroupModel FiniteGroupModel::special_linear2(std::uint64_t q) {
  auto L = std::make_shared<Lin2>(make_sl2(q, false));
  std::uint32_t n = static_cast<std::uint32_t>(L->mats.size());
  std::uint32_t id = static_cast<std::uint32_t>(L->id_by_packed[L->pack({1, 0, 0, 1})]);
  return from_function(n, id, [L](std::uint32_t a, std::uint32_t b) {
    return static_cast<std::uint32_t>(L->id_by_packed[L->pack(L->mul(L->mats[a], L->mats[b]))]);
  });
}

FiniteGroupModel FiniteGroupModel::projective_sl2(std::uint64_t q) {
  auto L = std::make_shared<Lin2>(make_sl2(q, true));
  const Field& F = *L->F;
  std::uint32_t minus1 = F.neg(1);
  std::uint32_t n = static_cast<std::uint32_t>(L->mats.size());
  auto canon = [L, minus1](std::array<std::uint32_t, 4> m) {
    if (minus1 == 1) return m;
    const Field& f = *L->F;
    std::array<std::uint32_t, 4> neg{f.mul(minus1, m[0]), f.mul(minus1, m[1]),
                                     f.mul(minus1, m[2]), f.mul(minus1, m[3])};
    return L->pack(neg) < L->pack(m) ? neg : m;
  };
  std::uint32_t id = static_cast<std::uint32_t>(L->id_by_packed[L->pack(canon({1, 0, 0, 1}))]);
  return from_function(n, id, [L, canon](std::uint32_t a, std::uint32_t b) {
    return static_cast<std::uint32_t>(
        L->id_by_packed[L->pack(canon(L->mul(L->mats[a], L->mats[b])))]);
  });
}

FiniteGroupModel FiniteGroupModel::from_unitary(std::shared_ptr<const GroupTable> t) {
  const GroupTable* raw = t.get();
  auto g = from_function(static_cast<std::uint32_t>(raw->order()), raw->identity_id(),
                         [raw](std::uint32_t a, std::uint32_t b) { return raw->mul(a, b); });
  g.keepalive_ = std::move(t);
  return g;
}

FiniteGroupModel FiniteGroupModel::quotient(const std::vector<std::uint32_t>& normal_sorted) const {
  require(is_subgroup(normal_sorted), "quotient needs a subgroup");
  require(is_normal(normal_sorted), "quotient needs a normal subgroup");
  std::vector<std::uint32_t> rep_of(n_);
  for (std::uint32_t x = 0; x < n_; ++x) {
    std::uint32_t best = UINT32_MAX;
    for (auto nn : normal_sorted) best = std::min(best, mul(x, nn));
    rep_of[x] = best;
  }
  std::vector<std::uint32_t> reps;
  for (std::uint32_t x = 0; x < n_; ++x)
    if (rep_of[x] == x) reps.push_back(x);
  std::vector<std::uint32_t> index(n_, UINT32_MAX);
  for (std::uint32_t i = 0; i < reps.size(); ++i) index[reps[i]] = i;
  const std::uint32_t m = static_cast<std::uint32_t>(reps.size());
  std::vector<std::uint32_t> table(std::uint64_t(m) * m);
  for (std::uint32_t i = 0; i < m; ++i)
    for (std::uint32_t j = 0; j < m; ++j)
      table[std::uint64_t(i) * m + j] = index[rep_of[mul(reps[i], reps[j])]];
  return from_mul_table(m, std::move(table));
}

bool FiniteGroupModel::is_subgroup(const std::vector<std::uint32_t>& s) const {
  if (s.empty() || !std::binary_search(s.begin(), s.end(), id_)) return false;
  for (auto a : s)
    for (auto b : s)
      if (!std::binary_search(s.begin(), s.end(), mul(a, b))) return false;
  return true;
}

bool FiniteGroupModel::is_normal(const std::vector<std::uint32_t>& s) const {
  for (std::uint32_t g = 0; g < n_; ++g) {
    std::uint32_t gi = inv(g);
    for (auto h : s)
      if (!std::binary_search(s.begin(), s.end(), mul(mul(g, h), gi))) return false;
  }
  return true;
}

std::vector<std::uint32_t> FiniteGroupModel::closure(const std::vector<std::uint32_t>& gens,
                                                     std::uint32_t abort_above) const {
  std::vector<std::uint8_t> seen(n_, 0);
  std::vector<std::uint32_t> members{id_};
  seen[id_] = 1;
  std::vector<std::uint32_t> work{id_};
  while (!work.empty()) {
    std::uint32_t x = work.back();
    work.pop_back();
    for (auto g : gens) {
      std::uint32_t y = mul(x, g);
      if (!seen[y]) {
        seen[y] = 1;
        members.push_back(y);
        work.push_back(y);
        if (abort_above && members.size() > abort_above) return {};
      }
    }
  }
  std::sort(members.begin(), members.end());
  return members;
}

std::vector<std::uint32_t> FiniteGroupModel::center() const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t z = 0; z < n_; ++z) {
    bool central = true;
    for (std::uint32_t g = 0; g < n_ && central; ++g) central = mul(z, g) == mul(g, z);
    if (central) out.push_back(z);
  }
  return out;
}

std::vector<std::uint32_t> FiniteGroupModel::commutator_subgroup() const {
  std::vector<std::uint32_t> comms;
  std::vector<std::uint8_t> seen(n_, 0);
  for (std::uint32_t a = 0; a < n_; ++a)
    for (std::uint32_t b = 0; b < n_; ++b) {
      std::uint32_t c = mul(mul(inv(a), inv(b)), mul(a, b));
      if (!seen[c]) {
        seen[c] = 1;
        comms.push_back(c);
      }
    }
  return closure(comms, 0);
}

bool FiniteGroupModel::is_perfect() const { return commutator_subgroup().size() == n_; }

bool FiniteGroupModel::is_cyclic() const {
  for (std::uint32_t g = 0; g < n_; ++g)
    if (element_order(g) == n_) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Brute-force subgroup lattice.

std::vector<std::vector<std::uint32_t>> all_subgroups_brute(const FiniteGroupModel& g) {
  require(g.size() <= 2000, "subgroup lattice brute force capped at |G| <= 2000");
  std::set<std::vector<std::uint32_t>> subs;
  subs.insert({g.identity()});
  for (std::uint32_t x = 0; x < g.size(); ++x) subs.insert(g.closure({x}, 0));
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<std::vector<std::uint32_t>> snapshot(subs.begin(), subs.end());
    for (const auto& h : snapshot) {
      if (h.size() == g.size()) continue;
      for (std::uint32_t x = 0; x < g.size(); ++x) {
        if (std::binary_search(h.begin(), h.end(), x)) continue;
        std::vector<std::uint32_t> gens = h;
        gens.push_back(x);
        auto k = g.closure(gens, 0);
        if (subs.insert(std::move(k)).second) grew = true;
      }
    }
  }
  return {subs.begin(), subs.end()};
}

MaxSubgroups all_maximal_subgroups_brute(const FiniteGroupModel& g) {
  auto subs = all_subgroups_brute(g);
  MaxSubgroups out;
  for (const auto& h : subs) {
    if (h.size() == g.size()) continue;
    bool maximal = true;
    for (const auto& k : subs) {
      if (k.size() == g.size() || k.size() <= h.size()) continue;
      if (std::includes(k.begin(), k.end(), h.begin(), h.end())) {
        maximal = false;
        break;
      }
    }
    if (maximal) {
      out.subs.push_back(h);
      out.labels.push_back("order-" + std::to_string(h.size()));
    }
  }
  // coverage certificate
  std::vector<std::uint8_t> covered(g.size(), 0);
  for (const auto& h : out.subs)
    for (auto x : h) covered[x] = 1;
  out.complete = std::all_of(covered.begin(), covered.end(), [](std::uint8_t v) { return v == 1; });
  std::map<std::uint64_t, std::uint64_t> inv;
  for (const auto& h : out.subs) ++inv[h.size()];
  out.inventory.assign(inv.begin(), inv.end());
  out.notes = "exhaustive lattice";
  return out;
}

// ---------------------------------------------------------------------------
// U3(q) harvest.

namespace {

struct LegalInventory {
  std::set<std::uint64_t> orders;
  std::vector<std::uint64_t> required;  // orders that must appear
};

LegalInventory legal_inventory(const PrimePower& pp) {
  LegalInventory L;
  const std::uint64_t q = pp.q;
  L.orders.insert(abs_point_stab_order(pp));
  L.orders.insert(nonabs_point_stab_order(pp));
  L.orders.insert(triangle_stab_order(pp));
  L.orders.insert(imag_triangle_stab_order(pp));
  if (pp.p != 2) {
    L.orders.insert(q * (q * q - 1));  // conic stabilizers
    auto fq = Field::make(pp.p, pp.a);
    auto is_square = [&](std::uint32_t x) {
      return x == 0 || fq->pow(x, (fq->size() - 1) / 2) == 1;
    };
    if ((q + 1) % 3 == 0) {
      L.orders.insert(36);
      L.orders.insert(72);
      if ((q + 1) % 9 == 0) L.orders.insert(216);
    }
    if (!is_square(fq->neg(static_cast<std::uint32_t>(7 % pp.p)))) L.orders.insert(168);
    if (is_square(static_cast<std::uint32_t>(5 % pp.p)) && (q - 1) % 3 != 0) L.orders.insert(360);
    if (pp.p == 5 && pp.a % 2 == 1) {
      L.orders.insert(720);
      L.orders.insert(2520);
    }
  } else if (q == 2) {
    L.orders.insert(36);
    L.required.push_back(36);
  }
  // subfield subgroups: none for q <= 5 (no odd k >= 3 divides the exponent)
  if (pp.q == 3) L.required.push_back(168);
  return L;
}

}  // namespace

MaxSubgroups harvest_maximals_u3(const GroupTable& t, const UnitaryGeometry& geo,
                                 const Field& F6, const ImagOrbit& orbit,
                                 const FiniteGroupModel& model,
                                 const HarvestParams& params) {
  const PrimePower& pp = t.prime_power();
  require(pp.q <= 5, "harvest is sized for q <= 5");
  const std::uint32_t n = static_cast<std::uint32_t>(t.order());
  const Field& F2 = t.field();

  struct Cand {
    std::vector<std::uint32_t> members;
    std::string label;
  };
  std::map<std::vector<std::uint32_t>, std::string> candidates;

  // 1) point stabilizers from one fixed-point pass
  {
    std::vector<std::vector<std::uint32_t>> point_stab(geo.n_points());
    for (std::uint32_t i = 0; i < n; ++i) {
      auto full = classify_full(geo, t.mat(i));
      for (auto p : full.fixed_points) point_stab[p].push_back(i);
    }
    for (std::uint32_t p = 0; p < geo.n_points(); ++p) {
      auto& s = point_stab[p];
      std::sort(s.begin(), s.end());
      if (geo.absolute(p)) {
        check_invariant(s.size() == abs_point_stab_order(pp), "absolute stabilizer order");
        candidates.emplace(std::move(s), "absolute-point stabilizer");
      } else {
        check_invariant(s.size() == nonabs_point_stab_order(pp), "nonabsolute stabilizer order");
        candidates.emplace(std::move(s), "nonabsolute-point stabilizer");
      }
    }
  }

  // 2) triangle stabilizers: one representative, conjugated across the class
  {
    auto tris = geo.self_polar_triangles();
    const Triangle& rep = tris.front();
    std::vector<std::uint32_t> h0;
    for (std::uint32_t i = 0; i < n; ++i) {
      const Mat3& m = t.mat(i);
      std::array<std::uint32_t, 3> img;
      for (int v = 0; v < 3; ++v) img[v] = geo.id_of(mat_apply(F2, m, geo.coords(rep.v[v])));
      std::sort(img.begin(), img.end());
      if (img == rep.v) h0.push_back(i);
    }
    check_invariant(h0.size() == triangle_stab_order(pp), "triangle stabilizer order");
    std::set<std::vector<std::uint32_t>> cls;
    for (std::uint32_t g = 0; g < n; ++g) {
      Mat3 gm = t.mat(g);
      Mat3 gi = mat_inverse(F2, gm);
      std::vector<std::uint32_t> conj;
      conj.reserve(h0.size());
      for (auto h : h0) conj.push_back(t.id_of(mat_mul(F2, mat_mul(F2, gm, t.mat(h)), gi)));
      std::sort(conj.begin(), conj.end());
      cls.insert(std::move(conj));
    }
    check_invariant(cls.size() == tris.size(), "triangle stabilizer class size");
    for (auto& s : cls) candidates.emplace(s, "triangle stabilizer");
  }

  // 3) imaginary-triangle stabilizers, same pattern
  {
    std::vector<std::uint32_t> h0;
    const BigTriangle& rep = orbit.triangles.front();
    for (std::uint32_t i = 0; i < n; ++i)
      if (stabilizes_big_triangle(F2, F6, t.mat(i), rep)) h0.push_back(i);
    check_invariant(h0.size() == imag_triangle_stab_order(pp), "imaginary stabilizer order");
    std::set<std::vector<std::uint32_t>> cls;
    for (std::uint32_t g = 0; g < n; ++g) {
      Mat3 gm = t.mat(g);
      Mat3 gi = mat_inverse(F2, gm);
      std::vector<std::uint32_t> conj;
      conj.reserve(h0.size());
      for (auto h : h0) conj.push_back(t.id_of(mat_mul(F2, mat_mul(F2, gm, t.mat(h)), gi)));
      std::sort(conj.begin(), conj.end());
      cls.insert(std::move(conj));
    }
    check_invariant(cls.size() == orbit.triangles.size(), "imaginary stabilizer class size");
    for (auto& s : cls) candidates.emplace(s, "imaginary-triangle stabilizer");
  }

  require(model.size() == n && model.identity() == t.identity_id(),
          "model does not match the table");

  // 4) the non-geometric classes: seeded two-generator closures from every
  // prime-order conjugacy class representative
  {
    const std::uint32_t abort_bound =
        static_cast<std::uint32_t>(std::max<std::uint64_t>(abs_point_stab_order(pp), 2520)) + 1;
    std::vector<std::uint64_t> orders(n);
    for (std::uint32_t i = 0; i < n; ++i) orders[i] = model.element_order(i);
    std::vector<std::uint8_t> assigned(n, 0);
    std::vector<std::uint32_t> reps;
    for (std::uint32_t z = 0; z < n; ++z) {
      if (assigned[z] || !is_prime(orders[z])) continue;
      reps.push_back(z);
      for (std::uint32_t g = 0; g < n; ++g) assigned[model.mul(model.mul(g, z), model.inv(g))] = 1;
    }
    std::mt19937_64 rng(params.seed * 7919 + pp.q);
    for (auto z : reps) {
      for (std::uint32_t s = 0; s < params.samples_per_rep; ++s) {
        std::uint32_t x = static_cast<std::uint32_t>(rng() % n);
        auto h = model.closure({z, x}, abort_bound);
        if (h.empty() || h.size() == n || h.size() <= 2) continue;
        candidates.emplace(std::move(h), "sampled");
      }
    }
  }

  // 5) close the sampled candidates under conjugation (generators of G)
  {
    std::vector<std::uint32_t> gens;
    std::mt19937_64 rng(params.seed + 17);
    while (true) {
      gens = {static_cast<std::uint32_t>(rng() % n), static_cast<std::uint32_t>(rng() % n)};
      if (model.closure(gens, 0).size() == n) break;
    }
    std::vector<std::vector<std::uint32_t>> work;
    for (const auto& [s, label] : candidates)
      if (label == "sampled") work.push_back(s);
    while (!work.empty()) {
      auto h = std::move(work.back());
      work.pop_back();
      for (auto g : gens) {
        std::uint32_t gi = model.inv(g);
        std::vector<std::uint32_t> conj;
        conj.reserve(h.size());
        for (auto x : h) conj.push_back(model.mul(model.mul(g, x), gi));
        std::sort(conj.begin(), conj.end());
        if (candidates.emplace(conj, "sampled").second) work.push_back(std::move(conj));
      }
    }
  }

  // 6) containment pruning
  std::vector<std::vector<std::uint32_t>> subs;
  std::vector<std::string> labels;
  for (auto& [s, label] : candidates) {
    subs.push_back(s);
    labels.push_back(label);
  }
  std::vector<std::uint8_t> dead(subs.size(), 0);
  {
    std::vector<std::size_t> by_size(subs.size());
    std::iota(by_size.begin(), by_size.end(), 0);
    std::sort(by_size.begin(), by_size.end(),
              [&](std::size_t a, std::size_t b) { return subs[a].size() > subs[b].size(); });
    std::vector<std::uint8_t> membership(n);
    for (auto big : by_size) {
      if (dead[big]) continue;
      std::fill(membership.begin(), membership.end(), 0);
      for (auto x : subs[big]) membership[x] = 1;
      for (std::size_t small = 0; small < subs.size(); ++small) {
        if (small == big || dead[small]) continue;
        if (subs[small].size() >= subs[big].size()) continue;
        if (subs[big].size() % subs[small].size() != 0) continue;
        bool inside = true;
        for (auto x : subs[small])
          if (!membership[x]) {
            inside = false;
            break;
          }
        if (inside) dead[small] = 1;
      }
    }
  }

  MaxSubgroups out;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (dead[i]) continue;
    out.subs.push_back(std::move(subs[i]));
    out.labels.push_back(labels[i] == "sampled"
                             ? "order-" + std::to_string(out.subs.back().size())
                             : labels[i]);
  }

  // 7) certificate: full coverage + inventory legality
  std::vector<std::uint8_t> covered(n, 0);
  for (const auto& s : out.subs)
    for (auto x : s) covered[x] = 1;
  bool coverage = std::all_of(covered.begin(), covered.end(), [](std::uint8_t v) { return v; });

  auto legal = legal_inventory(pp);
  std::map<std::uint64_t, std::uint64_t> inv;
  for (const auto& s : out.subs) ++inv[s.size()];
  out.inventory.assign(inv.begin(), inv.end());
  bool legal_ok = true;
  for (const auto& [order, count] : out.inventory)
    if (!legal.orders.count(order)) {
      legal_ok = false;
      out.notes += "illegal order " + std::to_string(order) + "; ";
    }
  for (auto need : legal.required)
    if (!inv.count(need)) {
      legal_ok = false;
      out.notes += "missing required order " + std::to_string(need) + "; ";
    }
  out.complete = coverage && legal_ok;
  if (!coverage) out.notes += "element coverage incomplete; ";
  return out;
}

// ---------------------------------------------------------------------------
// Reduction to a set-cover instance.

ReducedInstance reduce_instance(const FiniteGroupModel& g, const MaxSubgroups& maximals) {
  require(maximals.complete, "exact sigma refuses an incomplete maximal list");
  const std::uint32_t n = g.size();

  // orders and the and-in-a-larger-cyclic mark
  std::vector<std::uint32_t> order(n);
  std::vector<std::uint8_t> submax(n, 0);  // generates a non-maximal cyclic subgroup
  for (std::uint32_t h = 0; h < n; ++h) {
    // walk <h> once; order(h^k) = ord / gcd(k, ord)
    std::vector<std::uint32_t> pow{g.identity()};
    std::uint32_t x = h;
    while (x != g.identity()) {
      pow.push_back(x);
      x = g.mul(x, h);
    }
    std::uint32_t ord = static_cast<std::uint32_t>(pow.size());
    order[h] = ord;
    for (std::uint32_t k = 1; k < ord; ++k)
      if (std::gcd(k, ord) > 1) submax[pow[k]] = 1;  // strictly smaller cyclic subgroup
  }

  // one representative generator per maximal cyclic subgroup
  std::vector<std::uint32_t> reps;
  std::vector<std::uint8_t> claimed(n, 0);
  for (std::uint32_t v = 0; v < n; ++v) {
    if (v == g.identity() || submax[v] || claimed[v]) continue;
    reps.push_back(v);
    std::uint32_t x = v;
    std::uint32_t k = 1;
    while (x != g.identity()) {
      if (std::gcd(k, order[v]) == 1) claimed[x] = 1;
      x = g.mul(x, v);
      ++k;
    }
  }

  // incidence via the subgroup member lists
  std::vector<std::uint32_t> rep_index(n, UINT32_MAX);
  for (std::uint32_t i = 0; i < reps.size(); ++i) rep_index[reps[i]] = i;
  std::vector<std::vector<std::uint32_t>> cols_of_rep(reps.size());
  for (std::uint32_t c = 0; c < maximals.subs.size(); ++c)
    for (auto x : maximals.subs[c])
      if (rep_index[x] != UINT32_MAX) cols_of_rep[rep_index[x]].push_back(c);

  // pattern merge
  std::map<std::vector<std::uint32_t>, std::pair<std::uint32_t, std::uint64_t>> patterns;
  for (std::uint32_t i = 0; i < reps.size(); ++i) {
    auto& cols = cols_of_rep[i];
    std::sort(cols.begin(), cols.end());
    require(!cols.empty(), "maximal list misses an element: incomplete");
    auto it = patterns.find(cols);
    if (it == patterns.end()) patterns.emplace(cols, std::make_pair(reps[i], std::uint64_t(1)));
    else ++it->second.second;
  }

  ReducedInstance out;
  out.n_max_cyclic = reps.size();
  out.inst.n_cols = static_cast<std::uint32_t>(maximals.subs.size());
  for (const auto& [cols, rep_weight] : patterns) {
    out.inst.item_cols.push_back(cols);
    out.inst.item_weight.push_back(rep_weight.second);
    out.universe_reps.push_back(rep_weight.first);
  }
  return out;
}

SigmaOutcome sigma_of(const FiniteGroupModel& g, const MaxSubgroups& maximals,
                      const SolveParams& params) {
  auto red = reduce_instance(g, maximals);
  SigmaOutcome out;
  out.result = exact_sigma(red.inst, params);
  out.exact = out.result.exact();
  out.chosen = out.result.cover_cols;
  if (out.exact) {
    out.sigma = out.result.upper;
    // independent full-membership re-check: the chosen subgroups cover G
    std::vector<std::uint8_t> covered(g.size(), 0);
    for (auto c : out.chosen)
      for (auto x : maximals.subs[c]) covered[x] = 1;
    for (std::uint32_t x = 0; x < g.size(); ++x)
      check_invariant(covered[x], "chosen cover misses a group element");
  }
  return out;
}

SigmaOutcome sigma_brute(const FiniteGroupModel& g, const SolveParams& params) {
  if (g.is_cyclic()) throw std::domain_error("cyclic groups have no finite cover");
  auto maximals = all_maximal_subgroups_brute(g);
  check_invariant(maximals.complete, "brute-force maximal list failed its coverage certificate");
  return sigma_of(g, maximals, params);
}

// ---------------------------------------------------------------------------

QuotientCheckReport quotient_sigma_check(const FiniteGroupModel& g,
                                         const std::vector<std::uint32_t>& normal_sorted,
                                         std::uint64_t enumeration_cap) {
  require(g.is_subgroup(normal_sorted), "N must be a subgroup");
  require(g.is_normal(normal_sorted), "N must be normal");
  QuotientCheckReport rep;

  if (g.is_cyclic()) {
    rep.sigma_g = kSigmaInfinite;
    rep.quotient_cyclic = true;  // quotients of cyclic groups are cyclic
    rep.sigma_quotient = kSigmaInfinite;
    rep.inequality_holds = true;
    rep.equality = true;
    rep.witness = QuotientCheckReport::WitnessStatus::ExhaustedAllCovers;
    return rep;
  }

  auto maximals = all_maximal_subgroups_brute(g);
  auto outcome = sigma_of(g, maximals);
  check_invariant(outcome.exact, "sigma(G) did not close");
  rep.sigma_g = outcome.sigma;

  auto quot = g.quotient(normal_sorted);
  if (quot.is_cyclic()) {
    rep.quotient_cyclic = true;
    rep.sigma_quotient = kSigmaInfinite;
    rep.inequality_holds = true;  // sigma(G) <= infinity
    rep.equality = false;
    rep.witness = QuotientCheckReport::WitnessStatus::ExhaustedAllCovers;
    return rep;
  }
  auto qout = sigma_brute(quot);
  check_invariant(qout.exact, "sigma(G/N) did not close");
  rep.sigma_quotient = qout.sigma;
  rep.inequality_holds = rep.sigma_g <= rep.sigma_quotient;

  // equality iff a minimal cover of G consists of N-containing subgroups
  auto red = reduce_instance(g, maximals);
  bool complete = false;
  auto covers = enumerate_covers(red.inst, rep.sigma_g, enumeration_cap, &complete);
  bool found = false;
  for (const auto& cover : covers) {
    bool all_contain = true;
    for (auto c : cover) {
      const auto& sub = maximals.subs[c];
      for (auto x : normal_sorted)
        if (!std::binary_search(sub.begin(), sub.end(), x)) {
          all_contain = false;
          break;
        }
      if (!all_contain) break;
    }
    // a candidate must actually cover the whole group, not just the universe
    if (all_contain) {
      std::vector<std::uint8_t> covered(g.size(), 0);
      for (auto c : cover)
        for (auto x : maximals.subs[c]) covered[x] = 1;
      all_contain = std::all_of(covered.begin(), covered.end(), [](std::uint8_t v) { return v; });
    }
    if (all_contain) {
      found = true;
      break;
    }
  }
  rep.equality = rep.sigma_g == rep.sigma_quotient;
  if (found) {
    rep.witness = QuotientCheckReport::WitnessStatus::Found;
    check_invariant(rep.equality, "N-containing minimal cover found but sigma differs");
  } else if (complete) {
    rep.witness = QuotientCheckReport::WitnessStatus::ExhaustedAllCovers;
    check_invariant(!rep.equality, "sigma equal but no N-containing minimal cover exists");
  } else {
    rep.witness = QuotientCheckReport::WitnessStatus::Capped;
  }
  return rep;
}

PerfectTransferReport perfect_transfer_check(const FiniteGroupModel& g) {
  PerfectTransferReport rep;
  rep.perfect = g.is_perfect();
  auto z = g.center();
  auto maximals = all_maximal_subgroups_brute(g);
  rep.maximals_contain_center = true;
  for (const auto& h : maximals.subs)
    for (auto c : z)
      if (!std::binary_search(h.begin(), h.end(), c)) {
        rep.maximals_contain_center = false;
        break;
      }
  auto outcome = sigma_of(g, maximals);
  check_invariant(outcome.exact, "sigma(G) did not close");
  rep.sigma_g = outcome.sigma;
  auto quot = g.quotient(z);
  auto qout = sigma_brute(quot);
  rep.sigma_g_mod_center = qout.sigma;
  rep.equality = rep.sigma_g == rep.sigma_g_mod_center;
  if (rep.perfect) {
    check_invariant(rep.maximals_contain_center,
                    "perfect group with a maximal subgroup missing the center");
    check_invariant(rep.equality, "perfect transfer equality failed");
  }
  return rep;
}

}  // namespace ucov
