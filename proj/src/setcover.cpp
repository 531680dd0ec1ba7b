#include "ucov/setcover.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>

namespace ucov {

Rat::Rat(BigInt n, BigInt d) : num(std::move(n)), den(std::move(d)) {
  require(den != 0, "rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  BigInt g = boost::multiprecision::gcd(num < 0 ? BigInt(-num) : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

BigInt Rat::ceil() const {
  BigInt q = num / den;
  if (num > 0 && num % den != 0) ++q;
  return q;
}

BigInt Rat::floor() const {
  BigInt q = num / den;
  if (num < 0 && num % den != 0) --q;
  return q;
}

double Rat::to_double() const {
  return static_cast<double>(num) / static_cast<double>(den);
}

std::string Rat::str() const {
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

Rat operator+(const Rat& a, const Rat& b) { return Rat(a.num * b.den + b.num * a.den, a.den * b.den); }
Rat operator-(const Rat& a, const Rat& b) { return Rat(a.num * b.den - b.num * a.den, a.den * b.den); }
Rat operator*(const Rat& a, const Rat& b) { return Rat(a.num * b.num, a.den * b.den); }
Rat operator/(const Rat& a, const Rat& b) {
  require(b.num != 0, "rational division by zero");
  return Rat(a.num * b.den, a.den * b.num);
}

void CoverInstance::validate() const {
  require(item_weight.empty() || item_weight.size() == item_cols.size(),
          "item weight size mismatch");
  for (const auto& cols : item_cols) {
    require(!cols.empty(), "uncoverable item");
    require(std::is_sorted(cols.begin(), cols.end()), "item columns not sorted");
    for (auto c : cols) require(c < n_cols, "column id out of range");
  }
}

// ---------------------------------------------------------------------------
// Dual packing simplex.

LpResult lp_lower_bound(const CoverInstance& inst, std::uint64_t pivot_budget) {
  inst.validate();
  const std::uint32_t n = static_cast<std::uint32_t>(inst.item_cols.size());  // packing vars
  const std::uint32_t m = inst.n_cols;                                        // constraints
  LpResult res;
  if (n == 0) {
    res.value = Rat(0);
    res.optimal = true;
    return res;
  }

  // columns of the tableau: n packing vars, m slacks, rhs
  const std::uint32_t width = n + m + 1;
  std::vector<std::vector<Rat>> T(m, std::vector<Rat>(width));
  for (std::uint32_t i = 0; i < n; ++i)
    for (auto c : inst.item_cols[i]) T[c][i] = Rat(1);
  for (std::uint32_t r = 0; r < m; ++r) {
    T[r][n + r] = Rat(1);
    T[r][width - 1] = Rat(1);
  }
  // reduced-cost row for maximize sum(y): cost 1 on packing vars
  std::vector<Rat> z(width);
  for (std::uint32_t i = 0; i < n; ++i) z[i] = Rat(1);
  std::vector<std::uint32_t> basis(m);
  for (std::uint32_t r = 0; r < m; ++r) basis[r] = n + r;

  Rat value(0);
  while (true) {
    if (pivot_budget && res.pivots >= pivot_budget) {
      res.optimal = false;
      break;
    }
    // Bland: entering = smallest index with positive reduced cost
    std::uint32_t enter = width - 1;
    for (std::uint32_t cidx = 0; cidx < width - 1; ++cidx)
      if (z[cidx].num > 0) {
        enter = cidx;
        break;
      }
    if (enter == width - 1) break;  // optimal
    // ratio test, Bland ties by smallest basis variable
    std::uint32_t leave = m;
    Rat best;
    for (std::uint32_t r = 0; r < m; ++r) {
      if (T[r][enter].num <= 0) continue;
      Rat ratio = T[r][width - 1] / T[r][enter];
      if (leave == m || ratio < best || (ratio == best && basis[r] < basis[leave])) {
        best = ratio;
        leave = r;
      }
    }
    check_invariant(leave != m, "packing LP unbounded");
    // pivot
    Rat piv = T[leave][enter];
    for (auto& x : T[leave]) x = x / piv;
    for (std::uint32_t r = 0; r < m; ++r) {
      if (r == leave || T[r][enter].is_zero()) continue;
      Rat f = T[r][enter];
      for (std::uint32_t cidx = 0; cidx < width; ++cidx)
        T[r][cidx] = T[r][cidx] - f * T[leave][cidx];
    }
    if (!z[enter].is_zero()) {
      Rat f = z[enter];
      for (std::uint32_t cidx = 0; cidx < width; ++cidx) z[cidx] = z[cidx] - f * T[leave][cidx];
    }
    basis[leave] = enter;
    ++res.pivots;
  }

  res.item_duals.assign(n, Rat(0));
  for (std::uint32_t r = 0; r < m; ++r)
    if (basis[r] < n) res.item_duals[basis[r]] = T[r][width - 1];
  for (const auto& y : res.item_duals) check_invariant(!y.is_negative(), "negative dual");
  // packing feasibility: every column prices <= 1 (certificate check)
  for (std::uint32_t c = 0; c < m; ++c) {
    Rat s(0);
    for (std::uint32_t i = 0; i < n; ++i)
      if (std::binary_search(inst.item_cols[i].begin(), inst.item_cols[i].end(), c))
        s = s + res.item_duals[i];
    check_invariant(s <= Rat(1), "dual packing certificate violated");
  }
  Rat total(0);
  for (const auto& y : res.item_duals) total = total + y;
  res.value = total;
  return res;
}

// ---------------------------------------------------------------------------

bool is_cover(const CoverInstance& inst, const std::vector<std::uint32_t>& cols) {
  std::vector<std::uint8_t> has(inst.n_cols, 0);
  for (auto c : cols) has[c] = 1;
  for (const auto& ic : inst.item_cols) {
    bool ok = false;
    for (auto c : ic)
      if (has[c]) {
        ok = true;
        break;
      }
    if (!ok) return false;
  }
  return true;
}

namespace {

// Greedy with optional randomized tie-breaking among near-best columns.
std::vector<std::uint32_t> greedy_cover_seeded(const CoverInstance& inst, std::uint64_t seed,
                                               bool randomized) {
  const std::uint32_t n = static_cast<std::uint32_t>(inst.item_cols.size());
  std::vector<std::vector<std::uint32_t>> col_items(inst.n_cols);
  for (std::uint32_t i = 0; i < n; ++i)
    for (auto c : inst.item_cols[i]) col_items[c].push_back(i);
  std::vector<std::uint8_t> covered(n, 0);
  std::uint32_t remaining = n;
  std::vector<std::uint32_t> out;
  std::mt19937_64 rng(seed);
  std::vector<std::uint32_t> gains(inst.n_cols);
  while (remaining) {
    std::uint32_t best_gain = 0;
    for (std::uint32_t c = 0; c < inst.n_cols; ++c) {
      std::uint32_t gain = 0;
      for (auto i : col_items[c]) gain += !covered[i];
      gains[c] = gain;
      best_gain = std::max(best_gain, gain);
    }
    check_invariant(best_gain > 0, "greedy stalled on an uncoverable item");
    std::uint32_t pick = inst.n_cols;
    if (!randomized) {
      for (std::uint32_t c = 0; c < inst.n_cols; ++c)
        if (gains[c] == best_gain) {
          pick = c;
          break;
        }
    } else {
      // choose uniformly among columns achieving >= 90% of the best gain
      std::uint32_t threshold = best_gain - best_gain / 10;
      std::uint32_t count = 0;
      for (std::uint32_t c = 0; c < inst.n_cols; ++c)
        if (gains[c] >= threshold) ++count;
      std::uint32_t idx = static_cast<std::uint32_t>(rng() % count);
      for (std::uint32_t c = 0; c < inst.n_cols; ++c)
        if (gains[c] >= threshold && idx-- == 0) {
          pick = c;
          break;
        }
    }
    out.push_back(pick);
    for (auto i : col_items[pick])
      if (!covered[i]) {
        covered[i] = 1;
        --remaining;
      }
  }
  return out;
}

}  // namespace

std::vector<std::uint32_t> greedy_cover(const CoverInstance& inst) {
  return greedy_cover_seeded(inst, 0, false);
}

namespace {

// Instance reductions: forced unique-cover columns, duplicate/dominated items,
// dominated columns. Maps survive so covers lift back to original column ids.
struct Reduced {
  CoverInstance core;
  std::vector<std::uint32_t> core_col_to_orig;
  std::vector<std::uint32_t> forced;  // original column ids
};

Reduced reduce(const CoverInstance& inst) {
  const std::uint32_t n = static_cast<std::uint32_t>(inst.item_cols.size());
  std::vector<std::vector<std::uint32_t>> items;  // live items (col sets, original ids)
  items.reserve(n);
  for (const auto& ic : inst.item_cols) items.push_back(ic);

  std::vector<std::uint8_t> col_alive(inst.n_cols, 1);
  std::vector<std::uint32_t> forced;
  std::vector<std::uint8_t> forced_flag(inst.n_cols, 0);

  bool changed = true;
  while (changed) {
    changed = false;
    // forced columns: an item with a single alive column
    for (const auto& ic : items) {
      std::uint32_t last = inst.n_cols, alive = 0;
      for (auto c : ic)
        if (col_alive[c]) {
          ++alive;
          last = c;
        }
      check_invariant(alive > 0, "reduction made an item uncoverable");
      if (alive == 1 && !forced_flag[last]) {
        forced_flag[last] = 1;
        forced.push_back(last);
        changed = true;
      }
    }
    // drop items covered by forced columns
    if (changed || !forced.empty()) {
      std::vector<std::vector<std::uint32_t>> keep;
      keep.reserve(items.size());
      for (auto& ic : items) {
        bool covered = false;
        for (auto c : ic)
          if (forced_flag[c]) {
            covered = true;
            break;
          }
        if (!covered) keep.push_back(std::move(ic));
      }
      if (keep.size() != items.size()) changed = true;
      items = std::move(keep);
    }
    // duplicate items collapse regardless of scale
    {
      std::vector<std::vector<std::uint32_t>> alive_sets(items.size());
      for (std::size_t i = 0; i < items.size(); ++i)
        for (auto c : items[i])
          if (col_alive[c]) alive_sets[i].push_back(c);
      std::set<std::vector<std::uint32_t>> seen;
      std::vector<std::vector<std::uint32_t>> keep;
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (seen.insert(alive_sets[i]).second) keep.push_back(std::move(items[i]));
        else changed = true;
      }
      items = std::move(keep);
    }
    // pairwise dominance is quadratic; worth it only at moderate scale
    const bool do_dominance = items.size() <= 4000;
    if (do_dominance) {
      // item dominance: drop items whose alive column set contains another's
      std::vector<std::vector<std::uint32_t>> alive_sets(items.size());
      for (std::size_t i = 0; i < items.size(); ++i)
        for (auto c : items[i])
          if (col_alive[c]) alive_sets[i].push_back(c);
      std::vector<std::size_t> order(items.size());
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return alive_sets[a].size() < alive_sets[b].size();
      });
      std::vector<std::uint8_t> drop(items.size(), 0);
      std::vector<std::size_t> kept_order;
      for (auto i : order) {
        for (auto si : kept_order) {
          const auto& small = alive_sets[si];
          if (small.size() > alive_sets[i].size()) break;
          if (std::includes(alive_sets[i].begin(), alive_sets[i].end(), small.begin(),
                            small.end())) {
            drop[i] = 1;  // superset of a harder item
            changed = true;
            break;
          }
        }
        if (!drop[i]) kept_order.push_back(i);
      }
      std::vector<std::vector<std::uint32_t>> keep;
      for (std::size_t i = 0; i < items.size(); ++i)
        if (!drop[i]) keep.push_back(std::move(items[i]));
      items = std::move(keep);
    }
    if (do_dominance) {
      // column dominance: drop alive columns whose live-item set is contained
      // in another's (ties keep the smaller id)
      std::vector<std::vector<std::uint32_t>> col_items(inst.n_cols);
      for (std::uint32_t i = 0; i < items.size(); ++i)
        for (auto c : items[i])
          if (col_alive[c]) col_items[c].push_back(i);
      std::vector<std::uint32_t> alive_cols;
      for (std::uint32_t c = 0; c < inst.n_cols; ++c)
        if (col_alive[c] && !forced_flag[c]) alive_cols.push_back(c);
      for (auto c : alive_cols) {
        if (col_items[c].empty()) {
          col_alive[c] = 0;  // useless column
          continue;
        }
        for (auto d : alive_cols) {
          if (d == c || !col_alive[d] || !col_alive[c]) continue;
          if (col_items[c].size() > col_items[d].size()) continue;
          if (col_items[c].size() == col_items[d].size() && c < d) continue;
          if (std::includes(col_items[d].begin(), col_items[d].end(), col_items[c].begin(),
                            col_items[c].end())) {
            col_alive[c] = 0;
            changed = true;
            break;
          }
        }
      }
    }
  }

  Reduced r;
  r.forced = forced;
  std::sort(r.forced.begin(), r.forced.end());
  std::vector<std::uint32_t> col_map(inst.n_cols, UINT32_MAX);
  for (std::uint32_t c = 0; c < inst.n_cols; ++c)
    if (col_alive[c] && !forced_flag[c]) {
      col_map[c] = static_cast<std::uint32_t>(r.core_col_to_orig.size());
      r.core_col_to_orig.push_back(c);
    }
  r.core.n_cols = static_cast<std::uint32_t>(r.core_col_to_orig.size());
  for (const auto& ic : items) {
    std::vector<std::uint32_t> mapped;
    for (auto c : ic)
      if (col_map[c] != UINT32_MAX) mapped.push_back(col_map[c]);
    check_invariant(!mapped.empty(), "core item lost its columns");
    std::sort(mapped.begin(), mapped.end());
    r.core.item_cols.push_back(std::move(mapped));
  }
  return r;
}

struct BnB {
  const CoverInstance& core;
  std::vector<std::vector<std::uint32_t>> col_items;
  std::vector<std::uint8_t> item_covered;
  std::vector<std::uint32_t> chosen;
  std::vector<std::uint32_t> best;
  std::uint32_t best_size;
  std::uint64_t nodes = 0;
  std::uint64_t node_budget;
  bool aborted = false;
  std::vector<std::uint32_t> items_by_degree;  // ascending column count
  std::vector<std::uint8_t> col_used;          // packing scratch

  BnB(const CoverInstance& c, std::uint32_t incumbent, std::uint64_t budget)
      : core(c), best_size(incumbent), node_budget(budget) {
    col_items.resize(core.n_cols);
    for (std::uint32_t i = 0; i < core.item_cols.size(); ++i)
      for (auto col : core.item_cols[i]) col_items[col].push_back(i);
    item_covered.assign(core.item_cols.size(), 0);
    items_by_degree.resize(core.item_cols.size());
    std::iota(items_by_degree.begin(), items_by_degree.end(), 0);
    std::sort(items_by_degree.begin(), items_by_degree.end(),
              [&](std::uint32_t a, std::uint32_t b) {
                if (core.item_cols[a].size() != core.item_cols[b].size())
                  return core.item_cols[a].size() < core.item_cols[b].size();
                return a < b;
              });
    col_used.assign(core.n_cols, 0);
  }

  // column-disjoint packing over the uncovered items, allocation-free
  std::uint32_t lower_bound() {
    std::fill(col_used.begin(), col_used.end(), 0);
    std::uint32_t count = 0;
    for (auto i : items_by_degree) {
      if (item_covered[i]) continue;
      bool clash = false;
      for (auto c : core.item_cols[i])
        if (col_used[c]) {
          clash = true;
          break;
        }
      if (clash) continue;
      for (auto c : core.item_cols[i]) col_used[c] = 1;
      ++count;
    }
    return count;
  }

  void dfs() {
    ++nodes;
    if (node_budget && nodes > node_budget) {
      aborted = true;
      return;
    }
    // uncovered item with fewest columns
    std::uint32_t pick = UINT32_MAX, pick_deg = UINT32_MAX;
    for (std::uint32_t i = 0; i < core.item_cols.size(); ++i) {
      if (item_covered[i]) continue;
      std::uint32_t deg = static_cast<std::uint32_t>(core.item_cols[i].size());
      if (deg < pick_deg) {
        pick_deg = deg;
        pick = i;
      }
    }
    if (pick == UINT32_MAX) {
      if (chosen.size() < best_size) {
        best_size = static_cast<std::uint32_t>(chosen.size());
        best = chosen;
      }
      return;
    }
    if (chosen.size() + 1 >= best_size) return;  // even one more column is too many
    if (chosen.size() + lower_bound() >= best_size) return;
    for (auto col : core.item_cols[pick]) {
      if (aborted) return;
      // cover everything this column covers
      std::vector<std::uint32_t> newly;
      for (auto i : col_items[col])
        if (!item_covered[i]) {
          item_covered[i] = 1;
          newly.push_back(i);
        }
      chosen.push_back(col);
      dfs();
      chosen.pop_back();
      for (auto i : newly) item_covered[i] = 0;
    }
  }
};

}  // namespace

SigmaResult exact_sigma(const CoverInstance& inst, const SolveParams& params) {
  inst.validate();
  SigmaResult res;
  Reduced red = reduce(inst);
  const std::uint64_t forced = red.forced.size();

  if (red.core.item_cols.empty()) {
    res.lower = res.upper = forced;
    res.cover_cols = red.forced;
    res.root_bound = Rat(BigInt(forced));
    res.cert = CertKind::LpTight;
    res.nodes = 0;
    check_invariant(is_cover(inst, res.cover_cols), "forced columns fail to cover");
    return res;
  }

  // incumbent: forced + greedy on the core
  auto greedy_core = greedy_cover(red.core);
  std::uint32_t incumbent = static_cast<std::uint32_t>(greedy_core.size());

  // root bound: LP on the core (sound even when the pivot budget cuts it off),
  // strengthened by the column-disjoint packing bound
  Rat core_lp(0);
  if (params.use_lp) {
    auto lp = lp_lower_bound(red.core, params.lp_pivot_budget);
    core_lp = lp.value;
  }
  res.root_bound = Rat(BigInt(forced)) + core_lp;
  std::uint64_t core_lb = core_lp.ceil().convert_to<std::uint64_t>();
  {
    BnB probe(red.core, UINT32_MAX, 0);
    core_lb = std::max<std::uint64_t>(core_lb, probe.lower_bound());
  }
  std::uint64_t root_lb = forced + core_lb;

  if (root_lb >= forced + incumbent) {
    // LP already certifies the greedy incumbent
    res.lower = res.upper = forced + incumbent;
    res.cover_cols = red.forced;
    for (auto c : greedy_core) res.cover_cols.push_back(red.core_col_to_orig[c]);
    std::sort(res.cover_cols.begin(), res.cover_cols.end());
    res.cert = CertKind::LpTight;
    check_invariant(is_cover(inst, res.cover_cols), "LP-tight cover fails to cover");
    return res;
  }

  BnB bnb(red.core, incumbent, params.node_budget);
  bnb.best = greedy_core;
  bnb.dfs();
  res.nodes = bnb.nodes;

  res.upper = forced + bnb.best_size;
  res.cover_cols = red.forced;
  for (auto c : bnb.best) res.cover_cols.push_back(red.core_col_to_orig[c]);
  std::sort(res.cover_cols.begin(), res.cover_cols.end());
  check_invariant(is_cover(inst, res.cover_cols), "branch-and-bound cover fails to cover");

  if (bnb.aborted) {
    res.lower = root_lb;
    if (res.lower > res.upper) res.lower = res.upper;  // LP can't exceed a found cover
    res.cert = CertKind::Interval;
  } else {
    res.lower = res.upper;
    res.cert = res.upper == root_lb ? CertKind::LpTight : CertKind::ClosedTree;
  }
  return res;
}

std::vector<std::vector<std::uint32_t>> enumerate_covers(const CoverInstance& inst,
                                                         std::uint64_t size, std::uint64_t cap,
                                                         bool* complete) {
  inst.validate();
  std::set<std::vector<std::uint32_t>> found;  // sorted column sets
  bool full = true;
  std::vector<std::vector<std::uint32_t>> col_items(inst.n_cols);
  for (std::uint32_t i = 0; i < inst.item_cols.size(); ++i)
    for (auto c : inst.item_cols[i]) col_items[c].push_back(i);
  std::vector<std::uint32_t> covered_count(inst.item_cols.size(), 0);
  std::vector<std::uint32_t> chosen;
  std::vector<std::uint8_t> in_chosen(inst.n_cols, 0);

  // Branch on the first uncovered item over all of its columns. The same set
  // can be reached along several paths, so results are deduplicated; the cap
  // counts distinct covers.
  std::function<void()> go = [&]() {
    if (!full) return;
    std::uint32_t pick = UINT32_MAX;
    for (std::uint32_t i = 0; i < inst.item_cols.size(); ++i)
      if (!covered_count[i]) {
        pick = i;
        break;
      }
    if (pick == UINT32_MAX) {
      std::vector<std::uint32_t> sorted = chosen;
      std::sort(sorted.begin(), sorted.end());
      if (found.count(sorted)) return;
      if (found.size() >= cap) {
        full = false;
        return;
      }
      found.insert(std::move(sorted));
      return;
    }
    if (chosen.size() >= size) return;
    for (auto c : inst.item_cols[pick]) {
      if (in_chosen[c]) continue;
      for (auto i : col_items[c]) ++covered_count[i];
      chosen.push_back(c);
      in_chosen[c] = 1;
      go();
      in_chosen[c] = 0;
      chosen.pop_back();
      for (auto i : col_items[c]) --covered_count[i];
      if (!full) return;
    }
  };
  go();
  if (complete) *complete = full;
  return std::vector<std::vector<std::uint32_t>>(found.begin(), found.end());
}

}  // namespace ucov
