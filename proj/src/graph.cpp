#include "ucov/graph.hpp"

#include <algorithm>
#include <random>

#include "ucov/parallel.hpp"

namespace ucov {

std::uint64_t PolarityGraph::n_edges() const {
  std::uint64_t d = 0;
  for (const auto& a : adj) d += a.size();
  return d / 2;
}

std::vector<std::uint32_t> PolarityGraph::nonabsolute_vertices() const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t v = 0; v < n; ++v)
    if (!loop[v]) out.push_back(v);
  return out;
}

PolarityGraph build_polarity_graph(const UnitaryGeometry& geo) {
  PolarityGraph g;
  g.geo = &geo;
  g.n = geo.n_points();
  g.adj.resize(g.n);
  g.loop.resize(g.n);
  g.words = (g.n + 63) / 64;
  g.bits.assign(std::uint64_t(g.n) * g.words, 0);
  for (std::uint32_t v = 0; v < g.n; ++v) {
    g.loop[v] = geo.absolute(v);
    for (std::uint32_t u : geo.points_on_line(geo.perp(v))) {
      if (u == v) continue;
      g.adj[v].push_back(u);
      g.bits[std::uint64_t(v) * g.words + (u >> 6)] |= std::uint64_t(1) << (u & 63);
    }
    // neighborhood is the polar line, minus the loop on absolute vertices
    check_invariant(g.adj[v].size() == geo.field().size() + 1 - (g.loop[v] ? 1 : 0),
                    "polarity graph degree mismatch");
  }
  // symmetry
  for (std::uint32_t v = 0; v < g.n; ++v)
    for (auto u : g.adj[v]) check_invariant(g.adjacent(u, v), "polarity graph not symmetric");
  return g;
}

std::uint64_t triangle_census(const PolarityGraph& g) {
  std::uint64_t count = 0;
  for (std::uint32_t u = 0; u < g.n; ++u)
    for (auto v : g.adj[u]) {
      if (v <= u) continue;
      for (auto w : g.adj[u]) {
        if (w <= v) continue;
        if (g.adjacent(v, w)) ++count;
      }
    }
  return count;
}

std::uint64_t triangle_census_edge_iter(const PolarityGraph& g) {
  std::uint64_t count = 0;
  for (std::uint32_t u = 0; u < g.n; ++u)
    for (auto v : g.adj[u]) {
      if (v <= u) continue;
      // common neighbors w > v via sorted intersection
      const auto& a = g.adj[u];
      const auto& b = g.adj[v];
      std::size_t i = 0, j = 0;
      while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) ++i;
        else if (b[j] < a[i]) ++j;
        else {
          if (a[i] > v) ++count;
          ++i;
          ++j;
        }
      }
    }
  return count;
}

std::vector<std::array<std::uint32_t, 3>> graph_triangles(const PolarityGraph& g) {
  std::vector<std::array<std::uint32_t, 3>> out;
  for (std::uint32_t u = 0; u < g.n; ++u)
    for (auto v : g.adj[u]) {
      if (v <= u) continue;
      for (auto w : g.adj[u]) {
        if (w <= v) continue;
        if (g.adjacent(v, w)) out.push_back({u, v, w});
      }
    }
  return out;
}

std::uint64_t m_formula(const PrimePower& q) {
  const std::uint64_t q4 = q.q * q.q * q.q * q.q;
  if (q.p == 2) return q4 / 2;
  if (q.p == 3) return q.q * q.q * q.q + 2 * q.q * q.q - 2 * q.q - 1;
  // p = 3n +- 1 >= 5
  std::uint64_t n = (q.p % 3 == 1) ? (q.p - 1) / 3 : (q.p + 1) / 3;
  return n * q4 / q.p;
}

bool verify_triangle_free(const PolarityGraph& g, const std::vector<std::uint32_t>& ids,
                          int algorithm) {
  std::vector<std::uint8_t> in(g.n, 0);
  for (auto v : ids) {
    require(v < g.n, "vertex id out of range");
    in[v] = 1;
  }
  if (algorithm == 0) {
    // edge-centric: for each selected edge, a selected common neighbor kills it
    for (auto u : ids)
      for (auto v : g.adj[u]) {
        if (v <= u || !in[v]) continue;
        const auto& a = g.adj[u];
        const auto& b = g.adj[v];
        std::size_t i = 0, j = 0;
        while (i < a.size() && j < b.size()) {
          if (a[i] < b[j]) ++i;
          else if (b[j] < a[i]) ++j;
          else {
            if (in[a[i]]) return false;
            ++i;
            ++j;
          }
        }
      }
    return true;
  }
  // vertex-centric: wedges through each selected vertex, closed by the bit matrix
  for (auto u : ids) {
    std::vector<std::uint32_t> sel;
    for (auto v : g.adj[u])
      if (in[v]) sel.push_back(v);
    for (std::size_t i = 0; i < sel.size(); ++i)
      for (std::size_t j = i + 1; j < sel.size(); ++j)
        if (g.adjacent(sel[i], sel[j])) return false;
  }
  return true;
}

namespace {

struct SearchState {
  const PolarityGraph& g;
  std::vector<std::uint32_t> nonabs;
  std::vector<std::uint8_t> in;           // selected flags (over all vertex ids)
  std::vector<std::uint32_t> selected;    // current set
  std::vector<std::uint64_t> tabu_until;  // per vertex id
  std::uint64_t tick = 0;

  explicit SearchState(const PolarityGraph& graph)
      : g(graph), nonabs(graph.nonabsolute_vertices()), in(graph.n, 0), tabu_until(graph.n, 0) {}

  // edges inside selected ∩ N(v)
  std::vector<std::pair<std::uint32_t, std::uint32_t>> conflicts(std::uint32_t v) const {
    std::vector<std::uint32_t> sel;
    for (auto u : g.adj[v])
      if (in[u]) sel.push_back(u);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    for (std::size_t i = 0; i < sel.size(); ++i)
      for (std::size_t j = i + 1; j < sel.size(); ++j)
        if (g.adjacent(sel[i], sel[j])) out.emplace_back(sel[i], sel[j]);
    return out;
  }

  void add(std::uint32_t v) {
    in[v] = 1;
    selected.push_back(v);
  }
  void remove(std::uint32_t v) {
    in[v] = 0;
    selected.erase(std::find(selected.begin(), selected.end(), v));
  }
};

VertexSubset run_one_restart(const PolarityGraph& g, std::uint64_t seed, std::uint64_t budget) {
  std::mt19937_64 rng(seed);
  SearchState st(g);

  // randomized greedy construction
  std::vector<std::uint32_t> order = st.nonabs;
  std::shuffle(order.begin(), order.end(), rng);
  for (auto v : order)
    if (st.conflicts(v).empty()) st.add(v);

  std::vector<std::uint32_t> best = st.selected;
  const std::uint64_t tabu_tenure = 8 + st.nonabs.size() / 8;
  for (std::uint64_t move = 0; move < budget; ++move) {
    ++st.tick;
    std::uint32_t v = st.nonabs[rng() % st.nonabs.size()];
    if (st.in[v]) continue;
    auto conf = st.conflicts(v);
    if (conf.empty()) {
      st.add(v);
    } else {
      // if one endpoint hits every conflict edge, swap it out
      std::uint32_t u = conf[0].first;
      bool star_u = true, star_w = true;
      std::uint32_t w = conf[0].second;
      for (auto& e : conf) {
        if (e.first != u && e.second != u) star_u = false;
        if (e.first != w && e.second != w) star_w = false;
      }
      std::uint32_t out_v = star_u ? u : (star_w ? w : UINT32_MAX);
      if (out_v != UINT32_MAX && st.tabu_until[out_v] < st.tick) {
        st.remove(out_v);
        st.add(v);
        st.tabu_until[out_v] = st.tick + tabu_tenure;
      } else if (rng() % 64 == 0 && !st.selected.empty()) {
        // kick: drop a random vertex to escape plateaus
        std::uint32_t drop = st.selected[rng() % st.selected.size()];
        st.remove(drop);
        st.tabu_until[drop] = st.tick + tabu_tenure;
      }
    }
    if (st.selected.size() > best.size()) best = st.selected;
  }
  std::sort(best.begin(), best.end());
  VertexSubset out;
  out.ids = std::move(best);
  return out;
}

}  // namespace

VertexSubset trifree_search(const PolarityGraph& g, const TrifreeSearchParams& params) {
  unsigned jobs = params.jobs ? params.jobs : default_jobs();
  std::vector<VertexSubset> results(params.restarts);
  parallel_chunks(params.restarts, jobs, [&](std::uint64_t lo, std::uint64_t hi, unsigned) {
    for (std::uint64_t r = lo; r < hi; ++r)
      results[r] = run_one_restart(g, params.seed * 1000003 + r, params.budget);
  });
  // best under (size desc, then lexicographic ids)
  VertexSubset best;
  for (auto& r : results) {
    if (r.ids.size() > best.ids.size() || (r.ids.size() == best.ids.size() && r.ids < best.ids))
      best = std::move(r);
  }
  check_invariant(verify_triangle_free(g, best.ids, 0), "search produced a triangle");
  check_invariant(verify_triangle_free(g, best.ids, 1), "verifiers disagree");
  for (auto v : best.ids) check_invariant(!g.loop[v], "search selected an absolute vertex");
  best.verified_trifree = true;
  return best;
}

TrifreeExactResult trifree_exact(const PolarityGraph& g) {
  auto nonabs = g.nonabsolute_vertices();
  if (nonabs.size() > 64) throw resource_limit("exact triangle-free search capped at 64 vertices");
  std::vector<std::uint32_t> idx(g.n, UINT32_MAX);
  for (std::uint32_t i = 0; i < nonabs.size(); ++i) idx[nonabs[i]] = i;

  auto tris = graph_triangles(g);
  CoverInstance inst;
  inst.n_cols = static_cast<std::uint32_t>(nonabs.size());
  for (const auto& t : tris) {
    // triangles only use nonabsolute vertices
    std::vector<std::uint32_t> cols{idx[t[0]], idx[t[1]], idx[t[2]]};
    for (auto c : cols) check_invariant(c != UINT32_MAX, "triangle through an absolute vertex");
    std::sort(cols.begin(), cols.end());
    inst.item_cols.push_back(std::move(cols));
  }

  TrifreeExactResult res;
  if (inst.item_cols.empty()) {
    res.best.ids = nonabs;
    res.best.verified_trifree = true;
    res.proven = true;
    res.hitting_lp = Rat(0);
    return res;
  }
  auto lp = lp_lower_bound(inst);
  res.hitting_lp = lp.value;
  auto sigma = exact_sigma(inst);
  check_invariant(sigma.exact(), "hitting-set solve did not close");
  res.proven = true;
  res.nodes = sigma.nodes;
  std::vector<std::uint8_t> hit(nonabs.size(), 0);
  for (auto c : sigma.cover_cols) hit[c] = 1;
  for (std::uint32_t i = 0; i < nonabs.size(); ++i)
    if (!hit[i]) res.best.ids.push_back(nonabs[i]);
  check_invariant(verify_triangle_free(g, res.best.ids, 0), "exact subset has a triangle");
  check_invariant(verify_triangle_free(g, res.best.ids, 1), "verifiers disagree");
  res.best.verified_trifree = true;
  return res;
}

}  // namespace ucov
