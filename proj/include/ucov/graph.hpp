#pragma once

#include <cstdint>
#include <vector>

#include "ucov/geometry.hpp"
#include "ucov/setcover.hpp"

namespace ucov {

// The unitary polarity graph of PG(2, q^2): vertices are the points, P ~ Q iff
// P lies on perp(Q). Loops sit exactly on the absolute vertices and are kept
// as flags, outside the adjacency lists; a triangle always means three
// distinct mutually adjacent vertices.
struct PolarityGraph {
  const UnitaryGeometry* geo = nullptr;
  std::uint32_t n = 0;
  std::vector<std::vector<std::uint32_t>> adj;  // sorted, loopless
  std::vector<std::uint8_t> loop;
  std::vector<std::uint64_t> bits;  // n rows of ceil(n/64) words
  std::uint32_t words = 0;

  bool adjacent(std::uint32_t u, std::uint32_t v) const {
    return (bits[std::uint64_t(u) * words + (v >> 6)] >> (v & 63)) & 1;
  }
  std::uint64_t n_edges() const;
  std::vector<std::uint32_t> nonabsolute_vertices() const;
};

PolarityGraph build_polarity_graph(const UnitaryGeometry& geo);

// 3-cycle count by vertex-centric wedge closure over the bit matrix.
std::uint64_t triangle_census(const PolarityGraph& g);
// Independent recount by edge iteration with sorted-list intersections.
std::uint64_t triangle_census_edge_iter(const PolarityGraph& g);
// All triangles listed (each once, ascending vertex triples).
std::vector<std::array<std::uint32_t, 3>> graph_triangles(const PolarityGraph& g);

// The triangle-free set sizes of the known constructions.
std::uint64_t m_formula(const PrimePower& q);

struct VertexSubset {
  std::vector<std::uint32_t> ids;  // sorted
  bool verified_trifree = false;
};

// algorithm 0: edge-centric sorted-intersection; 1: vertex-centric bit wedges.
bool verify_triangle_free(const PolarityGraph& g, const std::vector<std::uint32_t>& ids,
                          int algorithm);

struct TrifreeSearchParams {
  std::uint64_t seed = 0;
  std::uint64_t budget = 1000000;  // local-search move budget (per restart slice)
  std::uint32_t restarts = 4;
  unsigned jobs = 0;
};

// Randomized greedy + swap local search with a tabu list, restricted to the
// nonabsolute vertices. Deterministic for a fixed seed/restart/budget triple:
// the result is the best subset under (size, then lexicographic ids).
VertexSubset trifree_search(const PolarityGraph& g, const TrifreeSearchParams& params);

struct TrifreeExactResult {
  VertexSubset best;
  bool proven = false;
  std::uint64_t nodes = 0;
  Rat hitting_lp;  // LP bound of the complementary triangle hitting set
};

// Maximum triangle-free induced subset of the nonabsolute vertices: the
// complement of a minimum vertex set hitting all triangles, solved exactly by
// the set-cover engine. Limited to instances with at most 64 nonabsolute
// vertices (q <= 3).
TrifreeExactResult trifree_exact(const PolarityGraph& g);

}  // namespace ucov
