#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ucov/group.hpp"
#include "ucov/setcover.hpp"

namespace ucov {

inline constexpr std::uint64_t kSigmaInfinite = UINT64_MAX;  // cyclic-quotient sentinel

// A finite group as ids 0..n-1 with a multiplication oracle: a dense table for
// n <= 10^4 and an on-the-fly functional product above.
class FiniteGroupModel {
 public:
  static constexpr std::uint32_t kDenseLimit = 10000;

  std::uint32_t size() const { return n_; }
  std::uint32_t identity() const { return id_; }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
    return dense_.empty() ? fn_(a, b) : dense_[std::uint64_t(a) * n_ + b];
  }
  std::uint32_t inv(std::uint32_t a) const { return inv_[a]; }
  std::uint64_t element_order(std::uint32_t a) const;

  static FiniteGroupModel from_mul_table(std::uint32_t n, std::vector<std::uint32_t> table);
  static FiniteGroupModel from_function(std::uint32_t n, std::uint32_t identity,
                                        std::function<std::uint32_t(std::uint32_t, std::uint32_t)> fn);
  static FiniteGroupModel cyclic(std::uint32_t n);
  static FiniteGroupModel quaternion8();
  static FiniteGroupModel special_linear2(std::uint64_t q);   // SL2(q)
  static FiniteGroupModel projective_sl2(std::uint64_t q);    // L2(q)
  static FiniteGroupModel symmetric3() { return special_linear2(2); }
  static FiniteGroupModel from_unitary(std::shared_ptr<const GroupTable> t);

  // Quotient by a verified normal subgroup; ids are coset indices ordered by
  // their least member.
  FiniteGroupModel quotient(const std::vector<std::uint32_t>& normal_sorted) const;

  bool is_subgroup(const std::vector<std::uint32_t>& sorted_ids) const;
  bool is_normal(const std::vector<std::uint32_t>& sorted_ids) const;
  std::vector<std::uint32_t> closure(const std::vector<std::uint32_t>& gens,
                                     std::uint32_t abort_above = 0) const;  // sorted; empty on abort
  std::vector<std::uint32_t> center() const;
  std::vector<std::uint32_t> commutator_subgroup() const;
  bool is_perfect() const;
  bool is_cyclic() const;

 private:
  std::uint32_t n_ = 0, id_ = 0;
  std::vector<std::uint32_t> dense_;
  std::function<std::uint32_t(std::uint32_t, std::uint32_t)> fn_;
  std::vector<std::uint32_t> inv_;
  std::shared_ptr<const GroupTable> keepalive_;

  void finish_inverses();
};

// ---------------------------------------------------------------------------

struct MaxSubgroups {
  std::vector<std::vector<std::uint32_t>> subs;  // sorted member ids
  std::vector<std::string> labels;
  bool complete = false;                         // coverage + inventory certificate
  std::vector<std::pair<std::uint64_t, std::uint64_t>> inventory;  // (order, count), sorted
  std::string notes;
};

// Complete subgroup lattice by closure saturation (|G| <= 2000), filtered to
// the maximal ones.
MaxSubgroups all_maximal_subgroups_brute(const FiniteGroupModel& g);

// Also exposes the full lattice for the transfer lemmas.
std::vector<std::vector<std::uint32_t>> all_subgroups_brute(const FiniteGroupModel& g);

struct HarvestParams {
  std::uint64_t seed = 0;
  std::uint32_t samples_per_rep = 4000;  // 2-generator probes per prime-order class rep
  unsigned jobs = 0;
};

// Maximal subgroups of U3(q), q <= 5: the geometric classes are built exactly
// (point stabilizers by fixed-point bucketing, triangle and imaginary-triangle
// stabilizers by conjugating one representative across its class); the
// remaining classes come from seeded two-generator closures over every
// prime-order conjugacy class representative, closed under conjugation.
// Containment pruning keeps only maximal members; the certificate demands full
// element coverage and an inventory consistent with the classification lists
// evaluated at q.
MaxSubgroups harvest_maximals_u3(const GroupTable& t, const UnitaryGeometry& geo,
                                 const Field& F6, const ImagOrbit& orbit,
                                 const FiniteGroupModel& model,
                                 const HarvestParams& params = {});

// ---------------------------------------------------------------------------

struct ReducedInstance {
  CoverInstance inst;
  std::vector<std::uint32_t> universe_reps;  // one generator per merged pattern
  std::uint64_t n_max_cyclic = 0;
};

// Universe reduction: cover the generators of the maximal cyclic subgroups
// (covering those covers G), merging elements with identical
// subgroup-incidence patterns. Requires a complete maximal list.
ReducedInstance reduce_instance(const FiniteGroupModel& g, const MaxSubgroups& maximals);

struct SigmaOutcome {
  SigmaResult result;
  bool exact = false;
  std::uint64_t sigma = 0;  // valid when exact
  std::vector<std::uint32_t> chosen;  // column ids into maximals.subs
};

// End-to-end: reduce, solve, expand, and post-verify that the chosen subgroups
// cover every element of G (the independent full-membership re-check).
SigmaOutcome sigma_of(const FiniteGroupModel& g, const MaxSubgroups& maximals,
                      const SolveParams& params = {});

// Convenience: brute-force pipeline for tiny groups.
SigmaOutcome sigma_brute(const FiniteGroupModel& g, const SolveParams& params = {});

// ---------------------------------------------------------------------------

struct QuotientCheckReport {
  std::uint64_t sigma_g = 0;
  std::uint64_t sigma_quotient = 0;  // kSigmaInfinite when G/N is cyclic
  bool quotient_cyclic = false;
  bool inequality_holds = false;     // sigma(G) <= sigma(G/N)
  bool equality = false;
  // equality <=> some minimal cover consists of N-containing subgroups; the
  // witness search is capped, so the direction can come back undetermined
  enum class WitnessStatus : std::uint8_t { Found, ExhaustedAllCovers, Capped } witness;
};

QuotientCheckReport quotient_sigma_check(const FiniteGroupModel& g,
                                         const std::vector<std::uint32_t>& normal_sorted,
                                         std::uint64_t enumeration_cap = 1000000);

struct PerfectTransferReport {
  bool perfect = false;
  bool maximals_contain_center = false;  // meaningful when perfect
  std::uint64_t sigma_g = 0;
  std::uint64_t sigma_g_mod_center = 0;
  bool equality = false;
};

PerfectTransferReport perfect_transfer_check(const FiniteGroupModel& g);

}  // namespace ucov
