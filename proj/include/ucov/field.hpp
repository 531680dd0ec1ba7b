#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "ucov/numbers.hpp"

namespace ucov {

// GF(p^k) with elements encoded as dense indices in [0, p^k): the index is the
// coefficient vector of the residue polynomial, base p, little-endian (so 0 is
// the additive and 1 the multiplicative identity, and the prime subfield sits
// at indices 0..p-1 in every context).
//
// The modulus is canonical: the monic irreducible of degree k whose coefficient
// sequence (c0..c_{k-1}), read as a base-p integer, is least. Multiplication
// uses exp/log tables when p^k <= 2^20 and modular polynomial arithmetic above.
// Contexts are immutable after construction and safe to share across threads.
class Field {
 public:
  static constexpr std::uint64_t kMaxCardinality = 1771561;  // 11^6
  static constexpr std::uint64_t kTableLimit = std::uint64_t(1) << 20;

  // Obtains (building and caching on first use) the field GF(p^k).
  static std::shared_ptr<const Field> make(std::uint64_t p, std::uint32_t k);

  std::uint64_t p() const { return p_; }
  std::uint32_t degree() const { return k_; }
  std::uint64_t size() const { return q_; }
  bool has_tables() const { return !logt_.empty(); }
  const std::vector<std::uint32_t>& modulus() const { return modulus_; }

  // --- arithmetic on raw element indices ---------------------------------
  std::uint32_t add(std::uint32_t x, std::uint32_t y) const {
    return lo_add_[lo_[x] * split_ + lo_[y]] + hi_add_[hi_[x] * split_ + hi_[y]];
  }
  std::uint32_t neg(std::uint32_t x) const { return neg_[x]; }
  std::uint32_t sub(std::uint32_t x, std::uint32_t y) const { return add(x, neg_[y]); }
  std::uint32_t mul(std::uint32_t x, std::uint32_t y) const {
    if (!logt_.empty()) return (x && y) ? expt_[logt_[x] + logt_[y]] : 0;
    return slow_mul(x, y);
  }
  std::uint32_t inv(std::uint32_t x) const;
  std::uint32_t pow(std::uint32_t x, std::uint64_t e) const;

  // Conjugation x -> x^s with s = p^(k/2); defined for even-degree contexts.
  // For GF(q^2) over GF(q) this is the bar involution; for GF(q^6) viewed as
  // GF((q^3)^2) it is the extended involution x -> x^(q^3).
  std::uint32_t conj(std::uint32_t x) const {
    check_invariant(k_ % 2 == 0, "conj: context degree must be even");
    return conj_.empty() ? pow(x, conj_exp_) : conj_[x];
  }
  std::uint64_t conj_exponent() const { return conj_exp_; }

  // Norm into the index-2 subfield: x -> x^(s+1).
  std::uint32_t norm(std::uint32_t x) const { return mul(x, conj(x)); }

  std::uint32_t frobenius(std::uint32_t x) const { return pow(x, p_); }

  // True iff x lies in the subfield GF(p^m); m must divide k.
  bool in_subfield(std::uint32_t x, std::uint32_t m) const;

  // Least-index primitive element (also the base of the exp/log tables).
  std::uint32_t generator() const { return generator_; }

  // Multiplicative order of x != 0.
  std::uint64_t element_order(std::uint32_t x) const;

  // --- digit view ---------------------------------------------------------
  std::vector<std::uint32_t> digits(std::uint32_t x) const;
  std::uint32_t from_digits(const std::vector<std::uint32_t>& d) const;

 private:
  Field(std::uint64_t p, std::uint32_t k);

  std::uint32_t slow_mul(std::uint32_t x, std::uint32_t y) const;

  std::uint64_t p_;
  std::uint32_t k_;
  std::uint64_t q_;
  std::uint64_t conj_exp_ = 0;
  std::uint32_t generator_ = 0;
  std::vector<std::uint32_t> modulus_;  // k+1 coefficients, constant first, monic

  // addition via digitwise split tables: x = lo + hi * split
  std::uint32_t split_ = 1;
  std::vector<std::uint32_t> lo_, hi_;
  std::vector<std::uint32_t> lo_add_, hi_add_;  // hi_add_ pre-scaled by split
  std::vector<std::uint32_t> neg_;

  std::vector<std::uint32_t> logt_;  // empty above kTableLimit
  std::vector<std::uint32_t> expt_;  // length 2(q-1), doubled to skip the mod
  std::vector<std::uint32_t> conj_;
};

// Canonical subfield embedding GF(p^m) -> GF(p^n), m | n: the class of x in the
// small field maps to the least-index root of the small modulus in the big
// field. Tables are cached per field pair.
const std::vector<std::uint32_t>& embedding(const Field& from, const Field& into);

inline std::uint32_t embed(std::uint32_t x, const Field& from, const Field& into) {
  return embedding(from, into)[x];
}

// ---------------------------------------------------------------------------
// Polynomials over a field context, coefficients constant-first. The stored
// vector never has a trailing zero except for the zero polynomial (empty).
struct Poly {
  const Field* f = nullptr;
  std::vector<std::uint32_t> c;

  Poly() = default;
  Poly(const Field& fld, std::vector<std::uint32_t> coeffs);

  int degree() const { return static_cast<int>(c.size()) - 1; }  // -1 for zero
  bool is_zero() const { return c.empty(); }
  bool is_monic() const { return !c.empty() && c.back() == 1; }
  std::uint32_t coeff(std::size_t i) const { return i < c.size() ? c[i] : 0; }
  std::uint32_t eval(std::uint32_t x) const;

  static Poly x_minus(const Field& fld, std::uint32_t r);  // x - r

  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);
  friend bool operator==(const Poly& a, const Poly& b) { return a.f == b.f && a.c == b.c; }

  // Division with remainder; b must be nonzero.
  static void divmod(const Poly& a, const Poly& b, Poly& quot, Poly& rem);
};

// All roots in the coefficient field, by exhaustive evaluation; repeated roots
// appear with their multiplicity (detected by repeated division).
std::vector<std::uint32_t> find_roots(const Poly& g);

// Whether a monic polynomial over any field has no roots and no proper monic
// factors (checked by trial division over the same field; degree <= 4 intended).
bool is_irreducible(const Poly& g);

// The Ennola-Wall tilde: for monic g with g(0) != 0 over an even-degree
// context, g~(x) = conj(a0)^{-1} (conj(a0) x^n + conj(a1) x^(n-1) + ... + 1).
// An involution, multiplicative on products, and fixing the minimal polynomials
// of unitary transformations.
Poly poly_tilde(const Poly& g);

}  // namespace ucov
