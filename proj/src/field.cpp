#include "ucov/field.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace ucov {

namespace {

// Plain digit-vector arithmetic over GF(p), used while bootstrapping a context
// (before any tables exist) and as the slow multiply for huge fields.

std::vector<std::uint32_t> idx_to_digits(std::uint64_t x, std::uint64_t p, std::uint32_t k) {
  std::vector<std::uint32_t> d(k);
  for (std::uint32_t i = 0; i < k; ++i) {
    d[i] = static_cast<std::uint32_t>(x % p);
    x /= p;
  }
  return d;
}

std::uint64_t digits_to_idx(const std::vector<std::uint32_t>& d, std::uint64_t p) {
  std::uint64_t x = 0;
  for (std::size_t i = d.size(); i-- > 0;) x = x * p + d[i];
  return x;
}

// c := a*b mod modulus, all digit vectors over GF(p); modulus monic degree k.
std::vector<std::uint32_t> poly_mulmod(const std::vector<std::uint32_t>& a,
                                       const std::vector<std::uint32_t>& b,
                                       const std::vector<std::uint32_t>& modulus,
                                       std::uint64_t p, std::uint32_t k) {
  std::vector<std::uint64_t> prod(2 * k, 0);
  for (std::uint32_t i = 0; i < k; ++i) {
    if (!a[i]) continue;
    for (std::uint32_t j = 0; j < k; ++j) prod[i + j] += std::uint64_t(a[i]) * b[j];
  }
  for (auto& v : prod) v %= p;
  for (std::size_t d = 2 * k - 1; d >= k; --d) {
    std::uint64_t c = prod[d] % p;
    if (!c) continue;
    prod[d] = 0;
    for (std::uint32_t j = 0; j < k; ++j) {
      // subtract c * modulus[j] * x^(d-k+j)
      std::uint64_t sub = (c * modulus[j]) % p;
      prod[d - k + j] = (prod[d - k + j] + p - sub) % p;
    }
  }
  std::vector<std::uint32_t> out(k);
  for (std::uint32_t i = 0; i < k; ++i) out[i] = static_cast<std::uint32_t>(prod[i] % p);
  return out;
}

// Trial division of monic f (degree vector over GF(p), constant first, length
// deg+1) by monic g; returns true if g | f. Everything is tiny here.
bool divides_exactly(std::vector<std::uint32_t> f, const std::vector<std::uint32_t>& g, std::uint64_t p) {
  const int dg = static_cast<int>(g.size()) - 1;
  for (int d = static_cast<int>(f.size()) - 1; d >= dg; --d) {
    std::uint64_t c = f[d];
    if (!c) continue;
    f[d] = 0;
    for (int j = 0; j < dg; ++j) f[d - dg + j] = static_cast<std::uint32_t>((f[d - dg + j] + p * c - c * g[j] % p) % p);
  }
  return std::all_of(f.begin(), f.end(), [](std::uint32_t v) { return v == 0; });
}

bool irreducible_over_fp(const std::vector<std::uint32_t>& f, std::uint64_t p) {
  const std::uint32_t k = static_cast<std::uint32_t>(f.size()) - 1;
  if (k == 1) return true;
  // trial division by every monic polynomial of degree 1..k/2
  for (std::uint32_t d = 1; 2 * d <= k; ++d) {
    std::uint64_t count = 1;
    for (std::uint32_t i = 0; i < d; ++i) count *= p;
    for (std::uint64_t enc = 0; enc < count; ++enc) {
      std::vector<std::uint32_t> g = idx_to_digits(enc, p, d);
      g.push_back(1);  // monic
      if (divides_exactly(f, g, p)) return false;
    }
  }
  return true;
}

}  // namespace

Field::Field(std::uint64_t p, std::uint32_t k) : p_(p), k_(k) {
  require(is_prime(p), "field characteristic must be prime");
  require(k >= 1 && k <= 12, "field degree must be in [1, 12]");
  q_ = 1;
  for (std::uint32_t i = 0; i < k; ++i) {
    q_ *= p;
    if (q_ > kMaxCardinality) throw resource_limit("field cardinality exceeds 11^6 budget");
  }

  // Canonical modulus: least coefficient sequence, read base p.
  for (std::uint64_t enc = 0;; ++enc) {
    check_invariant(enc < q_, "no irreducible modulus found");
    std::vector<std::uint32_t> f = idx_to_digits(enc, p, k);
    f.push_back(1);
    if (irreducible_over_fp(f, p)) {
      modulus_ = f;
      break;
    }
  }

  // Addition split tables: x = lo + hi * split with split = p^ceil(k/2).
  const std::uint32_t klo = (k + 1) / 2;
  split_ = static_cast<std::uint32_t>(ipow(p, klo));
  lo_.resize(q_);
  hi_.resize(q_);
  neg_.resize(q_);
  for (std::uint64_t x = 0; x < q_; ++x) {
    lo_[x] = static_cast<std::uint32_t>(x % split_);
    hi_[x] = static_cast<std::uint32_t>(x / split_);
    auto d = idx_to_digits(x, p, k);
    for (auto& v : d) v = static_cast<std::uint32_t>((p - v) % p);
    neg_[x] = static_cast<std::uint32_t>(digits_to_idx(d, p));
  }
  const std::uint32_t hi_count = static_cast<std::uint32_t>(q_ / split_);  // split_ | q_
  lo_add_.resize(std::uint64_t(split_) * split_);
  hi_add_.resize(std::uint64_t(split_) * split_);  // stride split_, hi_count <= split_
  auto digit_add = [&](std::uint64_t a, std::uint64_t b, std::uint32_t width) {
    auto da = idx_to_digits(a, p, width), db = idx_to_digits(b, p, width);
    for (std::uint32_t i = 0; i < width; ++i) da[i] = static_cast<std::uint32_t>((da[i] + db[i]) % p);
    return digits_to_idx(da, p);
  };
  for (std::uint32_t a = 0; a < split_; ++a)
    for (std::uint32_t b = 0; b < split_; ++b)
      lo_add_[std::uint64_t(a) * split_ + b] = static_cast<std::uint32_t>(digit_add(a, b, klo));
  for (std::uint32_t a = 0; a < hi_count; ++a)
    for (std::uint32_t b = 0; b < hi_count; ++b)
      hi_add_[std::uint64_t(a) * split_ + b] =
          static_cast<std::uint32_t>(digit_add(a, b, k - klo) * split_);

  conj_exp_ = (k % 2 == 0) ? ipow(p, k / 2) : 0;

  // Find the least primitive element using slow arithmetic, then lay out
  // exp/log tables when within budget.
  auto slowmul = [&](std::uint64_t a, std::uint64_t b) {
    return digits_to_idx(
        poly_mulmod(idx_to_digits(a, p, k), idx_to_digits(b, p, k), modulus_, p, k), p);
  };
  auto slowpow = [&](std::uint64_t x, std::uint64_t e) {
    std::uint64_t r = 1;
    while (e) {
      if (e & 1) r = slowmul(r, x);
      x = slowmul(x, x);
      e >>= 1;
    }
    return r;
  };
  const auto factors = prime_factors(q_ - 1);
  for (std::uint64_t g = 1; g < q_; ++g) {
    bool primitive = true;
    for (auto ell : factors) {
      if (slowpow(g, (q_ - 1) / ell) == 1) {
        primitive = false;
        break;
      }
    }
    if (primitive) {
      generator_ = static_cast<std::uint32_t>(g);
      break;
    }
  }
  check_invariant(generator_ != 0 || q_ == 2, "no primitive element found");
  if (q_ == 2) generator_ = 1;

  if (q_ <= kTableLimit) {
    logt_.assign(q_, 0);
    expt_.assign(2 * (q_ - 1), 0);
    std::uint64_t acc = 1;
    for (std::uint64_t i = 0; i < q_ - 1; ++i) {
      expt_[i] = static_cast<std::uint32_t>(acc);
      expt_[i + (q_ - 1)] = static_cast<std::uint32_t>(acc);
      logt_[acc] = static_cast<std::uint32_t>(i);
      acc = slowmul(acc, generator_);
    }
    check_invariant(acc == 1, "generator order mismatch");
    if (k % 2 == 0) {
      conj_.resize(q_);
      for (std::uint64_t x = 0; x < q_; ++x) conj_[x] = pow(static_cast<std::uint32_t>(x), conj_exp_);
    }
  }
}

std::uint32_t Field::slow_mul(std::uint32_t x, std::uint32_t y) const {
  return static_cast<std::uint32_t>(digits_to_idx(
      poly_mulmod(idx_to_digits(x, p_, k_), idx_to_digits(y, p_, k_), modulus_, p_, k_), p_));
}

std::uint32_t Field::inv(std::uint32_t x) const {
  require(x != 0, "division by zero");
  if (!logt_.empty()) return expt_[(q_ - 1) - logt_[x]];
  return pow(x, q_ - 2);
}

std::uint32_t Field::pow(std::uint32_t x, std::uint64_t e) const {
  if (x == 0) return e == 0 ? 1 : 0;
  if (!logt_.empty()) {
    const std::uint64_t m = q_ - 1;
    return expt_[(std::uint64_t(logt_[x]) * (e % m)) % m];
  }
  std::uint32_t r = 1;
  while (e) {
    if (e & 1) r = slow_mul(r, x);
    x = slow_mul(x, x);
    e >>= 1;
  }
  return r;
}

bool Field::in_subfield(std::uint32_t x, std::uint32_t m) const {
  require(m >= 1 && k_ % m == 0, "subfield degree must divide context degree");
  return pow(x, ipow(p_, m)) == x;
}

std::uint64_t Field::element_order(std::uint32_t x) const {
  require(x != 0, "order of zero undefined");
  std::uint64_t ord = q_ - 1;
  for (auto ell : prime_factors(q_ - 1)) {
    while (ord % ell == 0 && pow(x, ord / ell) == 1) ord /= ell;
  }
  return ord;
}

std::vector<std::uint32_t> Field::digits(std::uint32_t x) const {
  return idx_to_digits(x, p_, k_);
}

std::uint32_t Field::from_digits(const std::vector<std::uint32_t>& d) const {
  std::vector<std::uint32_t> dd = d;
  dd.resize(k_, 0);
  for (auto& v : dd) v %= static_cast<std::uint32_t>(p_);
  return static_cast<std::uint32_t>(digits_to_idx(dd, p_));
}

std::shared_ptr<const Field> Field::make(std::uint64_t p, std::uint32_t k) {
  static std::mutex mu;
  static std::map<std::pair<std::uint64_t, std::uint32_t>, std::shared_ptr<const Field>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(p, k);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto f = std::shared_ptr<const Field>(new Field(p, k));
  cache[key] = f;
  return f;
}

const std::vector<std::uint32_t>& embedding(const Field& from, const Field& into) {
  require(from.p() == into.p(), "embedding requires equal characteristic");
  require(into.degree() % from.degree() == 0, "embedding requires divisible degrees");
  static std::mutex mu;
  static std::map<std::pair<const Field*, const Field*>, std::vector<std::uint32_t>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(&from, &into);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  // Least-index root of the small modulus in the big field.
  const auto& mod = from.modulus();
  std::uint32_t root = 0;
  bool found = false;
  for (std::uint64_t x = 0; x < into.size(); ++x) {
    std::uint32_t acc = 0;  // Horner, constant-first coefficients
    for (std::size_t i = mod.size(); i-- > 0;)
      acc = into.add(into.mul(acc, static_cast<std::uint32_t>(x)), mod[i] % static_cast<std::uint32_t>(into.p()));
    if (acc == 0) {
      root = static_cast<std::uint32_t>(x);
      found = true;
      break;
    }
  }
  check_invariant(found, "modulus has no root in extension");

  std::vector<std::uint32_t> table(from.size());
  for (std::uint64_t x = 0; x < from.size(); ++x) {
    const auto d = from.digits(static_cast<std::uint32_t>(x));
    std::uint32_t acc = 0;
    for (std::size_t i = d.size(); i-- > 0;) acc = into.add(into.mul(acc, root), d[i]);
    table[x] = acc;
  }
  auto [pos, inserted] = cache.emplace(key, std::move(table));
  (void)inserted;
  return pos->second;
}

// ---------------------------------------------------------------------------

Poly::Poly(const Field& fld, std::vector<std::uint32_t> coeffs) : f(&fld), c(std::move(coeffs)) {
  while (!c.empty() && c.back() == 0) c.pop_back();
}

std::uint32_t Poly::eval(std::uint32_t x) const {
  std::uint32_t acc = 0;
  for (std::size_t i = c.size(); i-- > 0;) acc = f->add(f->mul(acc, x), c[i]);
  return acc;
}

Poly Poly::x_minus(const Field& fld, std::uint32_t r) {
  return Poly(fld, {fld.neg(r), 1});
}

Poly operator+(const Poly& a, const Poly& b) {
  require(a.f == b.f, "polynomial context mismatch");
  std::vector<std::uint32_t> c(std::max(a.c.size(), b.c.size()), 0);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.f->add(a.coeff(i), b.coeff(i));
  return Poly(*a.f, std::move(c));
}

Poly operator*(const Poly& a, const Poly& b) {
  require(a.f == b.f, "polynomial context mismatch");
  if (a.is_zero() || b.is_zero()) return Poly(*a.f, {});
  std::vector<std::uint32_t> c(a.c.size() + b.c.size() - 1, 0);
  for (std::size_t i = 0; i < a.c.size(); ++i)
    for (std::size_t j = 0; j < b.c.size(); ++j)
      c[i + j] = a.f->add(c[i + j], a.f->mul(a.c[i], b.c[j]));
  return Poly(*a.f, std::move(c));
}

void Poly::divmod(const Poly& a, const Poly& b, Poly& quot, Poly& rem) {
  require(a.f == b.f, "polynomial context mismatch");
  require(!b.is_zero(), "division by zero polynomial");
  const Field& F = *a.f;
  std::vector<std::uint32_t> r = a.c;
  const int db = b.degree();
  std::vector<std::uint32_t> q(std::max<int>(0, a.degree() - db + 1), 0);
  const std::uint32_t lead_inv = F.inv(b.c.back());
  for (int d = a.degree(); d >= db; --d) {
    std::uint32_t coeff = r[d];
    if (!coeff) continue;
    std::uint32_t factor = F.mul(coeff, lead_inv);
    q[d - db] = factor;
    for (int j = 0; j <= db; ++j) r[d - db + j] = F.sub(r[d - db + j], F.mul(factor, b.c[j]));
  }
  quot = Poly(F, std::move(q));
  rem = Poly(F, std::move(r));
}

std::vector<std::uint32_t> find_roots(const Poly& g) {
  require(!g.is_zero(), "find_roots: zero polynomial");
  const Field& F = *g.f;
  std::vector<std::uint32_t> roots;
  Poly cur = g;
  for (std::uint64_t x = 0; x < F.size() && cur.degree() > 0; ++x) {
    while (cur.degree() > 0 && cur.eval(static_cast<std::uint32_t>(x)) == 0) {
      roots.push_back(static_cast<std::uint32_t>(x));
      Poly q, r;
      Poly::divmod(cur, Poly::x_minus(F, static_cast<std::uint32_t>(x)), q, r);
      check_invariant(r.is_zero(), "root division left a remainder");
      cur = q;
    }
  }
  return roots;
}

bool is_irreducible(const Poly& g) {
  require(g.is_monic(), "irreducibility test expects a monic polynomial");
  const Field& F = *g.f;
  const int n = g.degree();
  if (n <= 1) return n == 1;
  // No roots rules out all linear factors; for degree <= 3 that settles it.
  for (std::uint64_t x = 0; x < F.size(); ++x)
    if (g.eval(static_cast<std::uint32_t>(x)) == 0) return false;
  if (n <= 3) return true;
  // Trial division by monic divisors of degree 2..n/2.
  for (int d = 2; 2 * d <= n; ++d) {
    std::uint64_t count = 1;
    for (int i = 0; i < d; ++i) count *= F.size();
    for (std::uint64_t enc = 0; enc < count; ++enc) {
      std::vector<std::uint32_t> c(d + 1);
      std::uint64_t e = enc;
      for (int i = 0; i < d; ++i) {
        c[i] = static_cast<std::uint32_t>(e % F.size());
        e /= F.size();
      }
      c[d] = 1;
      Poly div(F, std::move(c)), q, r;
      Poly::divmod(g, div, q, r);
      if (r.is_zero()) return false;
    }
  }
  return true;
}

Poly poly_tilde(const Poly& g) {
  require(g.is_monic(), "tilde expects a monic polynomial");
  require(!g.c.empty() && g.c[0] != 0, "tilde expects a nonzero constant term");
  const Field& F = *g.f;
  const std::size_t n = g.c.size() - 1;
  const std::uint32_t a0bar = F.conj(g.c[0]);
  const std::uint32_t scale = F.inv(a0bar);
  std::vector<std::uint32_t> c(n + 1);
  c[n] = 1;  // conj(a0)^{-1} * conj(a0)
  c[0] = scale;
  for (std::size_t j = 1; j < n; ++j) c[j] = F.mul(scale, F.conj(g.c[n - j]));
  return Poly(F, std::move(c));
}

}  // namespace ucov
