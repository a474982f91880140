#pragma once

// Dense univariate polynomials over F_p and their complete factorization:
// squarefree decomposition (with p-th root extraction in characteristic p),
// distinct-degree splitting by Frobenius powers, and equal-degree splitting
// in the Cantor-Zassenhaus style. Equal-degree splitting is the only
// randomized step and consumes a caller-provided generator, so a recorded
// seed reproduces the whole factorization byte for byte.

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "arbor/gf.hpp"

namespace arbor {

// Coefficients in ascending degree, no trailing zeros; empty = 0.
using Poly = std::vector<uint32_t>;

inline void poly_trim(Poly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

inline int poly_deg(const Poly& f) { return static_cast<int>(f.size()) - 1; }
inline bool poly_is_zero(const Poly& f) { return f.empty(); }
inline bool poly_is_one(const Poly& f) { return f.size() == 1 && f[0] == 1; }
inline Poly poly_one() { return {1}; }
inline Poly poly_x() { return {0, 1}; }

inline Poly poly_add(const PrimeField& F, const Poly& a, const Poly& b) {
  Poly c(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < c.size(); ++i)
    c[i] = F.add(i < a.size() ? a[i] : 0, i < b.size() ? b[i] : 0);
  poly_trim(c);
  return c;
}

inline Poly poly_sub(const PrimeField& F, const Poly& a, const Poly& b) {
  Poly c(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < c.size(); ++i)
    c[i] = F.sub(i < a.size() ? a[i] : 0, i < b.size() ? b[i] : 0);
  poly_trim(c);
  return c;
}

inline Poly poly_scale(const PrimeField& F, const Poly& a, uint32_t c) {
  if (c == 0) return {};
  Poly b(a.size());
  for (size_t i = 0; i < a.size(); ++i) b[i] = F.mul(a[i], c);
  return b;
}

inline Poly poly_mul(const PrimeField& F, const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<uint64_t> acc(a.size() + b.size() - 1, 0);
  const uint64_t p = F.p();
  const uint64_t guard = UINT64_MAX - uint64_t(p - 1) * (p - 1);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) {
      uint64_t& slot = acc[i + j];
      slot += uint64_t(a[i]) * b[j];
      if (slot >= guard) slot %= p;
    }
  }
  Poly c(acc.size());
  for (size_t i = 0; i < acc.size(); ++i) c[i] = static_cast<uint32_t>(acc[i] % p);
  poly_trim(c);
  return c;
}

inline Poly poly_monic(const PrimeField& F, const Poly& a) {
  if (a.empty()) return a;
  return poly_scale(F, a, F.inv(a.back()));
}

// Division with remainder; returns {quotient, remainder}.
inline std::pair<Poly, Poly> poly_divmod(const PrimeField& F, Poly a, const Poly& b) {
  if (b.empty()) throw std::domain_error("poly_divmod: division by zero polynomial");
  if (a.size() < b.size()) return {{}, std::move(a)};
  const uint32_t lead_inv = F.inv(b.back());
  Poly q(a.size() - b.size() + 1, 0);
  for (int i = static_cast<int>(a.size()) - 1; i >= poly_deg(b); --i) {
    if (a[i] == 0) continue;
    const uint32_t coeff = F.mul(a[i], lead_inv);
    q[i - poly_deg(b)] = coeff;
    for (size_t j = 0; j < b.size(); ++j)
      a[i - poly_deg(b) + j] = F.sub(a[i - poly_deg(b) + j], F.mul(coeff, b[j]));
  }
  poly_trim(a);
  poly_trim(q);
  return {std::move(q), std::move(a)};
}

inline Poly poly_mod(const PrimeField& F, const Poly& a, const Poly& b) {
  return poly_divmod(F, a, b).second;
}

inline Poly poly_div_exact(const PrimeField& F, const Poly& a, const Poly& b) {
  auto [q, r] = poly_divmod(F, a, b);
  if (!r.empty()) throw std::logic_error("poly_div_exact: nonzero remainder");
  return q;
}

inline Poly poly_gcd(const PrimeField& F, Poly a, Poly b) {
  while (!b.empty()) {
    Poly r = poly_mod(F, a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return a.empty() ? a : poly_monic(F, a);
}

inline Poly poly_derivative(const PrimeField& F, const Poly& a) {
  if (a.size() <= 1) return {};
  Poly d(a.size() - 1);
  for (size_t i = 1; i < a.size(); ++i)
    d[i - 1] = F.mul(a[i], static_cast<uint32_t>(i % F.p()));
  poly_trim(d);
  return d;
}

inline uint32_t poly_eval(const PrimeField& F, const Poly& a, uint32_t x) {
  uint32_t acc = 0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) acc = F.add(F.mul(acc, x), *it);
  return acc;
}

inline Poly poly_mulmod(const PrimeField& F, const Poly& a, const Poly& b, const Poly& m) {
  return poly_mod(F, poly_mul(F, a, b), m);
}

inline Poly poly_powmod(const PrimeField& F, Poly base, uint64_t e, const Poly& m) {
  Poly acc = poly_mod(F, poly_one(), m);
  base = poly_mod(F, base, m);
  while (e) {
    if (e & 1) acc = poly_mulmod(F, acc, base, m);
    base = poly_mulmod(F, base, base, m);
    e >>= 1;
  }
  return acc;
}

inline bool poly_is_squarefree(const PrimeField& F, const Poly& f) {
  if (poly_deg(f) <= 1) return poly_deg(f) >= 0;
  const Poly d = poly_derivative(F, f);
  if (d.empty()) return false;  // f = g(x^p)
  return poly_deg(poly_gcd(F, f, d)) == 0;
}

namespace detail {

// In F_p[x], a polynomial with zero derivative is g(x^p); since c^p = c for
// c in F_p, its p-th root just contracts the exponents.
inline Poly poly_pth_root(const PrimeField& F, const Poly& f) {
  Poly g;
  g.reserve(f.size() / F.p() + 1);
  for (size_t i = 0; i < f.size(); i += F.p()) g.push_back(f[i]);
  poly_trim(g);
  return g;
}

inline void squarefree_decomposition(const PrimeField& F, const Poly& f_monic, int outer_mult,
                                     std::vector<std::pair<Poly, int>>& out) {
  Poly c = poly_gcd(F, f_monic, poly_derivative(F, f_monic));
  Poly w = poly_div_exact(F, f_monic, c);
  int i = 1;
  while (!poly_is_one(w)) {
    const Poly y = poly_gcd(F, w, c);
    const Poly z = poly_div_exact(F, w, y);
    if (!poly_is_one(z)) out.emplace_back(z, i * outer_mult);
    w = y;
    c = poly_div_exact(F, c, y);
    ++i;
  }
  if (!poly_is_one(c))
    squarefree_decomposition(F, poly_pth_root(F, c), outer_mult * int(F.p()), out);
}

// Splits a squarefree product of degree-d irreducibles.
inline void equal_degree_split(const PrimeField& F, const Poly& f, int d, std::mt19937_64& rng,
                               std::vector<Poly>& out) {
  if (poly_deg(f) == d) {
    out.push_back(f);
    return;
  }
  while (true) {
    Poly u(size_t(poly_deg(f)), 0);
    for (auto& c : u) c = static_cast<uint32_t>(rng() % F.p());
    poly_trim(u);
    if (poly_deg(u) < 1) continue;
    Poly g = poly_gcd(F, u, f);
    if (poly_deg(g) > 0 && poly_deg(g) < poly_deg(f)) {
      equal_degree_split(F, g, d, rng, out);
      equal_degree_split(F, poly_div_exact(F, f, g), d, rng, out);
      return;
    }
    // v = u^((p^d - 1)/2) via the norm map u^(1 + p + ... + p^(d-1)), then
    // a (p-1)/2 power; avoids exponents beyond 64 bits
    Poly w = poly_mod(F, u, f);
    Poly norm = w;
    for (int i = 1; i < d; ++i) {
      norm = poly_powmod(F, norm, F.p(), f);
      norm = poly_mulmod(F, norm, w, f);
    }
    const Poly v = poly_powmod(F, norm, (F.p() - 1) / 2, f);
    g = poly_gcd(F, poly_sub(F, v, poly_one()), f);
    if (poly_deg(g) > 0 && poly_deg(g) < poly_deg(f)) {
      equal_degree_split(F, g, d, rng, out);
      equal_degree_split(F, poly_div_exact(F, f, g), d, rng, out);
      return;
    }
  }
}

}  // namespace detail

// Complete monic factorization with multiplicities, sorted by degree then
// coefficient order.
inline std::vector<std::pair<Poly, int>> poly_factor(const PrimeField& F, const Poly& f,
                                                     std::mt19937_64& rng) {
  if (poly_deg(f) < 1) throw std::invalid_argument("poly_factor: need degree >= 1");
  std::vector<std::pair<Poly, int>> squarefree;
  detail::squarefree_decomposition(F, poly_monic(F, f), 1, squarefree);

  std::vector<std::pair<Poly, int>> out;
  for (const auto& [part, mult] : squarefree) {
    // distinct-degree stage
    Poly rest = part;
    Poly frob = poly_powmod(F, poly_x(), F.p(), rest);  // x^p mod rest
    std::vector<std::pair<Poly, int>> by_degree;
    for (int d = 1; poly_deg(rest) >= 2 * d; ++d) {
      const Poly g = poly_gcd(F, poly_sub(F, frob, poly_x()), rest);
      if (poly_deg(g) > 0) {
        by_degree.emplace_back(g, d);
        rest = poly_div_exact(F, rest, g);
        frob = poly_mod(F, frob, rest);
      }
      frob = poly_powmod(F, frob, F.p(), rest);
    }
    if (poly_deg(rest) > 0) by_degree.emplace_back(rest, poly_deg(rest));
    for (const auto& [product, d] : by_degree) {
      std::vector<Poly> irreducibles;
      detail::equal_degree_split(F, product, d, rng, irreducibles);
      for (Poly& g : irreducibles) out.emplace_back(std::move(g), mult);
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
    for (size_t i = a.first.size(); i-- > 0;)
      if (a.first[i] != b.first[i]) return a.first[i] < b.first[i];
    return a.second < b.second;
  });
  return out;
}

inline bool poly_is_irreducible(const PrimeField& F, const Poly& f, std::mt19937_64& rng) {
  const auto factors = poly_factor(F, f, rng);
  return factors.size() == 1 && factors[0].second == 1;
}

inline std::string poly_to_string(const PrimeField& F, const Poly& f) {
  (void)F;
  if (f.empty()) return "0";
  std::string out;
  for (int i = poly_deg(f); i >= 0; --i) {
    if (f[size_t(i)] == 0) continue;
    if (!out.empty()) out += " + ";
    if (i == 0 || f[size_t(i)] != 1) out += std::to_string(f[size_t(i)]);
    if (i > 0) {
      if (f[size_t(i)] != 1) out += "*";
      out += "x";
      if (i > 1) out += "^" + std::to_string(i);
    }
  }
  return out;
}

}  // namespace arbor
