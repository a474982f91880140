#pragma once

// Degree-2 rational maps over a prime field: expression parsing, the
// projective action, critical points, post-critical orbits, and the pullback
// of an irreducible fiber polynomial through the map.
//
// Fibers live on the projective line. The point at infinity cannot be a root
// of a polynomial, so it travels through the tree as a virtual-root marker;
// its preimages are the roots of the homogenized denominator.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "arbor/gf.hpp"
#include "arbor/poly.hpp"

namespace arbor {

class parse_error : public std::invalid_argument {
 public:
  explicit parse_error(const std::string& what) : std::invalid_argument(what) {}
};

// A root of the base polynomial lies on the critical orbit.
class post_critical_base_error : public std::domain_error {
 public:
  explicit post_critical_base_error(const std::string& what) : std::domain_error(what) {}
};

// The pullback acquired a repeated root (the finite-field symptom of a
// ramified prime); carries the offending tree level when known.
class ramified_error : public std::domain_error {
 public:
  explicit ramified_error(const std::string& what, int level = -1)
      : std::domain_error(what), level_(level) {}
  int level() const { return level_; }

 private:
  int level_;
};

// The pullback degree dropped: deg h = 2 deg g - drop, because the point at
// infinity (and for drop = 2, only it) lies in the fiber. The affine part h
// is preserved so the caller can follow the virtual-root path.
class degree_drop : public std::domain_error {
 public:
  degree_drop(Poly affine_part, int drop)
      : std::domain_error("lift: degree drop " + std::to_string(drop) +
                          " (point at infinity in the fiber)"),
        affine_part_(std::move(affine_part)),
        drop_(drop) {}
  const Poly& affine_part() const { return affine_part_; }
  int drop() const { return drop_; }

 private:
  Poly affine_part_;
  int drop_;
};

namespace detail {

// Integer-coefficient rational expression in x, evaluated symbolically.
// Only a front-end for entering maps, so sizes are guarded tightly.
struct IntPoly {
  std::vector<long long> c;  // ascending degree

  void trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
  }
  int deg() const { return static_cast<int>(c.size()) - 1; }
};

inline long long checked_ll(long long v) {
  constexpr long long kBound = 1LL << 60;
  if (v > kBound || v < -kBound) throw parse_error("map expression: coefficient overflow");
  return v;
}

inline IntPoly ip_add(const IntPoly& a, const IntPoly& b, long long sign_b) {
  IntPoly r;
  r.c.resize(std::max(a.c.size(), b.c.size()), 0);
  for (size_t i = 0; i < r.c.size(); ++i) {
    const long long av = i < a.c.size() ? a.c[i] : 0;
    const long long bv = i < b.c.size() ? b.c[i] : 0;
    r.c[i] = checked_ll(av + sign_b * bv);
  }
  r.trim();
  return r;
}

inline IntPoly ip_mul(const IntPoly& a, const IntPoly& b) {
  if (a.c.empty() || b.c.empty()) return {};
  if (a.deg() + b.deg() > 32) throw parse_error("map expression: degree too large");
  IntPoly r;
  r.c.assign(a.c.size() + b.c.size() - 1, 0);
  for (size_t i = 0; i < a.c.size(); ++i)
    for (size_t j = 0; j < b.c.size(); ++j)
      r.c[i + j] = checked_ll(r.c[i + j] + checked_ll(a.c[i] * b.c[j]));
  r.trim();
  return r;
}

struct IntRat {
  IntPoly num, den;  // den nonzero
};

inline IntRat ir_mul(const IntRat& a, const IntRat& b) {
  return {ip_mul(a.num, b.num), ip_mul(a.den, b.den)};
}

inline IntRat ir_div(const IntRat& a, const IntRat& b) {
  if (b.num.c.empty()) throw parse_error("map expression: division by zero");
  return {ip_mul(a.num, b.den), ip_mul(a.den, b.num)};
}

inline IntRat ir_add(const IntRat& a, const IntRat& b, long long sign_b) {
  return {ip_add(ip_mul(a.num, b.den), ip_mul(b.num, a.den), sign_b), ip_mul(a.den, b.den)};
}

class ExprParser {
 public:
  explicit ExprParser(const std::string& text) : text_(text) {}

  IntRat parse() {
    IntRat r = expr();
    skip_ws();
    if (pos_ != text_.size()) throw parse_error("map expression: trailing input");
    return r;
  }

 private:
  IntRat expr() {
    IntRat acc = term();
    while (true) {
      skip_ws();
      if (accept('+'))
        acc = ir_add(acc, term(), 1);
      else if (accept('-'))
        acc = ir_add(acc, term(), -1);
      else
        return acc;
    }
  }

  IntRat term() {
    IntRat acc = factor();
    while (true) {
      skip_ws();
      if (accept('*'))
        acc = ir_mul(acc, factor());
      else if (accept('/'))
        acc = ir_div(acc, factor());
      else
        return acc;
    }
  }

  IntRat factor() {
    skip_ws();
    if (accept('-')) return ir_mul({{{-1}}, {{1}}}, factor());
    IntRat base = atom();
    skip_ws();
    if (accept('^')) {
      skip_ws();
      const long long e = integer();
      if (e < 0 || e > 32) throw parse_error("map expression: exponent out of range");
      IntRat acc{{{1}}, {{1}}};
      for (long long i = 0; i < e; ++i) acc = ir_mul(acc, base);
      return acc;
    }
    return base;
  }

  IntRat atom() {
    skip_ws();
    if (accept('(')) {
      IntRat inner = expr();
      skip_ws();
      if (!accept(')')) throw parse_error("map expression: missing ')'");
      return inner;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'x' || text_[pos_] == 'X')) {
      ++pos_;
      return {{{0, 1}}, {{1}}};
    }
    return {{{integer()}}, {{1}}};
  }

  long long integer() {
    skip_ws();
    size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start || (pos_ == start + 1 && !std::isdigit(static_cast<unsigned char>(text_[start]))))
      throw parse_error("map expression: expected a number");
    return checked_ll(std::stoll(text_.substr(start, pos_ - start)));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  const std::string& text_;
  size_t pos_ = 0;
};

}  // namespace detail

struct ProjPoint {
  bool inf = false;
  uint32_t x = 0;  // meaningful when !inf

  bool operator==(const ProjPoint& o) const { return inf == o.inf && (inf || x == o.x); }
  bool operator<(const ProjPoint& o) const {
    if (inf != o.inf) return !inf;
    return !inf && x < o.x;
  }
};

inline std::string to_string(const ProjPoint& pt) {
  return pt.inf ? "inf" : std::to_string(pt.x);
}

struct RationalMap {
  PrimeField field;
  Poly num, den;  // coprime, max degree exactly 2, nonzero resultant

  uint32_t hom_num_coeff(int i) const { return i < int(num.size()) ? num[size_t(i)] : 0; }
  uint32_t hom_den_coeff(int i) const { return i < int(den.size()) ? den[size_t(i)] : 0; }
};

// Resultant of the two degree-2 homogenizations; nonzero exactly when the
// pair defines a morphism of degree 2 on the projective line.
inline uint32_t map_resultant(const PrimeField& F, const Poly& u, const Poly& v) {
  const auto coeff = [](const Poly& f, int i) -> uint32_t {
    return i < int(f.size()) ? f[size_t(i)] : 0;
  };
  const uint32_t a2 = coeff(u, 2), a1 = coeff(u, 1), a0 = coeff(u, 0);
  const uint32_t b2 = coeff(v, 2), b1 = coeff(v, 1), b0 = coeff(v, 0);
  const uint32_t m20 = F.sub(F.mul(a2, b0), F.mul(a0, b2));
  const uint32_t m21 = F.sub(F.mul(a2, b1), F.mul(a1, b2));
  const uint32_t m10 = F.sub(F.mul(a1, b0), F.mul(a0, b1));
  return F.sub(F.mul(m20, m20), F.mul(m21, m10));
}

inline RationalMap make_map(const std::string& expr, const PrimeField& field) {
  const detail::IntRat parsed = detail::ExprParser(expr).parse();
  Poly u(parsed.num.c.size()), v(parsed.den.c.size());
  for (size_t i = 0; i < u.size(); ++i) u[i] = field.reduce_signed(parsed.num.c[i]);
  for (size_t i = 0; i < v.size(); ++i) v[i] = field.reduce_signed(parsed.den.c[i]);
  poly_trim(u);
  poly_trim(v);
  if (poly_is_zero(v)) throw parse_error("map: denominator vanishes mod p");
  const Poly g = poly_gcd(field, u, v);
  if (poly_deg(g) > 0) {
    u = poly_div_exact(field, u, g);
    v = poly_div_exact(field, v, g);
  }
  // normalize so the denominator (or numerator) is monic, fixing the pair
  const uint32_t scale = field.inv(poly_deg(v) >= poly_deg(u) ? v.back() : u.back());
  u = poly_scale(field, u, scale);
  v = poly_scale(field, v, scale);
  if (std::max(poly_deg(u), poly_deg(v)) != 2)
    throw std::invalid_argument("map: degree must be exactly 2 mod p");
  if (map_resultant(field, u, v) == 0)
    throw std::invalid_argument("map: degenerate mod p (zero resultant)");
  return RationalMap{field, std::move(u), std::move(v)};
}

inline ProjPoint apply(const RationalMap& f, const ProjPoint& pt) {
  const PrimeField& F = f.field;
  if (pt.inf) {
    const uint32_t un = f.hom_num_coeff(2), vn = f.hom_den_coeff(2);
    if (vn == 0) return {true, 0};
    return {false, F.mul(un, F.inv(vn))};
  }
  const uint32_t uv = poly_eval(F, f.num, pt.x);
  const uint32_t vv = poly_eval(F, f.den, pt.x);
  if (vv == 0) return {true, 0};
  return {false, F.mul(uv, F.inv(vv))};
}

// The two critical points: projective roots of the Wronskian u'v - uv'
// homogenized to degree 2 (infinity contributes when the degree drops).
inline std::vector<ProjPoint> critical_points(const RationalMap& f) {
  const PrimeField& F = f.field;
  const Poly w = poly_sub(F, poly_mul(F, poly_derivative(F, f.num), f.den),
                          poly_mul(F, f.num, poly_derivative(F, f.den)));
  if (poly_is_zero(w)) throw std::invalid_argument("map: inseparable (zero Wronskian)");
  std::vector<ProjPoint> pts;
  if (poly_deg(w) >= 1) {
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);  // factorization of a quadratic; any seed works
    for (const auto& [factor, mult] : poly_factor(F, w, rng)) {
      (void)mult;
      if (poly_deg(factor) == 1) pts.push_back({false, F.neg(factor[0])});
    }
  }
  for (int i = poly_deg(w); i < 2; ++i) pts.push_back({true, 0});  // multiplicity at infinity
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

// Forward orbits of the critical points: P = { f^n(c) : n >= 1 }.
inline std::set<ProjPoint> post_critical_set(const RationalMap& f) {
  std::set<ProjPoint> orbit;
  for (const ProjPoint& c : critical_points(f)) {
    ProjPoint cur = apply(f, c);
    while (orbit.insert(cur).second) cur = apply(f, cur);
  }
  return orbit;
}

// Pullback of a monic polynomial g through f: the normalized polynomial
// whose roots are the affine preimages of the roots of g. Throws degree_drop
// when infinity lies in the fiber and ramified_error on repeated roots.
inline Poly lift(const Poly& g, const RationalMap& f) {
  if (poly_deg(g) < 1) throw std::invalid_argument("lift: need degree >= 1");
  const PrimeField& F = f.field;
  const int d = poly_deg(g);
  // h = v^d g(u/v) = sum g_i u^i v^(d-i)
  Poly h;
  Poly upow = poly_one();
  std::vector<Poly> vpows(size_t(d) + 1);
  vpows[0] = poly_one();
  for (int i = 1; i <= d; ++i) vpows[size_t(i)] = poly_mul(F, vpows[size_t(i - 1)], f.den);
  for (int i = 0; i <= d; ++i) {
    h = poly_add(F, h, poly_scale(F, poly_mul(F, upow, vpows[size_t(d - i)]), g[size_t(i)]));
    if (i < d) upow = poly_mul(F, upow, f.num);
  }
  const int drop = 2 * d - poly_deg(h);
  if (poly_deg(h) >= 1) {
    if (!poly_is_squarefree(F, h)) throw ramified_error("lift: pullback is not squarefree");
    h = poly_monic(F, h);
  }
  if (drop > 0) throw degree_drop(std::move(h), drop);
  return h;
}

// Affine preimages of the point at infinity: roots of the denominator. The
// marker persists when deg v < 2 (then f(inf) = inf); deg v = 0 would put a
// double point over infinity, the ramified symptom again.
struct InfinityLift {
  Poly denominator_part;  // monic, possibly constant one
  bool still_infinite = false;
};

inline InfinityLift lift_infinity(const RationalMap& f) {
  const PrimeField& F = f.field;
  const int dv = poly_deg(f.den);
  if (dv == 0) throw ramified_error("lift: infinity is a double preimage of itself");
  InfinityLift out;
  out.denominator_part = poly_monic(F, f.den);
  out.still_infinite = (dv == 1);
  if (dv == 2 && !poly_is_squarefree(F, f.den))
    throw ramified_error("lift: denominator has a repeated root");
  return out;
}

// Monic numerator of f^n(x) - a; oracle for the product of all level-n
// fiber factors.
inline Poly iterate_numerator(const RationalMap& f, uint32_t a, int n) {
  const PrimeField& F = f.field;
  Poly U = poly_x(), V = poly_one();
  for (int step = 0; step < n; ++step) {
    const Poly uu = poly_mul(F, U, U);
    const Poly uv = poly_mul(F, U, V);
    const Poly vv = poly_mul(F, V, V);
    Poly nu, nv;
    for (int i = 0; i <= 2; ++i) {
      const Poly& basis = (i == 0) ? vv : (i == 1 ? uv : uu);
      nu = poly_add(F, nu, poly_scale(F, basis, f.hom_num_coeff(i)));
      nv = poly_add(F, nv, poly_scale(F, basis, f.hom_den_coeff(i)));
    }
    U = std::move(nu);
    V = std::move(nv);
  }
  Poly res = poly_sub(F, U, poly_scale(F, V, a));
  if (poly_is_zero(res)) throw std::logic_error("iterate_numerator: vanished");
  return poly_monic(F, res);
}

}  // namespace arbor
