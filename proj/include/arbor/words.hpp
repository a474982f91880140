#pragma once

// Tree automorphisms given by wreath recursion over a finite state table,
// and formal words in those states and their inverses.
//
// A state g = (g_0, g_1) tau is stored as two child state references plus a
// root swap bit. Words act on vertices letter by letter, left to right; the
// section of a word at a vertex is computed with the cocycle rule
// (gg')_x = g_x g'_{(x)g} while the vertex moves under the prefix.

#include <cctype>
#include <cstdint>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "arbor/common.hpp"
#include "arbor/perm.hpp"

namespace arbor {

struct Vertex {
  int level = 0;       // number of bits
  uint32_t path = 0;   // MSB-first within `level` bits; 0 bits = root

  int bit(int i) const { return (path >> (level - 1 - i)) & 1; }  // i = 0 is the root step
  bool operator==(const Vertex& o) const { return level == o.level && path == o.path; }
};

inline Vertex vertex_from_string(const std::string& bits) {
  if (bits.size() > 31) throw std::invalid_argument("vertex_from_string: too deep");
  Vertex v;
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("vertex_from_string: bad bit");
    v.path = (v.path << 1) | uint32_t(c - '0');
    ++v.level;
  }
  return v;
}

inline std::string to_string(const Vertex& v) {
  std::string s(v.level, '0');
  for (int i = 0; i < v.level; ++i) s[i] = char('0' + v.bit(i));
  return s;
}

struct RecursionState {
  uint32_t child0 = 0;  // section at vertex 0
  uint32_t child1 = 0;  // section at vertex 1
  bool swap = false;    // root transposition
};

class RecursionTable {
 public:
  static constexpr uint32_t kIdentity = 0;

  RecursionTable() {
    states_.push_back({0, 0, false});
    names_.push_back("id");
  }

  uint32_t add_state(const std::string& name) {
    states_.push_back({0, 0, false});
    names_.push_back(lower(name));
    return static_cast<uint32_t>(states_.size() - 1);
  }

  void wire(uint32_t state, uint32_t child0, uint32_t child1, bool swap) {
    if (state == kIdentity) throw std::invalid_argument("wire: identity state is fixed");
    at(state);
    states_[state] = {child0, child1, swap};
  }

  void validate() const {
    if (states_[kIdentity].child0 != kIdentity || states_[kIdentity].child1 != kIdentity ||
        states_[kIdentity].swap)
      throw std::logic_error("RecursionTable: corrupted identity state");
    for (const auto& s : states_)
      if (s.child0 >= states_.size() || s.child1 >= states_.size())
        throw std::logic_error("RecursionTable: state reference out of range");
  }

  const RecursionState& at(uint32_t i) const {
    if (i >= states_.size()) throw std::out_of_range("RecursionTable: no such state");
    return states_[i];
  }

  uint32_t size() const { return static_cast<uint32_t>(states_.size()); }
  const std::string& name(uint32_t i) const { return names_.at(i); }

  // Returns the state index for a (case-insensitive) name, or size() if absent.
  uint32_t find(const std::string& name) const {
    const std::string n = lower(name);
    for (uint32_t i = 0; i < names_.size(); ++i)
      if (names_[i] == n) return i;
    return size();
  }

 private:
  static std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  }

  std::vector<RecursionState> states_;
  std::vector<std::string> names_;
};

using TablePtr = std::shared_ptr<const RecursionTable>;

// sigma = (id, id) with a root swap.
inline TablePtr sigma_table() {
  auto t = std::make_shared<RecursionTable>();
  const uint32_t s = t->add_state("s");
  t->wire(s, 0, 0, true);
  t->validate();
  return t;
}

// The standard odometer b = (b, id) sigma.
inline TablePtr standard_odometer_table() {
  auto t = std::make_shared<RecursionTable>();
  const uint32_t b = t->add_state("b");
  t->wire(b, b, 0, true);
  t->validate();
  return t;
}

// The settled element with one fixed boundary point: bp = (bp, g) where
// g = (g, id) sigma is the standard odometer.
inline TablePtr settled_example_table() {
  auto t = std::make_shared<RecursionTable>();
  const uint32_t g = t->add_state("g");
  const uint32_t bp = t->add_state("bp");
  t->wire(g, g, 0, true);
  t->wire(bp, bp, g, false);
  t->validate();
  return t;
}

struct Letter {
  uint32_t state = 0;
  int8_t sign = 1;  // +1 or -1
  bool operator==(const Letter& o) const { return state == o.state && sign == o.sign; }
};

struct TreeWord {
  TablePtr table;
  std::vector<Letter> letters;

  bool is_identity_word() const { return letters.empty(); }
};

inline TreeWord identity_word(TablePtr table) { return TreeWord{std::move(table), {}}; }

inline TreeWord concat(const TreeWord& a, const TreeWord& b) {
  if (a.table != b.table) throw std::invalid_argument("concat: different tables");
  TreeWord w{a.table, a.letters};
  w.letters.insert(w.letters.end(), b.letters.begin(), b.letters.end());
  return w;
}

inline TreeWord inverse(const TreeWord& w) {
  TreeWord r{w.table, {}};
  r.letters.reserve(w.letters.size());
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it)
    r.letters.push_back({it->state, static_cast<int8_t>(-it->sign)});
  return r;
}

inline TreeWord word_pow(const TreeWord& w, int64_t k) {
  const TreeWord base = (k < 0) ? inverse(w) : w;
  const uint64_t reps = (k < 0) ? uint64_t(-k) : uint64_t(k);
  TreeWord r{w.table, {}};
  r.letters.reserve(base.letters.size() * reps);
  for (uint64_t i = 0; i < reps; ++i)
    r.letters.insert(r.letters.end(), base.letters.begin(), base.letters.end());
  return r;
}

namespace detail {

// Image of one MSB-first path under a single signed letter.
inline uint32_t act_letter_path(const RecursionTable& t, Letter l, uint32_t path, int level) {
  uint32_t state = l.state;
  uint32_t out = 0;
  for (int i = level - 1; i >= 0; --i) {
    const RecursionState& st = t.at(state);
    const uint32_t b = (path >> i) & 1;
    const uint32_t image = b ^ uint32_t(st.swap);
    out = (out << 1) | image;
    if (l.sign > 0) {
      state = b ? st.child1 : st.child0;
    } else {
      // section of the inverse at b is (g_{(b)tau})^{-1}
      state = image ? st.child1 : st.child0;
    }
  }
  return out;
}

// Section of a single signed letter at a path; sections of letters are letters.
inline Letter section_letter_path(const RecursionTable& t, Letter l, uint32_t path, int level) {
  uint32_t state = l.state;
  for (int i = level - 1; i >= 0; --i) {
    const RecursionState& st = t.at(state);
    const uint32_t b = (path >> i) & 1;
    const uint32_t eff = (l.sign > 0) ? b : (b ^ uint32_t(st.swap));
    state = eff ? st.child1 : st.child0;
  }
  return Letter{state, l.sign};
}

}  // namespace detail

inline uint32_t act_path(const TreeWord& w, uint32_t path, int level) {
  for (const Letter& l : w.letters) path = detail::act_letter_path(*w.table, l, path, level);
  return path;
}

// Image of a vertex under the word, letters applied left to right.
inline Vertex act(const TreeWord& w, const Vertex& v) {
  return Vertex{v.level, act_path(w, v.path, v.level)};
}

// The section w_v, computed with the cocycle rule; identity letters dropped.
inline TreeWord section(const TreeWord& w, const Vertex& v) {
  TreeWord r{w.table, {}};
  uint32_t path = v.path;
  for (const Letter& l : w.letters) {
    const Letter s = detail::section_letter_path(*w.table, l, path, v.level);
    if (s.state != RecursionTable::kIdentity) r.letters.push_back(s);
    path = detail::act_letter_path(*w.table, l, path, v.level);
  }
  return r;
}

// Truncation to level n as a leaf permutation.
inline LevelPerm restrict_word(const TreeWord& w, int n) {
  config::check_level(n, "restrict");
  LevelPerm p;
  p.level = n;
  p.images.resize(uint32_t{1} << n);
  for (uint32_t leaf = 0; leaf < p.images.size(); ++leaf) p.images[leaf] = act_path(w, leaf, n);
  return p;
}

namespace detail {

struct SignCache {
  std::unordered_map<std::string, int> memo;

  static std::string key(const std::vector<Letter>& letters, int n) {
    std::string k;
    k.reserve(letters.size() * 5 + 4);
    for (const Letter& l : letters) {
      const uint32_t packed = (l.state << 1) | uint32_t(l.sign > 0);
      k.append(reinterpret_cast<const char*>(&packed), sizeof packed);
    }
    k.append(reinterpret_cast<const char*>(&n), sizeof n);
    return k;
  }
};

inline int sign_rec(const TreeWord& w, int n, SignCache& cache) {
  if (n == 1) {
    int s = 1;
    for (const Letter& l : w.letters)
      if (w.table->at(l.state).swap) s = -s;
    return s;
  }
  const std::string key = SignCache::key(w.letters, n);
  if (auto it = cache.memo.find(key); it != cache.memo.end()) return it->second;
  const int s = sign_rec(section(w, Vertex{1, 0}), n - 1, cache) *
                sign_rec(section(w, Vertex{1, 1}), n - 1, cache);
  cache.memo.emplace(key, s);
  return s;
}

}  // namespace detail

// sgn_n of the word: root-swap parity at n = 1, product of the two section
// signs one level down otherwise. Agrees with parity(restrict_word(w, n)).
inline int sign_at(const TreeWord& w, int n) {
  if (n < 1) throw std::invalid_argument("sign_at: level must be >= 1");
  detail::SignCache cache;
  return detail::sign_rec(w, n, cache);
}

struct SignVector {
  std::vector<int> entries;  // entries[j] = sgn_{j+1}

  bool operator==(const SignVector& o) const { return entries == o.entries; }
  bool all_negative() const {
    for (int e : entries)
      if (e != -1) return false;
    return !entries.empty();
  }
};

inline SignVector sign_vector(const TreeWord& w, int m) {
  if (m < 1) throw std::invalid_argument("sign_vector: length must be >= 1");
  detail::SignCache cache;
  SignVector sv;
  sv.entries.reserve(m);
  for (int n = 1; n <= m; ++n) sv.entries.push_back(detail::sign_rec(w, n, cache));
  return sv;
}

// A 2-adic exponent truncated to the exponent of the level-n group.
struct DyadicExponent {
  uint64_t residue = 0;  // 0 <= residue < 2^precision
  int precision = 0;

  static DyadicExponent from_signed(int64_t k, int precision) {
    if (precision < 0 || precision > 63)
      throw std::invalid_argument("DyadicExponent: precision out of range");
    const uint64_t mod = uint64_t{1} << precision;
    uint64_t r = (k >= 0) ? uint64_t(k) : mod - (uint64_t(-k) & (mod - 1));
    return DyadicExponent{r & (mod - 1), precision};
  }
};

// restrict(w, n)^k for k given mod 2^n; well defined since the level-n group
// has exponent 2^n.
inline LevelPerm power_dyadic(const TreeWord& w, const DyadicExponent& k) {
  if (k.precision < 0) throw std::invalid_argument("power_dyadic: bad precision");
  if (k.precision > 0 && k.residue >> k.precision)
    throw std::invalid_argument("power_dyadic: residue out of range");
  return perm_pow(restrict_word(w, k.precision), k.residue);
}

// Canonical text form: space-separated tokens like `a3`, `a3^-1`, `s`.
inline TreeWord parse_word(TablePtr table, const std::string& text) {
  TreeWord w{std::move(table), {}};
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    int8_t sign = 1;
    if (const auto caret = tok.find('^'); caret != std::string::npos) {
      const std::string exp = tok.substr(caret + 1);
      if (exp == "-1") {
        sign = -1;
      } else if (exp != "1") {
        throw std::invalid_argument("parse_word: unsupported exponent '" + exp + "'");
      }
      tok = tok.substr(0, caret);
    }
    const uint32_t state = w.table->find(tok);
    if (state == w.table->size())
      throw std::invalid_argument("parse_word: unknown generator '" + tok + "'");
    if (state != RecursionTable::kIdentity) w.letters.push_back({state, sign});
  }
  return w;
}

inline std::string word_to_string(const TreeWord& w) {
  std::string out;
  for (const Letter& l : w.letters) {
    if (!out.empty()) out += ' ';
    out += w.table->name(l.state);
    if (l.sign < 0) out += "^-1";
  }
  return out;
}

}  // namespace arbor
