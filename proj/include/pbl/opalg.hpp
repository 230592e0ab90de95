#pragma once

// Exact algebra of operators polynomial (degree <= 2) in the two-mode
// canonical variables, stored over normal-ordered ladder monomials
// A1^+^a A1^b A2^+^c A2^d.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace pbl {

using cplx = std::complex<double>;

inline constexpr double kSqrt2 = 1.4142135623730951;

class AlgebraError : public std::runtime_error {
 public:
  explicit AlgebraError(const std::string& what) : std::runtime_error(what) {}
};

// Exponents of (Ad1, A1, Ad2, A2), in normal order: within each mode
// creation precedes annihilation, mode 1 precedes mode 2.
struct NormalMonomial {
  std::array<std::uint8_t, 4> pow{0, 0, 0, 0};

  int degree() const { return pow[0] + pow[1] + pow[2] + pow[3]; }
  bool is_identity() const { return degree() == 0; }

  friend auto operator<=>(const NormalMonomial&, const NormalMonomial&) = default;

  // Keys like "Ad1^1 A2^1"; the identity monomial is "I".
  std::string key() const {
    static const char* names[4] = {"Ad1", "A1", "Ad2", "A2"};
    std::string s;
    for (int g = 0; g < 4; ++g) {
      if (pow[g] == 0) continue;
      if (!s.empty()) s += ' ';
      s += names[g];
      s += '^';
      s += std::to_string(int(pow[g]));
    }
    return s.empty() ? "I" : s;
  }

  static NormalMonomial identity() { return {}; }

  static NormalMonomial from_key(const std::string& key) {
    NormalMonomial m;
    if (key == "I") return m;
    std::istringstream in(key);
    std::string factor;
    while (in >> factor) {
      auto caret = factor.find('^');
      if (caret == std::string::npos) throw AlgebraError("bad monomial key: " + key);
      std::string name = factor.substr(0, caret);
      int e = std::stoi(factor.substr(caret + 1));
      int g = -1;
      if (name == "Ad1") g = 0;
      else if (name == "A1") g = 1;
      else if (name == "Ad2") g = 2;
      else if (name == "A2") g = 3;
      else throw AlgebraError("bad generator in key: " + key);
      m.pow[g] = std::uint8_t(e);
    }
    return m;
  }
};

namespace detail {

using TermMap = std::map<NormalMonomial, cplx>;

inline void add_term(TermMap& t, const NormalMonomial& m, cplx c) {
  auto it = t.find(m);
  if (it == t.end()) {
    if (c != cplx(0.0)) t.emplace(m, c);
  } else {
    it->second += c;
    if (it->second == cplx(0.0)) t.erase(it);
  }
}

// Normal-orders a word of ladder generators (ids 0..3 as in NormalMonomial).
// The only nonvanishing scalar swaps are A1 Ad1 = Ad1 A1 + 1 and the mode-2
// analogue; cross-mode generators commute.
inline void normal_order_word(std::vector<int>& word, cplx coeff, TermMap& out) {
  for (std::size_t i = 0; i + 1 < word.size(); ++i) {
    if (word[i] <= word[i + 1]) continue;
    // swap with commutator correction
    cplx s = 0.0;
    if (word[i] == 1 && word[i + 1] == 0) s = 1.0;  // [A1, Ad1] = 1
    if (word[i] == 3 && word[i + 1] == 2) s = 1.0;  // [A2, Ad2] = 1
    std::vector<int> swapped = word;
    std::swap(swapped[i], swapped[i + 1]);
    normal_order_word(swapped, coeff, out);
    if (s != cplx(0.0)) {
      std::vector<int> contracted;
      contracted.reserve(word.size() - 2);
      for (std::size_t k = 0; k < word.size(); ++k)
        if (k != i && k != i + 1) contracted.push_back(word[k]);
      normal_order_word(contracted, coeff * s, out);
    }
    return;
  }
  NormalMonomial m;
  for (int g : word) m.pow[g]++;
  add_term(out, m, coeff);
}

inline std::vector<int> monomial_word(const NormalMonomial& m) {
  std::vector<int> w;
  for (int g = 0; g < 4; ++g)
    for (int k = 0; k < m.pow[g]; ++k) w.push_back(g);
  return w;
}

// Full normal-ordered product, any degrees (result degree may exceed 2).
inline TermMap product_full(const TermMap& a, const TermMap& b) {
  TermMap out;
  for (const auto& [ma, ca] : a) {
    for (const auto& [mb, cb] : b) {
      std::vector<int> w = monomial_word(ma);
      std::vector<int> wb = monomial_word(mb);
      w.insert(w.end(), wb.begin(), wb.end());
      normal_order_word(w, ca * cb, out);
    }
  }
  return out;
}

inline double max_abs(const TermMap& t) {
  double m = 0.0;
  for (const auto& [k, c] : t) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace detail

class OperatorPoly {
 public:
  OperatorPoly() = default;

  static OperatorPoly zero() { return {}; }

  static OperatorPoly scalar(cplx c) {
    OperatorPoly p;
    if (c != cplx(0.0)) p.terms_.emplace(NormalMonomial::identity(), c);
    return p;
  }

  static OperatorPoly monomial(const NormalMonomial& m, cplx c = 1.0) {
    if (m.degree() > 2) throw AlgebraError("monomial degree > 2");
    OperatorPoly p;
    if (c != cplx(0.0)) p.terms_.emplace(m, c);
    return p;
  }

  // generator index as in NormalMonomial: 0=Ad1, 1=A1, 2=Ad2, 3=A2
  static OperatorPoly generator(int g) {
    NormalMonomial m;
    m.pow[g] = 1;
    return monomial(m);
  }

  static OperatorPoly from_terms(detail::TermMap t) {
    OperatorPoly p;
    for (auto& [m, c] : t) {
      if (m.degree() > 2) throw AlgebraError("term degree > 2: " + m.key());
      if (c != cplx(0.0)) p.terms_.emplace(m, c);
    }
    return p;
  }

  const detail::TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  int degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
  }

  bool is_scalar() const {
    return terms_.empty() ||
           (terms_.size() == 1 && terms_.begin()->first.is_identity());
  }

  cplx scalar_part() const {
    auto it = terms_.find(NormalMonomial::identity());
    return it == terms_.end() ? cplx(0.0) : it->second;
  }

  cplx coeff(const NormalMonomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? cplx(0.0) : it->second;
  }

  double max_abs_coeff() const { return detail::max_abs(terms_); }

  bool finite() const {
    for (const auto& [m, c] : terms_)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
  }

  OperatorPoly& operator+=(const OperatorPoly& o) {
    for (const auto& [m, c] : o.terms_) detail::add_term(terms_, m, c);
    return *this;
  }
  OperatorPoly& operator-=(const OperatorPoly& o) {
    for (const auto& [m, c] : o.terms_) detail::add_term(terms_, m, -c);
    return *this;
  }
  OperatorPoly& operator*=(cplx s) {
    if (s == cplx(0.0)) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend OperatorPoly operator+(OperatorPoly a, const OperatorPoly& b) { return a += b; }
  friend OperatorPoly operator-(OperatorPoly a, const OperatorPoly& b) { return a -= b; }
  friend OperatorPoly operator*(cplx s, OperatorPoly p) { return p *= s; }
  friend OperatorPoly operator-(OperatorPoly p) { return p *= -1.0; }

  friend bool operator==(const OperatorPoly& a, const OperatorPoly& b) {
    return a.terms_ == b.terms_;
  }

  std::string to_string() const;

 private:
  detail::TermMap terms_;  // no stored zero coefficients
};

// Named generators.
inline OperatorPoly Ad1() { return OperatorPoly::generator(0); }
inline OperatorPoly A1() { return OperatorPoly::generator(1); }
inline OperatorPoly Ad2() { return OperatorPoly::generator(2); }
inline OperatorPoly A2() { return OperatorPoly::generator(3); }
inline OperatorPoly Id() { return OperatorPoly::scalar(1.0); }

inline OperatorPoly x_op(int mode) {
  return (1.0 / kSqrt2) * (mode == 1 ? A1() + Ad1() : A2() + Ad2());
}
inline OperatorPoly p_op(int mode) {
  return cplx(0.0, -1.0 / kSqrt2) * (mode == 1 ? A1() - Ad1() : A2() - Ad2());
}

// Exact normal-ordered product of affine-linear factors.
inline OperatorPoly product(const OperatorPoly& p, const OperatorPoly& q) {
  if (p.degree() > 1 || q.degree() > 1)
    throw AlgebraError("product: factors must be affine-linear");
  return OperatorPoly::from_terms(detail::product_full(p.terms(), q.terms()));
}

// [P, Q] for degree <= 2 operands. The result is again of degree <= 2;
// higher monomials cancel exactly and any floating residue is dropped.
inline OperatorPoly commutator(const OperatorPoly& p, const OperatorPoly& q) {
  detail::TermMap pq = detail::product_full(p.terms(), q.terms());
  detail::TermMap qp = detail::product_full(q.terms(), p.terms());
  for (const auto& [m, c] : qp) detail::add_term(pq, m, -c);
  double scale = p.max_abs_coeff() * q.max_abs_coeff();
  OperatorPoly out;
  for (const auto& [m, c] : pq) {
    if (m.degree() > 2) {
      if (std::abs(c) > 1e-9 * std::max(scale, 1.0))
        throw AlgebraError("commutator left a degree>2 term: " + m.key());
      continue;
    }
    out += OperatorPoly::monomial(m, c);
  }
  return out;
}

// Antilinear involution: reverses each monomial and conjugates coefficients.
inline OperatorPoly adjoint(const OperatorPoly& p) {
  detail::TermMap out;
  for (const auto& [m, c] : p.terms()) {
    // (Ad1^a A1^b Ad2^c A2^d)^+ = Ad2^d A2^c Ad1^b A1^a, then reorder
    std::vector<int> w;
    for (int k = 0; k < m.pow[3]; ++k) w.push_back(2);
    for (int k = 0; k < m.pow[2]; ++k) w.push_back(3);
    for (int k = 0; k < m.pow[1]; ++k) w.push_back(0);
    for (int k = 0; k < m.pow[0]; ++k) w.push_back(1);
    detail::normal_order_word(w, std::conj(c), out);
  }
  return OperatorPoly::from_terms(std::move(out));
}

// ------------------------------------------------------------------
// Phase-space view: ordered monomials x1^a p1^b x2^c p2^d.

struct PhaseMonomial {
  std::array<std::uint8_t, 4> pow{0, 0, 0, 0};  // x1, p1, x2, p2

  int degree() const { return pow[0] + pow[1] + pow[2] + pow[3]; }
  friend auto operator<=>(const PhaseMonomial&, const PhaseMonomial&) = default;

  std::string key() const {
    static const char* names[4] = {"x1", "p1", "x2", "p2"};
    std::string s;
    for (int g = 0; g < 4; ++g) {
      if (pow[g] == 0) continue;
      if (!s.empty()) s += ' ';
      s += names[g];
      s += '^';
      s += std::to_string(int(pow[g]));
    }
    return s.empty() ? "I" : s;
  }
};

using PhaseTable = std::map<PhaseMonomial, cplx>;

namespace detail {

// Normal-ordering in the x/p basis: p_j x_j = x_j p_j - i.
inline void normal_order_phase_word(std::vector<int>& word, cplx coeff, PhaseTable& out) {
  for (std::size_t i = 0; i + 1 < word.size(); ++i) {
    if (word[i] <= word[i + 1]) continue;
    cplx s = 0.0;
    if (word[i] == 1 && word[i + 1] == 0) s = cplx(0.0, -1.0);  // [p1, x1] = -i
    if (word[i] == 3 && word[i + 1] == 2) s = cplx(0.0, -1.0);
    std::vector<int> swapped = word;
    std::swap(swapped[i], swapped[i + 1]);
    normal_order_phase_word(swapped, coeff, out);
    if (s != cplx(0.0)) {
      std::vector<int> contracted;
      for (std::size_t k = 0; k < word.size(); ++k)
        if (k != i && k != i + 1) contracted.push_back(word[k]);
      normal_order_phase_word(contracted, coeff * s, out);
    }
    return;
  }
  PhaseMonomial m;
  for (int g : word) m.pow[g]++;
  auto it = out.find(m);
  if (it == out.end()) {
    if (coeff != cplx(0.0)) out.emplace(m, coeff);
  } else {
    it->second += coeff;
    if (it->second == cplx(0.0)) out.erase(it);
  }
}

}  // namespace detail

// Exact expansion of a ladder poly over ordered x/p monomials.
// A_j = (x_j + i p_j)/sqrt(2), Ad_j = (x_j - i p_j)/sqrt(2).
inline PhaseTable to_phase_space(const OperatorPoly& p) {
  // phase-generator combos for each ladder generator, as (gen, coeff) pairs
  static const std::array<std::array<std::pair<int, cplx>, 2>, 4> combos = {{
      {{{0, 1.0 / kSqrt2}, {1, cplx(0.0, -1.0 / kSqrt2)}}},  // Ad1
      {{{0, 1.0 / kSqrt2}, {1, cplx(0.0, 1.0 / kSqrt2)}}},   // A1
      {{{2, 1.0 / kSqrt2}, {3, cplx(0.0, -1.0 / kSqrt2)}}},  // Ad2
      {{{2, 1.0 / kSqrt2}, {3, cplx(0.0, 1.0 / kSqrt2)}}},   // A2
  }};
  PhaseTable out;
  for (const auto& [m, c] : p.terms()) {
    std::vector<int> ladder_word = detail::monomial_word(m);
    // distribute the binomial expansion over the word
    std::vector<std::pair<std::vector<int>, cplx>> words = {{{}, c}};
    for (int g : ladder_word) {
      std::vector<std::pair<std::vector<int>, cplx>> next;
      for (const auto& [w, wc] : words) {
        for (const auto& [pg, pc] : combos[g]) {
          auto w2 = w;
          w2.push_back(pg);
          next.emplace_back(std::move(w2), wc * pc);
        }
      }
      words = std::move(next);
    }
    for (auto& [w, wc] : words) detail::normal_order_phase_word(w, wc, out);
  }
  // drop floating dust from exactly-cancelling expansions
  double scale = std::max(p.max_abs_coeff(), 1.0);
  for (auto it = out.begin(); it != out.end();) {
    if (std::abs(it->second) <= 1e-14 * scale)
      it = out.erase(it);
    else
      ++it;
  }
  return out;
}

inline std::string OperatorPoly::to_string() const {
  if (terms_.empty()) return "0*I";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.real() << " + " << c.imag() << "*i)";
    static const char* names[4] = {"Ad1", "A1", "Ad2", "A2"};
    for (int g = 0; g < 4; ++g)
      for (int k = 0; k < m.pow[g]; ++k) os << "*" << names[g];
  }
  return os.str();
}

// JSON object {monomial_key: [re, im]}
inline nlohmann::json to_json(const OperatorPoly& p) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [m, c] : p.terms()) j[m.key()] = {c.real(), c.imag()};
  return j;
}

inline OperatorPoly poly_from_json(const nlohmann::json& j) {
  OperatorPoly p;
  for (auto it = j.begin(); it != j.end(); ++it) {
    cplx c(it.value().at(0).get<double>(), it.value().at(1).get<double>());
    p += OperatorPoly::monomial(NormalMonomial::from_key(it.key()), c);
  }
  return p;
}

inline nlohmann::json to_json(const PhaseTable& t) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [m, c] : t) j[m.key()] = {c.real(), c.imag()};
  return j;
}

// Swaps the two modes, (x1,p1) <-> (x2,p2), i.e. (A1,Ad1) <-> (A2,Ad2).
inline OperatorPoly swap_modes(const OperatorPoly& p) {
  OperatorPoly out;
  for (const auto& [m, c] : p.terms()) {
    NormalMonomial s;
    s.pow = {m.pow[2], m.pow[3], m.pow[0], m.pow[1]};
    out += OperatorPoly::monomial(s, c);
  }
  return out;
}

}  // namespace pbl
