#pragma once

#include "symeu/indeterminate.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace symeu {

// sorted by indeterminate, exponents > 0
using Exponents = boost::container::small_vector<std::pair<Indeterminate, unsigned>, 8>;

inline unsigned total_degree(const Exponents& e) {
  unsigned d = 0;
  for (auto& f : e) d += f.second;
  return d;
}

// canonical monomial order: total degree, then indeterminate order
inline std::strong_ordering compare_monomials(const Exponents& a, const Exponents& b) {
  if (auto c = total_degree(a) <=> total_degree(b); c != 0) return c;
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t t = 0; t < n; ++t) {
    if (auto c = a[t].first <=> b[t].first; c != 0) return c;
    if (a[t].second != b[t].second)
      return a[t].second > b[t].second ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  return a.size() <=> b.size();
}

inline Exponents multiply_monomials(const Exponents& a, const Exponents& b) {
  Exponents out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    auto c = a[i].first <=> b[j].first;
    if (c < 0) out.push_back(a[i++]);
    else if (c > 0) out.push_back(b[j++]);
    else {
      out.emplace_back(a[i].first, a[i].second + b[j].second);
      ++i, ++j;
    }
  }
  for (; i < a.size(); ++i) out.push_back(a[i]);
  for (; j < b.size(); ++j) out.push_back(b[j]);
  return out;
}

struct Term {
  Rational coef;
  Exponents exps;
  unsigned degree() const { return total_degree(exps); }
  friend bool operator==(const Term&, const Term&) = default;
};

class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(const Rational& c) {
    if (c != 0) terms_.push_back({c, {}});
  }
  Polynomial(int c) : Polynomial(Rational(c)) {}
  Polynomial(const Indeterminate& x) { terms_.push_back({Rational(1), {{x, 1u}}}); }

  // takes any term list, merges duplicates and drops zeros
  static Polynomial from_terms(std::vector<Term> terms) {
    Polynomial p;
    std::sort(terms.begin(), terms.end(),
              [](const Term& a, const Term& b) { return compare_monomials(a.exps, b.exps) < 0; });
    for (auto& t : terms) {
      if (!p.terms_.empty() && p.terms_.back().exps == t.exps)
        p.terms_.back().coef += t.coef;
      else
        p.terms_.push_back(std::move(t));
    }
    p.drop_zeros();
    return p;
  }

  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].exps.empty()); }
  Rational constant_value() const {
    if (!is_constant()) throw Error("polynomial is not constant: " + str());
    return terms_.empty() ? Rational(0) : terms_[0].coef;
  }

  // degree -> number of monomials
  std::map<unsigned, std::size_t> degree_histogram() const {
    std::map<unsigned, std::size_t> h;
    for (auto& t : terms_) ++h[t.degree()];
    return h;
  }

  unsigned degree_in(const Indeterminate& x) const {
    unsigned d = 0;
    for (auto& t : terms_)
      for (auto& f : t.exps)
        if (f.first == x) d = std::max(d, f.second);
    return d;
  }

  std::set<Indeterminate> indeterminates() const {
    std::set<Indeterminate> s;
    for (auto& t : terms_)
      for (auto& f : t.exps) s.insert(f.first);
    return s;
  }

  Polynomial& operator+=(const Polynomial& o) {
    std::vector<Term> out;
    out.reserve(terms_.size() + o.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < terms_.size() && j < o.terms_.size()) {
      auto c = compare_monomials(terms_[i].exps, o.terms_[j].exps);
      if (c < 0) out.push_back(std::move(terms_[i++]));
      else if (c > 0) out.push_back(o.terms_[j++]);
      else {
        Rational s = terms_[i].coef + o.terms_[j].coef;
        if (s != 0) out.push_back({s, std::move(terms_[i].exps)});
        ++i, ++j;
      }
    }
    for (; i < terms_.size(); ++i) out.push_back(std::move(terms_[i]));
    for (; j < o.terms_.size(); ++j) out.push_back(o.terms_[j]);
    terms_ = std::move(out);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) { return *this += -o; }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  Polynomial operator-() const {
    Polynomial p = *this;
    for (auto& t : p.terms_) t.coef = -t.coef;
    return p;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    if (a.is_constant()) return b.scaled(a.terms_[0].coef);
    if (b.is_constant()) return a.scaled(b.terms_[0].coef);
    std::vector<Term> out;
    out.reserve(a.size() * b.size());
    for (auto& x : a.terms_)
      for (auto& y : b.terms_) out.push_back({x.coef * y.coef, multiply_monomials(x.exps, y.exps)});
    return from_terms(std::move(out));
  }

  Polynomial scaled(const Rational& c) const {
    if (c == 0) return {};
    Polynomial p = *this;
    for (auto& t : p.terms_) t.coef *= c;
    return p;
  }

  Polynomial pow(unsigned e) const {
    Polynomial r(1), b = *this;
    while (e) {
      if (e & 1) r *= b;
      e >>= 1;
      if (e) b *= b;
    }
    return r;
  }

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

  // "coef*term + ..." in canonical order; coefficients as exact fractions
  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (auto& t : terms_) {
      Rational c = t.coef;
      if (!first) out += c < 0 ? " - " : " + ";
      else if (c < 0) out += "-";
      if (c < 0) c = -c;
      first = false;
      std::string mono;
      for (auto& [x, e] : t.exps) {
        if (!mono.empty()) mono += '*';
        mono += x.name();
        if (e > 1) mono += "^" + std::to_string(e);
      }
      if (mono.empty()) out += to_string(c);
      else if (c == 1) out += mono;
      else out += to_string(c) + "*" + mono;
    }
    return out;
  }

 private:
  void drop_zeros() {
    std::erase_if(terms_, [](const Term& t) { return t.coef == 0; });
  }
  std::vector<Term> terms_;
};

using Bindings = std::map<Indeterminate, Polynomial>;

namespace detail {
inline void check_acyclic(const Bindings& b) {
  std::map<Indeterminate, int> state;  // 1 visiting, 2 done
  std::function<void(const Indeterminate&)> visit = [&](const Indeterminate& x) {
    auto it = b.find(x);
    if (it == b.end()) return;
    int& s = state[x];
    if (s == 2) return;
    if (s == 1) throw Error("cyclic binding through " + x.name());
    s = 1;
    for (auto& y : it->second.indeterminates()) visit(y);
    state[x] = 2;
  };
  for (auto& [x, _] : b) visit(x);
}
}  // namespace detail

// replaces bound indeterminates (transitively) and collects terms
inline Polynomial substitute(const Polynomial& p, const Bindings& bindings) {
  if (bindings.empty()) return p;
  detail::check_acyclic(bindings);
  std::map<Indeterminate, Polynomial> resolved;
  std::function<const Polynomial&(const Indeterminate&)> resolve = [&](const Indeterminate& x) -> const Polynomial& {
    if (auto it = resolved.find(x); it != resolved.end()) return it->second;
    const Polynomial& def = bindings.at(x);
    Polynomial r;
    for (auto& t : def.terms()) {
      Polynomial term(t.coef);
      Exponents rest;
      for (auto& [y, e] : t.exps) {
        if (bindings.count(y)) term *= resolve(y).pow(e);
        else rest.emplace_back(y, e);
      }
      term *= Polynomial::from_terms({{Rational(1), rest}});
      r += term;
    }
    return resolved[x] = std::move(r);
  };
  std::vector<Term> out;
  for (auto& t : p.terms()) {
    Rational c = t.coef;
    Exponents rest;
    Polynomial sym(1);
    bool symbolic = false;
    for (auto& [x, e] : t.exps) {
      if (!bindings.count(x)) {
        rest.emplace_back(x, e);
        continue;
      }
      const Polynomial& v = resolve(x);
      if (v.is_constant()) {
        Rational cv = v.constant_value();
        for (unsigned k = 0; k < e; ++k) c *= cv;
      } else {
        sym *= v.pow(e);
        symbolic = true;
      }
      if (c == 0) break;
    }
    if (c == 0) continue;
    if (!symbolic) {
      out.push_back({c, std::move(rest)});
    } else {
      for (auto& s : sym.terms()) out.push_back({c * s.coef, multiply_monomials(rest, s.exps)});
    }
  }
  return Polynomial::from_terms(std::move(out));
}

// exact value with every indeterminate looked up in `values`
inline Rational evaluate(const Polynomial& p, const std::map<Indeterminate, Rational>& values) {
  Rational total = 0;
  for (auto& t : p.terms()) {
    Rational v = t.coef;
    for (auto& [x, e] : t.exps) {
      auto it = values.find(x);
      if (it == values.end()) throw Error("no value for " + x.name());
      for (unsigned k = 0; k < e; ++k) v *= it->second;
    }
    total += v;
  }
  return total;
}

// text -> polynomial; names are decoded by the caller's resolver
inline Polynomial parse_polynomial(std::string_view text,
                                   const std::function<Indeterminate(std::string_view)>& resolve) {
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto fail = [&](const std::string& why) {
    throw Error("bad polynomial '" + std::string(text) + "' at " + std::to_string(pos) + ": " + why);
  };
  std::function<Polynomial()> expr;
  auto number = [&] {
    std::size_t b = pos;
    while (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.')) ++pos;
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
      ++pos;
      if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) ++pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    return parse_rational(text.substr(b, pos - b));
  };
  auto primary = [&]() -> Polynomial {
    skip();
    if (pos >= text.size()) fail("unexpected end");
    char c = text[pos];
    if (c == '(') {
      ++pos;
      Polynomial p = expr();
      skip();
      if (pos >= text.size() || text[pos] != ')') fail("expected ')'");
      ++pos;
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return Polynomial(number());
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t b = pos;
      while (pos < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_' || text[pos] == '\''))
        ++pos;
      return Polynomial(resolve(text.substr(b, pos - b)));
    }
    fail(std::string("unexpected '") + c + "'");
    return {};
  };
  std::function<Polynomial()> unary = [&]() -> Polynomial {
    skip();
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
      bool neg = text[pos++] == '-';
      Polynomial p = unary();
      return neg ? -p : p;
    }
    Polynomial p = primary();
    skip();
    if (pos < text.size() && text[pos] == '^') {
      ++pos;
      skip();
      std::size_t b = pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      if (b == pos) fail("expected exponent");
      p = p.pow(static_cast<unsigned>(std::stoul(std::string(text.substr(b, pos - b)))));
    }
    return p;
  };
  auto term = [&] {
    Polynomial p = unary();
    for (;;) {
      skip();
      if (pos < text.size() && text[pos] == '*') {
        ++pos;
        p *= unary();
      } else if (pos < text.size() && text[pos] == '/') {
        ++pos;
        Polynomial d = unary();
        if (!d.is_constant() || d.is_zero()) fail("can only divide by a nonzero number");
        p = p.scaled(1 / d.constant_value());
      } else {
        return p;
      }
    }
  };
  expr = [&] {
    Polynomial p = term();
    for (;;) {
      skip();
      if (pos < text.size() && text[pos] == '+') {
        ++pos;
        p += term();
      } else if (pos < text.size() && text[pos] == '-') {
        ++pos;
        p -= term();
      } else {
        return p;
      }
    }
  };
  Polynomial p = expr();
  skip();
  if (pos != text.size()) fail("trailing input");
  return p;
}

}  // namespace symeu
