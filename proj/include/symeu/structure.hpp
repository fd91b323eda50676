#pragma once

#include "symeu/eu_engine.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace symeu {

struct StructurePrediction {
  std::size_t dimension = 1;                   // entries of the stage vector
  std::map<unsigned, std::size_t> histogram;   // degree -> monomials per entry
  std::size_t monomials() const {
    std::size_t s = 0;
    for (auto& [_, c] : histogram) s += c;
    return s;
  }
};

inline Integer binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  Integer r = 1;
  for (int t = 1; t <= k; ++t) r = r * (n - k + t) / t;
  return r;
}

// Per-entry shape of the stage-i vector for symbolic weights. A subset of
// utilities {l..a} of size b-l+1 with largest member a contributes
// C(a-l, b-l) * prod r (chance nodes in i..j_a) monomials of degree
// (b-l) + 2(b-l+1) + w, w = chance nodes in i..j_a.
inline StructurePrediction predicted_structure(const Mid& mid, int i, bool additive) {
  if (i < 1 || i > mid.n() + 1) throw Error("stage out of range");
  StructurePrediction out;
  for (int p : comp_b(mid, i)) out.dimension *= mid.card(p);
  auto j = comp_j(mid);
  int l = 1;
  while (l <= mid.m() && j[l - 1] < i) ++l;
  for (int a = l; a <= mid.m(); ++a) {
    std::size_t prod = 1;
    unsigned w = 0;
    for (int p = i; p <= j[a - 1]; ++p)
      if (mid.is_chance(p)) prod *= mid.card(p), ++w;
    // at h = 0 only the singleton {a} survives
    for (int b = l; b <= (additive ? l : a); ++b) {
      std::size_t count = (additive ? std::size_t(1) : binomial(a - l, b - l).convert_to<std::size_t>()) * prod;
      unsigned deg = static_cast<unsigned>((b - l) + 2 * (b - l + 1)) + w;
      if (additive) deg = 2 + w;
      out.histogram[deg] += count;
    }
  }
  return out;
}

struct StructureReport {
  bool ok = true;
  std::string message;
};

// every entry must have exactly the predicted degree histogram
inline StructureReport check_structure(const EuVector& v, const StructurePrediction& pred) {
  if (v.entries.size() != pred.dimension)
    return {false, "dimension " + std::to_string(v.entries.size()) + " != predicted " + std::to_string(pred.dimension)};
  for (std::size_t e = 0; e < v.entries.size(); ++e) {
    auto h = v.entries[e].degree_histogram();
    std::set<unsigned> degs;
    for (auto& [d, _] : h) degs.insert(d);
    for (auto& [d, _] : pred.histogram) degs.insert(d);
    for (unsigned d : degs) {
      std::size_t got = h.count(d) ? h.at(d) : 0, want = pred.histogram.count(d) ? pred.histogram.at(d) : 0;
      if (got != want)
        return {false, "entry " + std::to_string(e) + ", degree " + std::to_string(d) + ": expected " +
                           std::to_string(want) + " monomials, found " + std::to_string(got)};
    }
  }
  return {};
}

// all exponents one, except powers of the interaction constant
inline bool square_free_except_h(const Polynomial& p) {
  for (auto& t : p.terms())
    for (auto& [x, e] : t.exps)
      if (e > 1 && x.kind() != Indeterminate::Kind::interaction) return false;
  return true;
}

inline bool square_free(const Polynomial& p) {
  for (auto& t : p.terms())
    for (auto& f : t.exps)
      if (f.second > 1) return false;
  return true;
}

inline std::string histogram_string(const std::map<unsigned, std::size_t>& h) {
  std::string s = "{";
  for (auto& [d, c] : h) {
    if (s.size() > 1) s += ", ";
    s += std::to_string(d) + ":" + std::to_string(c);
  }
  return s + "}";
}

// ---------------------------------------------------------------- costs

// Closed-form multiplication counts of each backward step, in the order the
// engine performs them. Monomial counts come from predicted_structure.
//   multisum:     c t (2 + m) + 1
//   marginalise:  c s m + (c s)^2 / r_i
//   maximise:     0
// c is the incoming vector length, t / s the scope growth from psi / p_i.
inline std::vector<StepRecord> predicted_costs(const Mid& mid, bool additive) {
  std::vector<StepRecord> out;
  auto j = comp_j(mid);
  int u = mid.m();
  auto prod = [&](const IndexSet& s) {
    std::size_t r = 1;
    for (int p : s) r *= mid.card(p);
    return r;
  };
  for (int i = mid.n(); i >= 1; --i) {
    IndexSet scope = comp_b(mid, i + 1);
    std::size_t c = prod(scope);
    std::size_t m = predicted_structure(mid, i + 1, additive).monomials();
    if (u >= 1 && j[u - 1] == i) {
      std::size_t t = prod(set_minus(mid.utility_parents(u), scope));
      StepRecord rec{StepRecord::Op::multisum, i, u, c, c * t, c * t, c * t * (2 + m) + 1};
      out.push_back(rec);
      scope = set_union(scope, mid.utility_parents(u));
      c *= t;
      m = (additive ? 1 : 2) * m + 1;
      --u;
    }
    if (mid.is_decision(i)) {
      std::size_t len = contains(scope, i) ? c / mid.card(i) : c;
      out.push_back({StepRecord::Op::maximize, i, 0, c, c, len, 0});
    } else {
      std::size_t s = prod(set_minus(set_union(mid.parents(i), {i}), scope));
      std::size_t len = c * s;
      out.push_back({StepRecord::Op::marginalize, i, 0, c, len, len / mid.card(i),
                     len * m + len * len / mid.card(i)});
    }
  }
  return out;
}

inline std::size_t multiplication_count(const Mid& mid, int i, StepRecord::Op op, bool additive = false) {
  for (auto& r : predicted_costs(mid, additive))
    if (r.position == i && r.op == op) return r.multiplications;
  if (op == StepRecord::Op::maximize) return 0;
  throw Error("no such step at stage " + std::to_string(i));
}

}  // namespace symeu
