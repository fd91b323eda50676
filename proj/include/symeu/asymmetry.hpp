#pragma once

#include "symeu/structure.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace symeu {

// if every antecedent pair holds then the consequent variable must (not) take value
struct Asymmetry {
  enum class Relation { must_equal, must_not_equal };
  std::vector<std::pair<int, int>> antecedent;  // (label, value)
  int variable = 0;
  Relation relation = Relation::must_not_equal;
  int value = 0;
  friend bool operator==(const Asymmetry&, const Asymmetry&) = default;
};

// single-cased form: the consequent lists forbidden values
struct Restriction {
  std::vector<std::pair<int, int>> antecedent;
  int variable = 0;
  std::set<int> forbidden;
};

inline Restriction normalize(const Asymmetry& a, const Mid& mid) {
  if (a.antecedent.empty()) throw Error("asymmetry without antecedent");
  int r = mid.card(mid.position(a.variable));
  std::set<int> labels{a.variable};
  for (auto& [l, v] : a.antecedent) {
    if (!labels.insert(l).second) throw Error("asymmetry mentions Y" + std::to_string(l) + " twice");
    if (v < 0 || v >= mid.card(mid.position(l))) throw Error("asymmetry value out of range");
  }
  if (a.value < 0 || a.value >= r) throw Error("asymmetry value out of range");
  Restriction out{a.antecedent, a.variable, {}};
  if (a.relation == Asymmetry::Relation::must_not_equal) out.forbidden.insert(a.value);
  else
    for (int v = 0; v < r; ++v)
      if (v != a.value) out.forbidden.insert(v);
  return out;
}

inline std::vector<Restriction> normalize(const std::vector<Asymmetry>& as, const Mid& mid) {
  std::vector<Restriction> out;
  for (auto& a : as) out.push_back(normalize(a, mid));
  return out;
}

namespace asym_detail {

using Seen = std::map<int, std::set<int>>;  // label -> values mentioned

inline bool violates(const Seen& seen, const Restriction& r) {
  for (auto& [l, v] : r.antecedent) {
    auto it = seen.find(l);
    if (it == seen.end() || !it->second.count(v)) return false;
  }
  auto it = seen.find(r.variable);
  if (it == seen.end()) return false;
  for (int v : it->second)
    if (r.forbidden.count(v)) return true;
  return false;
}

inline void annotate(Seen& seen, const Exponents& e) {
  for (auto& [x, _] : e) {
    if (x.kind() == Indeterminate::Kind::probability) seen[x.node()].insert(x.value());
    for (auto& [l, v] : x.config()) seen[l].insert(v);
  }
}

}  // namespace asym_detail

// false when the monomial's annotations (plus the entry's own configuration)
// realise the antecedent together with a forbidden consequent value
inline bool monomial_compatible(const Exponents& mono, const Restriction& r, const Config& context = {}) {
  asym_detail::Seen seen;
  for (auto& [l, v] : context) seen[l].insert(v);
  asym_detail::annotate(seen, mono);
  return !asym_detail::violates(seen, r);
}

inline void prune(EuVector& v, const std::vector<Restriction>& rs, const Mid& mid) {
  if (rs.empty()) return;
  ScopeIndex ix(v.scope, mid);
  for (std::size_t e = 0; e < v.entries.size(); ++e) {
    Config ctx = make_config(mid, v.scope, ix.config(e));
    asym_detail::Seen own;
    for (auto& [l, val] : ctx) own[l].insert(val);
    bool dead = false;
    for (auto& r : rs) dead = dead || asym_detail::violates(own, r);
    if (dead) {
      v.entries[e] = Polynomial();
      continue;
    }
    std::vector<Term> keep;
    for (auto& t : v.entries[e].terms()) {
      bool ok = true;
      for (auto& r : rs) ok = ok && monomial_compatible(t.exps, r, ctx);
      if (ok) keep.push_back(t);
    }
    if (keep.size() != v.entries[e].size()) v.entries[e] = Polynomial::from_terms(std::move(keep));
  }
}

// post-hoc pruning of a symmetric evaluation
inline EvaluationTrace apply_asymmetries(const EvaluationTrace& tr, const std::vector<Asymmetry>& as, const Mid& mid) {
  auto rs = normalize(as, mid);
  EvaluationTrace out = tr;
  for (auto& [_, v] : out.stages) prune(v, rs, mid);
  return out;
}

// pruning after every backward step, so incompatible monomials never propagate
inline EvaluationTrace symbolic_eu_asymmetric(const Mid& mid, const Policy& policy, const std::vector<Asymmetry>& as,
                                              EvaluationOptions opt = {}) {
  auto rs = normalize(as, mid);
  opt.prune = [&](EuVector& v) { prune(v, rs, mid); };
  return symbolic_eu(mid, policy, opt);
}

struct AsymmetricCounts {
  bool exact = false;
  std::vector<std::map<unsigned, std::size_t>> histograms;  // per entry, exact case
  std::vector<std::size_t> lower, upper;                    // per entry monomial totals
};

// Monomials left in each entry of stage t after pruning one asymmetry. Exact
// for asymmetries among chance variables: a chance variable is pinned either by
// the entry itself (it is in B_t) or by the p factor every monomial of utility
// a carries for chance nodes t..j_a. Otherwise interval bounds: the symmetric
// count above, and below the count left if every decision took a violating value.
inline AsymmetricCounts predicted_asymmetric_counts(const Mid& mid, int t, const Asymmetry& asy) {
  Restriction r = normalize(asy, mid);
  bool exact = mid.is_chance(mid.position(r.variable));
  for (auto& [l, _] : r.antecedent) exact = exact && mid.is_chance(mid.position(l));
  IndexSet scope = comp_b(mid, t);
  ScopeIndex ix(scope, mid);
  auto j = comp_j(mid);
  int l = 1;
  while (l <= mid.m() && j[l - 1] < t) ++l;
  AsymmetricCounts out;
  out.exact = exact;
  for (std::size_t e = 0; e < ix.size(); ++e) {
    auto vals = ix.config(e);
    std::map<int, int> ctx;
    for (std::size_t s = 0; s < scope.size(); ++s) ctx[mid.label(scope[s])] = vals[s];
    std::map<unsigned, std::size_t> hist;
    std::size_t lo = 0, hi = 0;
    for (int a = l; a <= mid.m(); ++a) {
      std::size_t total = 1;
      unsigned w = 0;
      std::set<int> range;
      for (int p = t; p <= j[a - 1]; ++p)
        if (mid.is_chance(p)) total *= mid.card(p), ++w, range.insert(mid.label(p));
      // configurations of the range nodes that violate, given the entry
      auto violating = [&](bool decisions_worst) {
        std::size_t v = total;
        auto pin = [&](int label, const std::set<int>& allowed) -> bool {
          int pos = mid.position(label);
          if (ctx.count(label)) return allowed.count(ctx[label]) != 0;
          if (range.count(label)) {
            v = v / mid.card(pos) * allowed.size();
            return true;
          }
          return decisions_worst && mid.is_decision(pos);
        };
        for (auto& [al, av] : r.antecedent)
          if (!pin(al, {av})) return std::size_t(0);
        if (!pin(r.variable, r.forbidden)) return std::size_t(0);
        return v;
      };
      std::size_t keep_exact = total - violating(false);
      std::size_t keep_worst = total - violating(true);
      for (int b = l; b <= a; ++b) {
        std::size_t c = binomial(a - l, b - l).convert_to<std::size_t>();
        unsigned deg = static_cast<unsigned>((b - l) + 2 * (b - l + 1)) + w;
        if (keep_exact * c) hist[deg] += keep_exact * c;
        hi += (exact ? keep_exact : total) * c;
        lo += (exact ? keep_exact : keep_worst) * c;
      }
    }
    // an entry whose own configuration violates is emptied
    asym_detail::Seen own;
    for (auto& [lb, v] : ctx) own[lb].insert(v);
    if (asym_detail::violates(own, r)) hist.clear(), lo = hi = 0;
    out.histograms.push_back(exact ? hist : std::map<unsigned, std::size_t>{});
    out.lower.push_back(lo);
    out.upper.push_back(hi);
  }
  return out;
}

}  // namespace symeu
