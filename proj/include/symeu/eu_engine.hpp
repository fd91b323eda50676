#pragma once

#include "symeu/policy.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace symeu {

// Expected utility as a vector of polynomials over the configurations of a scope.
struct EuVector {
  IndexSet scope;  // positions
  std::vector<Polynomial> entries;

  std::size_t monomials() const {
    std::size_t s = 0;
    for (auto& e : entries) s += e.size();
    return s;
  }
  friend bool operator==(const EuVector&, const EuVector&) = default;
};

inline EuVector from_parameters(const ParameterVector& pv) {
  EuVector v{pv.scope, {}};
  for (auto& x : pv.entries) v.entries.emplace_back(x);
  return v;
}

// re-index u onto a superset of its scope
inline EuVector align(const EuVector& u, const IndexSet& target, const Mid& mid) {
  if (!is_subset(u.scope, target)) throw Error("alignment target must contain the scope");
  if (u.scope == target) return u;
  ScopeIndex from(u.scope, mid), to(target, mid);
  EuVector out{target, {}};
  out.entries.reserve(to.size());
  for (std::size_t e = 0; e < to.size(); ++e) {
    auto v = to.config(e);
    std::size_t src = from.index([&](int pos) {
      return v[std::lower_bound(target.begin(), target.end(), pos) - target.begin()];
    });
    out.entries.push_back(u.entries[src]);
  }
  return out;
}

inline std::pair<EuVector, EuVector> align_scopes(const EuVector& u, const EuVector& v, const Mid& mid) {
  IndexSet s = set_union(u.scope, v.scope);
  return {align(u, s, mid), align(v, s, mid)};
}

struct StepRecord {
  enum class Op { multisum, marginalize, maximize } op;
  int position = 0;  // variable eliminated, or last parent of the utility
  int utility = 0;   // multisum only
  std::size_t in_length = 0, aligned_length = 0, out_length = 0;
  std::size_t multiplications = 0;
};

inline std::string op_name(StepRecord::Op op) {
  switch (op) {
    case StepRecord::Op::multisum: return "multisum";
    case StepRecord::Op::marginalize: return "marginalize";
    case StepRecord::Op::maximize: return "maximize";
  }
  return "?";
}

// h k (u o psi) + k psi + u, entrywise on the joint scope
inline EuVector eu_multisum(const EuVector& u, int utility, const Mid& mid, StepRecord* rec = nullptr) {
  EuVector psi = from_parameters(utility_vector(mid, utility));
  auto [ua, pa] = align_scopes(u, psi, mid);
  Polynomial k = weight_poly(mid, utility);
  Polynomial hk = interaction_poly(mid) * k;
  EuVector out{ua.scope, {}};
  out.entries.reserve(ua.entries.size());
  std::size_t mults = 1;
  for (std::size_t e = 0; e < ua.entries.size(); ++e) {
    Polynomial entry = ua.entries[e];
    if (!hk.is_zero()) entry += hk * (ua.entries[e] * pa.entries[e]);
    entry += k * pa.entries[e];
    out.entries.push_back(std::move(entry));
    mults += ua.entries[e].size() + 2;
  }
  if (rec) *rec = {StepRecord::Op::multisum, mid.utility_parents(utility).back(), utility, u.entries.size(),
                   ua.entries.size(), out.entries.size(), mults};
  return out;
}

// sum over y_i of p_i * u; y_i must be the fastest coordinate of the joint scope
inline EuVector eu_marginalize(const EuVector& u, int i, const Mid& mid, StepRecord* rec = nullptr) {
  if (!mid.is_chance(i)) throw Error("marginalising a decision");
  EuVector p = from_parameters(probability_vector(mid, i));
  auto [ua, pa] = align_scopes(u, p, mid);
  if (ua.scope.empty() || ua.scope.back() != i) throw Error("marginalised variable must be last in scope");
  int r = mid.card(i);
  EuVector out{set_minus(ua.scope, {i}), {}};
  std::size_t mults = 0;
  for (std::size_t b = 0; b < ua.entries.size(); b += r) {
    std::vector<Term> acc;
    for (int t = 0; t < r; ++t) {
      Polynomial prod = ua.entries[b + t] * pa.entries[b + t];
      mults += ua.entries[b + t].size();
      for (auto& term : prod.terms()) acc.push_back(term);
    }
    out.entries.push_back(Polynomial::from_terms(std::move(acc)));
  }
  std::size_t len = ua.entries.size();
  mults += len * len / r;
  if (rec) *rec = {StepRecord::Op::marginalize, i, 0, u.entries.size(), len, out.entries.size(), mults};
  return out;
}

// keeps, per block, the entry the policy picks for y_i
inline EuVector eu_maximize(const EuVector& u, int i, const DecisionRule& rule, const Mid& mid,
                            StepRecord* rec = nullptr) {
  if (!contains(u.scope, i)) {
    if (rec) *rec = {StepRecord::Op::maximize, i, 0, u.entries.size(), u.entries.size(), u.entries.size(), 0};
    return u;
  }
  IndexSet rest = set_minus(u.scope, {i});
  for (int l : rule.domain)
    if (!mid.has_label(l) || !contains(rest, mid.position(l)))
      throw Error("rule for Y" + std::to_string(mid.label(i)) + " depends on Y" + std::to_string(l) +
                  ", which the expected utility no longer carries");
  ScopeIndex in(u.scope, mid), out_ix(rest, mid);
  EuVector out{rest, {}};
  for (std::size_t b = 0; b < out_ix.size(); ++b) {
    auto v = out_ix.config(b);
    auto value_of = [&](int pos) {
      return v[std::lower_bound(rest.begin(), rest.end(), pos) - rest.begin()];
    };
    int a = rule.action([&](int label) { return value_of(mid.position(label)); });
    if (a < 0 || a >= mid.card(i)) throw Error("rule picks an invalid action");
    std::size_t src = in.index([&](int pos) { return pos == i ? a : value_of(pos); });
    out.entries.push_back(u.entries[src]);
  }
  if (rec) *rec = {StepRecord::Op::maximize, i, 0, u.entries.size(), u.entries.size(), out.entries.size(), 0};
  return out;
}

struct EvaluationOptions {
  int stop_at = 1;                  // last position eliminated
  bool allow_non_extensive = false; // decisions may ignore some predecessors
  std::function<void(EuVector&)> prune;  // applied after every operation
};

struct EvaluationTrace {
  std::map<int, EuVector> stages;  // position i -> EU after eliminating Y_i..Y_n
  std::vector<StepRecord> log;
  const EuVector& stage(int i) const {
    auto it = stages.find(i);
    if (it == stages.end()) throw Error("stage " + std::to_string(i) + " not computed");
    return it->second;
  }
};

inline EvaluationTrace symbolic_eu(const Mid& mid, const Policy& policy, const EvaluationOptions& opt = {}) {
  if (has_errors(validate(mid))) throw Error("diagram is not valid");
  if (!opt.allow_non_extensive)
    if (int d = first_non_extensive_decision(mid))
      throw Error("Y" + std::to_string(mid.label(d)) +
                  " does not observe every earlier variable; transform the diagram to extensive form first");
  for (int i = std::max(opt.stop_at, 1); i <= mid.n(); ++i)
    if (mid.is_decision(i)) policy.rule(mid.label(i));
  auto j = comp_j(mid);
  EvaluationTrace tr;
  EuVector cur{{}, {Polynomial()}};
  tr.stages[mid.n() + 1] = cur;
  int u = mid.m();
  for (int k = mid.n(); k >= std::max(opt.stop_at, 1); --k) {
    StepRecord rec;
    if (u >= 1 && j[u - 1] == k) {
      cur = eu_multisum(cur, u, mid, &rec);
      tr.log.push_back(rec);
      if (opt.prune) opt.prune(cur);
      --u;
    }
    if (mid.is_decision(k)) cur = eu_maximize(cur, k, policy.rule(mid.label(k)), mid, &rec);
    else cur = eu_marginalize(cur, k, mid, &rec);
    tr.log.push_back(rec);
    if (opt.prune) opt.prune(cur);
    tr.stages[k] = cur;
  }
  return tr;
}

// EU vector with every indeterminate bound
inline EuVector substitute(const EuVector& v, const Bindings& b) {
  EuVector out{v.scope, {}};
  for (auto& e : v.entries) out.entries.push_back(substitute(e, b));
  return out;
}

// "Y3=1,Y4=0" style label for an entry
inline std::string entry_label(const Mid& mid, const IndexSet& scope, std::size_t idx) {
  ScopeIndex ix(scope, mid);
  auto v = ix.config(idx);
  std::string s;
  for (std::size_t t = scope.size(); t-- > 0;) {
    if (!s.empty()) s += ",";
    s += "Y" + std::to_string(mid.label(scope[t])) + "=" + std::to_string(v[t]);
  }
  return s;
}

}  // namespace symeu
