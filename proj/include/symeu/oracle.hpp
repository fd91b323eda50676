#pragma once

// Reference computations by brute force. Deliberately shares nothing with the
// polynomial engine: joint configurations are enumerated and the utility is
// expanded straight from the multiplicative form.

#include "symeu/policy.hpp"

#include <map>
#include <optional>
#include <vector>

namespace symeu {

using NumericSpec = std::map<Indeterminate, Rational>;

namespace oracle_detail {

inline const Rational& lookup(const NumericSpec& spec, const Indeterminate& x) {
  auto it = spec.find(x);
  if (it == spec.end()) throw Error("no value for " + x.name());
  return it->second;
}

inline Rational prob(const Mid& mid, const NumericSpec& spec, int pos, const std::vector<int>& y) {
  Config c;
  for (int p : mid.parents(pos)) c.emplace_back(mid.label(p), y[p]);
  std::sort(c.begin(), c.end(), [](auto& a, auto& b) { return a.first > b.first; });
  return lookup(spec, Indeterminate::probability(mid.label(pos), y[pos], c, mid.node(pos).generation));
}

inline Rational util(const Mid& mid, const NumericSpec& spec, int u, const std::vector<int>& y) {
  Config c;
  for (int p : mid.utility_parents(u)) c.emplace_back(mid.label(p), y[p]);
  std::sort(c.begin(), c.end(), [](auto& a, auto& b) { return a.first > b.first; });
  return lookup(spec, Indeterminate::utility(mid.utility(u).label, c));
}

struct Scalars {
  std::vector<Rational> k;  // by utility index - 1
  Rational h;
};

inline Scalars scalars(const Mid& mid, const NumericSpec& spec) {
  Scalars s;
  const Weights& w = mid.weights();
  for (int u = 1; u <= mid.m(); ++u) {
    int l = mid.utility(u).label;
    auto it = w.k.find(l);
    s.k.push_back(it != w.k.end() ? it->second : lookup(spec, Indeterminate::weight(l)));
  }
  switch (w.mode) {
    case InteractionMode::symbolic:
      s.h = mid.m() > 1 ? lookup(spec, Indeterminate::interaction()) : Rational(0);
      break;
    case InteractionMode::numeric: s.h = w.h; break;
    case InteractionMode::additive: s.h = 0; break;
    case InteractionMode::solved: s.h = solve_h(s.k).h; break;
  }
  return s;
}

// sum over nonempty I of h^{|I|-1} prod_{j in I} k_j U_j
inline Rational total_utility(const std::vector<Rational>& ku, const Rational& h) {
  Rational total = 0;
  std::size_t m = ku.size();
  for (std::size_t mask = 1; mask < (std::size_t(1) << m); ++mask) {
    Rational term = 1;
    int size = 0;
    for (std::size_t j = 0; j < m; ++j)
      if (mask >> j & 1) term *= ku[j], ++size;
    for (int t = 1; t < size; ++t) term *= h;
    total += term;
  }
  return total;
}

// visits every joint configuration (index by position, slot 0 unused)
template <class F>
void for_each_joint(const Mid& mid, F&& f) {
  std::vector<int> y(mid.n() + 1, 0);
  for (;;) {
    f(y);
    int p = mid.n();
    while (p >= 1 && ++y[p] == mid.card(p)) y[p--] = 0;
    if (p < 1) return;
  }
}

}  // namespace oracle_detail

// expected utility of a policy by full enumeration
inline Rational joint_eu_numeric(const Mid& mid, const NumericSpec& spec, const Policy& policy) {
  using namespace oracle_detail;
  Scalars s = scalars(mid, spec);
  Rational eu = 0;
  for_each_joint(mid, [&](const std::vector<int>& y) {
    Rational p = 1;
    for (int i = 1; i <= mid.n() && p != 0; ++i) {
      if (mid.is_decision(i)) {
        int a = policy.rule(mid.label(i)).action([&](int label) { return y[mid.position(label)]; });
        if (a != y[i]) p = 0;
      } else {
        p *= prob(mid, spec, i, y);
      }
    }
    if (p == 0) return;
    std::vector<Rational> ku;
    for (int u = 1; u <= mid.m(); ++u) ku.push_back(s.k[u - 1] * util(mid, spec, u, y));
    eu += p * total_utility(ku, s.h);
  });
  return eu;
}

struct OptimalPolicy {
  Policy policy;
  Rational eu;
};

// best policy over the full enumeration; ties keep the first one found
inline OptimalPolicy optimal_policy_enumerated(const Mid& mid, const NumericSpec& spec) {
  std::optional<OptimalPolicy> best;
  for (auto& p : enumerate_policies(mid)) {
    Rational v = joint_eu_numeric(mid, spec, p);
    if (!best || v > best->eu) best = OptimalPolicy{p, v};
  }
  return *best;
}

// numeric backward induction over value tables keyed by explicit configurations
inline OptimalPolicy optimal_policy_dp(const Mid& mid, const NumericSpec& spec) {
  using namespace oracle_detail;
  Scalars s = scalars(mid, spec);
  std::vector<int> last;
  for (int u = 1; u <= mid.m(); ++u) last.push_back(*std::max_element(mid.utility_parents(u).begin(), mid.utility_parents(u).end()));

  // table over the variables listed in `vars`, keyed by their values
  struct Table {
    std::vector<int> vars;
    std::map<std::vector<int>, Rational> v;
    Rational at(const std::vector<int>& y) const {
      std::vector<int> key;
      for (int p : vars) key.push_back(y[p]);
      return v.at(key);
    }
  };
  auto configs = [&](const std::vector<int>& vars, auto&& f) {
    std::vector<int> y(mid.n() + 1, 0);
    for (;;) {
      f(y);
      std::size_t t = vars.size();
      while (t > 0 && ++y[vars[t - 1]] == mid.card(vars[t - 1])) y[vars[--t]] = 0;
      if (t == 0) return;
    }
  };
  Table next{{}, {{{}, Rational(0)}}};
  OptimalPolicy out;
  int u = mid.m();
  for (int k = mid.n(); k >= 1; --k) {
    IndexSet here = comp_b(mid, k);
    std::vector<int> with_k = set_union(here, {k});
    // utilities closing at k fold into the value first
    Table w{with_k, {}};
    configs(with_k, [&](const std::vector<int>& y) {
      Rational v = next.at(y);
      if (u >= 1 && last[u - 1] == k) {
        Rational kp = s.k[u - 1] * util(mid, spec, u, y);
        v = s.h * kp * v + kp + v;
      }
      std::vector<int> key;
      for (int p : with_k) key.push_back(y[p]);
      w.v[key] = v;
    });
    if (u >= 1 && last[u - 1] == k) --u;
    Table cur{here, {}};
    DecisionRule rule;
    if (mid.is_decision(k)) {
      std::vector<int> domain = mid.labels_of(here);
      std::sort(domain.begin(), domain.end());
      rule = empty_rule(mid, domain);
    }
    configs(here, [&](std::vector<int> y) {
      std::vector<int> key;
      for (int p : here) key.push_back(y[p]);
      if (mid.is_decision(k)) {
        std::optional<Rational> best;
        int arg = 0;
        for (int a = 0; a < mid.card(k); ++a) {
          y[k] = a;
          Rational v = w.at(y);
          if (!best || v > *best) best = v, arg = a;
        }
        cur.v[key] = *best;
        rule.actions[rule.index([&](int label) { return y[mid.position(label)]; })] = arg;
      } else {
        Rational acc = 0;
        for (int a = 0; a < mid.card(k); ++a) {
          y[k] = a;
          acc += prob(mid, spec, k, y) * w.at(y);
        }
        cur.v[key] = acc;
      }
    });
    if (mid.is_decision(k)) out.policy.rules[mid.label(k)] = rule;
    next = std::move(cur);
  }
  out.eu = next.v.at({});
  return out;
}

// both methods, which must agree on the optimal value
inline OptimalPolicy optimal_policy_numeric(const Mid& mid, const NumericSpec& spec) {
  OptimalPolicy a = optimal_policy_enumerated(mid, spec);
  OptimalPolicy b = optimal_policy_dp(mid, spec);
  if (a.eu != b.eu) throw Error("oracle disagreement: enumeration and backward induction differ");
  if (joint_eu_numeric(mid, spec, b.policy) != b.eu) throw Error("oracle disagreement on the induced policy");
  return b;
}

// Subproblem from stage i on: the variables of B_i become parentless chance
// roots (their distribution is up to the caller), Y_i..Y_n keep their local
// structure, utilities closing before Y_i are dropped.
inline Mid restrict_to_stage(const Mid& mid, int i) {
  IndexSet roots = comp_b(mid, i);
  std::vector<Node> nodes;
  std::vector<int> kept;
  for (int p : roots) {
    nodes.push_back({mid.label(p), NodeKind::chance, mid.card(p), {}, 0});
    kept.push_back(mid.label(p));
  }
  for (int p = i; p <= mid.n(); ++p) kept.push_back(mid.label(p));
  std::sort(kept.begin(), kept.end());
  for (int p = i; p <= mid.n(); ++p) {
    Node nd = mid.node(p);
    std::erase_if(nd.parents, [&](int l) { return !std::binary_search(kept.begin(), kept.end(), l); });
    nodes.push_back(nd);
  }
  std::vector<UtilityNode> us;
  Weights w = mid.weights();
  for (int u = 1; u <= mid.m(); ++u) {
    if (mid.utility_parents(u).back() >= i) us.push_back(mid.utility(u));
    else w.k.erase(mid.utility(u).label);
  }
  return Mid(std::move(nodes), std::move(us), std::move(w));
}

}  // namespace symeu
