#pragma once

#include "symeu/model.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace symeu {

// Action table for one decision. The domain is a list of labels (ascending);
// actions run over its configurations, highest label fastest, values descending.
struct DecisionRule {
  std::vector<int> domain;
  std::vector<int> cards;
  std::vector<int> actions;

  static DecisionRule constant(int action) { return {{}, {}, {action}}; }

  std::size_t index(const std::function<int(int)>& value_of) const {
    std::size_t idx = 0;
    for (std::size_t t = 0; t < domain.size(); ++t) idx = idx * cards[t] + (cards[t] - 1 - value_of(domain[t]));
    return idx;
  }
  int action(const std::function<int(int)>& value_of) const { return actions.at(index(value_of)); }

  // domain values for entry idx, aligned with domain
  std::vector<int> config(std::size_t idx) const {
    std::vector<int> v(domain.size());
    for (std::size_t t = domain.size(); t-- > 0;) {
      v[t] = cards[t] - 1 - static_cast<int>(idx % cards[t]);
      idx /= cards[t];
    }
    return v;
  }
  friend bool operator==(const DecisionRule&, const DecisionRule&) = default;
};

struct Policy {
  std::map<int, DecisionRule> rules;  // decision label -> rule
  const DecisionRule& rule(int label) const {
    auto it = rules.find(label);
    if (it == rules.end()) throw Error("policy has no rule for Y" + std::to_string(label));
    return it->second;
  }
  friend bool operator==(const Policy&, const Policy&) = default;
};

// what each decision can usefully condition on: the EU scope right before it is
// eliminated, minus itself. That is B_i (B_{i+1} \ {i} unless Y_i closes a utility).
inline std::map<int, std::vector<int>> policy_domains(const Mid& mid) {
  std::map<int, std::vector<int>> out;
  for (int i = 1; i <= mid.n(); ++i) {
    if (!mid.is_decision(i)) continue;
    auto labels = mid.labels_of(comp_b(mid, i));
    std::sort(labels.begin(), labels.end());
    out[mid.label(i)] = labels;
  }
  return out;
}

inline DecisionRule empty_rule(const Mid& mid, const std::vector<int>& domain) {
  DecisionRule r;
  r.domain = domain;
  std::size_t size = 1;
  for (int l : domain) {
    r.cards.push_back(mid.card(mid.position(l)));
    size *= r.cards.back();
  }
  r.actions.assign(size, 0);
  return r;
}

inline std::size_t policy_count(const Mid& mid) {
  std::size_t total = 1;
  for (auto& [label, dom] : policy_domains(mid)) {
    DecisionRule r = empty_rule(mid, dom);
    for (std::size_t e = 0; e < r.actions.size(); ++e) {
      std::size_t r_i = mid.card(mid.position(label));
      if (total > (std::size_t(1) << 40) / r_i) throw Error("too many policies to enumerate");
      total *= r_i;
    }
  }
  return total;
}

inline std::vector<Policy> enumerate_policies(const Mid& mid, std::size_t limit = 1u << 20) {
  if (policy_count(mid) > limit) throw Error("too many policies to enumerate");
  std::vector<Policy> out{Policy{}};
  for (auto& [label, dom] : policy_domains(mid)) {
    DecisionRule base = empty_rule(mid, dom);
    int r_i = mid.card(mid.position(label));
    std::vector<DecisionRule> rules{base};
    for (std::size_t e = 0; e < base.actions.size(); ++e) {
      std::vector<DecisionRule> next;
      for (auto& r : rules)
        for (int a = 0; a < r_i; ++a) {
          next.push_back(r);
          next.back().actions[e] = a;
        }
      rules = std::move(next);
    }
    std::vector<Policy> next;
    for (auto& p : out)
      for (auto& r : rules) {
        next.push_back(p);
        next.back().rules[label] = r;
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace symeu
