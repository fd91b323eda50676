#pragma once

#include "symeu/model.hpp"
#include "symeu/policy.hpp"
#include "symeu/sensitivity.hpp"

namespace fixtures {

using namespace symeu;

// the running example: Y1,Y4 decisions, U1(Y3) U2(Y5) U3(Y4,Y6)
inline Mid ex1(Weights w = {}) {
  return Mid({{1, NodeKind::decision, 2, {}},
              {2, NodeKind::chance, 2, {1}},
              {3, NodeKind::chance, 2, {1, 2}},
              {4, NodeKind::decision, 2, {1, 2, 3}},
              {5, NodeKind::chance, 2, {3, 4}},
              {6, NodeKind::chance, 2, {4, 5}}},
             {{1, {3}}, {2, {5}}, {3, {4, 6}}}, std::move(w));
}

// same, but the second decision does not see Y2
inline Mid ex2(Weights w = {}) {
  return Mid({{1, NodeKind::decision, 2, {}},
              {2, NodeKind::chance, 2, {1}},
              {3, NodeKind::chance, 2, {1, 2}},
              {4, NodeKind::decision, 2, {1, 3}},
              {5, NodeKind::chance, 2, {3, 4}},
              {6, NodeKind::chance, 2, {4, 5}}},
             {{1, {3}}, {2, {5}}, {3, {4, 6}}}, std::move(w));
}

// Y1 fixed, Y4 = 1 exactly when y3 = 0
inline Policy ex_policy(int y1 = 1) {
  Policy p;
  p.rules[1] = DecisionRule::constant(y1);
  p.rules[4] = DecisionRule{{3}, {2}, {0, 1}};
  return p;
}

inline Indeterminate ind(const Mid& mid, const char* name) { return parse_indeterminate(name, mid); }
inline Polynomial poly(const Mid& mid, const char* text) { return parse_polynomial(text, mid); }

}  // namespace fixtures

namespace fixtures {

// elicited values for the running example; p6001 and p6000 follow by sum-to-one
inline SubstitutionSpec complete_values(const Mid& mid) {
  SubstitutionSpec s;
  for (auto [name, v] : std::initializer_list<std::pair<const char*, const char*>>{
           {"p6111", "0.3"}, {"p6110", "0.2"}, {"p6101", "0.2"}, {"p6100", "0.3"}, {"p5110", "0.2"},
           {"p5101", "0.9"}, {"p5100", "0.6"}, {"p5111", "0.7"}, {"psi311", "0"}, {"psi310", "0.4"},
           {"psi301", "0.8"}, {"psi300", "1"}, {"psi21", "0"}, {"psi20", "1"}, {"k3", "0.4"},
           {"k2", "0.2"}, {"k1", "0.2"}, {"h", "0.9"}})
    s.numeric[ind(mid, name)] = parse_rational(v);
  return s;
}

// the same with p5111, p6001 and psi301 left open and two parameters tied
inline SubstitutionSpec partial_values(const Mid& mid) {
  SubstitutionSpec s = complete_values(mid);
  for (const char* name : {"p6111", "p6110", "p6101", "p5111", "psi301"}) s.numeric.erase(ind(mid, name));
  s.relations[ind(mid, "p6011")] = poly(mid, "p5111");
  s.relations[ind(mid, "p6010")] = poly(mid, "p6001");
  s.free = {ind(mid, "p5111"), ind(mid, "p6001"), ind(mid, "psi301")};
  return s;
}

}  // namespace fixtures
