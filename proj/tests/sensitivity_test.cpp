#include "fixtures.hpp"
#include "symeu/oracle.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace symeu;
using namespace fixtures;

namespace {

EuVector stage5(const Mid& mid) {
  EvaluationOptions opt;
  opt.stop_at = 5;
  return symbolic_eu(mid, Policy{}, opt).stage(5);
}

// numeric value of every indeterminate of `sub` under a complete spec
NumericSpec numeric_under(const Mid& mid, const Mid& sub, const SubstitutionSpec& s) {
  NumericSpec out;
  for (auto& x : all_indeterminates(sub)) {
    Polynomial v = apply_spec(mid, Polynomial(x), s);
    if (v.is_constant()) out[x] = v.constant_value();
  }
  return out;
}

}  // namespace

TEST(Sensitivity, CompleteElicitation) {
  Mid mid = ex1();
  SubstitutionSpec s = complete_values(mid);
  EuVector v = apply_spec(mid, stage5(mid), s);
  std::vector<Rational> got;
  for (auto& e : v.entries) {
    ASSERT_TRUE(e.is_constant());
    got.push_back(e.constant_value());
  }
  EXPECT_EQ(got, (std::vector<Rational>{Rational(9607, 31250), Rational(23469, 62500), Rational(6976, 15625),
                                        Rational(6969, 15625)}));
  // rounded figures from the worked example
  std::vector<double> printed{0.3074, 0.3755, 0.4465, 0.4460};
  for (std::size_t e = 0; e < 4; ++e) EXPECT_NEAR(to_double(got[e]), printed[e], 5e-5);

  // the subproblem from Y5 on, by enumeration, with (Y3, Y4) pinned
  Mid sub = restrict_to_stage(mid, 5);
  NumericSpec base = numeric_under(mid, sub, s);
  ScopeIndex ix(v.scope, mid);
  for (std::size_t e = 0; e < 4; ++e) {
    auto c = ix.config(e);
    NumericSpec t = base;
    for (int y = 0; y < 2; ++y) {
      t[Indeterminate::probability(3, y, {})] = Rational(y == c[0]);
      t[Indeterminate::probability(4, y, {})] = Rational(y == c[1]);
    }
    EXPECT_EQ(joint_eu_numeric(sub, t, Policy{}), got[e]) << entry_label(mid, v.scope, e);
  }
  EXPECT_TRUE(unclassified(mid, stage5(mid), s).empty());
}

TEST(Sensitivity, PreferredActions) {
  Mid mid = ex1();
  ActionTable t = preferred_action_table(mid, complete_values(mid), 4);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0].observed, (Config{{3, 1}}));
  EXPECT_EQ(t.rows[0].action, 0);
  EXPECT_EQ(t.rows[0].margin, Rational(851, 12500));
  EXPECT_EQ(t.rows[1].action, 1);
  EXPECT_EQ(t.rows[1].margin, Rational(7, 15625));
  EXPECT_EQ(t.rows[1].best, Rational(6976, 15625));

  // the same rule falls out of numeric backward induction on the subproblem
  Mid sub = restrict_to_stage(mid, 4);
  NumericSpec n = numeric_under(mid, sub, complete_values(mid));
  n[Indeterminate::probability(3, 1, {})] = Rational(1, 2);
  n[Indeterminate::probability(3, 0, {})] = Rational(1, 2);
  auto opt = optimal_policy_numeric(sub, n);
  EXPECT_EQ(opt.policy.rule(4).actions, (std::vector<int>{0, 1}));

  EXPECT_THROW(preferred_action_table(mid, complete_values(mid), 3), Error);
  EXPECT_THROW(preferred_action_table(mid, partial_values(mid), 4), Error);
}

TEST(Sensitivity, PartialElicitation) {
  Mid mid = ex1();
  SubstitutionSpec s = partial_values(mid);
  EXPECT_TRUE(unclassified(mid, stage5(mid), s).empty());
  SubstitutionSpec full = complete_spec(mid, s);
  EXPECT_EQ(full.relations.at(ind(mid, "p6111")), poly(mid, "1 - p6011"));
  EXPECT_EQ(full.relations.at(ind(mid, "p5011")), poly(mid, "1 - p5111"));

  EuVector v = apply_spec(mid, stage5(mid), s);
  EXPECT_EQ(v.entries[0], poly(mid, "0.2*(1 - p5111) + 0.4*psi301*p5111^2 + 0.472*psi301*p6001*(1 - p5111)"));
  EXPECT_EQ(v.entries[1], poly(mid, "12669/62500 + 27/125*p6001"));
  EXPECT_EQ(v.entries[2], poly(mid, "4/25 + 2/25*psi301*p5111 + 236/625*psi301*p6001"));
  EXPECT_EQ(v.entries[3], poly(mid, "5169/15625 + 18/125*p6001"));

  // plugging the elicited values back gives the complete answer
  std::map<Indeterminate, Rational> at{{ind(mid, "p5111"), Rational(7, 10)},
                                       {ind(mid, "p6001"), Rational(4, 5)},
                                       {ind(mid, "psi301"), Rational(4, 5)}};
  EuVector c = apply_spec(mid, stage5(mid), complete_values(mid));
  for (std::size_t e = 0; e < 4; ++e) EXPECT_EQ(evaluate(v.entries[e], at), c.entries[e].constant_value());
}

TEST(Sensitivity, SpecErrors) {
  Mid mid = ex1();
  SubstitutionSpec s;
  s.numeric[ind(mid, "k1")] = 1;
  s.free = {ind(mid, "k1")};
  EXPECT_THROW(complete_spec(mid, s), Error);
  SubstitutionSpec t;
  t.numeric[ind(mid, "k1")] = 1;
  t.relations[ind(mid, "k1")] = poly(mid, "k2");
  EXPECT_THROW(complete_spec(mid, t), Error);
}

TEST(Sensitivity, RegionGridOnTheElicitedSlice) {
  Mid mid = ex1();
  SubstitutionSpec s = partial_values(mid);
  s.free.erase(s.free.begin());
  s.numeric[ind(mid, "p5111")] = Rational(7, 10);
  EuVector v = apply_spec(mid, stage5(mid), s);
  std::vector<Alternative> alts{{"Y4=1", v.entries[0]}, {"Y4=0", v.entries[1]}};
  std::vector<Axis> axes{{ind(mid, "psi301"), 0, 1, 10}, {ind(mid, "p6001"), 0, 1, 10}};
  RegionGrid g = admissible_grid(alts, axes);
  ASSERT_EQ(g.cells.size(), 100u);
  EXPECT_EQ(g.cells[0].center, (std::vector<Rational>{Rational(1, 20), Rational(1, 20)}));
  EXPECT_EQ(g.cells[1].center, (std::vector<Rational>{Rational(1, 20), Rational(3, 20)}));
  for (auto& c : g.cells)
    EXPECT_EQ(c.winner, argmax_or_tie(evaluate_alternatives(alts, {{axes[0].x, c.center[0]}, {axes[1].x, c.center[1]}})));
  // the elicited point sits in the Y4=0 region
  EXPECT_EQ(classify_point(alts, {{axes[0].x, Rational(4, 5)}, {axes[1].x, Rational(4, 5)}}), 1);
  std::size_t y4_1 = 0;
  for (auto& c : g.cells) y4_1 += c.winner == 0;
  EXPECT_GT(y4_1, 0u);  // large psi301 with small p6001
  EXPECT_LT(y4_1, 50u);
  // the difference is bilinear, so its sign on a cell is fixed by the corners
  Polynomial diff = alts[0].eu - alts[1].eu;
  for (std::size_t c = 0; c < g.cells.size(); ++c) {
    const auto& ctr = g.cells[c].center;
    std::set<int> signs;
    for (int dx : {-1, 1})
      for (int dy : {-1, 1}) {
        Rational v = evaluate(diff, {{axes[0].x, ctr[0] + Rational(dx, 20)}, {axes[1].x, ctr[1] + Rational(dy, 20)}});
        signs.insert(v > 0 ? 1 : v < 0 ? -1 : 0);
      }
    if (signs.size() == 1 && !signs.count(0)) EXPECT_TRUE(cell_stable(alts, g, c)) << c;
  }

  std::string table = grid_table(g);
  EXPECT_EQ(table.substr(0, table.find('\n')), "psi301\tp6001\tpreferred\tY4=1\tY4=0");

  // more axes than the alternatives need is fine; missing ones are not
  EXPECT_THROW(admissible_grid(alts, {axes[0]}), Error);
  EXPECT_THROW(admissible_grid(alts, {}), Error);
  EXPECT_THROW(admissible_grid(alts, {{ind(mid, "psi301"), 1, 0, 10}, axes[1]}), Error);
}

TEST(Sensitivity, GridEdgeCases) {
  Mid mid = ex1();
  Indeterminate x = ind(mid, "psi301"), y = ind(mid, "p6001");
  Polynomial px(x), py(y);
  RegionGrid one = admissible_grid({{"a", px}, {"b", Polynomial(Rational(1, 3))}}, {{x, 0, 1, 1}});
  ASSERT_EQ(one.cells.size(), 1u);
  EXPECT_EQ(one.cells[0].winner, 0);
  EXPECT_FALSE(cell_stable({{"a", px}, {"b", Polynomial(Rational(1, 3))}}, one, 0));  // x = 1/4 flips it
  RegionGrid same = admissible_grid({{"a", px}, {"b", px}}, {{x, 0, 1, 3}, {y, 0, 1, 3}});
  for (auto& c : same.cells) EXPECT_EQ(c.winner, -1);
  EXPECT_NE(grid_table(same).find("indifferent"), std::string::npos);
}

TEST(Sensitivity, IndifferenceSamples) {
  Mid mid = ex1();
  Indeterminate x = ind(mid, "psi301"), y = ind(mid, "p6001");
  std::vector<Axis> axes{{x, 0, 1, 7}, {y, 0, 1, 5}};
  // multilinear, so linear along every grid edge: interpolated points are exact zeros
  Polynomial diff = poly(mid, "psi301*p6001 + 1/3*psi301 - 2/5");
  auto pts = indifference_samples(diff, axes);
  ASSERT_FALSE(pts.empty());
  for (auto& c : pts) {
    EXPECT_EQ(evaluate(diff, {{x, c.point[0]}, {y, c.point[1]}}), 0);
    EXPECT_FALSE(c.degenerate);
  }
  EXPECT_TRUE(indifference_samples(poly(mid, "1 + psi301"), axes).empty());
  // vanishes on the whole x = 0 side
  auto deg = indifference_samples(poly(mid, "psi301*(p6001 + 1)"), axes);
  std::size_t flat = 0;
  for (auto& c : deg) flat += c.degenerate;
  EXPECT_EQ(flat, 5u);
  // zero at a lattice vertex is reported once
  auto diag = indifference_samples(poly(mid, "psi301 - p6001"), {{x, 0, 1, 2}, {y, 0, 1, 2}});
  EXPECT_EQ(diag.size(), 3u);
}
