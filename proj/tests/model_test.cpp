#include "fixtures.hpp"

#include <gtest/gtest.h>

using namespace symeu;
using namespace fixtures;

TEST(Combinatorics, RunningExample) {
  Mid mid = ex1();
  EXPECT_EQ(comp_j(mid), (std::vector<int>{3, 5, 6}));
  EXPECT_EQ(comp_b(mid, 5), (IndexSet{3, 4}));
  EXPECT_EQ(comp_b(mid, 4), (IndexSet{3}));
  EXPECT_EQ(comp_b(mid, 1), IndexSet{});
  EXPECT_EQ(comp_b(mid, 7), IndexSet{});
  EXPECT_EQ(sequence_string(mid), "Y1,Y2,Y3,U1,Y4,Y5,U2,Y6,U3");
  EXPECT_TRUE(is_extensive_form(mid));
  EXPECT_FALSE(is_extensive_form(ex2()));
  EXPECT_EQ(first_non_extensive_decision(ex2()), 4);
}

TEST(Combinatorics, ParameterVectorShapes) {
  Mid mid = ex1();
  auto p6 = probability_vector(mid, 6);
  EXPECT_EQ(p6.scope, (IndexSet{4, 5, 6}));
  ASSERT_EQ(p6.entries.size(), 8u);
  EXPECT_EQ(p6.entries.front().name(), "p6111");
  EXPECT_EQ(p6.entries.back().name(), "p6000");
  auto psi3 = utility_vector(mid, 3);
  EXPECT_EQ(psi3.entries.front().name(), "psi311");
  EXPECT_EQ(psi3.entries[1].name(), "psi301");  // y6 moves fastest
  // 4 + 8 + 8 + 8 probabilities, 2 + 2 + 4 utilities, 3 weights, h
  EXPECT_EQ(all_indeterminates(mid).size(), 40u);
}

TEST(Validate, ReportsStructuralErrors) {
  EXPECT_FALSE(has_errors(validate(ex1())));
  Mid bad({{1, NodeKind::chance, 2, {}}, {3, NodeKind::chance, 2, {5}}, {5, NodeKind::chance, 2, {1}}},
          {{1, {3}}, {2, {5}}});
  auto ds = validate(bad);
  ASSERT_TRUE(has_errors(ds));
  bool found = false;
  for (auto& d : ds) found |= d.message == "Y5 is a parent of Y3 but does not precede it";
  EXPECT_TRUE(found);

  Mid shared({{1, NodeKind::chance, 2, {}}, {2, NodeKind::chance, 2, {1}}}, {{1, {2}}, {2, {2}}});
  EXPECT_TRUE(has_errors(validate(shared)));
  Mid barren({{1, NodeKind::chance, 2, {}}, {2, NodeKind::chance, 2, {}}}, {{1, {2}}});
  EXPECT_FALSE(has_errors(validate(barren)));
  EXPECT_EQ(validate(barren).size(), 1u);
  Mid idle({{1, NodeKind::decision, 2, {}}, {2, NodeKind::chance, 2, {}}}, {{1, {2}}});
  EXPECT_TRUE(has_errors(validate(idle)));
  EXPECT_THROW(Mid({{1, NodeKind::chance, 2, {}}, {1, NodeKind::chance, 2, {}}}, {{1, {1}}}), Error);
}

TEST(Validate, WeightChecks) {
  Weights w;
  w.k = {{1, Rational(1, 5)}, {2, Rational(1, 5)}, {3, Rational(2, 5)}};
  w.mode = InteractionMode::numeric;
  w.h = Rational(9, 10);
  auto ds = validate(ex1(w));
  EXPECT_FALSE(has_errors(ds));
  ASSERT_EQ(ds.size(), 1u);  // 0.9 is not the root for these weights
  EXPECT_EQ(ds[0].severity, Diagnostic::Severity::warning);
  w.k[1] = Rational(3, 2);
  EXPECT_TRUE(has_errors(validate(ex1(w))));
}

TEST(SolveH, RootOfTheNormalisation) {
  std::vector<Rational> k{Rational(1, 5), Rational(1, 5), Rational(2, 5)};
  auto s = solve_h(k);
  EXPECT_FALSE(s.additive);
  EXPECT_GT(s.h, 0);
  EXPECT_LT(abs(interaction_residual(k, s.h)), Rational(1, 1000000));
  std::vector<Rational> big{Rational(1, 2), Rational(7, 10)};
  auto t = solve_h(big);
  EXPECT_LT(t.h, 0);
  EXPECT_GE(t.h, -1);
  EXPECT_LT(abs(interaction_residual(big, t.h)), Rational(1, 1000000));
  EXPECT_TRUE(solve_h({Rational(1, 2), Rational(1, 2)}).additive);
  EXPECT_THROW(solve_h({Rational(1)}), Error);
}

TEST(ScopeIndex, HighestPositionFastestValuesDescending) {
  Mid mid = ex1();
  ScopeIndex ix({3, 4}, mid);
  ASSERT_EQ(ix.size(), 4u);
  EXPECT_EQ(ix.config(0), (std::vector<int>{1, 1}));
  EXPECT_EQ(ix.config(1), (std::vector<int>{1, 0}));
  EXPECT_EQ(ix.config(2), (std::vector<int>{0, 1}));
  for (std::size_t e = 0; e < 4; ++e) EXPECT_EQ(ix.index_of(ix.config(e)), e);
  auto c = make_config(mid, {3, 4}, {1, 0});
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0], (Assignment{4, 0}));
  EXPECT_EQ(c[1], (Assignment{3, 1}));
}

TEST(Policies, DomainsAndCounts) {
  Mid mid = ex1();
  auto doms = policy_domains(mid);
  EXPECT_EQ(doms[1], std::vector<int>{});
  EXPECT_EQ(doms[4], std::vector<int>{3});
  EXPECT_EQ(policy_count(mid), 8u);
  auto all = enumerate_policies(mid);
  ASSERT_EQ(all.size(), 8u);
  for (std::size_t a = 0; a < all.size(); ++a)
    for (std::size_t b = a + 1; b < all.size(); ++b) EXPECT_FALSE(all[a] == all[b]);
  EXPECT_EQ(ex_policy().rule(4).action([](int) { return 0; }), 1);
  EXPECT_EQ(ex_policy().rule(4).action([](int) { return 1; }), 0);
  EXPECT_THROW(Policy{}.rule(4), Error);
}
