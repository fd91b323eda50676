// One line per acceptance criterion. Exits 1 if any criterion fails.

#include "fixtures.hpp"
#include "random_mid.hpp"
#include "symeu/asymmetry.hpp"
#include "symeu/structure.hpp"
#include "symeu/transforms.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>

using namespace symeu;
using namespace fixtures;

namespace {

// pinned tolerances
constexpr double printed_tolerance = 5e-5;
constexpr double combinatorics_seconds = 1;
constexpr double ex2_seconds = 10;
constexpr double conformance_seconds = 300;
constexpr double smoke_seconds = 10;

using Histogram = std::map<unsigned, std::size_t>;
using Rel = Asymmetry::Relation;

struct Outcome {
  bool ok = true;
  std::ostringstream note;
  void check(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      note << (note.tellp() > 0 ? "; " : "") << what;
    }
  }
};

int failures = 0;

void criterion(const std::string& name, double limit, const std::function<void(Outcome&)>& body) {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.check(false, std::string("threw: ") + e.what());
  }
  double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit > 0) o.check(s < limit, "took " + std::to_string(s) + " s, limit " + std::to_string(limit) + " s");
  std::cout << (o.ok ? "PASS " : "FAIL ") << name << " (" << std::fixed;
  std::cout.precision(2);
  std::cout << s << " s)";
  if (!o.note.str().empty()) std::cout << ": " << o.note.str();
  std::cout << "\n";
  if (!o.ok) ++failures;
}

EvaluationOptions lenient() {
  EvaluationOptions o;
  o.allow_non_extensive = true;
  return o;
}

Polynomial hand_stage5(const Mid& mid, int y4, int y3) {
  auto s = [&](std::string t) {
    for (std::size_t at; (at = t.find("{a}")) != std::string::npos;) t.replace(at, 3, std::to_string(y4));
    for (std::size_t at; (at = t.find("{b}")) != std::string::npos;) t.replace(at, 3, std::to_string(y3));
    return parse_polynomial(t, mid);
  };
  return s("k2*(psi21*p51{a}{b} + psi20*p50{a}{b})") +
         s("k3*(psi31{a}*p611{a} + psi30{a}*p601{a})*p51{a}{b} + k3*(psi31{a}*p610{a} + psi30{a}*p600{a})*p50{a}{b}") +
         s("h*k2*k3*((psi31{a}*p610{a} + psi30{a}*p600{a})*psi20*p50{a}{b} + "
           "(psi31{a}*p611{a} + psi30{a}*p601{a})*psi21*p51{a}{b})");
}

std::string show(const Histogram& h) { return histogram_string(h); }

// stages of one run against the closed form
std::size_t structure_mismatches(const Mid& mid, const Policy& pol, bool additive) {
  auto tr = symbolic_eu(mid, pol, lenient());
  std::size_t bad = 0;
  for (int i = 1; i <= mid.n() + 1; ++i) {
    if (!check_structure(tr.stage(i), predicted_structure(mid, i, additive)).ok) ++bad;
    for (auto& e : tr.stage(i).entries)
      if (additive ? !square_free(e) : !square_free_except_h(e)) ++bad;
  }
  return bad;
}

std::size_t disagreements(const Mid& before, const Mid& after, const std::vector<DefinitionalBinding>& bindings,
                          std::mt19937_64& rng) {
  auto s = random_numeric_spec(before, rng);
  auto t = resolve_numeric(bindings, s);
  std::size_t bad = 0;
  for (auto& pol : enumerate_policies(after))
    if (joint_eu_numeric(before, s, pol) != joint_eu_numeric(after, t, pol)) ++bad;
  return bad;
}

}  // namespace

int main() {
  criterion("fixture combinatorics", combinatorics_seconds, [](Outcome& o) {
    Mid mid = ex1();
    o.check(comp_j(mid) == std::vector<int>{3, 5, 6}, "J");
    o.check(comp_b(mid, 5) == IndexSet{3, 4}, "B5");
    o.check(comp_b(mid, 4) == IndexSet{3}, "B4");
    o.check(sequence_string(mid) == "Y1,Y2,Y3,U1,Y4,Y5,U2,Y6,U3", "DS " + sequence_string(mid));
    o.check(is_extensive_form(mid), "EX1 extensive");
    o.check(!is_extensive_form(ex2()), "EX2 not extensive");
  });

  criterion("stage-5 symbolic vector", 0, [](Outcome& o) {
    Mid mid = ex1();
    auto tr = symbolic_eu(mid, ex_policy());
    const EuVector& u5 = tr.stage(5);
    o.check(u5.entries.size() == 4, "4 entries");
    ScopeIndex ix(u5.scope, mid);
    for (std::size_t e = 0; e < u5.entries.size(); ++e) {
      auto v = ix.config(e);
      o.check(u5.entries[e] == hand_stage5(mid, v[1], v[0]), "entry " + entry_label(mid, u5.scope, e));
      o.check(u5.entries[e].degree_histogram() == Histogram{{3, 2}, {4, 4}, {7, 4}},
              "histogram " + show(u5.entries[e].degree_histogram()));
      o.check(square_free(u5.entries[e]), "square-free");
    }
  });

  criterion("stage-1 vector of the non-extensive example", ex2_seconds, [](Outcome& o) {
    Polynomial u1 = symbolic_eu(ex2(), ex_policy(), lenient()).stage(1).entries.at(0);
    Histogram h = u1.degree_histogram();
    o.check(h == Histogram{{4, 4}, {5, 8}, {6, 16}, {8, 8}, {9, 32}, {12, 16}}, "histogram " + show(h));
    o.check(u1.size() == 84, std::to_string(u1.size()) + " monomials");
    for (auto& t : u1.terms())
      if (t.degree() == 12)
        o.check(std::any_of(t.exps.begin(), t.exps.end(), [](auto& f) { return f.second > 1; }),
                "degree-12 terms repeat a factor");
    Weights w;
    w.mode = InteractionMode::additive;
    Polynomial a = symbolic_eu(ex2(w), ex_policy(), lenient()).stage(1).entries.at(0);
    o.check(a.size() == 28, std::to_string(a.size()) + " additive monomials");
    o.check(a.degree_histogram() == Histogram{{4, 4}, {5, 8}, {6, 16}}, "additive histogram");
    o.check(square_free(a), "additive square-free");
  });

  criterion("structure conformance, 200 random diagrams", conformance_seconds, [](Outcome& o) {
    std::mt19937_64 rng(21);
    std::size_t bad = 0;
    for (int trial = 0; trial < 200; ++trial) {
      MidShape shape;
      shape.max_n = 7;
      shape.max_m = 3;
      shape.extensive = trial % 2 == 0;
      Mid mid = random_mid(rng, shape);
      Policy pol = random_policy(mid, rng);
      bad += structure_mismatches(mid, pol, false);
      mid.weights().mode = InteractionMode::additive;
      bad += structure_mismatches(mid, pol, true);
    }
    o.check(bad == 0, std::to_string(bad) + " mismatching stages");
  });

  criterion("oracle equivalence, 100 random diagrams", 0, [](Outcome& o) {
    std::mt19937_64 rng(11);
    MidShape shape;
    shape.max_n = 6;
    shape.max_policies = 256;
    std::size_t checks = 0, bad = 0;
    for (int trial = 0; trial < 100; ++trial) {
      Mid mid = random_mid(rng, shape);
      std::vector<NumericSpec> specs;
      for (int s = 0; s < 3; ++s) specs.push_back(random_numeric_spec(mid, rng));
      for (auto& pol : enumerate_policies(mid)) {
        Polynomial u1 = symbolic_eu(mid, pol).stage(1).entries.at(0);
        for (auto& s : specs) {
          ++checks;
          bad += evaluate(u1, s) != joint_eu_numeric(mid, s, pol);
        }
      }
    }
    o.check(bad == 0, std::to_string(bad) + " of " + std::to_string(checks) + " differ");
  });

  criterion("complete elicitation", 0, [](Outcome& o) {
    Mid mid = ex1();
    EvaluationOptions opt;
    opt.stop_at = 5;
    EuVector v = apply_spec(mid, symbolic_eu(mid, Policy{}, opt).stage(5), complete_values(mid));
    const std::vector<Rational> literal{parse_rational("0.307424"), parse_rational("0.375544"),
                                        parse_rational("0.446464"), parse_rational("0.446016")};
    const std::vector<double> printed{0.3074, 0.3755, 0.4465, 0.4460};
    for (std::size_t e = 0; e < 4; ++e) {
      Rational got = v.entries[e].constant_value();
      o.check(got == literal[e], entry_label(mid, v.scope, e) + " is " + format_decimal(got) + ", target " +
                                     format_decimal(literal[e]));
      o.check(std::abs(to_double(got) - printed[e]) <= printed_tolerance, "rounded " + entry_label(mid, v.scope, e));
    }
    ActionTable t = preferred_action_table(mid, complete_values(mid), 4);
    for (auto& r : t.rows) o.check(r.action == (r.observed == Config{{3, 0}} ? 1 : 0), "preferred action");
  });

  criterion("partial elicitation", 0, [](Outcome& o) {
    Mid mid = ex1();
    EvaluationOptions opt;
    opt.stop_at = 5;
    EuVector v = apply_spec(mid, symbolic_eu(mid, Policy{}, opt).stage(5), partial_values(mid));
    o.check(v.entries[0] ==
                poly(mid, "0.2*(1 - p5111) + 0.4*psi301*p5111^2 + 0.472*psi301*p6001*(1 - p5111)"),
            "entry Y4=1,Y3=1 is " + v.entries[0].str());
  });

  criterion("transform preservation", 0, [](Outcome& o) {
    Mid mid = ex2();
    auto r = reverse_arc(mid, 2, 3);
    Mid b = remove_barren(r.mid, 2);
    std::vector<std::vector<int>> parents;
    for (int p = 1; p <= b.n(); ++p) parents.push_back(b.node(p).parents);
    o.check(parents == std::vector<std::vector<int>>{{}, {1}, {1, 3}, {3, 4}, {4, 5}}, "diagram");
    o.check(b.labels_of({1, 2, 3, 4, 5}) == std::vector<int>{1, 3, 4, 5, 6}, "labels");
    auto run = [](const Mid& m) { return symbolic_eu(m, ex_policy(), lenient()); };
    Histogram u3r = run(r.mid).stage(3).entries.at(0).degree_histogram();
    o.check(u3r == Histogram{{4, 4}, {5, 8}, {8, 8}}, "reversed stage 3 " + show(u3r));
    Histogram u1r = resolve_symbolic(run(r.mid).stage(1).entries.at(0), r.bindings).degree_histogram();
    o.check(u1r == Histogram{{4, 4}, {5, 8}, {6, 16}, {8, 8}, {9, 32}, {12, 16}}, "reversed stage 1 " + show(u1r));
    Histogram u1b = run(b).stage(1).entries.at(0).degree_histogram();
    o.check(u1b == Histogram{{3, 2}, {4, 4}, {5, 8}, {7, 4}, {8, 16}, {11, 8}}, "reduced stage 1 " + show(u1b));

    std::mt19937_64 rng(31);
    MidShape shape;
    shape.max_n = 6;
    shape.edge = 0.5;
    shape.max_policies = 64;
    int reversals = 0;
    std::size_t bad = 0;
    while (reversals < 50) {
      Mid m = random_mid(rng, shape);
      std::vector<std::pair<int, int>> arcs;
      for (int p = 1; p <= m.n(); ++p)
        for (int q : m.parents(p))
          if (m.is_chance(p) && m.is_chance(q) && is_father(m, m.label(q), m.label(p)))
            arcs.emplace_back(m.label(q), m.label(p));
      if (arcs.empty()) continue;
      auto [i, j] = arcs[rng() % arcs.size()];
      auto rr = reverse_arc(m, i, j);
      if (policy_count(rr.mid) > 256) continue;
      bad += disagreements(m, rr.mid, rr.bindings, rng);
      ++reversals;
    }
    o.check(bad == 0, std::to_string(bad) + " policy values changed");
  });

  criterion("sufficiency", 0, [](Outcome& o) {
    Mid mid = ex1();
    o.check(sufficiency_removable(mid, 4) == std::vector<int>{2}, "removable set");
    o.check(apply_sufficiency(mid, 2, 4).mid == remove_barren(reverse_arc(ex2(), 2, 3).mid, 2), "diagram");
  });

  criterion("asymmetries", 0, [](Outcome& o) {
    Mid mid = ex1();
    std::vector<Asymmetry> as{{{{1, 1}}, 4, Rel::must_not_equal, 1}, {{{2, 1}}, 5, Rel::must_equal, 1},
                              {{{3, 1}}, 5, Rel::must_equal, 1},     {{{4, 1}}, 5, Rel::must_equal, 1},
                              {{{4, 1}}, 6, Rel::must_equal, 1}};
    auto tr = symbolic_eu_asymmetric(mid, ex_policy(1), as);
    o.check(tr.stage(6).entries[0] == poly(mid, "k3*psi311*p6111") && tr.stage(6).entries[1].is_zero(), "stage 6");
    const EuVector& u5 = tr.stage(5);
    for (std::size_t e : {0u, 2u}) {
      int y3 = ScopeIndex(u5.scope, mid).config(e)[0];
      std::string i = std::to_string(y3);
      o.check(u5.entries[e] == poly(mid, ("k3*psi311*p6111*p511" + i + " + k2*psi21*p511" + i +
                                          " + h*k2*k3*psi311*psi21*p6111*p511" + i).c_str()),
              "stage 5 " + entry_label(mid, u5.scope, e));
    }
    const Polynomial& u3 = tr.stage(3).entries[0];
    o.check(u3.size() == 9, "stage 3 entry Y2=1,Y1=1 has " + std::to_string(u3.size()) + " monomials, target 9");

    std::mt19937_64 rng(41);
    MidShape shape;
    shape.max_n = 6;
    int pairs = 0;
    std::size_t bad = 0;
    while (pairs < 100) {
      Mid m = random_mid(rng, shape);
      int i = std::uniform_int_distribution<int>(1, m.n() - 1)(rng);
      int j = std::uniform_int_distribution<int>(i + 1, m.n())(rng);
      if (!m.is_chance(i) || !m.is_chance(j)) continue;
      Asymmetry a{{{m.label(i), int(rng() % m.card(i))}}, m.label(j),
                  rng() % 2 ? Rel::must_equal : Rel::must_not_equal, int(rng() % m.card(j))};
      Policy pol = random_policy(m, rng);
      auto during = symbolic_eu_asymmetric(m, pol, {a});
      auto after = apply_asymmetries(symbolic_eu(m, pol), {a}, m);
      for (auto& [t, v] : during.stages) bad += v.entries != after.stage(t).entries;
      ++pairs;
    }
    o.check(bad == 0, std::to_string(bad) + " random stages differ");
  });

  criterion("cost formulas", 0, [](Outcome& o) {
    for (bool additive : {false, true}) {
      Mid mid = ex1();
      if (additive) mid.weights().mode = InteractionMode::additive;
      auto log = symbolic_eu(mid, ex_policy()).log;
      auto pred = predicted_costs(mid, additive);
      o.check(log.size() == pred.size(), "step count");
      for (std::size_t t = 0; t < std::min(log.size(), pred.size()); ++t) {
        o.check(log[t].multiplications == pred[t].multiplications,
                op_name(log[t].op) + " at " + std::to_string(log[t].position));
        if (log[t].op == StepRecord::Op::maximize)
          o.check(multiplication_count(mid, log[t].position, log[t].op, additive) == 0, "maximisation cost");
      }
    }
  });

  criterion("smoke benchmark", smoke_seconds, [](Outcome& o) {
    for (int y1 : {0, 1}) {
      o.check(!symbolic_eu(ex1(), ex_policy(y1)).stage(1).entries.at(0).is_zero(), "EX1");
      o.check(!symbolic_eu(ex2(), ex_policy(y1), lenient()).stage(1).entries.at(0).is_zero(), "EX2");
    }
  });

  std::cout << failures << " failing\n";
  return failures ? 1 : 0;
}
