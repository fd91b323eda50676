#pragma once

#include "symeu/eu_engine.hpp"

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace symeu {

// numeric values, relations between parameters, and parameters left free
struct SubstitutionSpec {
  std::map<Indeterminate, Rational> numeric;
  std::map<Indeterminate, Polynomial> relations;
  std::vector<Indeterminate> free;
  friend bool operator==(const SubstitutionSpec&, const SubstitutionSpec&) = default;
};

namespace sens_detail {

inline bool classified(const SubstitutionSpec& s, const Indeterminate& x) {
  return s.numeric.count(x) || s.relations.count(x) || std::find(s.free.begin(), s.free.end(), x) != s.free.end();
}

}  // namespace sens_detail

// Adds the sum-to-one relation for every probability block that has exactly
// one member not mentioned by the spec.
inline SubstitutionSpec complete_spec(const Mid& mid, SubstitutionSpec spec) {
  for (auto& x : spec.free)
    if (spec.numeric.count(x) || spec.relations.count(x)) throw Error(x.name() + " is both free and bound");
  for (auto& [x, _] : spec.relations)
    if (spec.numeric.count(x)) throw Error(x.name() + " has both a value and a relation");
  for (int pos = 1; pos <= mid.n(); ++pos) {
    if (!mid.is_chance(pos)) continue;
    auto pv = probability_vector(mid, pos);
    int r = mid.card(pos);
    // entries run with Y_pos fastest only when it is the largest position in
    // scope; group by parent configuration instead of relying on layout
    std::map<Config, std::vector<Indeterminate>> blocks;
    for (auto& x : pv.entries) blocks[x.config()].push_back(x);
    for (auto& [_, members] : blocks) {
      if (static_cast<int>(members.size()) != r) throw Error("malformed probability block");
      std::vector<Indeterminate> open;
      for (auto& x : members)
        if (!sens_detail::classified(spec, x)) open.push_back(x);
      if (open.size() != 1) continue;
      Polynomial rest(1);
      for (auto& x : members)
        if (x != open[0]) rest -= Polynomial(x);
      spec.relations[open[0]] = rest;
    }
  }
  return spec;
}

inline Bindings spec_bindings(const SubstitutionSpec& spec) {
  Bindings b;
  for (auto& [x, v] : spec.numeric) b[x] = Polynomial(v);
  for (auto& [x, p] : spec.relations) b[x] = p;
  return b;
}

inline Polynomial apply_spec(const Mid& mid, const Polynomial& p, const SubstitutionSpec& spec) {
  return substitute(p, spec_bindings(complete_spec(mid, spec)));
}

inline EuVector apply_spec(const Mid& mid, const EuVector& v, const SubstitutionSpec& spec) {
  return substitute(v, spec_bindings(complete_spec(mid, spec)));
}

// indeterminates of v that the spec leaves untouched and does not declare free
inline std::vector<Indeterminate> unclassified(const Mid& mid, const EuVector& v, const SubstitutionSpec& spec) {
  SubstitutionSpec full = complete_spec(mid, spec);
  std::set<Indeterminate> out;
  for (auto& e : v.entries)
    for (auto& x : e.indeterminates())
      if (!sens_detail::classified(full, x)) out.insert(x);
  return {out.begin(), out.end()};
}

// ---------------------------------------------------------------- decisions

struct ActionRow {
  Config observed;              // labels, descending
  std::vector<Rational> values; // EU per action
  int action = 0;
  Rational best, runner_up, margin;
};

struct ActionTable {
  int decision = 0;  // label
  std::vector<ActionRow> rows;
};

// Best action of decision `label` for every configuration it can see, from
// the numeric stage vector just after it. `later` must fix every decision after it.
inline ActionTable preferred_action_table(const Mid& mid, const SubstitutionSpec& spec, int label,
                                          const Policy& later = {}, bool allow_non_extensive = false) {
  int pos = mid.position(label);
  if (!mid.is_decision(pos)) throw Error("Y" + std::to_string(label) + " is not a decision");
  EvaluationOptions opt;
  opt.stop_at = pos + 1;
  opt.allow_non_extensive = allow_non_extensive;
  EuVector v = apply_spec(mid, symbolic_eu(mid, later, opt).stage(pos + 1), spec);
  for (auto& e : v.entries)
    if (!e.is_constant()) throw Error("stage vector after Y" + std::to_string(label) + " is not numeric under the spec");
  IndexSet seen = set_minus(v.scope, {pos});
  ScopeIndex rows(seen, mid), full(v.scope, mid);
  ActionTable out{label, {}};
  for (std::size_t b = 0; b < rows.size(); ++b) {
    auto cfg = rows.config(b);
    ActionRow row;
    row.observed = make_config(mid, seen, cfg);
    for (int a = 0; a < mid.card(pos); ++a) {
      std::size_t idx = full.index([&](int p) {
        if (p == pos) return a;
        return cfg[std::lower_bound(seen.begin(), seen.end(), p) - seen.begin()];
      });
      row.values.push_back(v.entries[idx].constant_value());
    }
    // lowest action wins ties
    for (int a = 1; a < mid.card(pos); ++a)
      if (row.values[a] > row.values[row.action]) row.action = a;
    row.best = row.values[row.action];
    std::optional<Rational> second;
    for (int a = 0; a < mid.card(pos); ++a)
      if (a != row.action && (!second || row.values[a] > *second)) second = row.values[a];
    row.runner_up = second.value_or(row.best);
    row.margin = row.best - row.runner_up;
    out.rows.push_back(std::move(row));
  }
  return out;
}

// ---------------------------------------------------------------- grids

struct Axis {
  Indeterminate x;
  Rational lo, hi;
  int steps = 1;
};

struct Alternative {
  std::string label;
  Polynomial eu;
};

struct GridCell {
  std::vector<Rational> center;
  std::vector<Rational> values;  // per alternative
  int winner = -1;               // alternative index, -1 when the top two tie
};

struct RegionGrid {
  std::vector<Axis> axes;
  std::vector<std::string> labels;
  std::vector<GridCell> cells;  // first axis slowest
};

namespace sens_detail {

inline void check_axes(const std::vector<Axis>& axes) {
  if (axes.empty() || axes.size() > 3) throw Error("a grid takes one to three axes");
  std::set<Indeterminate> seen;
  for (auto& a : axes) {
    if (!(a.lo < a.hi)) throw Error("axis " + a.x.name() + " needs lo < hi");
    if (a.steps < 1) throw Error("axis " + a.x.name() + " needs at least one step");
    if (!seen.insert(a.x).second) throw Error("axis " + a.x.name() + " repeated");
  }
}

inline std::map<Indeterminate, Rational> at(const std::vector<Axis>& axes, const std::vector<Rational>& point) {
  std::map<Indeterminate, Rational> m;
  for (std::size_t d = 0; d < axes.size(); ++d) m[axes[d].x] = point[d];
  return m;
}

// lattice point `k` along axis a (k may be fractional via num/den)
inline Rational coord(const Axis& a, const Rational& k) { return a.lo + (a.hi - a.lo) * k / a.steps; }

}  // namespace sens_detail

inline int argmax_or_tie(const std::vector<Rational>& v) {
  if (v.empty()) return -1;
  std::size_t best = 0;
  for (std::size_t t = 1; t < v.size(); ++t)
    if (v[t] > v[best]) best = t;
  for (std::size_t t = 0; t < v.size(); ++t)
    if (t != best && v[t] == v[best]) return -1;
  return static_cast<int>(best);
}

inline std::vector<Rational> evaluate_alternatives(const std::vector<Alternative>& alts,
                                                   const std::map<Indeterminate, Rational>& point) {
  std::vector<Rational> out;
  for (auto& a : alts) out.push_back(evaluate(a.eu, point));
  return out;
}

inline int classify_point(const std::vector<Alternative>& alts, const std::map<Indeterminate, Rational>& point) {
  return argmax_or_tie(evaluate_alternatives(alts, point));
}

inline RegionGrid admissible_grid(const std::vector<Alternative>& alts, const std::vector<Axis>& axes) {
  sens_detail::check_axes(axes);
  std::set<Indeterminate> on_axes;
  for (auto& a : axes) on_axes.insert(a.x);
  for (auto& a : alts)
    for (auto& x : a.eu.indeterminates())
      if (!on_axes.count(x)) throw Error("alternative '" + a.label + "' still depends on " + x.name());
  RegionGrid g{axes, {}, {}};
  for (auto& a : alts) g.labels.push_back(a.label);
  std::vector<int> k(axes.size(), 0);
  for (;;) {
    GridCell c;
    for (std::size_t d = 0; d < axes.size(); ++d)
      c.center.push_back(sens_detail::coord(axes[d], Rational(2 * k[d] + 1) / 2));
    c.values = evaluate_alternatives(alts, sens_detail::at(axes, c.center));
    c.winner = argmax_or_tie(c.values);
    g.cells.push_back(std::move(c));
    std::size_t d = axes.size();
    while (d > 0 && ++k[d - 1] == axes[d - 1].steps) k[--d] = 0;
    if (d == 0) break;
  }
  return g;
}

// the winner at each sub-cell centre (2^d of them) agrees with the cell's
inline bool cell_stable(const std::vector<Alternative>& alts, const RegionGrid& g, std::size_t cell) {
  const GridCell& c = g.cells.at(cell);
  std::size_t dims = g.axes.size();
  for (std::size_t mask = 0; mask < (std::size_t(1) << dims); ++mask) {
    std::vector<Rational> p = c.center;
    for (std::size_t d = 0; d < dims; ++d) {
      Rational quarter = (g.axes[d].hi - g.axes[d].lo) / g.axes[d].steps / 4;
      p[d] += (mask >> d & 1) ? quarter : Rational(-quarter);
    }
    if (classify_point(alts, sens_detail::at(g.axes, p)) != c.winner) return false;
  }
  return true;
}

struct Crossing {
  std::vector<Rational> point;
  std::size_t axis = 0;     // direction of the grid edge
  bool degenerate = false;  // the difference vanishes on the whole edge
};

// sign changes of diff along the edges of the (steps+1)^d lattice, located
// by linear interpolation between the two vertex values
inline std::vector<Crossing> indifference_samples(const Polynomial& diff, const std::vector<Axis>& axes) {
  sens_detail::check_axes(axes);
  std::vector<Crossing> out;
  std::set<std::vector<Rational>> vertices_seen;
  std::vector<int> k(axes.size(), 0);
  auto point = [&](const std::vector<int>& idx) {
    std::vector<Rational> p;
    for (std::size_t d = 0; d < axes.size(); ++d) p.push_back(sens_detail::coord(axes[d], idx[d]));
    return p;
  };
  for (;;) {
    auto p0 = point(k);
    Rational v0 = evaluate(diff, sens_detail::at(axes, p0));
    for (std::size_t d = 0; d < axes.size(); ++d) {
      if (k[d] == axes[d].steps) continue;
      auto k1 = k;
      ++k1[d];
      auto p1 = point(k1);
      Rational v1 = evaluate(diff, sens_detail::at(axes, p1));
      if (v0 == 0 && v1 == 0) {
        auto mid = p0;
        mid[d] = (p0[d] + p1[d]) / 2;
        out.push_back({mid, d, true});
      } else if (v0 == 0) {
        if (vertices_seen.insert(p0).second) out.push_back({p0, d, false});
      } else if (v1 == 0) {
        if (vertices_seen.insert(p1).second) out.push_back({p1, d, false});
      } else if ((v0 < 0) != (v1 < 0)) {
        auto x = p0;
        x[d] = p0[d] + (p1[d] - p0[d]) * v0 / (v0 - v1);
        out.push_back({x, d, false});
      }
    }
    std::size_t d = axes.size();
    while (d > 0 && ++k[d - 1] == axes[d - 1].steps + 1) k[--d] = 0;
    if (d == 0) break;
  }
  return out;
}

// one row per cell: axis values, winner, EU per alternative
inline std::string grid_table(const RegionGrid& g, int places = 6) {
  std::ostringstream os;
  for (auto& a : g.axes) os << a.x.name() << '\t';
  os << "preferred";
  for (auto& l : g.labels) os << '\t' << l;
  os << '\n';
  for (auto& c : g.cells) {
    for (auto& x : c.center) os << format_decimal(x, places) << '\t';
    os << (c.winner < 0 ? std::string("indifferent") : g.labels[c.winner]);
    for (auto& v : c.values) os << '\t' << format_decimal(v, places);
    os << '\n';
  }
  return os.str();
}

}  // namespace symeu
