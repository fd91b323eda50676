#pragma once

#include "symeu/model.hpp"

#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

namespace symeu {

// fresh = numerator / denominator, both over parameters that already existed
struct DefinitionalBinding {
  Indeterminate fresh;
  Polynomial numerator;
  Polynomial denominator = Polynomial(1);
};

struct TransformStep {
  enum class Kind { reverse_arc, remove_barren, sufficiency } kind;
  int i = 0, j = 0;  // labels
  std::vector<DefinitionalBinding> bindings;
};

struct TransformLog {
  std::vector<TransformStep> steps;
  std::vector<DefinitionalBinding> bindings() const {
    std::vector<DefinitionalBinding> out;
    for (auto& s : steps) out.insert(out.end(), s.bindings.begin(), s.bindings.end());
    return out;
  }
};

struct TransformResult {
  Mid mid;
  std::vector<DefinitionalBinding> bindings;
};

inline std::string step_string(const TransformStep& s) {
  switch (s.kind) {
    case TransformStep::Kind::reverse_arc:
      return "ReverseArc(" + std::to_string(s.i) + "," + std::to_string(s.j) + ")";
    case TransformStep::Kind::remove_barren:
      return "RemoveBarren(" + std::to_string(s.i) + ")";
    case TransformStep::Kind::sufficiency:
      return "Sufficiency(" + std::to_string(s.i) + "," + std::to_string(s.j) + ")";
  }
  return "?";
}

namespace transform_detail {

// node order that respects the new edges, keeping the old order where it can
inline Mid reorder(const Mid& old, std::vector<Node> nodes) {
  std::map<int, int> rank;
  for (int p = 1; p <= old.n(); ++p) rank[old.label(p)] = p;
  std::map<int, std::size_t> at;
  for (std::size_t t = 0; t < nodes.size(); ++t) at[nodes[t].label] = t;
  std::map<int, int> missing;
  std::map<int, std::vector<int>> kids;
  for (auto& nd : nodes) {
    missing[nd.label] = static_cast<int>(nd.parents.size());
    for (int p : nd.parents) kids[p].push_back(nd.label);
  }
  auto cmp = [&](int a, int b) { return rank[a] > rank[b]; };
  std::priority_queue<int, std::vector<int>, decltype(cmp)> ready(cmp);
  for (auto& [l, c] : missing)
    if (c == 0) ready.push(l);
  std::vector<Node> out;
  while (!ready.empty()) {
    int l = ready.top();
    ready.pop();
    out.push_back(nodes[at[l]]);
    for (int k : kids[l])
      if (--missing[k] == 0) ready.push(k);
  }
  if (out.size() != nodes.size()) throw Error("transform would create a directed cycle");
  return Mid(std::move(out), old.utilities(), old.weights());
}

// all configurations of the given labels, as label -> value maps
inline std::vector<std::map<int, int>> configs(const Mid& mid, const std::vector<int>& labels) {
  std::vector<std::map<int, int>> out{{}};
  for (int l : labels) {
    std::vector<std::map<int, int>> next;
    for (auto& c : out)
      for (int v = mid.card(mid.position(l)) - 1; v >= 0; --v) {
        next.push_back(c);
        next.back()[l] = v;
      }
    out = std::move(next);
  }
  return out;
}

// p_{label} with the parents the node has in `mid`, read from `values`
inline Indeterminate param(const Mid& mid, int label, const std::map<int, int>& values) {
  int pos = mid.position(label);
  Config c;
  for (int pl : mid.node(pos).parents) c.emplace_back(pl, values.at(pl));
  std::sort(c.begin(), c.end(), [](auto& a, auto& b) { return a.first > b.first; });
  return Indeterminate::probability(label, values.at(label), c, mid.node(pos).generation);
}

inline std::vector<int> merge_labels(std::vector<int> a, const std::vector<int>& b, int drop) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  std::erase(a, drop);
  return a;
}

inline std::vector<int> child_labels(const Mid& mid, int label) {
  std::vector<int> out;
  for (int p = 1; p <= mid.n(); ++p)
    for (int pl : mid.node(p).parents)
      if (pl == label) out.push_back(mid.label(p));
  return out;
}

inline bool is_utility_parent(const Mid& mid, int label) {
  for (auto& u : mid.utilities())
    for (int pl : u.parents)
      if (pl == label) return true;
  return false;
}

}  // namespace transform_detail

// graph vertices: variable positions 1..n, utility u as n+u
inline bool d_separated(const Mid& mid, const std::set<int>& a, const std::set<int>& b, const std::set<int>& c) {
  int n = mid.n(), total = n + mid.m();
  std::vector<std::vector<int>> parents(total + 1);
  for (int p = 1; p <= n; ++p) parents[p] = mid.parents(p);
  for (int u = 1; u <= mid.m(); ++u) parents[n + u] = mid.utility_parents(u);
  for (int x : a)
    if (b.count(x) || c.count(x)) throw Error("d-separation needs disjoint sets");
  for (int x : c)
    if (b.count(x)) throw Error("d-separation needs disjoint sets");
  // ancestral set of everything involved
  std::vector<bool> keep(total + 1, false);
  std::vector<int> stack;
  for (auto* s : {&a, &b, &c})
    for (int x : *s) stack.push_back(x);
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    if (keep[x]) continue;
    keep[x] = true;
    for (int p : parents[x]) stack.push_back(p);
  }
  // moralise: link each vertex to its parents and parents to each other
  std::vector<std::set<int>> adj(total + 1);
  for (int x = 1; x <= total; ++x) {
    if (!keep[x]) continue;
    auto& ps = parents[x];
    for (std::size_t s = 0; s < ps.size(); ++s) {
      adj[x].insert(ps[s]);
      adj[ps[s]].insert(x);
      for (std::size_t t = s + 1; t < ps.size(); ++t) {
        adj[ps[s]].insert(ps[t]);
        adj[ps[t]].insert(ps[s]);
      }
    }
  }
  std::vector<bool> seen(total + 1, false);
  for (int x : a) stack.push_back(x);
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    if (seen[x] || b.count(x)) continue;
    if (c.count(x)) return false;
    seen[x] = true;
    for (int y : adj[x]) stack.push_back(y);
  }
  return true;
}

// (i,j) is an edge and the only directed path from i to j; labels
inline bool is_father(const Mid& mid, int i, int j) {
  int pi = mid.position(i), pj = mid.position(j);
  if (!contains(mid.parents(pj), pi)) throw Error("Y" + std::to_string(i) + " is not a parent of Y" + std::to_string(j));
  // any other path leaves i through a child that is itself an ancestor of j
  std::vector<bool> reach(mid.n() + 1, false);
  for (int p = pi + 1; p <= mid.n(); ++p) {
    if (p == pj) continue;
    for (int q : mid.parents(p))
      if (q == pi || reach[q]) reach[p] = true;
  }
  for (int q : mid.parents(pj))
    if (q != pi && reach[q]) return false;
  return true;
}

inline TransformResult reverse_arc(const Mid& mid, int i, int j) {
  using namespace transform_detail;
  int pi = mid.position(i), pj = mid.position(j);
  if (!mid.is_chance(pi) || !mid.is_chance(pj)) throw Error("arc reversal needs two chance nodes");
  if (!is_father(mid, i, j)) throw Error("Y" + std::to_string(i) + " is not the father of Y" + std::to_string(j));
  Node ni = mid.node(pi), nj = mid.node(pj);
  Node ni2 = ni, nj2 = nj;
  nj2.parents = merge_labels(nj.parents, ni.parents, i);
  ni2.parents = merge_labels(nj2.parents, {j}, i);
  ni2.generation = ni.generation + 1;
  nj2.generation = nj.generation + 1;
  std::vector<Node> nodes = mid.nodes();
  for (auto& nd : nodes) {
    if (nd.label == i) nd = ni2;
    else if (nd.label == j) nd = nj2;
  }
  Mid out = reorder(mid, nodes);

  TransformResult res{out, {}};
  std::vector<int> scope_j = nj2.parents;
  scope_j.push_back(j);
  std::sort(scope_j.begin(), scope_j.end());
  std::map<std::string, Indeterminate> fresh_j;
  // p'_j = sum over y_i of p_j p_i
  for (auto& cfg : configs(mid, scope_j)) {
    Polynomial sum;
    for (int y = mid.card(pi) - 1; y >= 0; --y) {
      auto v = cfg;
      v[i] = y;
      sum += Polynomial(param(mid, j, v)) * Polynomial(param(mid, i, v));
    }
    res.bindings.push_back({param(out, j, cfg), sum, Polynomial(1)});
  }
  // p'_i = p_j p_i / p'_j
  std::vector<int> scope_i = ni2.parents;
  scope_i.push_back(i);
  std::sort(scope_i.begin(), scope_i.end());
  for (auto& cfg : configs(mid, scope_i)) {
    Polynomial num = Polynomial(param(mid, j, cfg)) * Polynomial(param(mid, i, cfg));
    res.bindings.push_back({param(out, i, cfg), num, Polynomial(param(out, j, cfg))});
  }
  return res;
}

inline Mid remove_barren(const Mid& mid, int i) {
  int pi = mid.position(i);
  if (!mid.is_chance(pi)) throw Error("only chance nodes can be removed");
  if (transform_detail::is_utility_parent(mid, i)) throw Error("Y" + std::to_string(i) + " is an argument of a utility");
  if (!transform_detail::child_labels(mid, i).empty()) throw Error("Y" + std::to_string(i) + " has children");
  std::vector<Node> nodes = mid.nodes();
  std::erase_if(nodes, [&](const Node& nd) { return nd.label == i; });
  if (nodes.empty()) throw Error("removing Y" + std::to_string(i) + " leaves an empty diagram");
  return Mid(std::move(nodes), mid.utilities(), mid.weights());
}

// chance parents of decision j that carry no information about later utilities
inline std::vector<int> sufficiency_removable(const Mid& mid, int j) {
  int pj = mid.position(j);
  if (!mid.is_decision(pj)) throw Error("Y" + std::to_string(j) + " is not a decision");
  auto last = comp_j(mid);
  std::vector<int> out;
  for (int pi : mid.parents(pj)) {
    if (!mid.is_chance(pi) || transform_detail::is_utility_parent(mid, mid.label(pi))) continue;
    std::set<int> sep;
    for (int q : mid.parents(pj))
      if (q != pi) sep.insert(q);
    for (int q = 1; q <= mid.n(); ++q)
      if (mid.is_decision(q)) sep.insert(q);
    std::set<int> utils;
    for (int u = 1; u <= mid.m(); ++u)
      if (last[u - 1] >= pi) utils.insert(mid.n() + u);
    if (d_separated(mid, {pi}, sep, utils)) out.push_back(mid.label(pi));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Drops Y_i; its children inherit its parents. The first chance child gets the
// mixture sum_{y_i} p_c p_i, later ones condition on the children already seen:
// p'_c = sum_{y_i} p_c p_i prod p_l / sum_{y_i} p_i prod p_l.
inline TransformResult apply_sufficiency(const Mid& mid, int i, int j) {
  using namespace transform_detail;
  auto ok = sufficiency_removable(mid, j);
  if (!std::binary_search(ok.begin(), ok.end(), i))
    throw Error("Y" + std::to_string(i) + " cannot be dropped from Y" + std::to_string(j) + "'s parents");
  int pi = mid.position(i);
  const Node& ni = mid.node(pi);
  std::vector<Node> nodes;
  std::vector<int> seen_children;  // chance children already rewritten
  std::map<int, std::vector<int>> new_parents;
  for (int p = 1; p <= mid.n(); ++p) {
    Node nd = mid.node(p);
    if (nd.label == i) continue;
    if (std::find(nd.parents.begin(), nd.parents.end(), i) != nd.parents.end()) {
      nd.parents = merge_labels(nd.parents, ni.parents, i);
      if (nd.kind == NodeKind::chance) ++nd.generation;
    }
    nodes.push_back(nd);
  }
  Mid out(nodes, mid.utilities(), mid.weights());
  TransformResult res{out, {}};
  for (int c : child_labels(mid, i)) {
    int pc = mid.position(c);
    if (!mid.is_chance(pc)) continue;
    const Node& nc = out.node(out.position(c));
    for (int l : seen_children) {
      std::vector<int> need = merge_labels(mid.node(mid.position(l)).parents, {l}, i);
      for (int x : need)
        if (std::find(nc.parents.begin(), nc.parents.end(), x) == nc.parents.end())
          throw Error("dropping Y" + std::to_string(i) + " needs Y" + std::to_string(x) + " as a parent of Y" +
                      std::to_string(c));
    }
    std::vector<int> scope = nc.parents;
    scope.push_back(c);
    std::sort(scope.begin(), scope.end());
    for (auto& cfg : configs(mid, scope)) {
      Polynomial num, den;
      for (int y = mid.card(pi) - 1; y >= 0; --y) {
        auto v = cfg;
        v[i] = y;
        Polynomial w(param(mid, i, v));
        for (int l : seen_children) w *= Polynomial(param(mid, l, v));
        den += w;
        num += w * Polynomial(param(mid, c, v));
      }
      if (seen_children.empty()) den = Polynomial(1);
      res.bindings.push_back({param(out, c, cfg), num, den});
    }
    seen_children.push_back(c);
  }
  return res;
}

// Greedy: lowest unobserved chance predecessor of the first offending
// decision; reverse arcs towards its lowest child until it is barren.
inline std::pair<Mid, TransformLog> to_extensive_form(const Mid& mid) {
  using namespace transform_detail;
  Mid cur = mid;
  TransformLog log;
  for (int guard = 0; guard < 10000; ++guard) {
    int d = first_non_extensive_decision(cur);
    if (!d) return {cur, log};
    int k = 0;
    for (int p = 1; p < d && !k; ++p)
      if (!contains(cur.parents(d), p)) k = p;
    int kl = cur.label(k);
    std::string blocked = "Y" + std::to_string(kl) + " precedes decision Y" + std::to_string(cur.label(d)) +
                          " without being observed";
    if (cur.is_decision(k)) throw Error(blocked + " and is itself a decision");
    if (is_utility_parent(cur, kl)) throw Error(blocked + " and is an argument of a utility, so it cannot be deleted");
    auto kids = child_labels(cur, kl);
    if (kids.empty()) {
      cur = remove_barren(cur, kl);
      log.steps.push_back({TransformStep::Kind::remove_barren, kl, 0, {}});
      continue;
    }
    int first = kids[0];
    for (int c : kids)
      if (cur.position(c) < cur.position(first)) first = c;
    if (cur.is_decision(cur.position(first)))
      throw Error(blocked + " and is observed by decision Y" + std::to_string(first));
    auto r = reverse_arc(cur, kl, first);
    cur = r.mid;
    log.steps.push_back({TransformStep::Kind::reverse_arc, kl, first, r.bindings});
  }
  throw Error("extensive-form conversion did not terminate");
}

inline TransformResult apply_step(const Mid& mid, const TransformStep& s) {
  switch (s.kind) {
    case TransformStep::Kind::reverse_arc: return reverse_arc(mid, s.i, s.j);
    case TransformStep::Kind::remove_barren: return {remove_barren(mid, s.i), {}};
    case TransformStep::Kind::sufficiency: return apply_sufficiency(mid, s.i, s.j);
  }
  return {mid, {}};
}

inline std::pair<Mid, TransformLog> replay(const Mid& mid, const TransformLog& log) {
  Mid cur = mid;
  TransformLog out;
  for (auto& s : log.steps) {
    auto r = apply_step(cur, s);
    cur = r.mid;
    out.steps.push_back({s.kind, s.i, s.j, r.bindings});
  }
  return {cur, out};
}

// values of the fresh parameters from values of the original ones
inline std::map<Indeterminate, Rational> resolve_numeric(const std::vector<DefinitionalBinding>& bindings,
                                                          std::map<Indeterminate, Rational> values) {
  for (auto& b : bindings) {
    Rational den = evaluate(b.denominator, values);
    if (den == 0) throw Error("binding for " + b.fresh.name() + " divides by zero");
    values[b.fresh] = evaluate(b.numerator, values) / den;
  }
  return values;
}

// Rewrites a polynomial in fresh parameters back to the original ones. A
// rational binding only resolves when its denominator (a single fresh
// parameter) divides the monomial, which is how reversed pairs show up.
inline Polynomial resolve_symbolic(const Polynomial& p, const std::vector<DefinitionalBinding>& bindings) {
  Polynomial cur = p;
  for (auto it = bindings.rbegin(); it != bindings.rend(); ++it) {
    const DefinitionalBinding& b = *it;
    if (b.denominator == Polynomial(1)) {
      cur = substitute(cur, Bindings{{b.fresh, b.numerator}});
      continue;
    }
    if (b.denominator.size() != 1 || b.denominator.terms()[0].exps.size() != 1 ||
        b.denominator.terms()[0].coef != 1)
      throw Error("cannot resolve " + b.fresh.name() + " symbolically");
    const Indeterminate& q = b.denominator.terms()[0].exps[0].first;
    std::vector<Term> out;
    for (auto& t : cur.terms()) {
      unsigned e = 0;
      for (auto& f : t.exps)
        if (f.first == b.fresh) e = f.second;
      if (e == 0) {
        out.push_back(t);
        continue;
      }
      Exponents rest;
      bool divided = false;
      for (auto& f : t.exps) {
        if (f.first == b.fresh) continue;
        if (f.first == q) {
          if (f.second < e) break;
          divided = true;
          if (f.second > e) rest.emplace_back(q, f.second - e);
          continue;
        }
        rest.push_back(f);
      }
      if (!divided) throw Error(b.fresh.name() + " appears without its denominator " + q.name());
      Polynomial r = b.numerator.pow(e) * Polynomial::from_terms({{t.coef, rest}});
      out.insert(out.end(), r.terms().begin(), r.terms().end());
    }
    cur = Polynomial::from_terms(std::move(out));
  }
  return cur;
}

}  // namespace symeu
