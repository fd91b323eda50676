#pragma once

#include "symeu/polynomial.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace symeu {

// ascending, duplicate free
using IndexSet = std::vector<int>;

inline IndexSet make_set(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}
inline IndexSet set_union(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}
inline IndexSet set_minus(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}
inline IndexSet set_intersect(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}
inline bool contains(const IndexSet& s, int x) { return std::binary_search(s.begin(), s.end(), x); }
inline bool is_subset(const IndexSet& a, const IndexSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

enum class NodeKind { decision, chance };

// labels name variables (Y<label>, indeterminate subscripts); the position in
// the node list is the elimination order. They coincide until a transform runs.
struct Node {
  int label = 0;
  NodeKind kind = NodeKind::chance;
  int states = 2;
  std::vector<int> parents;  // labels
  int generation = 0;        // bumped when a transform reparametrises the node
  friend bool operator==(const Node&, const Node&) = default;
};

struct UtilityNode {
  int label = 0;
  std::vector<int> parents;  // labels
  friend bool operator==(const UtilityNode&, const UtilityNode&) = default;
};

enum class InteractionMode { symbolic, numeric, additive, solved };

struct Weights {
  std::map<int, Rational> k;  // utility label -> value; missing means symbolic k_j
  InteractionMode mode = InteractionMode::symbolic;
  Rational h;  // used by numeric / solved
  friend bool operator==(const Weights&, const Weights&) = default;
};

class Mid {
 public:
  Mid() = default;
  Mid(std::vector<Node> nodes, std::vector<UtilityNode> utilities, Weights weights = {})
      : nodes_(std::move(nodes)), utilities_(std::move(utilities)), weights_(std::move(weights)) {
    for (std::size_t p = 0; p < nodes_.size(); ++p) {
      if (!pos_.emplace(nodes_[p].label, static_cast<int>(p) + 1).second)
        throw Error("duplicate node label Y" + std::to_string(nodes_[p].label));
    }
    for (auto& nd : nodes_) {
      IndexSet ps;
      for (int l : nd.parents) ps.push_back(position(l));
      parents_.push_back(make_set(ps));
    }
    for (auto& u : utilities_) {
      IndexSet ps;
      for (int l : u.parents) ps.push_back(position(l));
      uparents_.push_back(make_set(ps));
    }
    // utilities are indexed by the position of their last parent
    std::vector<std::size_t> order(utilities_.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      int ma = uparents_[a].empty() ? 0 : uparents_[a].back();
      int mb = uparents_[b].empty() ? 0 : uparents_[b].back();
      return ma < mb;
    });
    std::vector<UtilityNode> us;
    std::vector<IndexSet> ups;
    for (auto o : order) {
      us.push_back(utilities_[o]);
      ups.push_back(uparents_[o]);
    }
    utilities_ = std::move(us);
    uparents_ = std::move(ups);
  }

  int n() const { return static_cast<int>(nodes_.size()); }
  int m() const { return static_cast<int>(utilities_.size()); }

  const Node& node(int pos) const { return nodes_.at(pos - 1); }
  const UtilityNode& utility(int u) const { return utilities_.at(u - 1); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<UtilityNode>& utilities() const { return utilities_; }

  bool has_label(int label) const { return pos_.count(label) != 0; }
  int position(int label) const {
    auto it = pos_.find(label);
    if (it == pos_.end()) throw Error("unknown variable Y" + std::to_string(label));
    return it->second;
  }
  int label(int pos) const { return node(pos).label; }
  int utility_index(int label) const {
    for (int u = 1; u <= m(); ++u)
      if (utility(u).label == label) return u;
    throw Error("unknown utility U" + std::to_string(label));
  }

  const IndexSet& parents(int pos) const { return parents_.at(pos - 1); }
  const IndexSet& utility_parents(int u) const { return uparents_.at(u - 1); }
  int card(int pos) const { return node(pos).states; }
  bool is_chance(int pos) const { return node(pos).kind == NodeKind::chance; }
  bool is_decision(int pos) const { return node(pos).kind == NodeKind::decision; }

  const Weights& weights() const { return weights_; }
  Weights& weights() { return weights_; }

  std::vector<int> labels_of(const IndexSet& positions) const {
    std::vector<int> out;
    for (int p : positions) out.push_back(label(p));
    return out;
  }

  friend bool operator==(const Mid& a, const Mid& b) {
    return a.nodes_ == b.nodes_ && a.utilities_ == b.utilities_;
  }

 private:
  std::vector<Node> nodes_;
  std::vector<UtilityNode> utilities_;
  Weights weights_;
  std::map<int, int> pos_;
  std::vector<IndexSet> parents_;
  std::vector<IndexSet> uparents_;
};

// ---------------------------------------------------------------- indexing

// Enumerates configurations of a scope (positions, ascending). The highest
// position varies fastest and every coordinate runs from r-1 down to 0.
class ScopeIndex {
 public:
  ScopeIndex(const IndexSet& scope, const Mid& mid) : scope_(scope) {
    for (int p : scope) card_.push_back(mid.card(p));
    stride_.assign(scope.size(), 1);
    for (std::size_t t = scope.size(); t-- > 1;) stride_[t - 1] = stride_[t] * card_[t];
    size_ = 1;
    for (int c : card_) size_ *= c;
  }
  std::size_t size() const { return size_; }
  const IndexSet& scope() const { return scope_; }

  // values aligned with scope()
  std::vector<int> config(std::size_t idx) const {
    std::vector<int> v(scope_.size());
    for (std::size_t t = scope_.size(); t-- > 0;) {
      v[t] = card_[t] - 1 - static_cast<int>(idx % card_[t]);
      idx /= card_[t];
    }
    return v;
  }
  // value_of(pos) must cover every scope member
  template <class F>
  std::size_t index(F&& value_of) const {
    std::size_t idx = 0;
    for (std::size_t t = 0; t < scope_.size(); ++t)
      idx += static_cast<std::size_t>(card_[t] - 1 - value_of(scope_[t])) * stride_[t];
    return idx;
  }
  std::size_t index_of(const std::vector<int>& values) const {
    std::size_t t = 0;
    return index([&](int) { return values[t++]; });
  }

 private:
  IndexSet scope_;
  std::vector<int> card_;
  std::vector<std::size_t> stride_;
  std::size_t size_ = 1;
};

// labels in decreasing order, the subscript order of parameter names
inline Config make_config(const Mid& mid, const IndexSet& scope, const std::vector<int>& values) {
  Config c;
  for (std::size_t t = 0; t < scope.size(); ++t) c.emplace_back(mid.label(scope[t]), values[t]);
  std::sort(c.begin(), c.end(), [](auto& a, auto& b) { return a.first > b.first; });
  return c;
}

// ------------------------------------------------------------ diagnostics

struct Diagnostic {
  enum class Severity { error, warning } severity;
  std::string message;
};

inline bool has_errors(const std::vector<Diagnostic>& ds) {
  return std::any_of(ds.begin(), ds.end(), [](auto& d) { return d.severity == Diagnostic::Severity::error; });
}

struct SolvedInteraction {
  Rational h;
  bool additive = false;
};

// nonzero root of 1 + h = prod(1 + h k_j) with h >= -1; additive when sum k = 1
inline SolvedInteraction solve_h(const std::vector<Rational>& k) {
  Rational sum = 0;
  for (auto& x : k) {
    if (x <= 0 || x >= 1) throw Error("weights must lie in (0,1)");
    sum += x;
  }
  if (sum == 1) return {Rational(0), true};
  if (k.size() < 2) throw Error("a single weight must equal 1");
  std::vector<long double> kd;
  for (auto& x : k) kd.push_back(x.convert_to<long double>());
  auto f = [&](long double h) {
    long double p = 1;
    for (auto x : kd) p *= 1 + h * x;
    return p - 1 - h;
  };
  long double lo, hi;
  if (sum > 1) {
    lo = -1, hi = -1e-18L;
  } else {
    lo = 1e-18L, hi = 1;
    while (f(hi) < 0) hi *= 2;
  }
  // f changes sign across the root in both cases
  for (int it = 0; it < 200; ++it) {
    long double mid = (lo + hi) / 2;
    if ((f(mid) < 0) == (f(lo) < 0)) lo = mid;
    else hi = mid;
  }
  return {rational_from_double(static_cast<double>((lo + hi) / 2)), false};
}

inline Rational interaction_residual(const std::vector<Rational>& k, const Rational& h) {
  Rational p = 1;
  for (auto& x : k) p *= 1 + h * x;
  return p - 1 - h;
}

inline std::vector<Diagnostic> validate(const Mid& mid) {
  std::vector<Diagnostic> out;
  auto err = [&](std::string s) { out.push_back({Diagnostic::Severity::error, std::move(s)}); };
  auto warn = [&](std::string s) { out.push_back({Diagnostic::Severity::warning, std::move(s)}); };
  if (mid.n() == 0) err("diagram has no variables");
  if (mid.m() == 0) err("diagram has no utility nodes");
  std::vector<int> children(mid.n() + 1, 0);
  for (int i = 1; i <= mid.n(); ++i) {
    const Node& nd = mid.node(i);
    if (nd.states < 1) err("Y" + std::to_string(nd.label) + " needs at least one state");
    if (nd.label < 1) err("labels must be positive");
    for (int p : mid.parents(i)) {
      if (p >= i) err("Y" + std::to_string(mid.label(p)) + " is a parent of Y" + std::to_string(nd.label) +
                      " but does not precede it");
      ++children[p];
    }
  }
  std::vector<int> owner(mid.n() + 1, 0);
  for (int u = 1; u <= mid.m(); ++u) {
    const UtilityNode& un = mid.utility(u);
    if (mid.utility_parents(u).empty()) err("U" + std::to_string(un.label) + " has no parents");
    for (int p : mid.utility_parents(u)) {
      if (owner[p]) err("Y" + std::to_string(mid.label(p)) + " is a parent of two utility nodes");
      owner[p] = un.label;
      ++children[p];
    }
  }
  for (int i = 1; i <= mid.n(); ++i)
    if (children[i] == 0) {
      // barren chance nodes are harmless (arc reversal leaves them behind)
      std::string msg = "Y" + std::to_string(mid.label(i)) + " has no children";
      if (mid.is_chance(i)) warn(msg + "; it is barren and can be removed");
      else err(msg);
    }

  const Weights& w = mid.weights();
  std::vector<Rational> ks;
  for (int u = 1; u <= mid.m(); ++u) {
    auto it = w.k.find(mid.utility(u).label);
    if (it == w.k.end()) continue;
    if (it->second <= 0 || it->second >= 1)
      err("k" + std::to_string(it->first) + " must lie strictly between 0 and 1");
    ks.push_back(it->second);
  }
  if (w.mode == InteractionMode::numeric && w.h < -1) err("h must be at least -1");
  if (ks.size() == static_cast<std::size_t>(mid.m()) && mid.m() > 0) {
    Rational sum = std::accumulate(ks.begin(), ks.end(), Rational(0));
    if (w.mode == InteractionMode::additive && sum != 1)
      warn("additive weights should sum to 1 (sum is " + format_decimal(sum) + ")");
    if (w.mode == InteractionMode::numeric) {
      Rational r = interaction_residual(ks, w.h);
      if (r != 0)
        warn("h = " + format_decimal(w.h) + " does not solve 1+h = prod(1+h*k) (residual " +
             format_decimal(r, 6) + ")");
    }
  }
  return out;
}

// ------------------------------------------------------------ derived sets

// position of the last parent of each utility, in utility order
inline std::vector<int> comp_j(const Mid& mid) {
  std::vector<int> j;
  for (int u = 1; u <= mid.m(); ++u) {
    if (mid.utility_parents(u).empty()) throw Error("utility without parents");
    j.push_back(mid.utility_parents(u).back());
  }
  for (std::size_t t = 1; t < j.size(); ++t)
    if (j[t] == j[t - 1]) throw Error("two utility nodes share their last parent");
  return j;
}

// variables the expected utility still depends on once Y_i..Y_n are gone
inline IndexSet comp_b(const Mid& mid, int i) {
  IndexSet acc;
  for (int k = i; k <= mid.n(); ++k)
    if (mid.is_chance(k)) acc = set_union(acc, mid.parents(k));
  auto j = comp_j(mid);
  for (int u = 1; u <= mid.m(); ++u)
    if (j[u - 1] >= i) acc = set_union(acc, mid.utility_parents(u));
  IndexSet out;
  for (int x : acc)
    if (x < i) out.push_back(x);
  return out;
}

struct SequenceItem {
  bool utility = false;
  int index = 0;  // position, or utility index
  friend bool operator==(const SequenceItem&, const SequenceItem&) = default;
};

inline std::vector<SequenceItem> decision_sequence(const Mid& mid) {
  auto j = comp_j(mid);
  std::vector<SequenceItem> ds;
  std::size_t u = 0;
  for (int i = 1; i <= mid.n(); ++i) {
    ds.push_back({false, i});
    while (u < j.size() && j[u] == i) ds.push_back({true, static_cast<int>(++u)});
  }
  return ds;
}

inline std::string sequence_string(const Mid& mid) {
  std::string s;
  for (auto& it : decision_sequence(mid)) {
    if (!s.empty()) s += ",";
    s += it.utility ? "U" + std::to_string(mid.utility(it.index).label) : "Y" + std::to_string(mid.label(it.index));
  }
  return s;
}

// every decision observes everything before it
inline bool is_extensive_form(const Mid& mid) {
  for (int i = 1; i <= mid.n(); ++i) {
    if (!mid.is_decision(i)) continue;
    if (static_cast<int>(mid.parents(i).size()) != i - 1) return false;
  }
  return true;
}

// first decision with an unobserved predecessor, or 0
inline int first_non_extensive_decision(const Mid& mid) {
  for (int i = 1; i <= mid.n(); ++i)
    if (mid.is_decision(i) && static_cast<int>(mid.parents(i).size()) != i - 1) return i;
  return 0;
}

// ------------------------------------------------------------ parameters

struct ParameterVector {
  IndexSet scope;  // positions, CONFIG order
  std::vector<Indeterminate> entries;
};

inline ParameterVector probability_vector(const Mid& mid, int pos) {
  ParameterVector pv;
  pv.scope = set_union(mid.parents(pos), {pos});
  ScopeIndex ix(pv.scope, mid);
  IndexSet ps = mid.parents(pos);
  for (std::size_t e = 0; e < ix.size(); ++e) {
    auto v = ix.config(e);
    std::vector<int> pv_values;
    int y = 0;
    for (std::size_t t = 0; t < pv.scope.size(); ++t) {
      if (pv.scope[t] == pos) y = v[t];
      else pv_values.push_back(v[t]);
    }
    pv.entries.push_back(Indeterminate::probability(mid.label(pos), y, make_config(mid, ps, pv_values),
                                                    mid.node(pos).generation));
  }
  return pv;
}

inline ParameterVector utility_vector(const Mid& mid, int u) {
  ParameterVector pv;
  pv.scope = mid.utility_parents(u);
  ScopeIndex ix(pv.scope, mid);
  for (std::size_t e = 0; e < ix.size(); ++e)
    pv.entries.push_back(Indeterminate::utility(mid.utility(u).label, make_config(mid, pv.scope, ix.config(e))));
  return pv;
}

struct ParameterVectors {
  std::map<int, ParameterVector> probability;  // chance positions
  std::map<int, ParameterVector> utility;      // utility indices
};

inline ParameterVectors parameter_vectors(const Mid& mid) {
  ParameterVectors out;
  for (int i = 1; i <= mid.n(); ++i)
    if (mid.is_chance(i)) out.probability[i] = probability_vector(mid, i);
  for (int u = 1; u <= mid.m(); ++u) out.utility[u] = utility_vector(mid, u);
  return out;
}

// every indeterminate the diagram's evaluation can mention
inline std::vector<Indeterminate> all_indeterminates(const Mid& mid) {
  std::vector<Indeterminate> out;
  const Weights& w = mid.weights();
  if (w.mode == InteractionMode::symbolic && mid.m() > 1) out.push_back(Indeterminate::interaction());
  for (int u = 1; u <= mid.m(); ++u)
    if (!w.k.count(mid.utility(u).label)) out.push_back(Indeterminate::weight(mid.utility(u).label));
  auto pv = parameter_vectors(mid);
  for (auto& [_, v] : pv.utility) out.insert(out.end(), v.entries.begin(), v.entries.end());
  for (auto& [_, v] : pv.probability) out.insert(out.end(), v.entries.begin(), v.entries.end());
  std::sort(out.begin(), out.end());
  return out;
}

inline Polynomial weight_poly(const Mid& mid, int u) {
  int label = mid.utility(u).label;
  auto it = mid.weights().k.find(label);
  if (it != mid.weights().k.end()) return Polynomial(it->second);
  return Polynomial(Indeterminate::weight(label));
}

inline Polynomial interaction_poly(const Mid& mid) {
  const Weights& w = mid.weights();
  switch (w.mode) {
    case InteractionMode::symbolic:
      return Polynomial(Indeterminate::interaction());
    case InteractionMode::additive:
      return Polynomial();
    case InteractionMode::numeric:
      return Polynomial(w.h);
    case InteractionMode::solved: {
      std::vector<Rational> ks;
      for (int u = 1; u <= mid.m(); ++u) {
        auto it = w.k.find(mid.utility(u).label);
        if (it == w.k.end()) throw Error("solving h needs every k_j to be numeric");
        ks.push_back(it->second);
      }
      return Polynomial(solve_h(ks).h);
    }
  }
  return {};
}

// ------------------------------------------------------------ names

// p6111, p'2_1_3_0, psi311, k3, h; needs the diagram to split compact names
inline Indeterminate parse_indeterminate(std::string_view name, const Mid& mid) {
  auto fail = [&](const std::string& why) { throw Error("bad indeterminate '" + std::string(name) + "': " + why); };
  if (name == "h") return Indeterminate::interaction();
  auto numbers = [&](std::string_view rest) {
    std::vector<int> xs;
    if (rest.empty()) fail("missing subscripts");
    if (rest[0] == '_') {
      std::size_t p = 1;
      while (p <= rest.size()) {
        std::size_t q = rest.find('_', p);
        if (q == std::string_view::npos) q = rest.size();
        auto part = rest.substr(p, q - p);
        if (part.empty() || !std::all_of(part.begin(), part.end(), ::isdigit)) fail("bad subscript");
        xs.push_back(std::stoi(std::string(part)));
        p = q + 1;
      }
    } else {
      for (char c : rest) {
        if (!std::isdigit(static_cast<unsigned char>(c))) fail("bad subscript");
        xs.push_back(c - '0');
      }
    }
    return xs;
  };
  if (name.starts_with("psi")) {
    auto rest = name.substr(3);
    // compact: first digit is the utility label, the rest its argument values
    std::vector<int> xs = numbers(rest);
    int u = mid.utility_index(xs[0]);
    IndexSet sc = mid.utility_parents(u);
    if (xs.size() != sc.size() + 1) fail("expected " + std::to_string(sc.size()) + " argument values");
    std::vector<int> labels = mid.labels_of(sc);
    std::sort(labels.rbegin(), labels.rend());
    Config c;
    for (std::size_t t = 0; t < labels.size(); ++t) {
      if (xs[t + 1] < 0 || xs[t + 1] >= mid.card(mid.position(labels[t]))) fail("value out of range");
      c.emplace_back(labels[t], xs[t + 1]);
    }
    return Indeterminate::utility(xs[0], c);
  }
  if (name.starts_with("k")) {
    auto rest = name.substr(1);
    if (rest.empty() || !std::all_of(rest.begin(), rest.end(), ::isdigit)) fail("bad weight");
    int label = std::stoi(std::string(rest));
    mid.utility_index(label);
    return Indeterminate::weight(label);
  }
  if (name.starts_with("p")) {
    auto rest = name.substr(1);
    int gen = 0;
    while (!rest.empty() && rest[0] == '\'') ++gen, rest = rest.substr(1);
    std::vector<int> xs = numbers(rest);
    if (xs.size() < 2) fail("missing value");
    int label = xs[0];
    int pos = mid.position(label);
    if (!mid.is_chance(pos)) fail("Y" + std::to_string(label) + " is a decision");
    if (mid.node(pos).generation != gen) fail("diagram holds a different parametrisation of Y" + std::to_string(label));
    std::vector<int> labels = mid.labels_of(mid.parents(pos));
    std::sort(labels.rbegin(), labels.rend());
    if (xs.size() != labels.size() + 2) fail("expected " + std::to_string(labels.size()) + " parent values");
    if (xs[1] < 0 || xs[1] >= mid.card(pos)) fail("value out of range");
    Config c;
    for (std::size_t t = 0; t < labels.size(); ++t) {
      if (xs[t + 2] < 0 || xs[t + 2] >= mid.card(mid.position(labels[t]))) fail("value out of range");
      c.emplace_back(labels[t], xs[t + 2]);
    }
    return Indeterminate::probability(label, xs[1], c, gen);
  }
  fail("unknown prefix");
  return Indeterminate::interaction();
}

inline Polynomial parse_polynomial(std::string_view text, const Mid& mid) {
  return parse_polynomial(text, [&](std::string_view s) { return parse_indeterminate(s, mid); });
}

}  // namespace symeu
