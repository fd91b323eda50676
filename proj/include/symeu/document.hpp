#pragma once

// JSON model files: the diagram plus named specs, asymmetries, policies and an
// optional transform log. Decimal literals are read from their source text so
// 0.3 means 3/10 exactly.

#include "symeu/asymmetry.hpp"
#include "symeu/sensitivity.hpp"
#include "symeu/transforms.hpp"

#include <json.hpp>

#include <charconv>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace symeu {

using json = nlohmann::json;

struct ModelDocument {
  Mid mid;
  std::map<std::string, SubstitutionSpec> specs;
  std::vector<Asymmetry> asymmetries;
  std::map<std::string, Policy> policies;
  TransformLog transform_log;  // steps only; bindings are rebuilt by replay

  friend bool operator==(const ModelDocument& a, const ModelDocument& b) {
    if (!(a.mid == b.mid && a.mid.weights() == b.mid.weights() && a.specs == b.specs &&
          a.asymmetries == b.asymmetries && a.policies == b.policies))
      return false;
    auto& x = a.transform_log.steps;
    auto& y = b.transform_log.steps;
    if (x.size() != y.size()) return false;
    for (std::size_t t = 0; t < x.size(); ++t)
      if (x[t].kind != y[t].kind || x[t].i != y[t].i || x[t].j != y[t].j) return false;
    return true;
  }
};

struct DocDiagnostic {
  Diagnostic::Severity severity = Diagnostic::Severity::error;
  std::string where;  // "line 3, column 7" or a field path
  std::string message;
  std::string str() const {
    return std::string(severity == Diagnostic::Severity::error ? "error" : "warning") + ": " +
           (where.empty() ? "" : where + ": ") + message;
  }
};

struct ParseResult {
  std::optional<ModelDocument> doc;
  std::vector<DocDiagnostic> diagnostics;
  bool ok() const { return doc.has_value(); }
};

namespace doc_detail {

// keeps the literal text of floating point numbers as a string
struct ExactSax : nlohmann::detail::json_sax_dom_parser<json> {
  using nlohmann::detail::json_sax_dom_parser<json>::json_sax_dom_parser;
  bool number_float(json::number_float_t, const std::string& s) {
    std::string copy = s;
    return this->string(copy);
  }
};

// JSON text with decimals kept exact; throws json::parse_error
inline json parse_exact(std::string_view text) {
  json root;
  ExactSax sax(root);
  json::sax_parse(text, &sax);
  return root;
}

struct FieldError : Error {
  std::string where;
  FieldError(std::string w, const std::string& msg) : Error(msg), where(std::move(w)) {}
};

inline std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t t = 0; t < byte && t < text.size(); ++t) {
    if (text[t] == '\n') ++line, col = 1;
    else ++col;
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline Rational rational(const json& j, const std::string& where) {
  try {
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_number_unsigned()) return Rational(j.get<unsigned long long>());
    if (j.is_string()) return parse_rational(j.get<std::string>());
  } catch (const Error& e) {
    throw FieldError(where, e.what());
  }
  throw FieldError(where, "expected a number");
}

// a number when the shortest double text reads back exactly, else a string
inline json rational_json(const Rational& r) {
  if (denominator(r) == 1 && abs(numerator(r)) < Integer(1LL << 53)) return json(numerator(r).convert_to<long long>());
  double d = to_double(r);
  if (rational_from_double(d) == r) return json(d);
  std::string dec = format_decimal(r, 60);
  if (parse_rational(dec) == r) return json(dec);
  return json(to_string(r));
}

inline int label(const json& j, char prefix, const std::string& where) {
  if (!j.is_string()) throw FieldError(where, std::string("expected \"") + prefix + "<n>\"");
  std::string s = j.get<std::string>();
  int v = 0;
  auto res = std::from_chars(s.data() + std::min<std::size_t>(1, s.size()), s.data() + s.size(), v);
  if (s.size() < 2 || s[0] != prefix || res.ec != std::errc() || res.ptr != s.data() + s.size() || v < 1)
    throw FieldError(where, "bad identifier '" + s + "'");
  return v;
}

inline const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw FieldError(where, std::string("missing \"") + key + "\"");
  return obj.at(key);
}

inline int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw FieldError(where, "expected an integer");
  return j.get<int>();
}

inline std::string yname(int l) { return "Y" + std::to_string(l); }

inline Mid parse_diagram(const json& root, std::vector<DocDiagnostic>& diags) {
  std::vector<Node> nodes;
  const json& jn = field(root, "nodes", "");
  if (!jn.is_array()) throw FieldError("nodes", "expected a list");
  std::set<int> known;
  for (std::size_t t = 0; t < jn.size(); ++t) {
    std::string w = "nodes[" + std::to_string(t) + "]";
    const json& x = jn[t];
    Node nd;
    nd.label = label(field(x, "id", w), 'Y', w + ".id");
    std::string kind = field(x, "kind", w).is_string() ? x["kind"].get<std::string>() : "";
    if (kind == "decision") nd.kind = NodeKind::decision;
    else if (kind == "chance") nd.kind = NodeKind::chance;
    else throw FieldError(w + ".kind", "expected \"decision\" or \"chance\"");
    nd.states = x.contains("states") ? integer(x["states"], w + ".states") : 2;
    if (x.contains("generation")) nd.generation = integer(x["generation"], w + ".generation");
    if (x.contains("parents")) {
      if (!x["parents"].is_array()) throw FieldError(w + ".parents", "expected a list");
      for (std::size_t q = 0; q < x["parents"].size(); ++q)
        nd.parents.push_back(label(x["parents"][q], 'Y', w + ".parents[" + std::to_string(q) + "]"));
    }
    if (!known.insert(nd.label).second) throw FieldError(w + ".id", "duplicate " + yname(nd.label));
    nodes.push_back(std::move(nd));
  }
  for (std::size_t t = 0; t < nodes.size(); ++t)
    for (std::size_t q = 0; q < nodes[t].parents.size(); ++q)
      if (!known.count(nodes[t].parents[q]))
        throw FieldError("nodes[" + std::to_string(t) + "].parents[" + std::to_string(q) + "]",
                         "unknown variable " + yname(nodes[t].parents[q]));
  std::vector<UtilityNode> us;
  const json& ju = field(root, "utilities", "");
  if (!ju.is_array()) throw FieldError("utilities", "expected a list");
  std::set<int> ulabels;
  for (std::size_t t = 0; t < ju.size(); ++t) {
    std::string w = "utilities[" + std::to_string(t) + "]";
    UtilityNode u;
    u.label = label(field(ju[t], "id", w), 'U', w + ".id");
    if (!ulabels.insert(u.label).second) throw FieldError(w + ".id", "duplicate U" + std::to_string(u.label));
    const json& ps = field(ju[t], "parents", w);
    if (!ps.is_array()) throw FieldError(w + ".parents", "expected a list");
    for (std::size_t q = 0; q < ps.size(); ++q) {
      int l = label(ps[q], 'Y', w + ".parents[" + std::to_string(q) + "]");
      if (!known.count(l)) throw FieldError(w + ".parents[" + std::to_string(q) + "]", "unknown variable " + yname(l));
      u.parents.push_back(l);
    }
    us.push_back(std::move(u));
  }
  Weights wts;
  if (root.contains("weights")) {
    const json& jw = root["weights"];
    if (jw.contains("k")) {
      if (!jw["k"].is_object()) throw FieldError("weights.k", "expected an object keyed by utility");
      for (auto& [key, val] : jw["k"].items()) {
        int l = label(json(key), 'U', "weights.k");
        if (!ulabels.count(l)) throw FieldError("weights.k." + key, "unknown utility");
        wts.k[l] = rational(val, "weights.k." + key);
      }
    }
    if (jw.contains("h")) {
      const json& h = jw["h"];
      if (h == "symbolic") wts.mode = InteractionMode::symbolic;
      else if (h == "additive") wts.mode = InteractionMode::additive;
      else if (h == "solve") wts.mode = InteractionMode::solved;
      else wts.mode = InteractionMode::numeric, wts.h = rational(h, "weights.h");
    }
  }
  Mid mid(std::move(nodes), std::move(us), std::move(wts));
  for (auto& d : validate(mid)) diags.push_back({d.severity, "diagram", d.message});
  return mid;
}

inline SubstitutionSpec parse_spec(const json& j, const Mid& mid, const std::string& w) {
  SubstitutionSpec s;
  auto ind = [&](const std::string& name, const std::string& where) {
    try {
      return parse_indeterminate(name, mid);
    } catch (const Error& e) {
      throw FieldError(where, e.what());
    }
  };
  if (j.contains("values"))
    for (auto& [k, v] : j["values"].items()) s.numeric[ind(k, w + ".values")] = rational(v, w + ".values." + k);
  if (j.contains("relations"))
    for (auto& [k, v] : j["relations"].items()) {
      if (!v.is_string()) throw FieldError(w + ".relations." + k, "expected polynomial text");
      try {
        s.relations[ind(k, w + ".relations")] = parse_polynomial(v.get<std::string>(), mid);
      } catch (const FieldError&) {
        throw;
      } catch (const Error& e) {
        throw FieldError(w + ".relations." + k, e.what());
      }
    }
  if (j.contains("free"))
    for (auto& v : j["free"]) {
      if (!v.is_string()) throw FieldError(w + ".free", "expected names");
      s.free.push_back(ind(v.get<std::string>(), w + ".free"));
    }
  try {
    complete_spec(mid, s);
  } catch (const Error& e) {
    throw FieldError(w, e.what());
  }
  return s;
}

inline Asymmetry parse_asymmetry(const json& j, const Mid& mid, const std::string& w) {
  Asymmetry a;
  const json& cond = field(j, "if", w);
  if (!cond.is_array() || cond.empty()) throw FieldError(w + ".if", "expected a nonempty list of [variable, value]");
  for (auto& c : cond) {
    if (!c.is_array() || c.size() != 2) throw FieldError(w + ".if", "expected [variable, value]");
    a.antecedent.emplace_back(label(c[0], 'Y', w + ".if"), integer(c[1], w + ".if"));
  }
  const json& th = field(j, "then", w);
  if (!th.is_array() || th.size() != 3) throw FieldError(w + ".then", "expected [variable, \"=\" or \"!=\", value]");
  a.variable = label(th[0], 'Y', w + ".then");
  if (th[1] == "=") a.relation = Asymmetry::Relation::must_equal;
  else if (th[1] == "!=") a.relation = Asymmetry::Relation::must_not_equal;
  else throw FieldError(w + ".then", "relation must be \"=\" or \"!=\"");
  a.value = integer(th[2], w + ".then");
  try {
    for (auto& [l, _] : a.antecedent) mid.position(l);
    mid.position(a.variable);
    normalize(a, mid);
  } catch (const Error& e) {
    throw FieldError(w, e.what());
  }
  return a;
}

inline std::string key_of(const std::vector<int>& values) {
  std::string s;
  for (int v : values) s += (s.empty() ? "" : ",") + std::to_string(v);
  return s;
}

inline Policy parse_policy(const json& j, const Mid& mid, const std::string& w) {
  Policy p;
  if (!j.is_object()) throw FieldError(w, "expected an object keyed by decision");
  for (auto& [k, v] : j.items()) {
    std::string wk = w + "." + k;
    int l = label(json(k), 'Y', wk);
    if (!mid.has_label(l) || !mid.is_decision(mid.position(l))) throw FieldError(wk, k + " is not a decision");
    int r = mid.card(mid.position(l));
    auto check = [&](int a) {
      if (a < 0 || a >= r) throw FieldError(wk, "action out of range");
      return a;
    };
    if (v.is_number_integer()) {
      p.rules[l] = DecisionRule::constant(check(v.get<int>()));
      continue;
    }
    std::vector<int> given;
    for (auto& g : field(v, "given", wk)) {
      int gl = label(g, 'Y', wk + ".given");
      if (!mid.has_label(gl)) throw FieldError(wk + ".given", "unknown variable " + yname(gl));
      given.push_back(gl);
    }
    std::vector<int> sorted = given;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw FieldError(wk + ".given", "repeated variable");
    DecisionRule rule = empty_rule(mid, sorted);
    const json& choose = field(v, "choose", wk);
    for (std::size_t e = 0; e < rule.actions.size(); ++e) {
      auto cfg = rule.config(e);
      std::vector<int> in_given_order;
      for (int g : given) in_given_order.push_back(cfg[std::lower_bound(sorted.begin(), sorted.end(), g) - sorted.begin()]);
      std::string key = key_of(in_given_order);
      if (!choose.contains(key)) throw FieldError(wk + ".choose", "no action for \"" + key + "\"");
      rule.actions[e] = check(integer(choose[key], wk + ".choose." + key));
    }
    if (choose.size() != rule.actions.size()) throw FieldError(wk + ".choose", "unexpected configurations");
    p.rules[l] = rule;
  }
  return p;
}

inline TransformLog parse_log(const json& j, const std::string& w) {
  TransformLog log;
  if (!j.is_array()) throw FieldError(w, "expected a list");
  for (std::size_t t = 0; t < j.size(); ++t) {
    std::string wt = w + "[" + std::to_string(t) + "]";
    const json& s = j[t];
    std::string op = field(s, "op", wt).is_string() ? s["op"].get<std::string>() : "";
    TransformStep st{TransformStep::Kind::reverse_arc, 0, 0, {}};
    if (op == "reverse") st.kind = TransformStep::Kind::reverse_arc;
    else if (op == "removeBarren") st.kind = TransformStep::Kind::remove_barren;
    else if (op == "sufficiency") st.kind = TransformStep::Kind::sufficiency;
    else throw FieldError(wt + ".op", "expected reverse, removeBarren or sufficiency");
    st.i = label(field(s, "i", wt), 'Y', wt + ".i");
    if (st.kind != TransformStep::Kind::remove_barren) st.j = label(field(s, "j", wt), 'Y', wt + ".j");
    log.steps.push_back(st);
  }
  return log;
}

}  // namespace doc_detail

inline ParseResult parse_model(std::string_view text) {
  using namespace doc_detail;
  ParseResult out;
  json root;
  try {
    root = parse_exact(text);
  } catch (const json::parse_error& e) {
    out.diagnostics.push_back({Diagnostic::Severity::error, line_col(text, e.byte ? e.byte - 1 : 0), e.what()});
    return out;
  }
  try {
    if (!root.is_object()) throw FieldError("", "expected a JSON object");
    ModelDocument doc;
    doc.mid = parse_diagram(root, out.diagnostics);
    if (std::any_of(out.diagnostics.begin(), out.diagnostics.end(),
                    [](auto& d) { return d.severity == Diagnostic::Severity::error; }))
      return out;
    if (root.contains("specs"))
      for (auto& [name, s] : root["specs"].items()) doc.specs[name] = parse_spec(s, doc.mid, "specs." + name);
    if (root.contains("asymmetries"))
      for (std::size_t t = 0; t < root["asymmetries"].size(); ++t)
        doc.asymmetries.push_back(
            parse_asymmetry(root["asymmetries"][t], doc.mid, "asymmetries[" + std::to_string(t) + "]"));
    if (root.contains("policies"))
      for (auto& [name, p] : root["policies"].items()) doc.policies[name] = parse_policy(p, doc.mid, "policies." + name);
    if (root.contains("transformLog")) {
      doc.transform_log = parse_log(root["transformLog"], "transformLog");
      try {
        replay(doc.mid, doc.transform_log);
      } catch (const Error& e) {
        throw FieldError("transformLog", e.what());
      }
    }
    out.doc = std::move(doc);
  } catch (const FieldError& e) {
    out.diagnostics.push_back({Diagnostic::Severity::error, e.where, e.what()});
  } catch (const Error& e) {
    out.diagnostics.push_back({Diagnostic::Severity::error, "", e.what()});
  }
  return out;
}

inline json policy_json(const Policy& p) {
  using namespace doc_detail;
  json j = json::object();
  for (auto& [l, rule] : p.rules) {
    if (rule.domain.empty()) {
      j[yname(l)] = rule.actions.at(0);
      continue;
    }
    json given = json::array(), choose = json::object();
    for (int g : rule.domain) given.push_back(yname(g));
    for (std::size_t e = 0; e < rule.actions.size(); ++e) choose[key_of(rule.config(e))] = rule.actions[e];
    j[yname(l)] = {{"given", given}, {"choose", choose}};
  }
  return j;
}

inline json spec_json(const SubstitutionSpec& s) {
  json j = json::object();
  if (!s.numeric.empty()) {
    j["values"] = json::object();
    for (auto& [x, v] : s.numeric) j["values"][x.name()] = doc_detail::rational_json(v);
  }
  if (!s.relations.empty()) {
    j["relations"] = json::object();
    for (auto& [x, p] : s.relations) j["relations"][x.name()] = p.str();
  }
  if (!s.free.empty()) {
    j["free"] = json::array();
    for (auto& x : s.free) j["free"].push_back(x.name());
  }
  return j;
}

inline json asymmetry_json(const Asymmetry& a) {
  using namespace doc_detail;
  json cond = json::array();
  for (auto& [l, v] : a.antecedent) cond.push_back({yname(l), v});
  return {{"if", cond},
          {"then", {yname(a.variable), a.relation == Asymmetry::Relation::must_equal ? "=" : "!=", a.value}}};
}

inline json diagram_json(const Mid& mid) {
  using namespace doc_detail;
  json nodes = json::array(), us = json::array();
  for (auto& nd : mid.nodes()) {
    json x = {{"id", yname(nd.label)}, {"kind", nd.kind == NodeKind::decision ? "decision" : "chance"},
              {"states", nd.states}, {"parents", json::array()}};
    for (int p : nd.parents) x["parents"].push_back(yname(p));
    if (nd.generation) x["generation"] = nd.generation;
    nodes.push_back(x);
  }
  for (auto& u : mid.utilities()) {
    json x = {{"id", "U" + std::to_string(u.label)}, {"parents", json::array()}};
    for (int p : u.parents) x["parents"].push_back(yname(p));
    us.push_back(x);
  }
  json w = json::object();
  const Weights& wt = mid.weights();
  if (!wt.k.empty()) {
    w["k"] = json::object();
    for (auto& [l, v] : wt.k) w["k"]["U" + std::to_string(l)] = rational_json(v);
  }
  switch (wt.mode) {
    case InteractionMode::symbolic: w["h"] = "symbolic"; break;
    case InteractionMode::additive: w["h"] = "additive"; break;
    case InteractionMode::solved: w["h"] = "solve"; break;
    case InteractionMode::numeric: w["h"] = rational_json(wt.h); break;
  }
  return {{"nodes", nodes}, {"utilities", us}, {"weights", w}};
}

inline json document_json(const ModelDocument& d) {
  json j = diagram_json(d.mid);
  if (!d.specs.empty()) {
    j["specs"] = json::object();
    for (auto& [name, s] : d.specs) j["specs"][name] = spec_json(s);
  }
  if (!d.asymmetries.empty()) {
    j["asymmetries"] = json::array();
    for (auto& a : d.asymmetries) j["asymmetries"].push_back(asymmetry_json(a));
  }
  if (!d.policies.empty()) {
    j["policies"] = json::object();
    for (auto& [name, p] : d.policies) j["policies"][name] = policy_json(p);
  }
  if (!d.transform_log.steps.empty()) {
    j["transformLog"] = json::array();
    for (auto& s : d.transform_log.steps) {
      json x;
      switch (s.kind) {
        case TransformStep::Kind::reverse_arc: x["op"] = "reverse"; break;
        case TransformStep::Kind::remove_barren: x["op"] = "removeBarren"; break;
        case TransformStep::Kind::sufficiency: x["op"] = "sufficiency"; break;
      }
      x["i"] = doc_detail::yname(s.i);
      if (s.kind != TransformStep::Kind::remove_barren) x["j"] = doc_detail::yname(s.j);
      j["transformLog"].push_back(x);
    }
  }
  return j;
}

inline std::string serialize_model(const ModelDocument& d) { return document_json(d).dump(2) + "\n"; }

// throws with every diagnostic when the document does not load
inline ModelDocument load_model(std::string_view text) {
  ParseResult r = parse_model(text);
  if (!r.ok()) {
    std::string msg;
    for (auto& d : r.diagnostics) msg += (msg.empty() ? "" : "\n") + d.str();
    throw Error(msg);
  }
  return std::move(*r.doc);
}

}  // namespace symeu
