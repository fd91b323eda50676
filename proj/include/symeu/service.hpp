#pragma once

// Request handlers for the local service. Each is a pure function of the
// loaded document and the JSON request; the HTTP layer only routes.

#include "symeu/document.hpp"

#include <string>

namespace symeu {

struct Response {
  int status = 200;
  json body;
};

namespace service_detail {

struct BadRequest : Error {
  using Error::Error;
};

inline Policy policy_of(const ModelDocument& doc, const json& req) {
  if (!req.contains("policy")) return {};
  const json& p = req["policy"];
  if (p.is_string()) {
    auto it = doc.policies.find(p.get<std::string>());
    if (it == doc.policies.end()) throw BadRequest("no policy named '" + p.get<std::string>() + "'");
    return it->second;
  }
  return doc_detail::parse_policy(p, doc.mid, "policy");
}

inline std::optional<SubstitutionSpec> spec_of(const ModelDocument& doc, const json& req) {
  const json* s = nullptr;
  if (req.contains("specName")) s = &req["specName"];
  else if (req.contains("spec")) s = &req["spec"];
  if (!s || s->is_null()) return std::nullopt;
  if (s->is_string()) {
    auto it = doc.specs.find(s->get<std::string>());
    if (it == doc.specs.end()) throw BadRequest("no spec named '" + s->get<std::string>() + "'");
    return it->second;
  }
  return doc_detail::parse_spec(*s, doc.mid, "spec");
}

inline std::vector<Asymmetry> asymmetries_of(const ModelDocument& doc, const json& req) {
  if (!req.contains("asymmetries")) return {};
  const json& a = req["asymmetries"];
  if (a.is_boolean()) return a.get<bool>() ? doc.asymmetries : std::vector<Asymmetry>{};
  std::vector<Asymmetry> out;
  for (std::size_t t = 0; t < a.size(); ++t)
    out.push_back(doc_detail::parse_asymmetry(a[t], doc.mid, "asymmetries[" + std::to_string(t) + "]"));
  return out;
}

inline json value_json(const Rational& r) {
  return {{"decimal", format_decimal(r)}, {"exact", to_string(r)}, {"number", to_double(r)}};
}

inline json config_json(const Config& c) {
  json j = json::object();
  for (auto& [l, v] : c) j["Y" + std::to_string(l)] = v;
  return j;
}

// entries of a transformed diagram in the original parameters, where the
// fresh ones cancel; otherwise left as they are
inline void to_original(EuVector& v, const std::vector<DefinitionalBinding>& bs) {
  for (auto& e : v.entries) {
    try {
      e = resolve_symbolic(e, bs);
    } catch (const Error&) {
    }
  }
}

// fresh parameters that survive get numbers when the spec fixes everything
// their bindings read
inline EuVector spec_through(const Mid& original, EuVector v, const SubstitutionSpec& s,
                             const std::vector<DefinitionalBinding>& bs) {
  v = apply_spec(original, v, s);
  if (bs.empty()) return v;
  Bindings fresh;
  try {
    auto vals = resolve_numeric(bs, complete_spec(original, s).numeric);
    for (auto& b : bs) fresh[b.fresh] = Polynomial(vals.at(b.fresh));
  } catch (const Error&) {
    return v;
  }
  return substitute(v, fresh);
}

}  // namespace service_detail

// {policy, spec|specName, stage, asymmetries?, additive?, allowNonExtensive?}
// A document with a transform log is evaluated on the transformed diagram.
inline json evaluate_request(const ModelDocument& doc, const json& req) {
  using namespace service_detail;
  auto [mid, log] = replay(doc.mid, doc.transform_log);
  auto bindings = log.bindings();
  if (req.value("additive", false)) mid.weights().mode = InteractionMode::additive;
  int stage = req.contains("stage") ? req["stage"].get<int>() : 1;
  if (stage < 1 || stage > mid.n() + 1) throw BadRequest("stage out of range");
  EvaluationOptions opt;
  opt.stop_at = stage;
  opt.allow_non_extensive = req.value("allowNonExtensive", false);
  auto asys = asymmetries_of(doc, req);
  auto tr = asys.empty() ? symbolic_eu(mid, policy_of(doc, req), opt)
                         : symbolic_eu_asymmetric(mid, policy_of(doc, req), asys, opt);
  EuVector v = tr.stage(stage);
  to_original(v, bindings);
  if (auto s = spec_of(doc, req)) v = spec_through(doc.mid, v, *s, bindings);
  json out = {{"stage", stage}, {"entries", json::array()}};
  ScopeIndex ix(v.scope, mid);
  for (std::size_t e = 0; e < v.entries.size(); ++e) {
    json row = {{"config", config_json(make_config(mid, v.scope, ix.config(e)))},
                {"label", entry_label(mid, v.scope, e)},
                {"polynomialText", v.entries[e].str()},
                {"monomials", v.entries[e].size()}};
    if (v.entries[e].is_constant()) row["value"] = value_json(v.entries[e].constant_value());
    out["entries"].push_back(row);
  }
  return out;
}

// {alternatives: [{label, polynomial}], axes: [{name, lo, hi, steps}], spec?}
inline json sweep_request(const ModelDocument& doc, const json& req) {
  using namespace service_detail;
  auto spec = spec_of(doc, req);
  std::vector<Alternative> alts;
  for (auto& a : req.at("alternatives")) {
    Polynomial p = parse_polynomial(a.at("polynomial").get<std::string>(), doc.mid);
    if (spec) p = apply_spec(doc.mid, p, *spec);
    alts.push_back({a.at("label").get<std::string>(), p});
  }
  std::vector<Axis> axes;
  for (auto& a : req.at("axes"))
    axes.push_back({parse_indeterminate(a.at("name").get<std::string>(), doc.mid),
                    doc_detail::rational(a.at("lo"), "axes.lo"), doc_detail::rational(a.at("hi"), "axes.hi"),
                    a.value("steps", 1)});
  RegionGrid g = admissible_grid(alts, axes);
  json out = {{"axes", json::array()}, {"labels", g.labels}, {"cells", json::array()}, {"table", grid_table(g)}};
  for (auto& a : axes)
    out["axes"].push_back({{"name", a.x.name()}, {"lo", format_decimal(a.lo)}, {"hi", format_decimal(a.hi)}, {"steps", a.steps}});
  for (auto& c : g.cells) {
    json cell = {{"center", json::array()}, {"values", json::array()},
                 {"preferred", c.winner < 0 ? std::string("indifferent") : g.labels[c.winner]}};
    for (auto& x : c.center) cell["center"].push_back(to_double(x));
    for (auto& v : c.values) cell["values"].push_back(to_double(v));
    out["cells"].push_back(cell);
  }
  return out;
}

// {spec|specName, decision: "Y4", policy?}
inline json policy_table_request(const ModelDocument& doc, const json& req) {
  using namespace service_detail;
  auto spec = spec_of(doc, req);
  if (!spec) throw BadRequest("a spec is required");
  int label = doc_detail::label(req.at("decision"), 'Y', "decision");
  if (!doc.mid.has_label(label)) throw BadRequest("unknown decision");
  ActionTable t = preferred_action_table(doc.mid, *spec, label, policy_of(doc, req), req.value("allowNonExtensive", false));
  json out = {{"decision", "Y" + std::to_string(label)}, {"rows", json::array()}};
  for (auto& r : t.rows) {
    json row = {{"observed", config_json(r.observed)}, {"action", r.action}, {"best", value_json(r.best)},
                {"runnerUp", value_json(r.runner_up)}, {"margin", value_json(r.margin)}, {"values", json::array()}};
    for (auto& v : r.values) row["values"].push_back(value_json(v));
    out["rows"].push_back(row);
  }
  return out;
}

// routing without the network, so handlers are testable in-process
inline Response handle(const ModelDocument& doc, const std::string& method, const std::string& path,
                       const std::string& body) {
  try {
    if (method == "GET" && path == "/model") return {200, document_json(doc)};
    if (method != "POST") return {404, {{"error", "not found"}}};
    json req = body.empty() ? json::object() : doc_detail::parse_exact(body);
    if (path == "/evaluate") return {200, evaluate_request(doc, req)};
    if (path == "/sweep") return {200, sweep_request(doc, req)};
    if (path == "/policy-table") return {200, policy_table_request(doc, req)};
    return {404, {{"error", "not found"}}};
  } catch (const doc_detail::FieldError& e) {
    return {400, {{"error", e.what()}, {"where", e.where}}};
  } catch (const json::exception& e) {
    return {400, {{"error", e.what()}}};
  } catch (const Error& e) {
    return {400, {{"error", e.what()}}};
  }
}

}  // namespace symeu
