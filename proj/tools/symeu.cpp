#include "symeu/random.hpp"
#include "symeu/service.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace symeu;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ModelDocument load(const std::string& path) {
  ParseResult r = parse_model(read_file(path));
  for (auto& d : r.diagnostics) std::cerr << path << ": " << d.str() << "\n";
  if (!r.ok()) throw Error("model did not load");
  return std::move(*r.doc);
}

std::string labels(const Mid& mid, const IndexSet& s) {
  std::string out = "{";
  for (int p : s) out += (out.size() > 1 ? "," : "") + std::to_string(mid.label(p));
  return out + "}";
}

int cmd_validate(const std::string& file) {
  ModelDocument doc = load(file);
  auto [mid, log] = replay(doc.mid, doc.transform_log);
  std::cout << "OK\n";
  if (!log.steps.empty()) {
    std::cout << "transformed:";
    for (auto& s : log.steps) std::cout << " " << step_string(s);
    std::cout << "\n";
  }
  std::cout << "DS: " << sequence_string(mid) << "\n";
  IndexSet j;
  for (int p : comp_j(mid)) j.push_back(p);
  std::cout << "J: " << labels(mid, make_set(j)) << "\n";
  for (int i = 1; i <= mid.n() + 1; ++i) std::cout << "B" << i << ": " << labels(mid, comp_b(mid, i)) << "\n";
  std::cout << "extensive: " << (is_extensive_form(mid) ? "yes" : "no") << "\n";
  return 0;
}

struct EvalFlags {
  std::string policy, spec;
  int stage = 1;
  bool additive = false, asymmetries = false, non_extensive = false;
  bool stage_given = false;
};

json eval_request(const EvalFlags& f) {
  json req = {{"stage", f.stage}, {"additive", f.additive}, {"asymmetries", f.asymmetries},
              {"allowNonExtensive", f.non_extensive}};
  if (!f.policy.empty()) req["policy"] = f.policy;
  if (!f.spec.empty()) req["specName"] = f.spec;
  return req;
}

int cmd_evaluate(const std::string& file, const EvalFlags& f, bool as_json) {
  ModelDocument doc = load(file);
  json out = evaluate_request(doc, eval_request(f));
  if (as_json) {
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  for (auto& e : out["entries"]) {
    std::string label = e["label"];
    std::cout << "U" << f.stage << (label.empty() ? "" : "(" + label + ")") << " = ";
    if (e.contains("value")) std::cout << e["value"]["decimal"].get<std::string>() << "\n";
    else std::cout << e["polynomialText"].get<std::string>() << "\n";
  }
  return 0;
}

int cmd_structure(const std::string& file, const EvalFlags& f) {
  ModelDocument doc = load(file);
  Mid mid = replay(doc.mid, doc.transform_log).first;
  if (f.additive) mid.weights().mode = InteractionMode::additive;
  EvaluationOptions opt;
  opt.allow_non_extensive = f.non_extensive;
  auto tr = symbolic_eu(mid, f.policy.empty() ? Policy{} : doc.policies.at(f.policy), opt);
  bool ok = true;
  for (int i = mid.n(); i >= 1; --i) {
    if (f.stage_given && i != f.stage) continue;
    auto pred = predicted_structure(mid, i, f.additive);
    auto rep = check_structure(tr.stage(i), pred);
    auto h = tr.stage(i).entries.empty() ? std::map<unsigned, std::size_t>{} : tr.stage(i).entries[0].degree_histogram();
    std::cout << "stage " << i << ": entries " << tr.stage(i).entries.size() << ", predicted "
              << histogram_string(pred.histogram) << ", actual " << histogram_string(h) << " "
              << (rep.ok ? "match" : "MISMATCH " + rep.message) << "\n";
    ok = ok && rep.ok;
  }
  for (auto& r : tr.log)
    std::cout << op_name(r.op) << " at " << r.position << ": " << r.multiplications << " multiplications\n";
  return ok ? 0 : 1;
}

int cmd_transform(const std::string& file, std::vector<int> rev, int barren, std::vector<int> suff, bool extensive,
                  const std::string& output) {
  ModelDocument doc = load(file);
  auto [cur, log] = replay(doc.mid, doc.transform_log);
  std::vector<TransformStep> steps;
  if (!rev.empty()) {
    auto r = reverse_arc(cur, rev[0], rev[1]);
    cur = r.mid;
    steps.push_back({TransformStep::Kind::reverse_arc, rev[0], rev[1], r.bindings});
  } else if (barren) {
    cur = remove_barren(cur, barren);
    steps.push_back({TransformStep::Kind::remove_barren, barren, 0, {}});
  } else if (!suff.empty()) {
    auto r = apply_sufficiency(cur, suff[0], suff[1]);
    cur = r.mid;
    steps.push_back({TransformStep::Kind::sufficiency, suff[0], suff[1], r.bindings});
  } else if (extensive) {
    auto [m, l] = to_extensive_form(cur);
    cur = m;
    steps = l.steps;
  }
  for (auto& s : steps) {
    std::cerr << step_string(s) << "\n";
    for (auto& b : s.bindings) {
      std::cerr << "  " << b.fresh.name() << " = " << b.numerator.str();
      if (!(b.denominator == Polynomial(1))) std::cerr << " / " << b.denominator.str();
      std::cerr << "\n";
    }
  }
  // the output document keeps the original diagram and the full log
  ModelDocument out = doc;
  for (auto& s : steps) out.transform_log.steps.push_back({s.kind, s.i, s.j, {}});
  json j = document_json(out);
  j["transformed"] = diagram_json(cur);
  j["transformed"].erase("weights");
  std::string text = j.dump(2) + "\n";
  if (output.empty()) std::cout << text;
  else std::ofstream(output) << text;
  return 0;
}

Axis parse_axis(const Mid& mid, const std::string& s) {
  // name:lo:hi:steps
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 4) throw Error("axis must be name:lo:hi:steps, got '" + s + "'");
  return {parse_indeterminate(parts[0], mid), parse_rational(parts[1]), parse_rational(parts[2]), std::stoi(parts[3])};
}

int cmd_sweep(const std::string& file, const EvalFlags& f, const std::string& decision, const std::string& given,
              const std::vector<std::string>& axis_text, const std::string& plot) {
  ModelDocument doc = load(file);
  const Mid& mid = doc.mid;
  int label = doc_detail::label(json(decision), 'Y', "--decision");
  int pos = mid.position(label);
  if (!mid.is_decision(pos)) throw Error(decision + " is not a decision");
  EvaluationOptions opt;
  opt.stop_at = pos + 1;
  opt.allow_non_extensive = f.non_extensive;
  EuVector v = symbolic_eu(mid, f.policy.empty() ? Policy{} : doc.policies.at(f.policy), opt).stage(pos + 1);
  if (!f.spec.empty()) v = apply_spec(mid, v, doc.specs.at(f.spec));
  // the observed configuration, "Y3=1,Y2=0"
  std::map<int, int> obs;
  std::stringstream ss(given);
  for (std::string p; std::getline(ss, p, ',');) {
    auto eq = p.find('=');
    if (eq == std::string::npos) throw Error("--given takes Y<n>=<value> pairs");
    obs[doc_detail::label(json(p.substr(0, eq)), 'Y', "--given")] = std::stoi(p.substr(eq + 1));
  }
  ScopeIndex ix(v.scope, mid);
  std::vector<Alternative> alts;
  for (int a = 0; a < mid.card(pos); ++a) {
    std::size_t idx = ix.index([&](int p) {
      if (p == pos) return a;
      auto it = obs.find(mid.label(p));
      if (it == obs.end()) throw Error("--given must fix Y" + std::to_string(mid.label(p)));
      return it->second;
    });
    alts.push_back({decision + "=" + std::to_string(a), v.entries[idx]});
  }
  std::vector<Axis> axes;
  for (auto& a : axis_text) axes.push_back(parse_axis(mid, a));
  RegionGrid g = admissible_grid(alts, axes);
  std::string table = grid_table(g);
  if (!plot.empty()) std::ofstream(plot) << table;
  for (auto& a : alts) std::cout << a.label << ": " << a.eu.str() << "\n";
  if (plot.empty()) std::cout << table;
  std::cout << "cells: " << g.cells.size() << "\n";
  for (std::size_t t = 0; t < alts.size(); ++t) {
    std::size_t n = 0;
    for (auto& c : g.cells) n += c.winner == static_cast<int>(t);
    std::cout << alts[t].label << " preferred in " << n << " cells\n";
  }
  std::cout << "indifferent in " << std::count_if(g.cells.begin(), g.cells.end(), [](auto& c) { return c.winner < 0; }) << " cells\n";
  return 0;
}

int cmd_oracle_check(const std::string& file, int trials, unsigned seed, bool non_extensive) {
  ModelDocument doc = load(file);
  const Mid& mid = doc.mid;
  std::mt19937_64 rng(seed);
  EvaluationOptions opt;
  opt.allow_non_extensive = non_extensive || !is_extensive_form(mid);
  auto policies = enumerate_policies(mid);
  std::size_t bad = 0, checked = 0;
  for (int t = 0; t < trials; ++t) {
    NumericSpec spec = random_numeric_spec(mid, rng);
    Bindings b;
    for (auto& [x, v] : spec) b[x] = Polynomial(v);
    for (auto& p : policies) {
      Polynomial u = substitute(symbolic_eu(mid, p, opt).stage(1).entries.at(0), b);
      Rational want = joint_eu_numeric(mid, spec, p);
      ++checked;
      if (!u.is_constant() || u.constant_value() != want) {
        ++bad;
        std::cout << "mismatch: symbolic " << u.str() << ", enumeration " << to_string(want) << "\n";
      }
    }
  }
  std::cout << checked << " checks, " << bad << " mismatches\n";
  return bad ? 1 : 0;
}

int cmd_serve(const std::string& file, int port, const std::string& host) {
  const ModelDocument doc = load(file);
  httplib::Server srv;
  auto reply = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
    res.set_header("Access-Control-Allow-Origin", "*");
  };
  srv.Get("/model", [&](const httplib::Request&, httplib::Response& res) { reply(res, handle(doc, "GET", "/model", "")); });
  for (const char* path : {"/evaluate", "/sweep", "/policy-table"})
    srv.Post(path, [&, path = std::string(path)](const httplib::Request& req, httplib::Response& res) {
      reply(res, handle(doc, "POST", path, req.body));
    });
  srv.Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.set_header("Access-Control-Allow-Methods", "GET, POST");
  });
  std::cerr << "listening on " << host << ":" << port << "\n";
  return srv.listen(host, port) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symbolic expected utility of multiplicative influence diagrams"};
  app.require_subcommand(1);
  std::string file;
  EvalFlags f;
  bool as_json = false;

  auto* validate = app.add_subcommand("validate", "check a model file and print its derived sets");
  validate->add_option("model", file)->required();

  auto add_eval = [&](CLI::App* c) {
    c->add_option("model", file)->required();
    c->add_option("--policy", f.policy, "named policy");
    c->add_option("--spec", f.spec, "named substitution spec");
    c->add_option("--stage", f.stage, "stage i of U_i");
    c->add_flag("--additive", f.additive, "use h = 0");
    c->add_flag("--asymmetries", f.asymmetries, "prune with the model's asymmetries");
    c->add_flag("--allow-non-extensive", f.non_extensive, "evaluate without extensive form");
  };
  auto* evaluate = app.add_subcommand("evaluate", "print a stage EU vector");
  add_eval(evaluate);
  evaluate->add_flag("--json", as_json);
  auto* structure = app.add_subcommand("structure", "compare predicted and actual monomial structure");
  add_eval(structure);

  auto* transform = app.add_subcommand("transform", "apply a diagram transformation");
  transform->add_option("model", file)->required();
  std::vector<int> rev, suff;
  int barren = 0;
  bool extensive = false;
  std::string output;
  auto* o1 = transform->add_option("--reverse", rev, "reverse arc i -> j")->expected(2);
  auto* o2 = transform->add_option("--remove-barren", barren, "remove barren node i");
  auto* o3 = transform->add_option("--sufficiency", suff, "drop chance parent i of decision j")->expected(2);
  auto* o4 = transform->add_flag("--to-extensive", extensive);
  o1->excludes(o2, o3, o4);
  o2->excludes(o3, o4);
  o3->excludes(o4);
  transform->add_option("-o,--output", output);

  auto* sweep = app.add_subcommand("sweep", "admissible-domain grid for one decision");
  add_eval(sweep);
  std::string decision = "Y4", given, plot;
  std::vector<std::string> axes;
  sweep->add_option("--decision", decision);
  sweep->add_option("--given", given, "observed configuration, e.g. Y3=1");
  sweep->add_option("--axis", axes, "name:lo:hi:steps (up to three)")->required();
  sweep->add_option("--emit-plot-data", plot, "write the region table here");

  auto* oracle = app.add_subcommand("oracle-check", "compare symbolic EU against enumeration");
  oracle->add_option("model", file)->required();
  int trials = 3;
  unsigned seed = 1;
  oracle->add_option("--trials", trials);
  oracle->add_option("--seed", seed);
  oracle->add_flag("--allow-non-extensive", f.non_extensive);

  auto* serve = app.add_subcommand("serve", "local JSON service");
  serve->add_option("model", file)->required();
  int port = 8080;
  std::string host = "127.0.0.1";
  serve->add_option("--port", port);
  serve->add_option("--host", host);

  CLI11_PARSE(app, argc, argv);
  f.stage_given = structure->get_option("--stage")->count() > 0;
  try {
    if (*validate) return cmd_validate(file);
    if (*evaluate) return cmd_evaluate(file, f, as_json);
    if (*structure) return cmd_structure(file, f);
    if (*transform) {
      if (rev.empty() && !barren && suff.empty() && !extensive) throw Error("choose a transformation");
      return cmd_transform(file, rev, barren, suff, extensive, output);
    }
    if (*sweep) return cmd_sweep(file, f, decision, given, axes, plot);
    if (*oracle) return cmd_oracle_check(file, trials, seed, f.non_extensive);
    if (*serve) return cmd_serve(file, port, host);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
