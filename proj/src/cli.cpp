#include "scmkit/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <sstream>

#include "scmkit/analysis.hpp"
#include "scmkit/causal.hpp"
#include "scmkit/dsl.hpp"
#include "scmkit/error.hpp"
#include "scmkit/json_io.hpp"
#include "scmkit/markov.hpp"
#include "scmkit/transform.hpp"

namespace scmkit::cli {

namespace {

constexpr int kTrue = 0, kFalse = 1, kError = 2;

// Flag misuse detected after CLI11 parsing.
class UsageError : public Error {
 public:
  using Error::Error;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ','))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

NodeSet name_set(const std::string& s) {
  auto v = split_list(s);
  return {v.begin(), v.end()};
}

// "X=v,Y=w" split syntactically; values are converted once the family is known.
std::vector<std::pair<std::string, std::string>> split_assignments(const std::string& s,
                                                                   const std::string& flag) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& item : split_list(s)) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
      throw UsageError(flag + ": expected NAME=VALUE, got '" + item + "'");
    out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Scm load(const std::string& path) { return dsl::parse(read_file(path)); }

FiniteIntervention finite_values(const std::vector<std::pair<std::string, std::string>>& kv) {
  FiniteIntervention iv;
  for (const auto& [k, v] : kv) iv[k] = dsl::parse_atom(v);
  return iv;
}

LinearIntervention real_values(const std::vector<std::pair<std::string, std::string>>& kv) {
  LinearIntervention iv;
  for (const auto& [k, v] : kv) iv[k] = dsl::parse_real(v);
  return iv;
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write " + out_path);
  f << text;
}

int verdict(const Verdict& v, bool verbose, std::ostream& out) {
  out << (v.holds ? "true" : "false") << "\n";
  if (!v.holds && verbose) out << "witness: " << v.witness << "\n";
  return v.holds ? kTrue : kFalse;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"scmkit: structural causal models over finite and linear-Gaussian mechanisms", "scmkit"};
  app.require_subcommand(1);
  app.fallthrough();
  bool verbose = false;
  app.add_flag("--verbose", verbose, "Print witnesses and error detail");

  std::string file, file2, out_path, format, kind, context, set, over, graph_path;
  std::string solvable, unique, do_list, factual, observe, cf, query, a, b, given, level, wrt;
  bool structural = false, all_subsets = false, full_subsets = false;
  std::size_t max_cond = 2;

  auto* parse_cmd = app.add_subcommand("parse", "Validate a model and print its canonical form");
  parse_cmd->add_option("FILE", file)->required();
  parse_cmd->add_option("--format", format, "text|json")->check(CLI::IsMember({"text", "json"}));

  auto* graph_cmd = app.add_subcommand("graph", "Extract a graph");
  graph_cmd->add_option("FILE", file)->required();
  graph_cmd->add_option("--kind", kind)->required()->check(CLI::IsMember({"augmented", "functional", "causal"}));
  graph_cmd->add_option("--context", context, "Observed variables for the causal graph");
  graph_cmd->add_option("--format", format)->check(CLI::IsMember({"dot", "json"}));

  auto* iv_cmd = app.add_subcommand("intervene", "Perfect intervention");
  iv_cmd->add_option("FILE", file)->required();
  iv_cmd->add_option("--set", set, "X=v[,Y=w]")->required();
  iv_cmd->add_option("-o", out_path);

  auto* twin_cmd = app.add_subcommand("twin", "Twin model");
  twin_cmd->add_option("FILE", file)->required();
  twin_cmd->add_option("-o", out_path);

  auto* extend_cmd = app.add_subcommand("extend", "Extended model with noise copies");
  extend_cmd->add_option("FILE", file)->required();
  extend_cmd->add_option("-o", out_path);

  auto* marg_cmd = app.add_subcommand("marginalize", "Marginalize a uniquely solvable subsystem");
  marg_cmd->add_option("FILE", file)->required();
  marg_cmd->add_option("--over", over)->required();
  marg_cmd->add_option("-o", out_path);

  auto* check_cmd = app.add_subcommand("check", "Solvability checks");
  check_cmd->add_option("FILE", file)->required();
  auto* o1 = check_cmd->add_option("--solvable", solvable);
  auto* o2 = check_cmd->add_option("--unique", unique);
  auto* o3 = check_cmd->add_flag("--structural", structural);
  auto* o4 = check_cmd->add_flag("--all-subsets", all_subsets);
  o1->excludes(o2, o3, o4);
  o2->excludes(o3, o4);
  o3->excludes(o4);

  auto* dist_cmd = app.add_subcommand("dist", "Observational or interventional distribution");
  dist_cmd->add_option("FILE", file)->required();
  dist_cmd->add_option("--do", do_list);
  dist_cmd->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

  auto* poly_cmd = app.add_subcommand("polytope", "Selector polytope of a finite model");
  poly_cmd->add_option("FILE", file)->required();
  poly_cmd->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

  auto* cf_cmd = app.add_subcommand("counterfactual", "Counterfactual query on the twin model");
  cf_cmd->add_option("FILE", file)->required();
  cf_cmd->add_option("--factual-do", factual);
  cf_cmd->add_option("--observe", observe);
  cf_cmd->add_option("--cf-do", cf);
  cf_cmd->add_option("--query", query)->required();
  cf_cmd->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

  auto* sep_cmd = app.add_subcommand("sep", "d- or sigma-separation");
  auto* sep_file = sep_cmd->add_option("FILE", file);
  auto* sep_graph = sep_cmd->add_option("--graph", graph_path);
  sep_file->excludes(sep_graph);
  sep_cmd->add_option("--a", a)->required();
  sep_cmd->add_option("--b", b)->required();
  sep_cmd->add_option("--given", given);
  sep_cmd->add_option("--kind", kind)->required()->check(CLI::IsMember({"d", "sigma"}));

  auto* markov_cmd = app.add_subcommand("markov", "Verify the global Markov property");
  markov_cmd->add_option("FILE", file)->required();
  markov_cmd->add_option("--kind", kind)->required()->check(CLI::IsMember({"d", "sigma"}));
  markov_cmd->add_option("--max-cond", max_cond);
  markov_cmd->add_flag("--full-subsets", full_subsets, "All disjoint A, B (exponential)");
  markov_cmd->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

  auto* equiv_cmd = app.add_subcommand("equiv", "Equivalence of two models");
  equiv_cmd->add_option("FILE1", file)->required();
  equiv_cmd->add_option("FILE2", file2)->required();
  equiv_cmd->add_option("--level", level)->required()->check(CLI::IsMember({"obs", "int", "cf"}));
  equiv_cmd->add_option("--wrt", wrt);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kTrue;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kTrue;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kError;
  }

  try {
    // Flag syntax first, file IO after.
    if (check_cmd->parsed() && solvable.empty() && unique.empty() && !structural && !all_subsets)
      throw UsageError("check: one of --solvable, --unique, --structural, --all-subsets is required");
    if (sep_cmd->parsed() && file.empty() && graph_path.empty())
      throw UsageError("sep: give a model FILE or --graph");
    auto set_kv = split_assignments(set, "--set");
    auto do_kv = split_assignments(do_list, "--do");
    auto fact_kv = split_assignments(factual, "--factual-do");
    auto obs_kv = split_assignments(observe, "--observe");
    auto cf_kv = split_assignments(cf, "--cf-do");

    if (parse_cmd->parsed()) {
      Scm m = load(file);
      if (format == "json") out << std::visit([](const auto& x) { return to_json(x); }, m).dump(2) << "\n";
      else out << dsl::serialize(m);
      return kTrue;
    }
    if (graph_cmd->parsed()) {
      Scm m = load(file);
      MixedGraph g = std::visit(
          [&](const auto& x) {
            if (kind == "augmented") return augmented_graph(x);
            if (kind == "functional") return functional_graph(x);
            if (!context.empty()) return direct_causal_graph_wrt(x, name_set(context));
            return direct_causal_graph(x);
          },
          m);
      out << (format == "json" ? to_json(g).dump(2) + "\n" : to_dot(g));
      return kTrue;
    }
    if (iv_cmd->parsed()) {
      Scm m = load(file);
      if (auto* f = std::get_if<FiniteScm>(&m)) emit(dsl::serialize(intervene(*f, finite_values(set_kv))), out_path, out);
      else emit(dsl::serialize(intervene(std::get<LinearScm>(m), real_values(set_kv))), out_path, out);
      return kTrue;
    }
    if (twin_cmd->parsed() || extend_cmd->parsed()) {
      Scm m = load(file);
      bool tw = twin_cmd->parsed();
      emit(std::visit([&](const auto& x) { return dsl::serialize(tw ? twin(x) : extend(x)); }, m), out_path, out);
      return kTrue;
    }
    if (marg_cmd->parsed()) {
      Scm m = load(file);
      emit(std::visit([&](const auto& x) { return dsl::serialize(marginalize(x, name_set(over))); }, m),
           out_path, out);
      return kTrue;
    }
    if (check_cmd->parsed()) {
      Scm m = load(file);
      Verdict v = std::visit(
          [&](const auto& x) -> Verdict {
            if (!solvable.empty()) return solvable_wrt(x, name_set(solvable));
            if (!unique.empty()) return uniquely_solvable_wrt(x, name_set(unique));
            if (structural) return {structurally_uniquely_solvable(x), "a variable has a self-loop"};
            return uniquely_solvable_all_subsets(x);
          },
          m);
      return verdict(v, verbose, out);
    }
    if (dist_cmd->parsed()) {
      Scm m = load(file);
      if (auto* f = std::get_if<FiniteScm>(&m)) {
        auto d = interventional_distribution(*f, finite_values(do_kv));
        out << (format == "json" ? to_json(d).dump() + "\n" : to_text(d));
      } else {
        auto d = interventional_distribution(std::get<LinearScm>(m), real_values(do_kv));
        out << (format == "json" ? to_json(d).dump() + "\n" : to_text(d));
      }
      return kTrue;
    }
    if (poly_cmd->parsed()) {
      Scm m = load(file);
      auto* f = std::get_if<FiniteScm>(&m);
      if (!f) throw Unsupported("polytope needs a finite model");
      auto poly = observational_polytope(*f);
      if (format == "json") {
        nlohmann::json j;
        j["vars"] = poly.vars;
        j["vertices"] = nlohmann::json::array();
        for (const auto& v : poly.vertices) j["vertices"].push_back(to_json(v));
        out << j.dump() << "\n";
      } else {
        out << poly.vertices.size() << " vertex(es)\n";
        for (std::size_t i = 0; i < poly.vertices.size(); ++i)
          out << "vertex " << i << "\n" << to_text(poly.vertices[i]);
      }
      return kTrue;
    }
    if (cf_cmd->parsed()) {
      Scm m = load(file);
      auto q = split_list(query);
      if (auto* f = std::get_if<FiniteScm>(&m)) {
        auto d = counterfactual_distribution(*f, finite_values(fact_kv), finite_values(obs_kv),
                                             finite_values(cf_kv), q);
        out << (format == "json" ? to_json(d).dump() + "\n" : to_text(d));
      } else {
        auto d = counterfactual_distribution(std::get<LinearScm>(m), real_values(fact_kv),
                                             real_values(obs_kv), real_values(cf_kv), q);
        out << (format == "json" ? to_json(d).dump() + "\n" : to_text(d));
      }
      return kTrue;
    }
    if (sep_cmd->parsed()) {
      MixedGraph g;
      if (graph_path.empty() && file.size() > 5 && file.ends_with(".json")) std::swap(graph_path, file);
      if (!graph_path.empty()) {
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(read_file(graph_path));
        } catch (const nlohmann::json::exception& e) {
          throw InvalidArgument(std::string("malformed graph JSON: ") + e.what());
        }
        g = graph_from_json(j);
      } else {
        g = std::visit([](const auto& x) { return functional_graph(x); }, load(file));
      }
      bool s = kind == "d" ? d_separated(g, name_set(a), name_set(b), name_set(given))
                           : sigma_separated(g, name_set(a), name_set(b), name_set(given));
      out << (s ? "true" : "false") << "\n";
      return s ? kTrue : kFalse;
    }
    if (markov_cmd->parsed()) {
      Scm m = load(file);
      SeparationKind k = kind == "d" ? SeparationKind::d : SeparationKind::sigma;
      MarkovReport r = std::visit([&](const auto& x) { return verify_markov(x, k, max_cond, full_subsets); }, m);
      out << (format == "json" ? to_json(r).dump(2) + "\n" : to_text(r));
      return r.violations() == 0 ? kTrue : kFalse;
    }
    if (equiv_cmd->parsed()) {
      Scm m1 = load(file), m2 = load(file2);
      if (m1.index() != m2.index()) throw InvalidArgument("models belong to different families");
      EquivalenceReport r = std::visit(
          [&](const auto& x) -> EquivalenceReport {
            using M = std::decay_t<decltype(x)>;
            const M& y = std::get<M>(m2);
            NodeSet margin = name_set(wrt);
            if (margin.empty())
              for (const auto& n : std::get<M>(m1).endogenous) {
                if constexpr (std::is_same_v<M, FiniteScm>) margin.insert(n.name);
                else margin.insert(n);
              }
            if (level == "obs") return observationally_equivalent(x, y, margin);
            if (level == "int") return interventionally_equivalent(x, y, margin);
            return counterfactually_equivalent(x, y, margin);
          },
          m1);
      out << to_json(r).dump(2) << "\n";
      return r.verdict ? kTrue : kFalse;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kError;
  } catch (const NotUniquelySolvable& e) {
    err << "error: " << e.what() << "\n";
    if (verbose) err << "witness: " << e.witness() << "\n";
    return kError;
  } catch (const NotSolvable& e) {
    err << "error: " << e.what() << "\n";
    if (verbose) err << "witness: " << e.witness() << "\n";
    return kError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
  err << "usage error: no subcommand\n";
  return kError;
}

}  // namespace scmkit::cli
