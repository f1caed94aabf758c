#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "scmkit/analysis.hpp"
#include "scmkit/causal.hpp"
#include "scmkit/cli.hpp"
#include "scmkit/dsl.hpp"
#include "scmkit/markov.hpp"
#include "scmkit/transform.hpp"
#include "support/corpus.hpp"

using namespace scmkit;
using testing::corpus_path;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string tmp(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "scmkit_cli_test";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

std::string C(const char* file) { return corpus_path(file); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("solvability before and after intervention") {
  auto r = run({"check", C("interventions.scm"), "--solvable", "X1,X2,X3"});
  CHECK(r.code == 0);
  auto out = tmp("do_x3.scm");
  CHECK(run({"intervene", C("interventions.scm"), "--set", "X3=1", "-o", out}).code == 0);
  CHECK(run({"check", out, "--solvable", "X1,X2,X3"}).code == 1);
  auto out2 = tmp("do_x3_x2.scm");
  CHECK(run({"intervene", out, "--set", "X2=1", "-o", out2}).code == 0);
  CHECK(run({"check", out2, "--unique", "X1,X2,X3"}).code == 0);
  CHECK(slurp(out) == dsl::serialize(intervene(testing::corpus_linear("interventions.scm"), {{"X3", 1.0}})));
}

TEST_CASE("separation on a graph file") {
  auto d = run({"sep", C("cycle4.json"), "--a", "X1", "--b", "X3", "--given", "X2,X4", "--kind", "d"});
  CHECK(d.code == 0);
  auto s = run({"sep", "--graph", C("cycle4.json"), "--a", "X1", "--b", "X3", "--given", "X2,X4", "--kind", "sigma"});
  CHECK(s.code == 1);
  auto fm = run({"sep", C("cycle4.scm"), "--a", "X1", "--b", "X3", "--given", "X2,X4", "--kind", "sigma"});
  CHECK(fm.code == 1);
}

TEST_CASE("marginalize then parse") {
  auto out = tmp("marg.scm");
  CHECK(run({"marginalize", C("marginalization.scm"), "--over", "X3,X4,X5", "-o", out}).code == 0);
  auto p = run({"parse", out});
  CHECK(p.code == 0);
  CHECK(p.out.find("eq X2 = 1*X1 + 1*E2 + 1*E4") != std::string::npos);
  CHECK(p.out == dsl::serialize(marginalize(testing::corpus_linear("marginalization.scm"), {"X3", "X4", "X5"})));
}

TEST_CASE("subcommands match the library") {
  auto m = testing::corpus_finite("augmented_graphs.scm");
  auto g = run({"graph", C("augmented_graphs.scm"), "--kind", "augmented", "--format", "json"});
  CHECK(nlohmann::json::parse(g.out) == to_json(augmented_graph(m)));
  auto f = run({"graph", C("augmented_graphs.scm"), "--kind", "functional"});
  CHECK(f.out == to_dot(functional_graph(m)));

  auto sp = testing::corpus_finite("spurious.scm");
  auto ctx = run({"graph", C("spurious.scm"), "--kind", "causal", "--context", "X3,X4", "--format", "json"});
  CHECK(nlohmann::json::parse(ctx.out) == to_json(direct_causal_graph_wrt(sp, {"X3", "X4"})));

  auto ie = testing::corpus_finite("ie_m.scm");
  CHECK(run({"twin", C("ie_m.scm")}).out == dsl::serialize(twin(ie)));
  CHECK(run({"extend", C("ie_m.scm")}).out == dsl::serialize(extend(ie)));
  CHECK(run({"parse", C("ie_m.scm")}).out == dsl::serialize(ie));

  auto biased = testing::corpus_finite("direct_cause_biased.scm");
  auto d = run({"dist", C("direct_cause_biased.scm"), "--do", "X1=1", "--format", "json"});
  CHECK(nlohmann::json::parse(d.out) == to_json(interventional_distribution(biased, {{"X1", Atom{std::int64_t{1}}}})));
  auto o = run({"dist", C("anm.scm")});
  CHECK(o.out == to_text(observational_distribution(testing::corpus_linear("anm.scm"))));

  auto cf = run({"counterfactual", C("ie_m.scm"), "--factual-do", "X1=-1", "--observe", "X2=1", "--cf-do", "X1'=1",
                 "--query", "X2'", "--format", "json"});
  CHECK(cf.code == 0);
  CHECK(nlohmann::json::parse(cf.out) ==
        to_json(counterfactual_distribution(ie, {{"X1", Atom{std::int64_t{-1}}}}, {{"X2", Atom{std::int64_t{1}}}},
                                            {{"X1'", Atom{std::int64_t{1}}}}, {"X2'"})));

  auto mk = run({"markov", C("cycle4.scm"), "--kind", "sigma", "--format", "json"});
  CHECK(mk.code == 0);
  CHECK(nlohmann::json::parse(mk.out) == to_json(verify_markov(testing::corpus_finite("cycle4.scm"), SeparationKind::sigma, 2)));

  auto poly = run({"polytope", C("intervention_unique.scm"), "--format", "json"});
  CHECK(poly.code == 0);
  CHECK(nlohmann::json::parse(poly.out)["vertices"].size() == 1);
}

TEST_CASE("equivalence exit codes") {
  auto a = C("ie_m.scm"), b = C("ie_mtilde.scm"), h = C("ie_mhat.scm");
  CHECK(run({"equiv", a, b, "--level", "obs"}).code == 0);
  CHECK(run({"equiv", a, b, "--level", "int"}).code == 0);
  auto cf = run({"equiv", a, b, "--level", "cf"});
  CHECK(cf.code == 1);
  CHECK(nlohmann::json::parse(cf.out) ==
        to_json(counterfactually_equivalent(testing::corpus_finite("ie_m.scm"), testing::corpus_finite("ie_mtilde.scm"),
                                            {"X1", "X2"})));
  CHECK(run({"equiv", b, h, "--level", "cf"}).code == 0);
  CHECK(run({"equiv", a, b, "--level", "cf", "--wrt", "X1"}).code == 0);
  CHECK(run({"equiv", C("anm.scm"), C("anm_tilde.scm"), "--level", "int"}).code == 1);
  CHECK(run({"equiv", a, C("anm.scm"), "--level", "obs"}).code == 2);
}

TEST_CASE("checks") {
  CHECK(run({"check", C("unsolvable_self_loop.scm"), "--structural"}).code == 1);
  CHECK(run({"check", C("self_loop_copy.scm"), "--structural"}).code == 0);
  CHECK(run({"check", C("solvability_union.scm"), "--solvable", "X1,X2"}).code == 0);
  CHECK(run({"check", C("solvability_union.scm"), "--solvable", "X1,X2,X3"}).code == 1);
  CHECK(run({"check", C("interventions.scm"), "--all-subsets"}).code == 1);
}

TEST_CASE("errors and usage") {
  CHECK(run({}).code == 2);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"parse", "/nonexistent/file.scm"}).code == 2);
  auto bad = run({"intervene", C("ie_m.scm"), "--set", "X1"});
  CHECK(bad.code == 2);
  CHECK_FALSE(bad.err.empty());
  CHECK(run({"check", C("ie_m.scm"), "--solvable", "Q"}).code == 2);
  CHECK(run({"graph", C("ie_m.scm"), "--kind", "nonsense"}).code == 2);
  CHECK(run({"dist", C("intervention_unique.scm"), "--do", "X2=2"}).code == 2);
  auto v = run({"--verbose", "marginalize", C("self_loop_free.scm"), "--over", "X2"});
  CHECK(v.code == 2);
  auto q = run({"marginalize", C("self_loop_free.scm"), "--over", "X2"});
  CHECK(v.err.size() > q.err.size());
  auto t = tmp("bad.scm");
  std::ofstream(t) << "model finite\nvar X : {0, 1}\neq X = Y\n";
  auto p = run({"parse", t});
  CHECK(p.code == 2);
  CHECK(p.err.find("3:8") != std::string::npos);
}

}
