#include <doctest.h>

#include <random>

#include "scmkit/analysis.hpp"
#include "scmkit/causal.hpp"
#include "scmkit/dsl.hpp"
#include "scmkit/error.hpp"
#include "scmkit/transform.hpp"
#include "support/corpus.hpp"
#include "support/oracles.hpp"
#include "support/random_scm.hpp"

using namespace scmkit;
using testing::corpus_finite;
using testing::corpus_linear;

namespace {

Atom A(std::int64_t v) { return Atom{v}; }

std::vector<std::string> names(const FiniteScm& m) {
  std::vector<std::string> out;
  for (const auto& v : m.endogenous) out.push_back(v.name);
  return out;
}

NodeSet all_names(const FiniteScm& m) {
  auto n = names(m);
  return NodeSet(n.begin(), n.end());
}

using Edges = std::vector<std::pair<std::string, std::string>>;

}  // namespace

TEST_SUITE("causal") {

TEST_CASE("interventional but not counterfactual equivalence") {
  auto m = corpus_finite("ie_m.scm");
  auto mt = corpus_finite("ie_mtilde.scm");
  NodeSet margin{"X1", "X2"};
  CHECK(observationally_equivalent(m, mt, margin).verdict);
  CHECK(interventionally_equivalent(m, mt, margin).verdict);
  auto cf = counterfactually_equivalent(m, mt, margin);
  CHECK_FALSE(cf.verdict);
  CHECK(cf.witness.contains("intervention"));
  CHECK(to_json(cf)["level"] == "counterfactual");
  CHECK_FALSE(augmented_graph(m) == augmented_graph(mt));
}

TEST_CASE("counterfactual equivalence triple") {
  auto m = corpus_finite("ie_m.scm");
  auto mt = corpus_finite("ie_mtilde.scm");
  auto mh = corpus_finite("ie_mhat.scm");
  NodeSet margin{"X1", "X2"};
  CHECK(interventionally_equivalent(m, mt, margin).verdict);
  CHECK(interventionally_equivalent(m, mh, margin).verdict);
  CHECK(interventionally_equivalent(mt, mh, margin).verdict);
  CHECK_FALSE(counterfactually_equivalent(m, mt, margin).verdict);
  CHECK_FALSE(counterfactually_equivalent(m, mh, margin).verdict);
  CHECK(counterfactually_equivalent(mt, mh, margin).verdict);
  CHECK(counterfactually_equivalent(mh, mh, margin).verdict);
}

TEST_CASE("equivalence on partial margins and errors") {
  auto m = corpus_finite("ie_m.scm");
  auto mt = corpus_finite("ie_mtilde.scm");
  CHECK(counterfactually_equivalent(m, mt, {"X1"}).verdict);
  CHECK(observationally_equivalent(m, mt, {}).verdict);
  CHECK_THROWS_AS(observationally_equivalent(m, mt, {"Q"}), UnknownName);
  CHECK_THROWS_AS(interventionally_equivalent(m, mt, {"X1", "X2"}, 3), CapExceeded);
}

TEST_CASE("observational equivalence with several solutions") {
  auto a = corpus_finite("intervention_unique.scm");
  auto b = corpus_finite("intervention_unique_tilde.scm");
  NodeSet margin{"X1", "X2"};
  CHECK(observationally_equivalent(a, b, margin).verdict);
  auto r = interventionally_equivalent(a, b, margin);
  CHECK_FALSE(r.verdict);
  CHECK(r.witness["intervention"].contains("X2"));
}

TEST_CASE("equivalence ladder against the oracle") {
  std::mt19937_64 rng(404);
  testing::RandomSpec spec;
  spec.max_endo = 3;
  int defined = 0, equal = 0;
  for (int t = 0; t < 300; ++t) {
    auto m = testing::random_finite(rng, spec);
    auto s = (t % 3 == 0) ? canonicalize(m) : testing::random_sibling(rng, m);
    auto margin = all_names(m);
    auto obs = observationally_equivalent(m, s, margin).verdict;
    auto in = interventionally_equivalent(m, s, margin).verdict;
    auto cf = counterfactually_equivalent(m, s, margin).verdict;
    if (cf) CHECK(in);
    if (in) CHECK(obs);
    if (mechanisms_equivalent(m, s)) CHECK(cf);
    auto n = names(m);
    if (auto o = oracle::observationally_equivalent(m, s, n)) {
      ++defined;
      CHECK(*o == obs);
      equal += *o;
    }
    if (auto o = oracle::interventionally_equivalent(m, s, n)) CHECK(*o == in);
  }
  CHECK(defined > 100);
  CHECK(equal > 20);
}

TEST_CASE("direct cause depends on the noise law") {
  auto uniform = corpus_finite("ie_m.scm");
  auto biased = corpus_finite("direct_cause_biased.scm");
  CHECK(augmented_graph(uniform).has_directed("X1", "X2"));
  CHECK_FALSE(is_direct_cause(uniform, "X1", "X2").direct);
  auto dc = is_direct_cause(biased, "X1", "X2");
  CHECK(dc.direct);
  REQUIRE(dc.witness);
  CHECK(dc.witness->first.count("X1"));
  CHECK(dc.witness->first.at("X1") != dc.witness->second.at("X1"));
  CHECK_FALSE(dc.witness->first.count("X2"));
  CHECK_FALSE(is_direct_cause(biased, "X2", "X1").direct);
  CHECK_THROWS_AS(is_direct_cause(biased, "X1", "X1"), InvalidArgument);
  CHECK(direct_causal_graph(uniform).directed_edges().empty());
  CHECK(direct_causal_graph(biased).directed_edges() == Edges{{"X1", "X2"}});
}

TEST_CASE("direct causes lie in the functional graph") {
  std::mt19937_64 rng(505);
  int checked = 0;
  for (int t = 0; t < 300 && checked < 80; ++t) {
    auto m = testing::random_finite(rng);
    if (!uniquely_solvable_all_subsets(m).holds) continue;
    auto g = direct_causal_graph(m);
    auto f = functional_graph(m);
    for (const auto& [a, b] : g.directed_edges()) CHECK(f.has_directed(a, b));
    CHECK(g.bidirected_edges().empty());
    ++checked;
  }
  CHECK(checked > 40);
}

TEST_CASE("direct causal graph with respect to a context") {
  auto m = corpus_finite("dc_context.scm");
  CHECK(direct_causal_graph(m).directed_edges() == Edges{{"X1", "X2"}, {"X2", "X3"}});
  auto ctx = direct_causal_graph_wrt(m, {"X1", "X3"});
  CHECK(ctx.nodes() == std::vector<std::string>{"X1", "X3"});
  CHECK(ctx.directed_edges() == Edges{{"X1", "X3"}});
  CHECK(is_indirect_cause(m, "X1", "X3"));
  CHECK_FALSE(is_indirect_cause(m, "X3", "X1"));
}

TEST_CASE("spurious causal relations after marginalization") {
  auto m = corpus_finite("spurious.scm");
  auto g = direct_causal_graph(m);
  CHECK(g.directed_edges() ==
        Edges{{"X1", "X2"}, {"X2", "X1"}, {"X3", "X2"}, {"X5", "X2"}, {"X5", "X4"}, {"X5", "X6"}, {"X6", "X5"}});
  CHECK(direct_causal_graph_wrt(m, {"X3", "X4"}).directed_edges() == Edges{{"X3", "X4"}});
  CHECK(is_indirect_cause(m, "X3", "X4"));
  auto projected = latent_projection(g, {"X1", "X2", "X5", "X6"});
  CHECK_FALSE(projected.has_directed("X3", "X4"));
  CHECK_FALSE(relatives(g, {"X3"}, Relation::descendants).count("X4"));
}

TEST_CASE("direct causal graph does not follow marginalization") {
  auto m = corpus_finite("causal_graph_not_marginal.scm");
  auto g = direct_causal_graph(m);
  CHECK(g.directed_edges() == Edges{{"X2", "X3"}});
  CHECK(direct_causal_graph_wrt(m, {"X1", "X3"}).directed_edges() == Edges{{"X1", "X3"}});
  CHECK_FALSE(latent_projection(g, {"X2"}).has_directed("X1", "X3"));
}

TEST_CASE("linear causal queries") {
  auto anm = corpus_linear("anm.scm");
  auto tilde = corpus_linear("anm_tilde.scm");
  NodeSet margin{"X1", "X2"};
  CHECK(observationally_equivalent(anm, tilde, margin).verdict);
  auto in = interventionally_equivalent(anm, tilde, margin);
  CHECK_FALSE(in.verdict);
  bool x2_alone = false;
  for (const auto& f : in.witness["failing"])
    x2_alone = x2_alone || f["targets"] == nlohmann::json::array({"X2"});
  CHECK(x2_alone);
  CHECK_FALSE(counterfactually_equivalent(anm, tilde, margin).verdict);
  CHECK(counterfactually_equivalent(anm, anm, margin).verdict);

  CHECK(is_direct_cause(anm, "X1", "X2"));
  CHECK(is_direct_cause(anm, "X2", "X1"));
  CHECK_FALSE(is_direct_cause(tilde, "X2", "X1"));
  CHECK(direct_causal_graph(tilde).directed_edges() == Edges{{"X1", "X2"}});

  auto marg = corpus_linear("marginalization.scm");
  auto ctx = direct_causal_graph_wrt(marg, {"X1", "X2"});
  CHECK(ctx.directed_edges() == Edges{{"X1", "X2"}});
  CHECK(ctx.bidirected_edges().empty());
  CHECK(is_indirect_cause(marg, "X1", "X4"));
  CHECK_FALSE(is_indirect_cause(marg, "X4", "X1"));
}

TEST_CASE("report serialization") {
  auto m = corpus_finite("ie_m.scm");
  auto r = interventionally_equivalent(m, m, {"X1"});
  auto j = to_json(r);
  CHECK(j["level"] == "interventional");
  CHECK(j["verdict"] == true);
  CHECK(j["witness"].is_null());
  CHECK(j["margin"] == nlohmann::json::array({"X1"}));
}

}
