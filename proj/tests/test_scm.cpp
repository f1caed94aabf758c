#include <doctest.h>

#include <random>

#include "scmkit/analysis.hpp"
#include "scmkit/dsl.hpp"
#include "scmkit/error.hpp"
#include "scmkit/json_io.hpp"
#include "scmkit/scm.hpp"
#include "support/corpus.hpp"
#include "support/oracles.hpp"
#include "support/random_scm.hpp"

using namespace scmkit;
using testing::corpus_finite;
using testing::corpus_linear;

namespace {

std::set<std::string> parent_names(const FiniteScm& m, std::size_t k) {
  std::set<std::string> out;
  for (auto v : functional_parents(m, k)) out.insert(m.name(v));
  return out;
}

std::set<std::string> parent_names(const LinearScm& m, std::size_t k) {
  std::set<std::string> out;
  for (auto v : functional_parents(m, k)) out.insert(v.endo() ? m.endogenous[v.index] : m.blocks[v.index].name);
  return out;
}

const char* kSelfLoopLinear = R"(model linear
var X Y
noise E : Normal(0, 1)
eq X = 1*X + 1*Y + 1*E
eq Y = 1*E
)";

}  // namespace

TEST_SUITE("scm") {

TEST_CASE("validate") {
  auto ok = dsl::parse_finite("model finite\nvar X : {0, 1}\nnoise E : {0, 1} ~ {0: 1/2, 1: 1/2}\neq X = E\n");
  CHECK(validate(ok).ok());
  auto bad = ok;
  bad.exogenous[0].probs = {Rational(1, 4), Rational(1, 2)};
  auto r = validate(bad);
  REQUIRE_FALSE(r.ok());
  CHECK(r.violations[0].find("not normalized") != std::string::npos);
  CHECK_THROWS_AS(require_valid(bad), InvalidArgument);

  auto lin = corpus_linear("anm.scm");
  CHECK(validate(lin).ok());
  lin.Gamma.conservativeResize(2, 3);
  auto lr = validate(lin);
  REQUIRE_FALSE(lr.ok());
  CHECK(lr.violations[0].find("shape") != std::string::npos);

  auto tab = ok;
  tab.mechanisms[0].table.pop_back();
  CHECK_FALSE(validate(tab).ok());
  auto codomain = ok;
  codomain.mechanisms[0].table[0] = 7;
  CHECK_FALSE(validate(codomain).ok());
}

TEST_CASE("mechanisms_equivalent on the support") {
  auto sq = corpus_finite("mech_equiv_sq.scm");
  auto id = corpus_finite("mech_equiv_id.scm");
  CHECK(mechanisms_equivalent(sq, id));
  CHECK(mechanisms_equivalent(id, id));
  auto sq_u = sq, id_u = id;
  for (auto* m : {&sq_u, &id_u}) m->exogenous[0].probs = {Rational(1, 3), Rational(1, 3), Rational(1, 3)};
  CHECK_FALSE(mechanisms_equivalent(sq_u, id_u));
  CHECK(oracle::mechanisms_equivalent(sq, id));
  CHECK_FALSE(oracle::mechanisms_equivalent(sq_u, id_u));
  auto other = sq;
  other.exogenous[0].probs = {Rational(1, 4), Rational(1, 4), Rational(1, 2)};
  CHECK_THROWS_AS(mechanisms_equivalent(sq, other), InvalidArgument);

  std::mt19937_64 rng(21);
  testing::RandomSpec spec;
  spec.max_endo = 3;
  spec.max_values = 2;
  for (int t = 0; t < 200; ++t) {
    auto a = testing::random_finite(rng, spec);
    auto b = testing::random_sibling(rng, a, spec);
    CHECK(mechanisms_equivalent(a, b) == oracle::mechanisms_equivalent(a, b));
  }
}

TEST_CASE("functional parents") {
  auto only_noise = dsl::parse_finite(
      "model finite\nvar X : {0, 1}\nvar Y : {0, 1}\nnoise E1 : {0, 1} ~ {0: 1/2, 1: 1/2}\neq X = E1\neq Y = 0*X + E1\n");
  CHECK(parent_names(only_noise, 0) == std::set<std::string>{"E1"});
  CHECK(parent_names(only_noise, 1) == std::set<std::string>{"E1"});

  auto fig = corpus_finite("augmented_graphs.scm");
  CHECK(parent_names(fig, 3) == std::set<std::string>{"X2", "X4", "E3"});
  CHECK(parent_names(fig, 2) == std::set<std::string>{"X1", "X2", "X5"});
  CHECK(parent_names(fig, 4) == std::set<std::string>{"X3", "X4"});

  auto lin = dsl::parse_linear(kSelfLoopLinear);
  CHECK(parent_names(lin, 0) == std::set<std::string>{"X", "Y", "E"});
  // Finite analogue of x = x + e: the relation is [e = 0], which no x-free mechanism reproduces.
  auto shift = dsl::parse_finite(
      "model finite\nvar X : {0, 1}\nnoise E : {0, 1} ~ {0: 1/2, 1: 1/2}\neq X = if(E == 0, X, 1 - X)\n");
  CHECK(parent_names(shift, 0) == std::set<std::string>{"X", "E"});
  CHECK(oracle::parents(shift, 0) == std::set<VarRef>{endo_ref(0), exo_ref(0)});

  auto not_canon = corpus_linear("not_canonical.scm");
  CHECK(parent_names(not_canon, 0) == std::set<std::string>{"E1", "E2"});
  CHECK_THROWS(functional_parents(fig, 9));
}

TEST_CASE("functional parents against the replacement-search oracle") {
  std::mt19937_64 rng(99);
  testing::RandomSpec spec;
  spec.max_endo = 3;
  spec.self_arg = 0.4;
  for (int t = 0; t < 150; ++t) {
    auto m = testing::random_finite(rng, spec);
    for (std::size_t k = 0; k < m.num_endo(); ++k) {
      auto got = functional_parents(m, k);
      CHECK(std::set<VarRef>(got.begin(), got.end()) == oracle::parents(m, k));
    }
  }
}

TEST_CASE("augmented and functional graphs") {
  auto fig = corpus_finite("augmented_graphs.scm");
  auto ga = augmented_graph(fig);
  std::vector<std::pair<std::string, std::string>> expect = {
      {"E1", "X1"}, {"E2", "X1"}, {"E2", "X2"}, {"E3", "X4"}, {"X1", "X3"}, {"X2", "X3"},
      {"X2", "X4"}, {"X3", "X5"}, {"X4", "X4"}, {"X4", "X5"}, {"X5", "X3"}};
  CHECK(ga.directed_edges() == expect);
  CHECK(ga.bidirected_edges().empty());
  auto g = functional_graph(fig);
  CHECK(g.bidirected_edges() == std::vector<std::pair<std::string, std::string>>{{"X1", "X2"}});
  CHECK(g.has_directed("X4", "X4"));
  CHECK(g.size() == 5);

  auto constant = dsl::parse_finite("model finite\nvar X : {0, 1}\nnoise E : {0, 1} ~ {0: 1/2, 1: 1/2}\neq X = 1\n");
  CHECK(augmented_graph(constant).directed_edges().empty());
  CHECK(augmented_graph(constant).size() == 2);

  auto iv = augmented_graph(corpus_linear("interventions.scm"));
  CHECK(iv.directed_edges() == std::vector<std::pair<std::string, std::string>>{
                                   {"E1", "X1"}, {"E2", "X2"}, {"E3", "X3"}, {"X1", "X2"},
                                   {"X1", "X3"}, {"X2", "X1"}, {"X3", "X2"}});

  auto single = dsl::parse_finite("model finite\nvar X : {0, 1}\nnoise E : {0, 1} ~ {0: 1/2, 1: 1/2}\neq X = E\n");
  CHECK(functional_graph(single).directed_edges().empty());

  for (auto* name : {"latent_confounder.scm", "latent_confounder_linear.scm"}) {
    auto m = dsl::parse(testing::corpus_text(name));
    auto fg = std::visit([](const auto& x) { return functional_graph(x); }, m);
    CHECK(fg.directed_edges() == std::vector<std::pair<std::string, std::string>>{{"X1", "X2"}});
    CHECK(fg.bidirected_edges() == std::vector<std::pair<std::string, std::string>>{{"X1", "X2"}});
  }
}

TEST_CASE("graph invariants on random models") {
  std::mt19937_64 rng(1234);
  for (int t = 0; t < 150; ++t) {
    auto m = testing::random_finite(rng);
    auto ga = augmented_graph(m);
    auto g = functional_graph(m);
    for (const auto& [a, b] : ga.directed_edges()) CHECK(m.find(b)->endo());
    NodeSet endo;
    for (const auto& v : m.endogenous) endo.insert(v.name);
    CHECK(induced_subgraph(ga, endo).directed_edges() == g.directed_edges());
    auto c = canonicalize(m);
    CHECK(augmented_graph(c) == ga);
  }
}

TEST_CASE("canonicalize") {
  auto nc = canonicalize(corpus_linear("not_canonical.scm"));
  CHECK(nc.B(0, 0) == doctest::Approx(0.0));
  CHECK(nc.Gamma(0, 0) == doctest::Approx(0.5));
  CHECK(nc.Gamma(0, 1) == doctest::Approx(0.5));

  auto lin = dsl::parse_linear(kSelfLoopLinear);
  auto lc = canonicalize(lin);
  CHECK(lc.B(0, 0) == doctest::Approx(1.0));
  CHECK_FALSE(uniquely_solvable_wrt(lin, {"X"}).holds);
  CHECK(uniquely_solvable_wrt(lin, {"Y"}).holds);

  auto chain = corpus_finite("dc_context.scm");
  auto cc = canonicalize(chain);
  CHECK(cc.mechanisms[1].args == chain.mechanisms[1].args);
  CHECK(cc.mechanisms[1].table == chain.mechanisms[1].table);

  std::mt19937_64 rng(42);
  for (int t = 0; t < 200; ++t) {
    auto m = testing::random_finite(rng);
    auto c = canonicalize(m);
    CHECK(validate(c).ok());
    CHECK(oracle::mechanisms_equivalent(m, c));
    CHECK(mechanisms_equivalent(c, canonicalize(c)));
    for (std::size_t k = 0; k < m.num_endo(); ++k) CHECK(c.mechanisms[k].args == functional_parents(m, k));
  }
}

TEST_CASE("linear self-loop iff B_kk = 1 iff not uniquely solvable at k") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> coef(-2, 2);
  for (int t = 0; t < 100; ++t) {
    LinearScm m = make_linear({"A", "B", "C"}, {GaussianBlock{"E", Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Ones(1, 1)}});
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) m.B(i, j) = coef(rng) / 2.0;
      m.Gamma(i, 0) = 1;
    }
    auto c = canonicalize(m);
    for (std::size_t k = 0; k < 3; ++k) {
      const bool loop = augmented_graph(m).has_directed(m.endogenous[k], m.endogenous[k]);
      CHECK(loop == (std::abs(c.B(k, k) - 1) < 1e-12));
      CHECK(loop == !uniquely_solvable_wrt(m, {m.endogenous[k]}).holds);
    }
  }
}

TEST_CASE("model JSON export") {
  auto j = to_json(corpus_finite("direct_cause_biased.scm"));
  CHECK(j["exogenous"][1]["probs"] == nlohmann::json({"1/3", "2/3"}));
  CHECK(j["endogenous"][0]["domain"] == nlohmann::json({-1, 1}));
  auto l = to_json(corpus_linear("anm.scm"));
  CHECK(l["B"][0][1].get<double>() == doctest::Approx(0.5));
}

}
