#include <doctest.h>

#include <random>

#include "scmkit/analysis.hpp"
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

FiniteIntervention random_iv(std::mt19937_64& rng, const FiniteScm& m, const NodeSet& allowed) {
  FiniteIntervention iv;
  for (const auto& v : m.endogenous) {
    if (!allowed.count(v.name) || !std::bernoulli_distribution(0.5)(rng)) continue;
    iv[v.name] = v.domain.values[std::uniform_int_distribution<std::size_t>(0, v.domain.size() - 1)(rng)];
  }
  return iv;
}

std::vector<std::string> names(const FiniteScm& m) {
  std::vector<std::string> out;
  for (const auto& v : m.endogenous) out.push_back(v.name);
  return out;
}

// A random subset of endogenous names with the given inclusion chance.
NodeSet random_subset(std::mt19937_64& rng, const FiniteScm& m, double p) {
  NodeSet out;
  for (const auto& v : m.endogenous)
    if (std::bernoulli_distribution(p)(rng)) out.insert(v.name);
  return out;
}

bool same_tables(const FiniteScm& a, const FiniteScm& b) {
  if (a.num_endo() != b.num_endo()) return false;
  for (std::size_t k = 0; k < a.num_endo(); ++k)
    if (a.mechanisms[k].args != b.mechanisms[k].args || a.mechanisms[k].table != b.mechanisms[k].table) return false;
  return true;
}

}  // namespace

TEST_SUITE("transform") {

TEST_CASE("intervene") {
  auto m = corpus_finite("ie_m.scm");
  CHECK(same_tables(intervene(m, {}), m));
  auto d = intervene(m, {{"X1", Atom{std::int64_t{1}}}});
  CHECK(d.mechanisms[0].args.empty());
  CHECK(d.mechanisms[0].table == std::vector<std::uint32_t>{1});
  CHECK(d.mechanisms[1].table == m.mechanisms[1].table);
  CHECK(d.exogenous[0].probs == m.exogenous[0].probs);
  CHECK_THROWS_AS(intervene(m, {{"X1", Atom{std::int64_t{5}}}}), InvalidArgument);
  CHECK_THROWS_AS(intervene(m, {{"Q", Atom{std::int64_t{1}}}}), UnknownName);

  auto lin = corpus_linear("interventions.scm");
  auto l3 = intervene(lin, {{"X3", 1.0}});
  CHECK(l3.B.row(2).isZero());
  CHECK(l3.Gamma.row(2).isZero());
  CHECK(l3.c(2) == 1.0);
  CHECK_FALSE(solvable_wrt(l3, {"X1", "X2", "X3"}).holds);
}

TEST_CASE("intervention commutes with the augmented graph and with itself") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 200; ++t) {
    auto m = testing::random_finite(rng);
    auto nm = names(m);
    auto all = NodeSet(nm.begin(), nm.end());
    auto iv = random_iv(rng, m, all);
    NodeSet targets;
    for (const auto& [k, v] : iv) targets.insert(k);
    CHECK(augmented_graph(intervene(m, iv)) == intervene_graph(augmented_graph(m), targets));

    NodeSet rest;
    for (const auto& n : all)
      if (!targets.count(n)) rest.insert(n);
    auto iv2 = random_iv(rng, m, rest);
    CHECK(same_tables(intervene(intervene(m, iv), iv2), intervene(intervene(m, iv2), iv)));
    if (is_acyclic(augmented_graph(m))) CHECK(is_acyclic(augmented_graph(intervene(m, iv))));
  }
}

TEST_CASE("twin") {
  auto single = dsl::parse_finite("model finite\nvar X : {0, 1}\nnoise E : {0, 1} ~ {0: 1/2, 1: 1/2}\neq X = E\n");
  auto t1 = twin(single);
  CHECK(t1.num_endo() == 2);
  CHECK(t1.endogenous[1].name == "X'");
  CHECK(t1.num_exo() == 1);
  CHECK(augmented_graph(t1).directed_edges() == std::vector<std::pair<std::string, std::string>>{{"E", "X"}, {"E", "X'"}});

  auto m = corpus_finite("ie_m.scm");
  auto t = twin(m);
  CHECK(t.num_endo() == 4);
  CHECK(t.num_exo() == 2);
  auto ga = augmented_graph(t);
  CHECK(ga.has_directed("X1'", "X2'"));
  CHECK(ga.has_directed("E2", "X2'"));
  CHECK_FALSE(ga.has_directed("X1", "X2'"));

  auto clash = dsl::parse_finite("model finite\nvar X : {0, 1}\nvar X' : {0, 1}\neq X = 0\neq X' = X\n");
  CHECK_THROWS_AS(twin(clash), InvalidArgument);

  // Twin solutions: first copy solves m; on uniquely solvable m they are (x, x).
  std::mt19937_64 rng(5);
  testing::RandomSpec spec;
  spec.max_endo = 3;
  spec.max_values = 2;
  for (int tt = 0; tt < 80; ++tt) {
    auto r = testing::random_finite(rng, spec);
    auto tr = twin(r);
    const std::size_t n = r.num_endo();
    std::vector<std::size_t> all_t(2 * n), all_r(n);
    for (std::size_t i = 0; i < 2 * n; ++i) all_t[i] = i;
    for (std::size_t i = 0; i < n; ++i) all_r[i] = i;
    for (const auto& e : oracle::support_configs(r)) {
      auto sols_t = oracle::fiber(tr, all_t, Config(2 * n, 0), e);
      auto sols_r = oracle::fiber(r, all_r, Config(n, 0), e);
      CHECK(sols_t.size() == sols_r.size() * sols_r.size());
      for (const auto& s : sols_t) {
        Config first(s.begin(), s.begin() + n);
        CHECK(std::find(sols_r.begin(), sols_r.end(), first) != sols_r.end());
      }
    }
  }
}

TEST_CASE("twin of an intervened model") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 100; ++t) {
    auto m = testing::random_finite(rng);
    auto nm = names(m);
    auto all = NodeSet(nm.begin(), nm.end());
    auto iv = random_iv(rng, m, all);
    FiniteIntervention both = iv;
    for (const auto& [k, v] : iv) both[primed(k)] = v;
    CHECK(mechanisms_equivalent(twin(intervene(m, iv)), intervene(twin(m), both)));
  }
}

TEST_CASE("linear marginalization") {
  auto m = corpus_linear("marginalization.scm");
  auto mm = marginalize(m, {"X3", "X4", "X5"});
  REQUIRE(mm.num_endo() == 2);
  Eigen::MatrixXd b(2, 2), g(2, 4);
  b << 0, 0, 1, 0;
  g << 0, 1, 1, 0, 0, 1, 0, 1;
  CHECK((mm.B - b).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((mm.Gamma - g).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(mm.c.isZero());

  auto same = marginalize(m, {});
  CHECK(same.B == m.B);
  auto lp = marginalize(corpus_linear("latent_projection.scm"), {"X3"});
  CHECK(lp.B.cwiseAbs().maxCoeff() < 1e-12);

  auto anm = dsl::parse_linear("model linear\nvar A B\nnoise E : Normal(0, 1)\neq A = 1*B + 1*E\neq B = 1*A\n");
  CHECK_THROWS_AS(marginalize(anm, {"A", "B"}), NotUniquelySolvable);
}

TEST_CASE("finite marginalization") {
  auto nlp = corpus_finite("no_latent_projection.scm");
  auto mm = marginalize(nlp, {"X1", "X2"});
  CHECK(names(mm) == std::vector<std::string>{"X3", "X4"});
  CHECK(augmented_graph(mm).has_directed("X3", "X4"));
  CHECK(oracle::interventionally_equivalent(nlp, mm, {"X3", "X4"}) == std::optional<bool>(true));

  auto loop = corpus_finite("self_loop_free.scm");
  try {
    marginalize(loop, {"X2"});
    FAIL("expected NotUniquelySolvable");
  } catch (const NotUniquelySolvable& e) {
    CHECK_FALSE(e.witness().empty());
  }
  auto chain = corpus_finite("dc_context.scm");
  CHECK(same_tables(marginalize(chain, {}), chain));

  std::mt19937_64 rng(77);
  int checked = 0;
  for (int t = 0; t < 400 && checked < 60; ++t) {
    auto m = testing::random_finite(rng);
    auto l = random_subset(rng, m, 0.4);
    if (l.size() == m.num_endo() || !uniquely_solvable_wrt(m, l).holds) continue;
    auto marg = marginalize(m, l);
    CHECK(validate(marg).ok());
    std::vector<std::string> rest;
    for (const auto& v : marg.endogenous) rest.push_back(v.name);
    auto verdict = oracle::interventionally_equivalent(m, marg, rest);
    if (verdict) {
      CHECK(*verdict);
      ++checked;
    }
  }
  CHECK(checked > 20);
}

TEST_CASE("extend") {
  auto lc = corpus_finite("latent_confounder.scm");
  auto ext = extend(lc);
  CHECK(names(ext) == std::vector<std::string>{"X1", "X2", "E1'"});
  auto ga = augmented_graph(ext);
  CHECK(ga.directed_edges() == std::vector<std::pair<std::string, std::string>>{
                                   {"E1", "E1'"}, {"E1'", "X1"}, {"E1'", "X2"}, {"X1", "X2"}});
  CHECK(functional_graph(ext).bidirected_edges().empty());

  auto single = dsl::parse_finite("model finite\nvar X : {0, 1}\nnoise E : {0, 1} ~ {0: 1/2, 1: 1/2}\neq X = 1\n");
  auto se = augmented_graph(extend(single));
  CHECK(se.directed_edges() == std::vector<std::pair<std::string, std::string>>{{"E", "E'"}});
  CHECK(se.size() == 3);

  auto lin = extend(corpus_linear("latent_confounder_linear.scm"));
  CHECK(lin.endogenous == std::vector<std::string>{"X1", "X2", "E1'"});
  CHECK(functional_graph(lin).bidirected_edges().empty());

  auto clash = dsl::parse_finite("model finite\nvar E' : {0, 1}\nnoise E : {0, 1} ~ {0: 1/2, 1: 1/2}\neq E' = E\n");
  CHECK_THROWS_AS(extend(clash), InvalidArgument);

  std::mt19937_64 rng(31);
  for (int t = 0; t < 150; ++t) {
    auto m = testing::random_finite(rng);
    auto e = extend(m);
    auto names_hat = extended_names(m);
    auto back = marginalize(e, NodeSet(names_hat.begin(), names_hat.end()));
    CHECK(mechanisms_equivalent(back, m));
    CHECK(oracle::mechanisms_equivalent(back, m));
  }
}

}
