#include "scmkit/causal.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "exact_lp.hpp"
#include "fiber.hpp"
#include "finite_util.hpp"
#include "linear_util.hpp"
#include "scmkit/error.hpp"
#include "scmkit/tolerance.hpp"
#include "scmkit/transform.hpp"

namespace scmkit {

std::string to_string(EquivalenceLevel level) {
  switch (level) {
    case EquivalenceLevel::observational:
      return "observational";
    case EquivalenceLevel::interventional:
      return "interventional";
    case EquivalenceLevel::counterfactual:
      return "counterfactual";
  }
  return {};
}

nlohmann::json to_json(const EquivalenceReport& r) {
  nlohmann::json j;
  j["level"] = to_string(r.level);
  j["margin"] = std::vector<std::string>(r.margin.begin(), r.margin.end());
  j["verdict"] = r.verdict;
  j["witness"] = r.witness;
  return j;
}

namespace {

NodeSet primed_margin(const NodeSet& margin) {
  NodeSet out = margin;
  for (const auto& n : margin) out.insert(primed(n));
  return out;
}

// Margin variables in model order, after checking both models agree on them.
std::vector<std::string> margin_order(const FiniteScm& m1, const FiniteScm& m2, const NodeSet& margin) {
  std::vector<std::string> out;
  for (const auto& v : m1.endogenous)
    if (margin.count(v.name)) out.push_back(v.name);
  for (const auto& n : margin) {
    const auto& d1 = m1.endogenous[m1.endo_index(n)].domain;
    const auto& d2 = m2.endogenous[m2.endo_index(n)].domain;
    if (!(d1 == d2)) throw InvalidArgument("domain mismatch on " + n);
  }
  return out;
}

// Achievable margin distributions: one point when uniquely solvable, the
// projected selector vertices otherwise, none when unsolvable.
std::vector<DiscreteDistribution> achievable(const FiniteScm& m, const std::vector<std::string>& o) {
  std::vector<DiscreteDistribution> out;
  try {
    out.push_back(observational_distribution(m).marginal(o));
    return out;
  } catch (const NotUniquelySolvable&) {
  }
  SelectorPolytope poly;
  try {
    poly = observational_polytope(m);
  } catch (const NotSolvable&) {
    return out;
  }
  for (const auto& v : poly.vertices) {
    auto d = v.marginal(o);
    if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(std::move(d));
  }
  return out;
}

// Index of the first member of `inner` outside the hull of `outer`, or -1.
long first_outside(const std::vector<DiscreteDistribution>& inner,
                   const std::vector<DiscreteDistribution>& outer) {
  std::set<Config> cells;
  for (const auto* group : {&inner, &outer})
    for (const auto& d : *group)
      for (const auto& [c, q] : d.probs)
        if (q != 0) cells.insert(c);
  auto vec = [&](const DiscreteDistribution& d) {
    std::vector<Rational> v;
    for (const auto& c : cells) v.push_back(d.probability(c));
    return v;
  };
  std::vector<std::vector<Rational>> pts;
  for (const auto& d : outer) pts.push_back(vec(d));
  for (std::size_t i = 0; i < inner.size(); ++i)
    if (!detail::in_convex_hull(pts, vec(inner[i]))) return static_cast<long>(i);
  return -1;
}

nlohmann::json obs_difference(const FiniteScm& m1, const FiniteScm& m2, const NodeSet& margin) {
  auto o = margin_order(m1, m2, margin);
  auto a = achievable(m1, o), b = achievable(m2, o);
  if (a.empty() && b.empty()) return nullptr;
  if (a.empty() || b.empty()) {
    return {{"reason", std::string("model ") + (a.empty() ? "1" : "2") +
                           " has no solution while the other has"}};
  }
  if (long i = first_outside(a, b); i >= 0)
    return {{"reason", "distribution of model 1 not achievable by model 2"},
            {"distribution", to_json(a[static_cast<std::size_t>(i)])}};
  if (long i = first_outside(b, a); i >= 0)
    return {{"reason", "distribution of model 2 not achievable by model 1"},
            {"distribution", to_json(b[static_cast<std::size_t>(i)])}};
  return nullptr;
}

}  // namespace

EquivalenceReport observationally_equivalent(const FiniteScm& m1, const FiniteScm& m2,
                                             const NodeSet& margin) {
  EquivalenceReport r{EquivalenceLevel::observational, margin, true, nullptr};
  r.witness = obs_difference(m1, m2, margin);
  r.verdict = r.witness.is_null();
  return r;
}

EquivalenceReport interventionally_equivalent(const FiniteScm& m1, const FiniteScm& m2,
                                              const NodeSet& margin, std::size_t cap) {
  EquivalenceReport r{EquivalenceLevel::interventional, margin, true, nullptr};
  auto o = margin_order(m1, m2, margin);
  std::size_t evaluations = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << o.size()); ++mask) {
    std::vector<std::size_t> targets;
    std::vector<std::vector<std::uint32_t>> choices;
    for (std::size_t i = 0; i < o.size(); ++i)
      if (mask & (std::uint64_t{1} << i)) {
        targets.push_back(m1.endo_index(o[i]));
        choices.push_back(choices_of(m1, endo_ref(targets.back()), false));
      }
    for (Product p(choices); !p.done(); p.next()) {
      if (++evaluations > cap)
        throw CapExceeded("interventional equivalence exceeds " + std::to_string(cap) +
                          " intervened-model evaluations");
      FiniteIntervention iv;
      for (std::size_t t = 0; t < targets.size(); ++t)
        iv[m1.endogenous[targets[t]].name] = m1.endogenous[targets[t]].domain.values[p.values()[t]];
      auto diff = obs_difference(intervene(m1, iv), intervene(m2, iv), margin);
      if (!diff.is_null()) {
        nlohmann::json ivj = nlohmann::json::object();
        for (const auto& [n, a] : iv) ivj[n] = atom_to_string(a);
        r.verdict = false;
        r.witness = {{"intervention", ivj}, {"difference", diff}};
        return r;
      }
    }
  }
  return r;
}

EquivalenceReport counterfactually_equivalent(const FiniteScm& m1, const FiniteScm& m2,
                                              const NodeSet& margin, std::size_t cap) {
  EquivalenceReport r = interventionally_equivalent(twin(m1), twin(m2), primed_margin(margin), cap);
  r.level = EquivalenceLevel::counterfactual;
  r.margin = margin;
  return r;
}

namespace {

bool close(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  if (a.size() == 0) return true;
  double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  return (a - b).cwiseAbs().maxCoeff() <= tolerance() * scale;
}

std::vector<std::string> linear_margin(const LinearScm& m1, const LinearScm& m2, const NodeSet& margin) {
  std::vector<std::string> out;
  for (const auto& n : m1.endogenous)
    if (margin.count(n)) out.push_back(n);
  for (const auto& n : margin) m2.endo_index(n);
  return out;
}

GaussianDistribution solvable_law(const LinearScm& m) {
  try {
    return observational_distribution(m);
  } catch (const NotUniquelySolvable&) {
    throw Unsupported("linear equivalence requires uniquely solvable models");
  }
}

// Margin law under do(targets = xi) as an affine function of xi.
struct AffineLaw {
  Eigen::VectorXd offset;
  Eigen::MatrixXd slope;
  Eigen::MatrixXd cov;
};

AffineLaw affine_law(const LinearScm& m, const std::vector<std::string>& targets,
                     const std::vector<std::string>& margin) {
  LinearIntervention iv;
  for (const auto& t : targets) iv[t] = 0.0;
  LinearScm mi = intervene(m, iv);
  const auto n = static_cast<Eigen::Index>(m.num_endo());
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - mi.B;
  if (detail::numeric_rank(a) < n)
    throw Unsupported("linear equivalence requires uniquely solvable intervened models");
  auto lu = a.fullPivLu();
  Eigen::MatrixXd t = lu.inverse();
  std::vector<Eigen::Index> o, iv_idx;
  for (const auto& v : margin) o.push_back(static_cast<Eigen::Index>(m.endo_index(v)));
  for (const auto& v : targets) iv_idx.push_back(static_cast<Eigen::Index>(m.endo_index(v)));
  Eigen::MatrixXd tg = t * mi.Gamma;
  AffineLaw law;
  law.offset = (t * (mi.Gamma * m.exo_mean() + mi.c))(o);
  law.slope = t(o, iv_idx);
  law.cov = (tg * m.exo_cov() * tg.transpose())(o, o);
  return law;
}

}  // namespace

EquivalenceReport observationally_equivalent(const LinearScm& m1, const LinearScm& m2,
                                             const NodeSet& margin) {
  EquivalenceReport r{EquivalenceLevel::observational, margin, true, nullptr};
  auto o = linear_margin(m1, m2, margin);
  auto a = solvable_law(m1).marginal(o), b = solvable_law(m2).marginal(o);
  if (!close(a.mean, b.mean) || !close(a.cov, b.cov)) {
    r.verdict = false;
    r.witness = {{"reason", "margin Gaussians differ"}, {"model1", to_json(a)}, {"model2", to_json(b)}};
  }
  return r;
}

EquivalenceReport interventionally_equivalent(const LinearScm& m1, const LinearScm& m2,
                                              const NodeSet& margin) {
  EquivalenceReport r{EquivalenceLevel::interventional, margin, true, nullptr};
  auto o = linear_margin(m1, m2, margin);
  nlohmann::json failing = nlohmann::json::array();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << o.size()); ++mask) {
    std::vector<std::string> targets;
    for (std::size_t i = 0; i < o.size(); ++i)
      if (mask & (std::uint64_t{1} << i)) targets.push_back(o[i]);
    AffineLaw a = affine_law(m1, targets, o), b = affine_law(m2, targets, o);
    std::vector<std::string> parts;
    if (!close(a.offset, b.offset)) parts.push_back("mean offset");
    if (!close(a.slope, b.slope)) parts.push_back("mean slope in the intervention values");
    if (!close(a.cov, b.cov)) parts.push_back("covariance");
    if (!parts.empty()) failing.push_back({{"targets", targets}, {"differs_in", parts}});
  }
  if (!failing.empty()) {
    r.verdict = false;
    r.witness = {{"intervention", failing[0]["targets"]}, {"differs_in", failing[0]["differs_in"]},
                 {"failing", failing}};
  }
  return r;
}

EquivalenceReport counterfactually_equivalent(const LinearScm& m1, const LinearScm& m2,
                                              const NodeSet& margin) {
  EquivalenceReport r = interventionally_equivalent(twin(m1), twin(m2), primed_margin(margin));
  r.level = EquivalenceLevel::counterfactual;
  r.margin = margin;
  return r;
}

namespace {

void require_structural(const FiniteScm& m) {
  for (const auto& v : m.endogenous)
    if (!uniquely_solvable_wrt(m, {v.name}))
      throw InvalidArgument("model has a self-loop at " + v.name + "; direct causes are undefined");
}

void require_structural(const LinearScm& m) {
  for (const auto& v : m.endogenous)
    if (!uniquely_solvable_wrt(m, {v}))
      throw InvalidArgument("model has a self-loop at " + v + "; direct causes are undefined");
}

// Law of X_j with every other endogenous variable fixed by x.
std::map<std::uint32_t, Rational> outcome_law(const FiniteScm& m, const detail::FiberSolver& solver,
                                              std::size_t j, Config& x, Config& e,
                                              const std::vector<VarRef>& noises) {
  std::map<std::uint32_t, Rational> law;
  detail::for_each_assignment(m, noises, true, x, e, [&] {
    Rational p = 1;
    for (VarRef v : noises) p *= m.exogenous[v.index].probs[e[v.index]];
    solver.solve(x, e, [&](const Config& s) {
      law[s[j]] += p;
      return false;
    });
    return true;
  });
  return law;
}

DirectCause direct_cause_unchecked(const FiniteScm& m, std::size_t i, std::size_t j) {
  DirectCause out;
  const auto& f = m.mechanisms[j];
  if (std::find(f.args.begin(), f.args.end(), endo_ref(i)) == f.args.end()) return out;
  detail::FiberSolver solver(m, {j});
  std::vector<VarRef> ctx, noises;
  for (VarRef v : f.args) {
    if (!v.endo()) noises.push_back(v);
    else if (v.index != i && v.index != j) ctx.push_back(v);
  }
  Config x, e;
  detail::pinned(m, x, e);
  const auto di = static_cast<std::uint32_t>(m.endogenous[i].domain.size());
  detail::for_each_assignment(m, ctx, false, x, e, [&] {
    std::vector<std::map<std::uint32_t, Rational>> laws;
    for (std::uint32_t a = 0; a < di; ++a) {
      x[i] = a;
      laws.push_back(outcome_law(m, solver, j, x, e, noises));
    }
    for (std::uint32_t a = 0; a < di; ++a)
      for (std::uint32_t b = a + 1; b < di; ++b)
        if (laws[a] != laws[b]) {
          out.direct = true;
          Assignment xi, xt;
          for (std::size_t k = 0; k < m.num_endo(); ++k) {
            if (k == j) continue;
            const auto& dom = m.endogenous[k].domain;
            xi[m.endogenous[k].name] = dom.values[k == i ? a : x[k]];
            xt[m.endogenous[k].name] = dom.values[k == i ? b : x[k]];
          }
          out.witness = std::make_pair(std::move(xi), std::move(xt));
          return false;
        }
    return true;
  });
  return out;
}

}  // namespace

DirectCause is_direct_cause(const FiniteScm& m, const std::string& i, const std::string& j) {
  std::size_t a = m.endo_index(i), b = m.endo_index(j);
  if (a == b) throw InvalidArgument("direct cause needs two distinct variables");
  require_structural(m);
  return direct_cause_unchecked(m, a, b);
}

bool is_direct_cause(const LinearScm& m, const std::string& i, const std::string& j) {
  auto a = static_cast<Eigen::Index>(m.endo_index(i)), b = static_cast<Eigen::Index>(m.endo_index(j));
  if (a == b) throw InvalidArgument("direct cause needs two distinct variables");
  require_structural(m);
  return std::abs(canonicalize(m).B(b, a)) > tolerance();
}

MixedGraph direct_causal_graph(const FiniteScm& m) {
  require_structural(m);
  MixedGraph g;
  for (const auto& v : m.endogenous) g.add_node(v.name);
  for (std::size_t j = 0; j < m.num_endo(); ++j)
    for (std::size_t i = 0; i < m.num_endo(); ++i)
      if (i != j && direct_cause_unchecked(m, i, j).direct)
        g.add_directed(m.endogenous[i].name, m.endogenous[j].name);
  if (!is_subgraph(g, functional_graph(m)))
    throw std::logic_error("direct causal graph is not contained in the functional graph");
  return g;
}

MixedGraph direct_causal_graph(const LinearScm& m) {
  require_structural(m);
  LinearScm c = canonicalize(m);
  MixedGraph g;
  for (const auto& v : m.endogenous) g.add_node(v);
  for (Eigen::Index j = 0; j < c.B.rows(); ++j)
    for (Eigen::Index i = 0; i < c.B.cols(); ++i)
      if (i != j && std::abs(c.B(j, i)) > tolerance())
        g.add_directed(m.endogenous[static_cast<std::size_t>(i)], m.endogenous[static_cast<std::size_t>(j)]);
  return g;
}

namespace {

template <class Model>
Model context_margin(const Model& m, const NodeSet& observed, const std::vector<std::string>& names) {
  NodeSet latent;
  for (const auto& n : names)
    if (!observed.count(n)) latent.insert(n);
  for (const auto& n : observed)
    if (std::find(names.begin(), names.end(), n) == names.end()) throw UnknownName(n);
  Verdict v = uniquely_solvable_wrt(m, latent);
  if (!v)
    throw NotUniquelySolvable("context graph: model is not uniquely solvable w.r.t. the "
                              "unobserved variables",
                              v.witness);
  Model marg = marginalize(m, latent);
  if (!structurally_uniquely_solvable(marg))
    throw InvalidArgument("context graph: the marginal model has a self-loop");
  return marg;
}

std::vector<std::string> endo_names(const FiniteScm& m) {
  std::vector<std::string> out;
  for (const auto& v : m.endogenous) out.push_back(v.name);
  return out;
}

}  // namespace

MixedGraph direct_causal_graph_wrt(const FiniteScm& m, const NodeSet& observed) {
  return direct_causal_graph(context_margin(m, observed, endo_names(m)));
}

MixedGraph direct_causal_graph_wrt(const LinearScm& m, const NodeSet& observed) {
  return direct_causal_graph(context_margin(m, observed, m.endogenous));
}

bool is_indirect_cause(const FiniteScm& m, const std::string& i, const std::string& j) {
  if (i == j) throw InvalidArgument("indirect cause needs two distinct variables");
  return direct_causal_graph_wrt(m, {i, j}).has_directed(i, j);
}

bool is_indirect_cause(const LinearScm& m, const std::string& i, const std::string& j) {
  if (i == j) throw InvalidArgument("indirect cause needs two distinct variables");
  return direct_causal_graph_wrt(m, {i, j}).has_directed(i, j);
}

}  // namespace scmkit
