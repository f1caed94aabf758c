#include <algorithm>
#include <set>

#include "fiber.hpp"
#include "finite_util.hpp"
#include "scmkit/analysis.hpp"
#include "scmkit/error.hpp"
#include "scmkit/transform.hpp"

namespace scmkit {

namespace detail {

FiberSolver::FiberSolver(const FiniteScm& m, std::vector<std::size_t> targets)
    : m_(m), targets_(std::move(targets)) {
  std::sort(targets_.begin(), targets_.end());
  const std::size_t n = m.num_endo();
  std::vector<bool> in_o(n, false);
  for (auto k : targets_) in_o[k] = true;

  MixedGraph g;
  for (auto k : targets_) g.add_node(m.endogenous[k].name);
  std::set<VarRef> inputs;
  for (auto k : targets_)
    for (VarRef v : m.mechanisms[k].args) {
      if (v.endo() && in_o[v.index]) {
        if (v.index != k) g.add_directed(m.endogenous[v.index].name, m.endogenous[k].name);
      } else {
        inputs.insert(v);
      }
    }
  inputs_.assign(inputs.begin(), inputs.end());
  for (const auto& comp : strongly_connected_components(g))
    for (const auto& name : comp) order_.push_back(m.endo_index(name));

  std::vector<std::size_t> pos(n, 0);
  for (std::size_t p = 0; p < order_.size(); ++p) pos[order_[p]] = p;
  checks_.assign(order_.size(), {});
  determined_.assign(order_.size(), false);
  for (auto k : targets_) {
    std::size_t last = pos[k];
    bool earlier = true;
    for (VarRef v : m.mechanisms[k].args) {
      if (!v.endo() || !in_o[v.index]) continue;
      if (v.index == k || pos[v.index] > pos[k]) earlier = false;
      last = std::max(last, pos[v.index]);
    }
    if (earlier) determined_[pos[k]] = true;
    else checks_[last].push_back(k);
  }
}

bool FiberSolver::rec(std::size_t p, Config& x, const Config& e,
                      const std::function<bool(const Config&)>& fn) const {
  if (p == order_.size()) return fn(x);
  const std::size_t k = order_[p];
  auto checks_pass = [&] {
    for (auto j : checks_[p])
      if (x[j] != m_.eval(j, x, e)) return false;
    return true;
  };
  if (determined_[p]) {
    x[k] = m_.eval(k, x, e);
    return !checks_pass() || rec(p + 1, x, e, fn);
  }
  const auto dk = static_cast<std::uint32_t>(m_.endogenous[k].domain.size());
  for (std::uint32_t a = 0; a < dk; ++a) {
    x[k] = a;
    if (checks_pass() && !rec(p + 1, x, e, fn)) return false;
  }
  return true;
}

bool FiberSolver::solve(Config& x, const Config& e,
                        const std::function<bool(const Config&)>& fn) const {
  return rec(0, x, e, fn);
}

std::size_t FiberSolver::count(Config& x, const Config& e, std::size_t limit) const {
  std::size_t c = 0;
  solve(x, e, [&](const Config&) { return ++c < limit; });
  return c;
}

std::string describe(const FiniteScm& m, const std::vector<VarRef>& refs, const Config& x,
                     const Config& e) {
  std::string s;
  for (VarRef v : refs) {
    if (!s.empty()) s += ", ";
    s += m.name(v) + "=" + atom_to_string(m.domain(v).values[lookup(x, e, v)]);
  }
  return "(" + s + ")";
}

std::vector<std::size_t> endo_indices(const FiniteScm& m, const NodeSet& names) {
  std::vector<std::size_t> out;
  for (const auto& n : names) out.push_back(m.endo_index(n));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

using detail::FiberSolver;

std::vector<Assignment> fiber(const FiniteScm& m, const NodeSet& targets, const Assignment& noise,
                              const Assignment& ctx) {
  require_valid(m);
  FiberSolver solver(m, detail::endo_indices(m, targets));
  Config x, e;
  detail::pinned(m, x, e);
  for (const auto& [name, value] : ctx) {
    std::size_t i = m.endo_index(name);
    if (targets.count(name)) throw InvalidArgument("context assigns target " + name);
    x[i] = m.endogenous[i].domain.index_of(value);
  }
  for (const auto& [name, value] : noise) {
    std::size_t j = m.exo_index(name);
    e[j] = m.exogenous[j].domain.index_of(value);
  }
  for (VarRef v : solver.inputs()) {
    const Assignment& src = v.endo() ? ctx : noise;
    if (!src.count(m.name(v))) throw InvalidArgument("missing value for " + m.name(v));
  }
  std::vector<Assignment> out;
  solver.solve(x, e, [&](const Config& sol) {
    Assignment a;
    for (auto k : solver.targets()) a[m.endogenous[k].name] = m.endogenous[k].domain.values[sol[k]];
    out.push_back(std::move(a));
    return true;
  });
  return out;
}

namespace {

// Visits every (context, support noise) input of the target equations and
// asks ok(count) about the number of solutions (counted up to 2).
Verdict fiber_sizes(const FiniteScm& m, const NodeSet& targets, bool unique) {
  require_valid(m);
  FiberSolver solver(m, detail::endo_indices(m, targets));
  Config x, e;
  detail::pinned(m, x, e);
  Verdict v;
  detail::for_each_assignment(m, solver.inputs(), true, x, e, [&] {
    std::size_t c = solver.count(x, e, 2);
    if (c == 0 || (unique && c > 1)) {
      v.holds = false;
      v.witness = "inputs " + detail::describe(m, solver.inputs(), x, e) + " give " +
                  (c == 0 ? "no solution" : "multiple solutions");
      return false;
    }
    return true;
  });
  return v;
}

}  // namespace

Verdict solvable_wrt(const FiniteScm& m, const NodeSet& targets) {
  return fiber_sizes(m, targets, false);
}

Verdict uniquely_solvable_wrt(const FiniteScm& m, const NodeSet& targets) {
  return fiber_sizes(m, targets, true);
}

FiniteSolveMap solve_map(const FiniteScm& m, const NodeSet& targets) {
  Verdict v = uniquely_solvable_wrt(m, targets);
  if (!v) throw NotUniquelySolvable("not uniquely solvable w.r.t. the given set", v.witness);
  FiniteSolveMap g;
  g.targets = detail::endo_indices(m, targets);
  std::vector<bool> in_o(m.num_endo(), false);
  for (auto k : g.targets) in_o[k] = true;
  std::set<VarRef> args;
  for (auto k : g.targets)
    for (VarRef p : functional_parents(m, k))
      if (!p.endo() || !in_o[p.index]) args.insert(p);
  g.args.assign(args.begin(), args.end());

  FiberSolver solver(m, g.targets);
  Config x, e;
  detail::pinned(m, x, e);
  detail::for_each_assignment(m, g.args, false, x, e, [&] {
    Config row(g.targets.size(), 0);
    solver.solve(x, e, [&](const Config& sol) {
      for (std::size_t i = 0; i < g.targets.size(); ++i) row[i] = sol[g.targets[i]];
      return false;  // unique on the support; first element elsewhere
    });
    g.table.push_back(std::move(row));
    return true;
  });
  return g;
}

bool structurally_uniquely_solvable(const FiniteScm& m) {
  for (const auto& v : m.endogenous)
    if (!uniquely_solvable_wrt(m, {v.name})) return false;
  return true;
}

Verdict uniquely_solvable_all_subsets(const FiniteScm& m) {
  MixedGraph g = functional_graph(m);
  for (const auto& loop : enumerate_loops(g)) {
    Verdict v = uniquely_solvable_wrt(m, loop);
    if (!v) {
      std::string names;
      for (const auto& n : loop) names += (names.empty() ? "" : ",") + n;
      v.witness = "loop {" + names + "}: " + v.witness;
      return v;
    }
  }
  return {};
}

namespace {

std::vector<VarRef> referenced_noises(const FiniteScm& m) {
  std::set<VarRef> s;
  for (const auto& f : m.mechanisms)
    for (VarRef v : f.args)
      if (!v.endo()) s.insert(v);
  return {s.begin(), s.end()};
}

Rational weight(const FiniteScm& m, const std::vector<VarRef>& noises, const Config& e) {
  Rational p = 1;
  for (VarRef v : noises) p *= m.exogenous[v.index].probs[e[v.index]];
  return p;
}

DiscreteDistribution empty_over_all(const FiniteScm& m) {
  DiscreteDistribution d;
  for (const auto& v : m.endogenous) {
    d.vars.push_back(v.name);
    d.domains.push_back(v.domain);
  }
  return d;
}

std::vector<std::size_t> all_indices(const FiniteScm& m) {
  std::vector<std::size_t> all(m.num_endo());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return all;
}

}  // namespace

DiscreteDistribution observational_distribution(const FiniteScm& m) {
  require_valid(m);
  FiberSolver solver(m, all_indices(m));
  auto noises = referenced_noises(m);
  DiscreteDistribution d = empty_over_all(m);
  Config x, e;
  detail::pinned(m, x, e);
  detail::for_each_assignment(m, noises, true, x, e, [&] {
    std::size_t c = 0;
    Config sol;
    solver.solve(x, e, [&](const Config& s) {
      sol = s;
      return ++c < 2;
    });
    if (c != 1)
      throw NotUniquelySolvable("model is not uniquely solvable",
                                "noise " + detail::describe(m, noises, x, e) + " gives " +
                                    (c == 0 ? "no solution" : "multiple solutions"));
    d.probs[sol] += weight(m, noises, e);
    return true;
  });
  return d;
}

SelectorPolytope observational_polytope(const FiniteScm& m, std::size_t cap) {
  require_valid(m);
  FiberSolver solver(m, all_indices(m));
  auto noises = referenced_noises(m);
  SelectorPolytope poly;
  for (const auto& v : m.endogenous) poly.vars.push_back(v.name);
  std::set<std::map<Config, Rational>> current{{}};
  Config x, e;
  detail::pinned(m, x, e);
  detail::for_each_assignment(m, noises, true, x, e, [&] {
    std::vector<Config> sols;
    solver.solve(x, e, [&](const Config& s) {
      sols.push_back(s);
      return true;
    });
    if (sols.empty())
      throw NotSolvable("model has no solution",
                        "noise " + detail::describe(m, noises, x, e) + " has an empty fiber");
    if (current.size() * sols.size() > cap)
      throw CapExceeded("selector enumeration exceeds " + std::to_string(cap) + " candidates");
    Assignment ea;
    for (VarRef v : noises) ea[m.name(v)] = m.domain(v).values[e[v.index]];
    std::vector<Assignment> fa;
    for (const auto& s : sols) {
      Assignment a;
      for (std::size_t k = 0; k < m.num_endo(); ++k)
        a[m.endogenous[k].name] = m.endogenous[k].domain.values[s[k]];
      fa.push_back(std::move(a));
    }
    poly.fibers.emplace_back(std::move(ea), std::move(fa));
    Rational p = weight(m, noises, e);
    std::set<std::map<Config, Rational>> next;
    for (const auto& dist : current)
      for (const auto& s : sols) {
        auto d = dist;
        d[s] += p;
        next.insert(std::move(d));
      }
    current = std::move(next);
    return true;
  });
  for (const auto& probs : current) {
    DiscreteDistribution d = empty_over_all(m);
    d.probs = probs;
    poly.vertices.push_back(std::move(d));
  }
  return poly;
}

DiscreteDistribution interventional_distribution(const FiniteScm& m, const FiniteIntervention& iv) {
  return observational_distribution(intervene(m, iv));
}

namespace {

std::string twin_name(const std::set<std::string>& twin_names, const std::string& n) {
  if (!n.empty() && n.back() == '\'') return n;
  std::string p = primed(n);
  return twin_names.count(p) ? p : n;
}

}  // namespace

DiscreteDistribution counterfactual_distribution(const FiniteScm& m,
                                                 const FiniteIntervention& factual_iv,
                                                 const Assignment& observed,
                                                 const FiniteIntervention& cf_iv,
                                                 const std::vector<std::string>& query) {
  FiniteScm tw = twin(m);
  std::set<std::string> names;
  for (const auto& v : tw.endogenous) names.insert(v.name);
  FiniteIntervention iv = factual_iv;
  for (const auto& [n, a] : cf_iv) iv[twin_name(names, n)] = a;
  std::vector<std::string> q;
  for (const auto& n : query) q.push_back(twin_name(names, n));
  DiscreteDistribution joint = observational_distribution(intervene(tw, iv));
  if (!observed.empty()) joint = joint.condition(observed);
  return joint.marginal(q);
}

}  // namespace scmkit
