#pragma once

#include <map>
#include <string>
#include <vector>

#include "scmkit/distribution.hpp"
#include "scmkit/graph.hpp"
#include "scmkit/scm.hpp"

namespace scmkit {

using Assignment = std::map<std::string, Atom>;

// Boolean decision with a human-readable witness when it fails.
struct Verdict {
  bool holds = true;
  std::string witness;
  explicit operator bool() const { return holds; }
};

// Solutions x_O of the equations of O for fixed noise and context. Every
// endogenous variable outside O that the mechanisms of O read must be in ctx.
std::vector<Assignment> fiber(const FiniteScm& m, const NodeSet& targets, const Assignment& noise,
                              const Assignment& ctx);

Verdict solvable_wrt(const FiniteScm& m, const NodeSet& targets);
Verdict uniquely_solvable_wrt(const FiniteScm& m, const NodeSet& targets);
Verdict solvable_wrt(const LinearScm& m, const NodeSet& targets);
Verdict uniquely_solvable_wrt(const LinearScm& m, const NodeSet& targets);

// x_O = g(x_args, e_args).
struct FiniteSolveMap {
  std::vector<std::size_t> targets;  // ascending endogenous indices
  std::vector<VarRef> args;          // canonical parents of O outside O
  std::vector<Config> table;         // per argument tuple, first argument slowest
};

struct LinearSolveMap {
  std::vector<std::size_t> targets;
  std::vector<std::size_t> endo_args;
  std::vector<std::size_t> exo_coords;
  Eigen::MatrixXd A;
  Eigen::MatrixXd G;
  Eigen::VectorXd d;
};

FiniteSolveMap solve_map(const FiniteScm& m, const NodeSet& targets);
LinearSolveMap solve_map(const LinearScm& m, const NodeSet& targets);

bool structurally_uniquely_solvable(const FiniteScm& m);
bool structurally_uniquely_solvable(const LinearScm& m);

// Decided over the loops of the functional graph only.
Verdict uniquely_solvable_all_subsets(const FiniteScm& m);
Verdict uniquely_solvable_all_subsets(const LinearScm& m);

DiscreteDistribution observational_distribution(const FiniteScm& m);
GaussianDistribution observational_distribution(const LinearScm& m);

inline constexpr std::size_t kSelectorCap = 1000000;

struct SelectorPolytope {
  std::vector<std::string> vars;
  // Noise assignment (support only, referenced noises) and its fiber.
  std::vector<std::pair<Assignment, std::vector<Assignment>>> fibers;
  std::vector<DiscreteDistribution> vertices;
};

SelectorPolytope observational_polytope(const FiniteScm& m, std::size_t cap = kSelectorCap);

using FiniteIntervention = std::map<std::string, Atom>;
using LinearIntervention = std::map<std::string, double>;

DiscreteDistribution interventional_distribution(const FiniteScm& m, const FiniteIntervention& iv);
GaussianDistribution interventional_distribution(const LinearScm& m, const LinearIntervention& iv);

// Twin-network query. cf_iv and query may name the copies either as X' or X;
// observed refers to the factual world unless primed.
DiscreteDistribution counterfactual_distribution(const FiniteScm& m,
                                                 const FiniteIntervention& factual_iv,
                                                 const Assignment& observed,
                                                 const FiniteIntervention& cf_iv,
                                                 const std::vector<std::string>& query);
GaussianDistribution counterfactual_distribution(const LinearScm& m,
                                                 const LinearIntervention& factual_iv,
                                                 const std::map<std::string, double>& observed,
                                                 const LinearIntervention& cf_iv,
                                                 const std::vector<std::string>& query);

}  // namespace scmkit
