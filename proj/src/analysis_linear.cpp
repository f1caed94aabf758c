#include <cmath>
#include <set>

#include "linear_util.hpp"
#include "scmkit/analysis.hpp"
#include "scmkit/error.hpp"
#include "scmkit/tolerance.hpp"
#include "scmkit/transform.hpp"

namespace scmkit {

Eigen::Index detail::numeric_rank(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  lu.setThreshold(tolerance());
  return lu.rank();
}

using detail::linear_indices;

namespace {

Eigen::MatrixXd system_matrix(const LinearScm& m, const std::vector<Eigen::Index>& o) {
  const auto n = static_cast<Eigen::Index>(o.size());
  return Eigen::MatrixXd::Identity(n, n) - m.B(o, o);
}

}  // namespace

Verdict uniquely_solvable_wrt(const LinearScm& m, const NodeSet& targets) {
  require_valid(m);
  auto o = linear_indices(m, targets);
  Eigen::MatrixXd a = system_matrix(m, o);
  Verdict v;
  if (detail::numeric_rank(a) < static_cast<Eigen::Index>(o.size())) {
    v.holds = false;
    v.witness = "I - B_OO is singular (det = " + std::to_string(a.determinant()) + ")";
  }
  return v;
}

Verdict solvable_wrt(const LinearScm& m, const NodeSet& targets) {
  require_valid(m);
  const double eps = tolerance();
  auto o = linear_indices(m, targets);
  Eigen::MatrixXd a = system_matrix(m, o);
  const Eigen::Index rank = detail::numeric_rank(a);
  if (rank == static_cast<Eigen::Index>(o.size())) return {};
  // Singular: the right-hand side B_{O,rest} x_rest + Gamma_O e + c_O must stay
  // in the column space of I - B_OO for every context and a.e. noise.
  const Eigen::MatrixXd sigma = m.exo_cov();
  const Eigen::MatrixXd gamma_o = m.Gamma(o, Eigen::all);
  for (Eigen::Index j = 0; j < gamma_o.cols(); ++j)
    if (gamma_o.col(j).cwiseAbs().maxCoeff() > eps && sigma(j, j) <= eps)
      throw Unsupported("solvability of a singular subsystem with zero-variance noise coordinate " +
                        m.coordinate_names()[static_cast<std::size_t>(j)]);
  auto rest = detail::complement(static_cast<Eigen::Index>(m.num_endo()), o);
  const Eigen::MatrixXd b_rest = m.B(o, rest);
  Eigen::MatrixXd stacked(a.rows(), a.cols() + b_rest.cols() + gamma_o.cols() + 1);
  stacked << a, b_rest, gamma_o * sigma, gamma_o * m.exo_mean() + m.c(o);
  Verdict v;
  if (detail::numeric_rank(stacked) != rank) {
    v.holds = false;
    v.witness = "right-hand side leaves the column space of I - B_OO (rank " +
                std::to_string(rank) + " of " + std::to_string(o.size()) + ")";
  }
  return v;
}

LinearSolveMap solve_map(const LinearScm& m, const NodeSet& targets) {
  Verdict v = uniquely_solvable_wrt(m, targets);
  if (!v) throw NotUniquelySolvable("not uniquely solvable w.r.t. the given set", v.witness);
  const double eps = tolerance();
  auto o = linear_indices(m, targets);
  auto rest = detail::complement(static_cast<Eigen::Index>(m.num_endo()), o);
  LinearSolveMap g;
  for (auto k : o) g.targets.push_back(static_cast<std::size_t>(k));
  std::vector<Eigen::Index> args, coords;
  for (auto i : rest)
    if (o.size() && m.B(o, std::vector<Eigen::Index>{i}).cwiseAbs().maxCoeff() > eps) {
      args.push_back(i);
      g.endo_args.push_back(static_cast<std::size_t>(i));
    }
  for (Eigen::Index j = 0; j < m.Gamma.cols(); ++j)
    if (o.size() && m.Gamma(o, std::vector<Eigen::Index>{j}).cwiseAbs().maxCoeff() > eps) {
      coords.push_back(j);
      g.exo_coords.push_back(static_cast<std::size_t>(j));
    }
  auto lu = system_matrix(m, o).fullPivLu();
  g.A = lu.solve(Eigen::MatrixXd(m.B(o, args)));
  g.G = lu.solve(Eigen::MatrixXd(m.Gamma(o, coords)));
  g.d = lu.solve(Eigen::VectorXd(m.c(o)));
  return g;
}

bool structurally_uniquely_solvable(const LinearScm& m) {
  for (const auto& n : m.endogenous)
    if (!uniquely_solvable_wrt(m, {n})) return false;
  return true;
}

Verdict uniquely_solvable_all_subsets(const LinearScm& m) {
  for (const auto& loop : enumerate_loops(functional_graph(m))) {
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

GaussianDistribution observational_distribution(const LinearScm& m) {
  NodeSet all(m.endogenous.begin(), m.endogenous.end());
  Verdict v = uniquely_solvable_wrt(m, all);
  if (!v) throw NotUniquelySolvable("model is not uniquely solvable", v.witness);
  const auto n = static_cast<Eigen::Index>(m.num_endo());
  auto lu = (Eigen::MatrixXd::Identity(n, n) - m.B).fullPivLu();
  GaussianDistribution d;
  d.vars = m.endogenous;
  d.mean = lu.solve(Eigen::VectorXd(m.Gamma * m.exo_mean() + m.c));
  Eigen::MatrixXd t = lu.solve(m.Gamma);
  d.cov = t * m.exo_cov() * t.transpose();
  d.cov = (d.cov + d.cov.transpose()) / 2;
  return d;
}

GaussianDistribution interventional_distribution(const LinearScm& m, const LinearIntervention& iv) {
  return observational_distribution(intervene(m, iv));
}

GaussianDistribution counterfactual_distribution(const LinearScm& m,
                                                 const LinearIntervention& factual_iv,
                                                 const std::map<std::string, double>& observed,
                                                 const LinearIntervention& cf_iv,
                                                 const std::vector<std::string>& query) {
  LinearScm tw = twin(m);
  std::set<std::string> names(tw.endogenous.begin(), tw.endogenous.end());
  auto copy = [&](const std::string& n) {
    if (!n.empty() && n.back() == '\'') return n;
    return names.count(primed(n)) ? primed(n) : n;
  };
  LinearIntervention iv = factual_iv;
  for (const auto& [n, x] : cf_iv) iv[copy(n)] = x;
  std::vector<std::string> q;
  for (const auto& n : query) q.push_back(copy(n));
  GaussianDistribution joint = observational_distribution(intervene(tw, iv));
  std::vector<std::pair<std::string, double>> obs(observed.begin(), observed.end());
  return gaussian_condition(joint, obs).marginal(q);
}

}  // namespace scmkit
