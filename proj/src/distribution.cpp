#include "scmkit/distribution.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "scmkit/error.hpp"
#include "scmkit/tolerance.hpp"

namespace scmkit {

std::size_t DiscreteDistribution::var_index(const std::string& name) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i] == name) return i;
  throw UnknownName(name);
}

Rational DiscreteDistribution::probability(const Config& cell) const {
  auto it = probs.find(cell);
  return it == probs.end() ? Rational(0) : it->second;
}

Rational DiscreteDistribution::probability(const std::map<std::string, Atom>& event) const {
  std::vector<std::pair<std::size_t, std::uint32_t>> fixed;
  for (const auto& [n, a] : event) {
    std::size_t i = var_index(n);
    fixed.emplace_back(i, domains[i].index_of(a));
  }
  Rational p = 0;
  for (const auto& [cell, q] : probs) {
    bool match = true;
    for (auto [i, v] : fixed) match = match && cell[i] == v;
    if (match) p += q;
  }
  return p;
}

Rational DiscreteDistribution::total() const {
  Rational t = 0;
  for (const auto& [cell, q] : probs) t += q;
  return t;
}

DiscreteDistribution DiscreteDistribution::marginal(const std::vector<std::string>& keep) const {
  DiscreteDistribution out;
  std::vector<std::size_t> idx;
  for (const auto& n : keep) {
    idx.push_back(var_index(n));
    out.vars.push_back(n);
    out.domains.push_back(domains[idx.back()]);
  }
  for (const auto& [cell, q] : probs) {
    Config c;
    for (auto i : idx) c.push_back(cell[i]);
    out.probs[c] += q;
  }
  return out;
}

DiscreteDistribution DiscreteDistribution::condition(const std::map<std::string, Atom>& event) const {
  std::vector<std::pair<std::size_t, std::uint32_t>> fixed;
  for (const auto& [n, a] : event) {
    std::size_t i = var_index(n);
    fixed.emplace_back(i, domains[i].index_of(a));
  }
  DiscreteDistribution out;
  out.vars = vars;
  out.domains = domains;
  Rational mass = 0;
  for (const auto& [cell, q] : probs) {
    bool match = true;
    for (auto [i, v] : fixed) match = match && cell[i] == v;
    if (match) {
      out.probs[cell] = q;
      mass += q;
    }
  }
  if (mass == 0) throw InvalidArgument("conditioning on an event of probability zero");
  for (auto& [cell, q] : out.probs) q /= mass;
  return out;
}

namespace {
std::string cell_text(const DiscreteDistribution& d, const Config& cell) {
  std::string s;
  for (std::size_t i = 0; i < cell.size(); ++i) {
    if (i) s += ",";
    s += atom_to_string(d.domains[i].values[cell[i]]);
  }
  return s;
}
}  // namespace

nlohmann::json to_json(const DiscreteDistribution& d) {
  nlohmann::json j;
  j["vars"] = d.vars;
  j["probs"] = nlohmann::json::array();
  for (const auto& [cell, q] : d.probs)
    if (q != 0) j["probs"].push_back({cell_text(d, cell), to_pq(q)});
  return j;
}

std::string to_text(const DiscreteDistribution& d) {
  std::ostringstream os;
  for (std::size_t i = 0; i < d.vars.size(); ++i) os << (i ? "," : "") << d.vars[i];
  os << "\tp\n";
  for (const auto& [cell, q] : d.probs)
    if (q != 0) os << cell_text(d, cell) << "\t" << to_pq(q) << "\n";
  return os.str();
}

std::size_t GaussianDistribution::var_index(const std::string& name) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i] == name) return i;
  throw UnknownName(name);
}

GaussianDistribution GaussianDistribution::marginal(const std::vector<std::string>& keep) const {
  GaussianDistribution out;
  out.regularized = regularized;
  std::vector<Eigen::Index> idx;
  for (const auto& n : keep) idx.push_back(static_cast<Eigen::Index>(var_index(n)));
  out.vars = keep;
  out.mean = mean(idx);
  out.cov = cov(idx, idx);
  return out;
}

nlohmann::json to_json(const GaussianDistribution& d) {
  nlohmann::json j;
  j["vars"] = d.vars;
  j["mean"] = std::vector<double>(d.mean.data(), d.mean.data() + d.mean.size());
  j["cov"] = nlohmann::json::array();
  for (Eigen::Index r = 0; r < d.cov.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(d.cov.cols()));
    for (Eigen::Index c = 0; c < d.cov.cols(); ++c) row[static_cast<std::size_t>(c)] = d.cov(r, c);
    j["cov"].push_back(row);
  }
  if (d.regularized) j["regularized"] = true;
  return j;
}

std::string to_text(const GaussianDistribution& d) {
  std::ostringstream os;
  os << std::setprecision(12);
  os << "vars:";
  for (const auto& v : d.vars) os << " " << v;
  os << "\nmean:";
  for (Eigen::Index i = 0; i < d.mean.size(); ++i) os << " " << d.mean(i);
  os << "\ncov:\n";
  for (Eigen::Index r = 0; r < d.cov.rows(); ++r) {
    os << " ";
    for (Eigen::Index c = 0; c < d.cov.cols(); ++c) os << " " << d.cov(r, c);
    os << "\n";
  }
  if (d.regularized) os << "regularized\n";
  return os.str();
}

bool approx_equal(const GaussianDistribution& a, const GaussianDistribution& b, double tol) {
  if (a.vars != b.vars) return false;
  return (a.mean - b.mean).cwiseAbs().maxCoeff() <= tol &&
         (a.cov - b.cov).cwiseAbs().maxCoeff() <= tol;
}

GaussianDistribution gaussian_condition(const GaussianDistribution& d,
                                        const std::vector<std::pair<std::string, double>>& observed) {
  const double eps = tolerance();
  std::vector<Eigen::Index> ob, rest;
  std::vector<bool> is_obs(d.vars.size(), false);
  Eigen::VectorXd xb(static_cast<Eigen::Index>(observed.size()));
  for (std::size_t i = 0; i < observed.size(); ++i) {
    std::size_t v = d.var_index(observed[i].first);
    if (is_obs[v]) throw InvalidArgument("coordinate observed twice: " + observed[i].first);
    is_obs[v] = true;
    ob.push_back(static_cast<Eigen::Index>(v));
    xb(static_cast<Eigen::Index>(i)) = observed[i].second;
  }
  for (std::size_t v = 0; v < d.vars.size(); ++v)
    if (!is_obs[v]) rest.push_back(static_cast<Eigen::Index>(v));

  GaussianDistribution out = d;
  if (ob.empty()) return out;
  Eigen::MatrixXd sbb = d.cov(ob, ob);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sbb);
  double lmin = es.eigenvalues().minCoeff(), lmax = es.eigenvalues().maxCoeff();
  if (lmin <= eps) throw InvalidArgument("singular observed block in Gaussian conditioning");
  if (lmax / lmin > kRegularizeCondition) {
    sbb += eps * lmax * Eigen::MatrixXd::Identity(sbb.rows(), sbb.cols());
    out.regularized = true;
  }
  Eigen::LDLT<Eigen::MatrixXd> solver(sbb);
  Eigen::VectorXd resid = xb - d.mean(ob);
  if (!rest.empty()) {
    Eigen::MatrixXd sab = d.cov(rest, ob);
    Eigen::VectorXd ma = d.mean(rest) + sab * solver.solve(resid);
    Eigen::MatrixXd caa = d.cov(rest, rest) - sab * solver.solve(sab.transpose());
    caa = (caa + caa.transpose()) / 2;
    out.mean(rest) = ma;
    out.cov(rest, rest) = caa;
  }
  out.mean(ob) = xb;
  for (auto o : ob) {
    out.cov.row(o).setZero();
    out.cov.col(o).setZero();
  }
  return out;
}

}  // namespace scmkit
