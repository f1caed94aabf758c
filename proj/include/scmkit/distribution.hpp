#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "scmkit/rational.hpp"
#include "scmkit/scm.hpp"

namespace scmkit {

// Exact table over the product of the variables' domains. Cells with zero
// probability are omitted.
struct DiscreteDistribution {
  std::vector<std::string> vars;
  std::vector<FiniteDomain> domains;
  std::map<Config, Rational> probs;

  std::size_t var_index(const std::string& name) const;
  Rational probability(const Config& cell) const;
  Rational probability(const std::map<std::string, Atom>& event) const;
  Rational total() const;
  DiscreteDistribution marginal(const std::vector<std::string>& keep) const;
  // Conditional on an event of positive probability; throws otherwise.
  DiscreteDistribution condition(const std::map<std::string, Atom>& event) const;

  bool operator==(const DiscreteDistribution&) const = default;
};

nlohmann::json to_json(const DiscreteDistribution& d);
std::string to_text(const DiscreteDistribution& d);

struct GaussianDistribution {
  std::vector<std::string> vars;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  bool regularized = false;

  std::size_t var_index(const std::string& name) const;
  GaussianDistribution marginal(const std::vector<std::string>& keep) const;
};

nlohmann::json to_json(const GaussianDistribution& d);
std::string to_text(const GaussianDistribution& d);

bool approx_equal(const GaussianDistribution& a, const GaussianDistribution& b, double tol);

// Conditions on observed coordinates. The result keeps every coordinate; the
// observed ones become point masses at their values.
GaussianDistribution gaussian_condition(const GaussianDistribution& d,
                                        const std::vector<std::pair<std::string, double>>& observed);

}  // namespace scmkit
