#include "scmkit/json_io.hpp"

namespace scmkit {

namespace {

nlohmann::json atom_json(const Atom& a) {
  if (const auto* i = std::get_if<std::int64_t>(&a)) return *i;
  return std::get<std::string>(a);
}

nlohmann::json domain_json(const FiniteDomain& d) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& v : d.values) j.push_back(atom_json(v));
  return j;
}

nlohmann::json nested(const FiniteScm& m, std::size_t k, std::size_t depth, std::size_t& row) {
  const auto& f = m.mechanisms[k];
  if (depth == f.args.size()) return atom_json(m.endogenous[k].domain.values[f.table[row++]]);
  nlohmann::json j = nlohmann::json::array();
  for (std::size_t v = 0; v < m.domain(f.args[depth]).size(); ++v) j.push_back(nested(m, k, depth + 1, row));
  return j;
}

nlohmann::json matrix_json(const Eigen::MatrixXd& a) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < a.cols(); ++c) row.push_back(a(r, c));
    j.push_back(row);
  }
  return j;
}

}  // namespace

nlohmann::json to_json(const FiniteScm& m) {
  nlohmann::json j;
  j["family"] = "finite";
  j["endogenous"] = nlohmann::json::array();
  for (std::size_t k = 0; k < m.num_endo(); ++k) {
    nlohmann::json args = nlohmann::json::array();
    for (VarRef v : m.mechanisms[k].args) args.push_back(m.name(v));
    std::size_t row = 0;
    j["endogenous"].push_back({{"name", m.endogenous[k].name},
                               {"domain", domain_json(m.endogenous[k].domain)},
                               {"args", args},
                               {"table", nested(m, k, 0, row)}});
  }
  j["exogenous"] = nlohmann::json::array();
  for (const auto& v : m.exogenous) {
    nlohmann::json probs = nlohmann::json::array();
    for (const auto& p : v.probs) probs.push_back(to_pq(p));
    j["exogenous"].push_back({{"name", v.name}, {"domain", domain_json(v.domain)}, {"probs", probs}});
  }
  return j;
}

nlohmann::json to_json(const LinearScm& m) {
  nlohmann::json j;
  j["family"] = "linear";
  j["endogenous"] = m.endogenous;
  j["noise"] = nlohmann::json::array();
  for (const auto& b : m.blocks)
    j["noise"].push_back({{"name", b.name},
                          {"mean", std::vector<double>(b.mean.data(), b.mean.data() + b.mean.size())},
                          {"cov", matrix_json(b.cov)}});
  j["B"] = matrix_json(m.B);
  j["Gamma"] = matrix_json(m.Gamma);
  j["c"] = std::vector<double>(m.c.data(), m.c.data() + m.c.size());
  return j;
}

}  // namespace scmkit
