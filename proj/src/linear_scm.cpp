#include <cmath>
#include <set>

#include <Eigen/Eigenvalues>

#include "scmkit/error.hpp"
#include "scmkit/scm.hpp"
#include "scmkit/tolerance.hpp"

namespace scmkit {

std::size_t LinearScm::exo_dim() const {
  std::size_t d = 0;
  for (const auto& b : blocks) d += b.dim();
  return d;
}

std::size_t LinearScm::block_offset(std::size_t b) const {
  std::size_t off = 0;
  for (std::size_t i = 0; i < b; ++i) off += blocks.at(i).dim();
  return off;
}

std::size_t LinearScm::block_of_coordinate(std::size_t coord) const {
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (coord < blocks[b].dim()) return b;
    coord -= blocks[b].dim();
  }
  throw InvalidArgument("exogenous coordinate out of range");
}

std::vector<std::string> LinearScm::coordinate_names() const {
  std::vector<std::string> out;
  for (const auto& b : blocks) {
    if (b.dim() == 1) out.push_back(b.name);
    else
      for (std::size_t i = 0; i < b.dim(); ++i) out.push_back(b.name + "[" + std::to_string(i) + "]");
  }
  return out;
}

Eigen::VectorXd LinearScm::exo_mean() const {
  Eigen::VectorXd mu(exo_dim());
  std::size_t off = 0;
  for (const auto& b : blocks) {
    mu.segment(off, b.dim()) = b.mean;
    off += b.dim();
  }
  return mu;
}

Eigen::MatrixXd LinearScm::exo_cov() const {
  const auto d = static_cast<Eigen::Index>(exo_dim());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, d);
  Eigen::Index off = 0;
  for (const auto& b : blocks) {
    const auto n = static_cast<Eigen::Index>(b.dim());
    s.block(off, off, n, n) = b.cov;
    off += n;
  }
  return s;
}

std::size_t LinearScm::endo_index(const std::string& name) const {
  for (std::size_t i = 0; i < endogenous.size(); ++i)
    if (endogenous[i] == name) return i;
  throw UnknownName(name);
}

std::size_t LinearScm::block_index(const std::string& name) const {
  for (std::size_t b = 0; b < blocks.size(); ++b)
    if (blocks[b].name == name) return b;
  throw UnknownName(name);
}

LinearScm make_linear(std::vector<std::string> endogenous, std::vector<GaussianBlock> blocks) {
  LinearScm m;
  m.endogenous = std::move(endogenous);
  m.blocks = std::move(blocks);
  const auto n = static_cast<Eigen::Index>(m.num_endo());
  m.B = Eigen::MatrixXd::Zero(n, n);
  m.Gamma = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(m.exo_dim()));
  m.c = Eigen::VectorXd::Zero(n);
  return m;
}

ValidationReport validate(const LinearScm& m) {
  ValidationReport r;
  auto bad = [&](std::string s) { r.violations.push_back(std::move(s)); };
  const double eps = tolerance();
  std::set<std::string> names;
  for (const auto& n : m.endogenous)
    if (n.empty() || !names.insert(n).second) bad("empty or duplicate name " + n);
  for (const auto& b : m.blocks) {
    if (b.name.empty() || !names.insert(b.name).second) bad("empty or duplicate name " + b.name);
    if (b.mean.size() == 0) bad("empty noise block " + b.name);
    if (b.cov.rows() != b.mean.size() || b.cov.cols() != b.mean.size()) {
      bad("covariance shape mismatch in " + b.name);
      continue;
    }
    if (!b.cov.allFinite() || !b.mean.allFinite()) {
      bad("non-finite parameters in " + b.name);
      continue;
    }
    if ((b.cov - b.cov.transpose()).cwiseAbs().maxCoeff() > eps) {
      bad("covariance of " + b.name + " is not symmetric");
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.cov);
    if (es.eigenvalues().minCoeff() < -eps) bad("covariance of " + b.name + " is not PSD");
  }
  const auto n = static_cast<Eigen::Index>(m.num_endo());
  if (m.B.rows() != n || m.B.cols() != n) bad("B shape mismatch");
  if (m.Gamma.rows() != n || m.Gamma.cols() != static_cast<Eigen::Index>(m.exo_dim()))
    bad("Gamma shape mismatch: expected " + std::to_string(n) + "x" + std::to_string(m.exo_dim()));
  if (m.c.size() != n) bad("intercept shape mismatch");
  if (r.ok() && !(m.B.allFinite() && m.Gamma.allFinite() && m.c.allFinite()))
    bad("non-finite coefficients");
  return r;
}

void require_valid(const LinearScm& m) {
  auto r = validate(m);
  if (r.ok()) return;
  std::string msg = "invalid model:";
  for (const auto& v : r.violations) msg += " " + v + ";";
  throw InvalidArgument(msg);
}

namespace {

// Row k after dividing out a removable diagonal entry.
bool coefficient_nonzero(const LinearScm& m, std::size_t k, std::size_t i) {
  const double eps = tolerance();
  const auto kk = static_cast<Eigen::Index>(k);
  double bkk = m.B(kk, kk);
  double scale = (std::abs(bkk - 1) <= eps) ? 1.0 : 1.0 - bkk;
  return std::abs(m.B(kk, static_cast<Eigen::Index>(i)) / scale) > eps;
}

bool coordinate_is_parent(const LinearScm& m, std::size_t k, std::size_t coord) {
  const double eps = tolerance();
  const auto j = static_cast<Eigen::Index>(coord);
  if (std::abs(m.Gamma(static_cast<Eigen::Index>(k), j)) <= eps) return false;
  std::size_t b = m.block_of_coordinate(coord);
  auto local = static_cast<Eigen::Index>(coord - m.block_offset(b));
  return m.blocks[b].cov(local, local) > eps;
}

}  // namespace

std::vector<VarRef> functional_parents(const LinearScm& m, std::size_t k) {
  if (k >= m.num_endo()) throw InvalidArgument("endogenous index out of range");
  const double eps = tolerance();
  std::vector<VarRef> out;
  for (std::size_t i = 0; i < m.num_endo(); ++i) {
    if (i == k) {
      auto kk = static_cast<Eigen::Index>(k);
      if (std::abs(m.B(kk, kk) - 1) <= eps) out.push_back(endo_ref(k));
    } else if (coefficient_nonzero(m, k, i)) {
      out.push_back(endo_ref(i));
    }
  }
  for (std::size_t b = 0, off = 0; b < m.blocks.size(); off += m.blocks[b].dim(), ++b)
    for (std::size_t t = 0; t < m.blocks[b].dim(); ++t)
      if (coordinate_is_parent(m, k, off + t)) {
        out.push_back(exo_ref(b));
        break;
      }
  return out;
}

MixedGraph augmented_graph(const LinearScm& m) {
  MixedGraph g;
  for (const auto& n : m.endogenous) g.add_node(n);
  for (const auto& b : m.blocks) g.add_node(b.name);
  for (std::size_t k = 0; k < m.num_endo(); ++k)
    for (VarRef v : functional_parents(m, k))
      g.add_directed(v.endo() ? m.endogenous[v.index] : m.blocks[v.index].name, m.endogenous[k]);
  return g;
}

MixedGraph functional_graph(const LinearScm& m) {
  MixedGraph g;
  for (const auto& n : m.endogenous) g.add_node(n);
  std::vector<std::set<std::size_t>> children(m.blocks.size());
  for (std::size_t k = 0; k < m.num_endo(); ++k)
    for (VarRef v : functional_parents(m, k)) {
      if (v.endo()) g.add_directed(m.endogenous[v.index], m.endogenous[k]);
      else children[v.index].insert(k);
    }
  for (const auto& ch : children)
    for (auto a : ch)
      for (auto b : ch)
        if (a < b) g.add_bidirected(m.endogenous[a], m.endogenous[b]);
  return g;
}

LinearScm canonicalize(const LinearScm& m) {
  require_valid(m);
  const double eps = tolerance();
  LinearScm out = m;
  const Eigen::VectorXd mu = m.exo_mean();
  for (Eigen::Index k = 0; k < out.B.rows(); ++k) {
    double bkk = out.B(k, k);
    if (std::abs(bkk - 1) > eps && std::abs(bkk) > eps) {
      double s = 1.0 - bkk;
      out.B.row(k) /= s;
      out.Gamma.row(k) /= s;
      out.c(k) /= s;
      out.B(k, k) = 0;
    } else if (std::abs(bkk) <= eps) {
      out.B(k, k) = 0;
    }
    for (Eigen::Index i = 0; i < out.B.cols(); ++i)
      if (i != k && std::abs(out.B(k, i)) <= eps) out.B(k, i) = 0;
    for (Eigen::Index j = 0; j < out.Gamma.cols(); ++j) {
      if (std::abs(out.Gamma(k, j)) <= eps) {
        out.Gamma(k, j) = 0;
        continue;
      }
      std::size_t b = m.block_of_coordinate(static_cast<std::size_t>(j));
      auto local = static_cast<Eigen::Index>(static_cast<std::size_t>(j) - m.block_offset(b));
      if (m.blocks[b].cov(local, local) <= eps) {
        // a.s. constant coordinate: fold it into the intercept
        out.c(k) += out.Gamma(k, j) * mu(j);
        out.Gamma(k, j) = 0;
      }
    }
  }
  return out;
}

}  // namespace scmkit
