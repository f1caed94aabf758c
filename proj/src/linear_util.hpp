#pragma once

#include <vector>

#include <Eigen/Dense>

#include "scmkit/graph.hpp"
#include "scmkit/scm.hpp"

namespace scmkit::detail {

inline std::vector<Eigen::Index> linear_indices(const LinearScm& m, const NodeSet& names) {
  std::vector<Eigen::Index> out;
  for (const auto& n : names) out.push_back(static_cast<Eigen::Index>(m.endo_index(n)));
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<Eigen::Index> complement(Eigen::Index n, const std::vector<Eigen::Index>& in) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 0; i < n; ++i)
    if (!std::binary_search(in.begin(), in.end(), i)) out.push_back(i);
  return out;
}

// Rank with a threshold relative to the largest pivot.
Eigen::Index numeric_rank(const Eigen::MatrixXd& a);

}  // namespace scmkit::detail
