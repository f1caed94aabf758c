#pragma once

#include <functional>
#include <vector>

#include "scmkit/scm.hpp"

namespace scmkit::detail {

// Backtracking enumeration of the solutions of the equations of a target set.
// Targets are visited in a topological order of their strongly connected
// components and each equation is checked as soon as its inputs are set.
class FiberSolver {
 public:
  FiberSolver(const FiniteScm& m, std::vector<std::size_t> targets);

  // Fills the target slots of x; fn returns false to stop. Returns false if
  // stopped early.
  bool solve(Config& x, const Config& e, const std::function<bool(const Config&)>& fn) const;
  std::size_t count(Config& x, const Config& e, std::size_t limit) const;

  const std::vector<std::size_t>& targets() const { return targets_; }
  // Declared inputs of the target equations outside the target set.
  const std::vector<VarRef>& inputs() const { return inputs_; }

 private:
  bool rec(std::size_t p, Config& x, const Config& e,
           const std::function<bool(const Config&)>& fn) const;

  const FiniteScm& m_;
  std::vector<std::size_t> targets_;
  std::vector<std::size_t> order_;
  std::vector<std::vector<std::size_t>> checks_;
  std::vector<bool> determined_;
  std::vector<VarRef> inputs_;
};

std::string describe(const FiniteScm& m, const std::vector<VarRef>& refs, const Config& x,
                     const Config& e);

std::vector<std::size_t> endo_indices(const FiniteScm& m, const NodeSet& names);

}  // namespace scmkit::detail
