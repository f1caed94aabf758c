#pragma once

#include <algorithm>
#include <vector>

#include "scmkit/scm.hpp"

namespace scmkit::detail {

inline void assign(Config& x, Config& e, VarRef v, std::uint32_t value) {
  (v.endo() ? x : e)[v.index] = value;
}

inline std::uint32_t lookup(const Config& x, const Config& e, VarRef v) {
  return (v.endo() ? x : e)[v.index];
}

// Runs fn over every assignment of refs, writing into x / e. Other slots keep
// their values. Stops early and returns false when fn returns false.
template <class Fn>
bool for_each_assignment(const FiniteScm& m, const std::vector<VarRef>& refs, bool support_only,
                         Config& x, Config& e, Fn&& fn) {
  std::vector<std::vector<std::uint32_t>> choices;
  choices.reserve(refs.size());
  for (VarRef v : refs) choices.push_back(choices_of(m, v, support_only));
  for (Product p(std::move(choices)); !p.done(); p.next()) {
    for (std::size_t i = 0; i < refs.size(); ++i) assign(x, e, refs[i], p.values()[i]);
    if (!fn()) return false;
  }
  return true;
}

// First value of every endogenous domain, first support value of every noise.
inline void pinned(const FiniteScm& m, Config& x, Config& e) {
  x.assign(m.num_endo(), 0);
  e.assign(m.num_exo(), 0);
  for (std::size_t j = 0; j < m.num_exo(); ++j) {
    auto s = m.exogenous[j].support();
    e[j] = s.empty() ? 0 : s.front();
  }
}

inline bool in_support(const FiniteScm& m, const Config& e, const std::vector<VarRef>& refs) {
  for (VarRef v : refs)
    if (!v.endo() && m.exogenous[v.index].probs[e[v.index]] <= 0) return false;
  return true;
}

inline std::vector<VarRef> sorted_union(std::vector<VarRef> a, const std::vector<VarRef>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

}  // namespace scmkit::detail
