#pragma once

#include <optional>
#include <string>
#include <utility>

#include <json.hpp>

#include "scmkit/analysis.hpp"
#include "scmkit/graph.hpp"
#include "scmkit/scm.hpp"

namespace scmkit {

enum class EquivalenceLevel { observational, interventional, counterfactual };
std::string to_string(EquivalenceLevel level);

struct EquivalenceReport {
  EquivalenceLevel level = EquivalenceLevel::observational;
  NodeSet margin;
  bool verdict = true;
  nlohmann::json witness;  // null iff verdict
};

nlohmann::json to_json(const EquivalenceReport& r);

inline constexpr std::size_t kInterventionCap = 100000;

EquivalenceReport observationally_equivalent(const FiniteScm& m1, const FiniteScm& m2, const NodeSet& margin);
EquivalenceReport interventionally_equivalent(const FiniteScm& m1, const FiniteScm& m2,
                                              const NodeSet& margin, std::size_t cap = kInterventionCap);
EquivalenceReport counterfactually_equivalent(const FiniteScm& m1, const FiniteScm& m2,
                                              const NodeSet& margin, std::size_t cap = kInterventionCap);

EquivalenceReport observationally_equivalent(const LinearScm& m1, const LinearScm& m2, const NodeSet& margin);
// Every failing target pattern is listed under witness["failing"]; the first
// one is the primary witness.
EquivalenceReport interventionally_equivalent(const LinearScm& m1, const LinearScm& m2, const NodeSet& margin);
EquivalenceReport counterfactually_equivalent(const LinearScm& m1, const LinearScm& m2, const NodeSet& margin);

struct DirectCause {
  bool direct = false;
  // Interventions on everything but j, differing only at i.
  std::optional<std::pair<Assignment, Assignment>> witness;
};

DirectCause is_direct_cause(const FiniteScm& m, const std::string& i, const std::string& j);
bool is_direct_cause(const LinearScm& m, const std::string& i, const std::string& j);

MixedGraph direct_causal_graph(const FiniteScm& m);
MixedGraph direct_causal_graph(const LinearScm& m);

MixedGraph direct_causal_graph_wrt(const FiniteScm& m, const NodeSet& observed);
MixedGraph direct_causal_graph_wrt(const LinearScm& m, const NodeSet& observed);

bool is_indirect_cause(const FiniteScm& m, const std::string& i, const std::string& j);
bool is_indirect_cause(const LinearScm& m, const std::string& i, const std::string& j);

}  // namespace scmkit
