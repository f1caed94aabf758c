#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "scmkit/distribution.hpp"
#include "scmkit/graph.hpp"
#include "scmkit/scm.hpp"

namespace scmkit {

enum class SeparationKind { d, sigma };
std::string to_string(SeparationKind kind);

struct MarkovTriple {
  NodeSet a, b, s;
  bool separated = false;
  bool independent = false;
  bool violation = false;  // separated but dependent
};

struct MarkovReport {
  SeparationKind kind = SeparationKind::sigma;
  std::vector<MarkovTriple> triples;
  std::size_t violations() const;
};

nlohmann::json to_json(const MarkovReport& r);
std::string to_text(const MarkovReport& r);

bool conditional_independent(const DiscreteDistribution& d, const NodeSet& a, const NodeSet& b,
                             const NodeSet& s);
bool conditional_independent(const GaussianDistribution& d, const NodeSet& a, const NodeSet& b,
                             const NodeSet& s);

// Singleton A and B unless full_subsets, which enumerates every pair of
// disjoint nonempty sets (exponential).
MarkovReport verify_markov(const FiniteScm& m, SeparationKind kind, std::size_t max_conditioning,
                           bool full_subsets = false);
MarkovReport verify_markov(const LinearScm& m, SeparationKind kind, std::size_t max_conditioning,
                           bool full_subsets = false);

}  // namespace scmkit
