#pragma once

#include <random>

#include "scmkit/graph.hpp"
#include "scmkit/scm.hpp"

namespace scmkit::testing {

struct RandomSpec {
  std::size_t max_endo = 5;
  std::size_t max_values = 3;
  std::size_t max_exo = 3;
  std::size_t max_args = 3;
  double self_arg = 0.15;      // chance a mechanism reads its own variable
  double zero_prob = 0.15;     // chance a noise value gets probability 0
};

FiniteScm random_finite(std::mt19937_64& rng, const RandomSpec& spec = {});

// Same signature (names, domains, measure) as m, fresh random mechanisms.
FiniteScm random_sibling(std::mt19937_64& rng, const FiniteScm& m, const RandomSpec& spec = {});

MixedGraph random_graph(std::mt19937_64& rng, std::size_t n, double p_directed, double p_bidirected);

// All directed graphs on n nodes (self-loops excluded), edge set encoded in a bitmask.
MixedGraph directed_graph_from_mask(std::size_t n, std::uint64_t mask);

}  // namespace scmkit::testing
