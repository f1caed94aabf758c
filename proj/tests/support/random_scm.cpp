#include "support/random_scm.hpp"

#include <algorithm>

namespace scmkit::testing {

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool coin(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

std::vector<Rational> random_probs(std::mt19937_64& rng, std::size_t k, double zero_prob) {
  std::vector<Rational> w(k);
  Rational total = 0;
  for (auto& x : w) {
    x = coin(rng, zero_prob) ? 0 : static_cast<long>(pick(rng, 1, 4));
    total += x;
  }
  if (total == 0) {
    w[pick(rng, 0, k - 1)] = 1;
    total = 1;
  }
  for (auto& x : w) {
    x /= total;
    x.canonicalize();
  }
  return w;
}

void fill_mechanisms(std::mt19937_64& rng, FiniteScm& m, const RandomSpec& spec) {
  const std::size_t n = m.num_endo(), q = m.num_exo();
  m.mechanisms.assign(n, {});
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<VarRef> pool;
    for (std::size_t i = 0; i < n; ++i)
      if (i != k) pool.push_back(endo_ref(i));
    for (std::size_t j = 0; j < q; ++j) pool.push_back(exo_ref(j));
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(std::min(pool.size(), pick(rng, 0, spec.max_args)));
    if (coin(rng, spec.self_arg)) pool.push_back(endo_ref(k));
    std::sort(pool.begin(), pool.end());
    const auto size = m.endogenous[k].domain.size();
    m.mechanisms[k] = tabulate(m, pool, [&](const std::vector<std::uint32_t>&) {
      return static_cast<std::uint32_t>(pick(rng, 0, size - 1));
    });
  }
}

}  // namespace

FiniteScm random_finite(std::mt19937_64& rng, const RandomSpec& spec) {
  FiniteScm m;
  const std::size_t n = pick(rng, 1, spec.max_endo), q = pick(rng, 0, spec.max_exo);
  for (std::size_t i = 0; i < n; ++i)
    m.endogenous.push_back({"X" + std::to_string(i + 1),
                            int_domain(0, static_cast<std::int64_t>(pick(rng, 2, spec.max_values)) - 1)});
  for (std::size_t j = 0; j < q; ++j) {
    const auto k = pick(rng, 1, spec.max_values);
    ExogenousVar e{"E" + std::to_string(j + 1), int_domain(0, static_cast<std::int64_t>(k) - 1), {}};
    e.probs = random_probs(rng, k, spec.zero_prob);
    m.exogenous.push_back(std::move(e));
  }
  fill_mechanisms(rng, m, spec);
  return m;
}

FiniteScm random_sibling(std::mt19937_64& rng, const FiniteScm& m, const RandomSpec& spec) {
  FiniteScm out = m;
  fill_mechanisms(rng, out, spec);
  return out;
}

MixedGraph random_graph(std::mt19937_64& rng, std::size_t n, double p_directed, double p_bidirected) {
  MixedGraph g;
  for (std::size_t i = 0; i < n; ++i) g.add_node("v" + std::to_string(i));
  const auto& names = g.nodes();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (coin(rng, p_directed)) g.add_directed(names[i], names[j]);
      if (i < j && coin(rng, p_bidirected)) g.add_bidirected(names[i], names[j]);
    }
  return g;
}

MixedGraph directed_graph_from_mask(std::size_t n, std::uint64_t mask) {
  MixedGraph g;
  for (std::size_t i = 0; i < n; ++i) g.add_node("v" + std::to_string(i));
  std::size_t bit = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (mask >> bit & 1) g.add_directed("v" + std::to_string(i), "v" + std::to_string(j));
      ++bit;
    }
  return g;
}

}  // namespace scmkit::testing
