#pragma once

#include "scmkit/analysis.hpp"
#include "scmkit/scm.hpp"

namespace scmkit {

FiniteScm intervene(const FiniteScm& m, const FiniteIntervention& iv);
LinearScm intervene(const LinearScm& m, const LinearIntervention& iv);

FiniteScm twin(const FiniteScm& m);
LinearScm twin(const LinearScm& m);

// Requires unique solvability w.r.t. latent; throws NotUniquelySolvable.
FiniteScm marginalize(const FiniteScm& m, const NodeSet& latent);
LinearScm marginalize(const LinearScm& m, const NodeSet& latent);

FiniteScm extend(const FiniteScm& m);
LinearScm extend(const LinearScm& m);

// Names of the endogenous copies extend() adds.
std::vector<std::string> extended_names(const FiniteScm& m);
std::vector<std::string> extended_names(const LinearScm& m);

std::string primed(const std::string& name);

}  // namespace scmkit
