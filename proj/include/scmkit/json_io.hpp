#pragma once

#include <json.hpp>

#include "scmkit/scm.hpp"

namespace scmkit {

// Full model export. Finite tables are nested arrays (one level per argument,
// in domain order) of output values; rationals are "p/q" strings; matrices
// are row-major arrays of rows.
nlohmann::json to_json(const FiniteScm& m);
nlohmann::json to_json(const LinearScm& m);

}  // namespace scmkit
