#pragma once

#include <vector>

#include "scmkit/rational.hpp"

namespace scmkit::detail {

// Is p a convex combination of the points? Exact phase-one simplex with
// Bland's rule. All vectors have the same length.
bool in_convex_hull(const std::vector<std::vector<Rational>>& points, const std::vector<Rational>& p);

}  // namespace scmkit::detail
