#pragma once

namespace scmkit {

// Zero-test tolerance for the floating point path. SCMKIT_TOLERANCE overrides
// the default of 1e-9; read once.
double tolerance();

// Condition number above which Gaussian conditioning regularizes.
inline constexpr double kRegularizeCondition = 1e12;

}  // namespace scmkit
