#include "scmkit/tolerance.hpp"

#include <cstdlib>
#include <string>

namespace scmkit {

double tolerance() {
  static const double eps = [] {
    const char* env = std::getenv("SCMKIT_TOLERANCE");
    if (env == nullptr) return 1e-9;
    try {
      double v = std::stod(env);
      if (v > 0) return v;
    } catch (...) {
    }
    return 1e-9;
  }();
  return eps;
}

}  // namespace scmkit
