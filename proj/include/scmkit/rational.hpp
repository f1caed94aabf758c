#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace scmkit {

using Rational = mpq_class;

// Always "p/q", including integers ("3/1").
std::string to_pq(const Rational& r);

// Accepts "p", "p/q" with optional sign. Throws InvalidArgument.
Rational parse_rational(std::string_view text);

}  // namespace scmkit
