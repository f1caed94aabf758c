#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>

#include "scmkit/scm.hpp"

namespace scmkit::dsl {

struct ModelSource {
  std::string text;
  Scm model;
  std::map<std::string, std::pair<int, int>> declared_at;  // name -> line, col
};

// Every failure is reported as DslError with a line:col position.
ModelSource parse_source(std::string_view text);
Scm parse(std::string_view text);
FiniteScm parse_finite(std::string_view text);
LinearScm parse_linear(std::string_view text);

std::string serialize(const FiniteScm& m);
std::string serialize(const LinearScm& m);
std::string serialize(const Scm& m);

// Literals as written in models: integers or symbols for finite values,
// integer / rational / decimal for reals. Throw DslError.
Atom parse_atom(std::string_view text);
double parse_real(std::string_view text);

inline constexpr std::size_t kMaxTableCells = 10000000;
inline constexpr int kMaxDepth = 256;

}  // namespace scmkit::dsl
