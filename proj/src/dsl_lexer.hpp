#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace scmkit::dsl::detail {

struct Token {
  enum class Kind { ident, number, string, punct, end };
  Kind kind = Kind::end;
  std::string text;
  int line = 1;
  int col = 1;
};

std::vector<Token> lex(std::string_view text);

bool is_reserved(const std::string& word);
bool is_identifier(const std::string& word);

}  // namespace scmkit::dsl::detail
