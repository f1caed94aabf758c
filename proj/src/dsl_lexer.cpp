#include "dsl_lexer.hpp"

#include <array>
#include <cctype>

#include "scmkit/error.hpp"

namespace scmkit::dsl::detail {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '\'';
}
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

}  // namespace

bool is_reserved(const std::string& word) {
  static const std::array<const char*, 11> words = {"model", "finite", "linear", "var",  "noise", "eq",
                                                    "ind",   "if",     "Normal", "mean", "cov"};
  for (const char* w : words)
    if (word == w) return true;
  return false;
}

bool is_identifier(const std::string& word) {
  if (word.empty() || !ident_start(word[0])) return false;
  for (char c : word)
    if (!ident_char(c)) return false;
  return true;
}

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < s.size()) {
    char c = s[i];
    if (c == '#') {
      while (i < s.size() && s[i] != '\n') advance(1);
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    std::size_t start = i;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < s.size() && ident_char(s[j])) ++j;
      t.kind = Token::Kind::ident;
      t.text = std::string(s.substr(start, j - start));
      advance(j - i);
    } else if (digit(c)) {
      std::size_t j = i;
      while (j < s.size() && digit(s[j])) ++j;
      if (j + 1 < s.size() && s[j] == '/' && digit(s[j + 1])) {
        ++j;
        while (j < s.size() && digit(s[j])) ++j;
      } else {
        if (j + 1 < s.size() && s[j] == '.' && digit(s[j + 1])) {
          ++j;
          while (j < s.size() && digit(s[j])) ++j;
        }
        if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
          std::size_t k = j + 1;
          if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
          if (k < s.size() && digit(s[k])) {
            while (k < s.size() && digit(s[k])) ++k;
            j = k;
          }
        }
      }
      if (j < s.size() && ident_start(s[j]))
        throw DslError("malformed number", line, col);
      t.kind = Token::Kind::number;
      t.text = std::string(s.substr(start, j - start));
      advance(j - i);
    } else if (c == '"') {
      std::size_t j = i + 1;
      while (j < s.size() && s[j] != '"' && s[j] != '\n') ++j;
      if (j >= s.size() || s[j] != '"') throw DslError("unterminated string", line, col);
      t.kind = Token::Kind::string;
      t.text = std::string(s.substr(i + 1, j - i - 1));
      advance(j + 1 - i);
    } else {
      std::string two(s.substr(i, 2));
      if (two == "==" || two == "!=") {
        t.kind = Token::Kind::punct;
        t.text = two;
        advance(2);
      } else if (std::string_view("{}()[],:~=<>+-*").find(c) != std::string_view::npos) {
        t.kind = Token::Kind::punct;
        t.text = std::string(1, c);
        advance(1);
      } else {
        std::string shown = std::isprint(static_cast<unsigned char>(c))
                                ? std::string(1, c)
                                : "\\x" + std::to_string(static_cast<unsigned char>(c));
        throw DslError("unexpected character '" + shown + "'", line, col);
      }
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Token::Kind::end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

}  // namespace scmkit::dsl::detail
