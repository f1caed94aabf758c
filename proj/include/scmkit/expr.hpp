#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "scmkit/rational.hpp"

namespace scmkit {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Expression tree of a finite-model equation, kept next to the tabulated
// mechanism so the model can be written back out as it was written.
struct Expr {
  enum class Kind { number, symbol, name, neg, add, sub, mul, ind, cond };
  Kind kind = Kind::number;
  Rational number;
  std::string text;  // symbol value or variable name
  std::string cmp;   // ind / cond comparison operator
  // ind: {lhs, rhs}; cond: {lhs, rhs, then, else}; binary: {l, r}; neg: {x}
  std::vector<ExprPtr> kids;
  int line = 0;
  int col = 0;
};

using Value = std::variant<Rational, std::string>;

ExprPtr make_number(const Rational& r);
ExprPtr make_symbol(const std::string& s);
ExprPtr make_name(const std::string& n);
ExprPtr make_binary(Expr::Kind kind, ExprPtr l, ExprPtr r);
ExprPtr make_ind(const std::string& cmp, ExprPtr l, ExprPtr r);
ExprPtr make_cond(const std::string& cmp, ExprPtr l, ExprPtr r, ExprPtr then, ExprPtr otherwise);

// Throws InvalidArgument on type errors (arithmetic on symbols, ordering
// symbols) and on unbound names.
Value evaluate(const Expr& e, const std::map<std::string, Value>& env);

ExprPtr rename(const ExprPtr& e, const std::map<std::string, std::string>& names);
void collect_names(const Expr& e, std::vector<std::string>& out);

std::string print_expr(const Expr& e);

}  // namespace scmkit
