#include "scmkit/expr.hpp"

#include "scmkit/error.hpp"

namespace scmkit {

namespace {

ExprPtr node(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::add:
    case Expr::Kind::sub:
      return 1;
    case Expr::Kind::mul:
      return 2;
    case Expr::Kind::neg:
      return 3;
    case Expr::Kind::number:
      return e.number < 0 ? 3 : 4;
    default:
      return 4;
  }
}

std::string wrap(const Expr& e, int min_prec) {
  std::string s = print_expr(e);
  return precedence(e) < min_prec ? "(" + s + ")" : s;
}

const Rational& as_number(const Value& v) {
  if (const auto* r = std::get_if<Rational>(&v)) return *r;
  throw InvalidArgument("arithmetic on symbol \"" + std::get<std::string>(v) + "\"");
}

bool compare(const std::string& op, const Value& a, const Value& b) {
  if (op == "==") return a == b;
  if (op == "!=") return a != b;
  const Rational& x = as_number(a);
  const Rational& y = as_number(b);
  if (op == "<") return x < y;
  if (op == ">") return x > y;
  throw InvalidArgument("unknown comparison " + op);
}

}  // namespace

ExprPtr make_number(const Rational& r) {
  Expr e;
  e.kind = Expr::Kind::number;
  e.number = r;
  return node(std::move(e));
}

ExprPtr make_symbol(const std::string& s) {
  Expr e;
  e.kind = Expr::Kind::symbol;
  e.text = s;
  return node(std::move(e));
}

ExprPtr make_name(const std::string& n) {
  Expr e;
  e.kind = Expr::Kind::name;
  e.text = n;
  return node(std::move(e));
}

ExprPtr make_binary(Expr::Kind kind, ExprPtr l, ExprPtr r) {
  Expr e;
  e.kind = kind;
  e.kids = {std::move(l)};
  if (r) e.kids.push_back(std::move(r));
  return node(std::move(e));
}

ExprPtr make_ind(const std::string& cmp, ExprPtr l, ExprPtr r) {
  Expr e;
  e.kind = Expr::Kind::ind;
  e.cmp = cmp;
  e.kids = {std::move(l), std::move(r)};
  return node(std::move(e));
}

ExprPtr make_cond(const std::string& cmp, ExprPtr l, ExprPtr r, ExprPtr then, ExprPtr otherwise) {
  Expr e;
  e.kind = Expr::Kind::cond;
  e.cmp = cmp;
  e.kids = {std::move(l), std::move(r), std::move(then), std::move(otherwise)};
  return node(std::move(e));
}

Value evaluate(const Expr& e, const std::map<std::string, Value>& env) {
  switch (e.kind) {
    case Expr::Kind::number:
      return e.number;
    case Expr::Kind::symbol:
      return e.text;
    case Expr::Kind::name: {
      auto it = env.find(e.text);
      if (it == env.end()) throw InvalidArgument("unbound name " + e.text);
      return it->second;
    }
    case Expr::Kind::neg:
      return Rational(-as_number(evaluate(*e.kids[0], env)));
    case Expr::Kind::add:
      return Rational(as_number(evaluate(*e.kids[0], env)) + as_number(evaluate(*e.kids[1], env)));
    case Expr::Kind::sub:
      return Rational(as_number(evaluate(*e.kids[0], env)) - as_number(evaluate(*e.kids[1], env)));
    case Expr::Kind::mul:
      return Rational(as_number(evaluate(*e.kids[0], env)) * as_number(evaluate(*e.kids[1], env)));
    case Expr::Kind::ind:
      return Rational(compare(e.cmp, evaluate(*e.kids[0], env), evaluate(*e.kids[1], env)) ? 1 : 0);
    case Expr::Kind::cond:
      return compare(e.cmp, evaluate(*e.kids[0], env), evaluate(*e.kids[1], env))
                 ? evaluate(*e.kids[2], env)
                 : evaluate(*e.kids[3], env);
  }
  throw InvalidArgument("bad expression");
}

ExprPtr rename(const ExprPtr& e, const std::map<std::string, std::string>& names) {
  if (!e) return e;
  if (e->kind == Expr::Kind::name) {
    auto it = names.find(e->text);
    if (it == names.end()) return e;
    Expr copy = *e;
    copy.text = it->second;
    return node(std::move(copy));
  }
  if (e->kids.empty()) return e;
  Expr copy = *e;
  for (auto& k : copy.kids) k = rename(k, names);
  return node(std::move(copy));
}

void collect_names(const Expr& e, std::vector<std::string>& out) {
  if (e.kind == Expr::Kind::name) out.push_back(e.text);
  for (const auto& k : e.kids) collect_names(*k, out);
}

std::string print_expr(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::number: {
      Rational r = e.number;
      r.canonicalize();
      if (r.get_den() == 1) return r.get_num().get_str();
      return r.get_num().get_str() + "/" + r.get_den().get_str();
    }
    case Expr::Kind::symbol:
      return "\"" + e.text + "\"";
    case Expr::Kind::name:
      return e.text;
    case Expr::Kind::neg:
      return "-" + wrap(*e.kids[0], 3);
    case Expr::Kind::add:
      return wrap(*e.kids[0], 1) + " + " + wrap(*e.kids[1], 2);
    case Expr::Kind::sub:
      return wrap(*e.kids[0], 1) + " - " + wrap(*e.kids[1], 2);
    case Expr::Kind::mul:
      return wrap(*e.kids[0], 2) + "*" + wrap(*e.kids[1], 3);
    case Expr::Kind::ind:
      return "ind(" + print_expr(*e.kids[0]) + " " + e.cmp + " " + print_expr(*e.kids[1]) + ")";
    case Expr::Kind::cond:
      return "if(" + print_expr(*e.kids[0]) + " " + e.cmp + " " + print_expr(*e.kids[1]) + ", " +
             print_expr(*e.kids[2]) + ", " + print_expr(*e.kids[3]) + ")";
  }
  return {};
}

}  // namespace scmkit
