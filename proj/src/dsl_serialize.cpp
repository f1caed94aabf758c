#include <charconv>
#include <sstream>

#include "dsl_lexer.hpp"
#include "scmkit/dsl.hpp"

namespace scmkit::dsl {

namespace {

std::string real_text(double v) {
  if (v == 0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string value_text(const Atom& a) {
  if (const auto* i = std::get_if<std::int64_t>(&a)) return std::to_string(*i);
  const auto& s = std::get<std::string>(a);
  if (detail::is_identifier(s) && !detail::is_reserved(s)) return s;
  return "\"" + s + "\"";
}

std::string prob_text(const Rational& r) {
  Rational c = r;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

std::string domain_text(const FiniteDomain& d) {
  std::string s = "{";
  for (std::size_t i = 0; i < d.size(); ++i) s += (i ? ", " : "") + value_text(d.values[i]);
  return s + "}";
}

ExprPtr literal(const Atom& a) {
  if (const auto* i = std::get_if<std::int64_t>(&a)) return make_number(Rational(*i));
  return make_symbol(std::get<std::string>(a));
}

// Canonical expression for a table: a sum of guarded terms for integer
// outputs, a chain of if(...) otherwise.
ExprPtr table_expr(const FiniteScm& m, std::size_t k) {
  const auto& f = m.mechanisms[k];
  const auto& dom = m.endogenous[k].domain;
  bool symbolic = false;
  for (auto v : f.table) symbolic = symbolic || std::holds_alternative<std::string>(dom.values[v]);
  std::vector<std::vector<std::uint32_t>> choices;
  for (VarRef v : f.args) choices.push_back(choices_of(m, v, false));
  auto guard = [&](const std::vector<std::uint32_t>& vals) {
    ExprPtr g;
    for (std::size_t i = 0; i < f.args.size(); ++i) {
      ExprPtr t = make_ind("==", make_name(m.name(f.args[i])), literal(m.domain(f.args[i]).values[vals[i]]));
      g = g ? make_binary(Expr::Kind::mul, g, t) : t;
    }
    return g;
  };
  if (f.args.empty()) return literal(dom.values[f.table[0]]);
  if (!symbolic) {
    ExprPtr sum;
    std::size_t row = 0;
    for (Product p(choices); !p.done(); p.next(), ++row) {
      std::int64_t v = std::get<std::int64_t>(dom.values[f.table[row]]);
      if (v == 0) continue;
      ExprPtr t = make_binary(Expr::Kind::mul, make_number(Rational(v)), guard(p.values()));
      sum = sum ? make_binary(Expr::Kind::add, sum, t) : t;
    }
    return sum ? sum : make_number(0);
  }
  std::vector<std::pair<ExprPtr, Atom>> rows;
  std::size_t row = 0;
  for (Product p(choices); !p.done(); p.next(), ++row) rows.emplace_back(guard(p.values()), dom.values[f.table[row]]);
  ExprPtr e = literal(rows.back().second);
  for (std::size_t i = rows.size() - 1; i-- > 0;)
    e = make_cond("==", rows[i].first, make_number(1), literal(rows[i].second), e);
  return e;
}

}  // namespace

std::string serialize(const FiniteScm& m) {
  std::ostringstream os;
  os << "model finite\n";
  for (const auto& v : m.endogenous) os << "var " << v.name << " : " << domain_text(v.domain) << "\n";
  for (const auto& v : m.exogenous) {
    os << "noise " << v.name << " : " << domain_text(v.domain) << " ~ {";
    for (std::size_t i = 0; i < v.domain.size(); ++i)
      os << (i ? ", " : "") << value_text(v.domain.values[i]) << ": " << prob_text(v.probs[i]);
    os << "}\n";
  }
  for (std::size_t k = 0; k < m.num_endo(); ++k) {
    ExprPtr e = m.mechanisms[k].expr ? m.mechanisms[k].expr : table_expr(m, k);
    os << "eq " << m.endogenous[k].name << " = " << print_expr(*e) << "\n";
  }
  return os.str();
}

std::string serialize(const LinearScm& m) {
  std::ostringstream os;
  os << "model linear\n";
  if (!m.endogenous.empty()) {
    os << "var";
    for (const auto& n : m.endogenous) os << " " << n;
    os << "\n";
  }
  for (const auto& b : m.blocks) {
    os << "noise " << b.name << " : Normal(";
    if (b.dim() == 1) {
      os << real_text(b.mean(0)) << ", " << real_text(b.cov(0, 0));
    } else {
      os << "mean=[";
      for (Eigen::Index i = 0; i < b.mean.size(); ++i) os << (i ? ", " : "") << real_text(b.mean(i));
      os << "], cov=[";
      for (Eigen::Index r = 0; r < b.cov.rows(); ++r) {
        os << (r ? ", " : "") << "[";
        for (Eigen::Index c = 0; c < b.cov.cols(); ++c) os << (c ? ", " : "") << real_text(b.cov(r, c));
        os << "]";
      }
      os << "]";
    }
    os << ")\n";
  }
  const auto coords = m.coordinate_names();
  for (std::size_t k = 0; k < m.num_endo(); ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    std::vector<std::string> terms;
    for (std::size_t i = 0; i < m.num_endo(); ++i)
      if (double v = m.B(row, static_cast<Eigen::Index>(i)); v != 0)
        terms.push_back(real_text(v) + "*" + m.endogenous[i]);
    for (std::size_t j = 0; j < coords.size(); ++j)
      if (double v = m.Gamma(row, static_cast<Eigen::Index>(j)); v != 0)
        terms.push_back(real_text(v) + "*" + coords[j]);
    if (m.c(row) != 0) terms.push_back(real_text(m.c(row)));
    os << "eq " << m.endogenous[k] << " =";
    if (terms.empty()) os << " 0";
    for (std::size_t t = 0; t < terms.size(); ++t) os << (t ? " + " : " ") << terms[t];
    os << "\n";
  }
  return os.str();
}

std::string serialize(const Scm& m) {
  return std::visit([](const auto& x) { return serialize(x); }, m);
}

}  // namespace scmkit::dsl
