#include <cmath>
#include <limits>
#include <set>

#include <Eigen/Eigenvalues>

#include "dsl_lexer.hpp"
#include "scmkit/dsl.hpp"
#include "scmkit/error.hpp"
#include "scmkit/tolerance.hpp"

namespace scmkit::dsl {

using detail::Token;

namespace {

bool is_plain_integer(const std::string& s) { return s.find_first_not_of("0123456789") == std::string::npos; }
bool is_rational_text(const std::string& s) {
  return s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
         s.find('E') == std::string::npos;
}

struct RawVar {
  std::string name;
  FiniteDomain domain;
  Token at;
};

struct RawNoise {
  std::string name;
  FiniteDomain domain;
  std::vector<Rational> probs;
  Token at;
};

struct RawEq {
  Token target;
  ExprPtr expr;
};

struct RawTerm {
  double coef = 1;
  bool has_ref = false;
  Token ref;
  long index = -1;  // E[i]
};

struct RawLinearEq {
  Token target;
  std::vector<RawTerm> terms;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(detail::lex(text)) {}

  ModelSource run(std::string_view text) {
    ModelSource src;
    src.text = std::string(text);
    expect_word("model");
    const Token& family = take();
    if (family.kind == Token::Kind::ident && family.text == "finite") {
      src.model = finite(src);
    } else if (family.kind == Token::Kind::ident && family.text == "linear") {
      src.model = linear(src);
    } else {
      fail("expected 'finite' or 'linear'", family);
    }
    return src;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, const Token& t) { throw DslError(msg, t.line, t.col); }
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() {
    const Token& t = toks_[pos_];
    if (t.kind != Token::Kind::end) ++pos_;
    return t;
  }
  bool at_punct(const char* p) const { return peek().kind == Token::Kind::punct && peek().text == p; }
  bool at_word(const char* w) const { return peek().kind == Token::Kind::ident && peek().text == w; }
  void expect_punct(const char* p) {
    if (!at_punct(p)) fail(std::string("expected '") + p + "'" + found(), peek());
    take();
  }
  void expect_word(const char* w) {
    if (!at_word(w)) fail(std::string("expected '") + w + "'" + found(), peek());
    take();
  }
  std::string found() const {
    if (peek().kind == Token::Kind::end) return " but reached end of input";
    return " but found '" + peek().text + "'";
  }
  Token name() {
    const Token& t = peek();
    if (t.kind != Token::Kind::ident) fail("expected a name" + found(), t);
    if (detail::is_reserved(t.text)) fail("reserved word '" + t.text + "' used as a name", t);
    return take();
  }
  void declare(ModelSource& src, const Token& t) {
    if (!src.declared_at.emplace(t.text, std::make_pair(t.line, t.col)).second)
      fail("duplicate name " + t.text, t);
  }

  // ---- finite models ----

  Atom value() {
    const Token& t = peek();
    if (at_punct("-")) {
      take();
      const Token& n = peek();
      if (n.kind != Token::Kind::number || !is_plain_integer(n.text))
        fail("domain values must be integers or symbols", n);
      return integer(take(), true);
    }
    if (t.kind == Token::Kind::number) {
      if (!is_plain_integer(t.text)) fail("domain values must be integers or symbols", t);
      return integer(take(), false);
    }
    if (t.kind == Token::Kind::string) return take().text;
    if (t.kind == Token::Kind::ident) {
      if (detail::is_reserved(t.text)) fail("reserved word '" + t.text + "' used as a value", t);
      return take().text;
    }
    fail("expected a value" + found(), t);
  }

  Rational rational_at(const Token& t) {
    try {
      return parse_rational(t.text);
    } catch (const InvalidArgument& e) {
      fail(e.what(), t);
    }
  }

  std::int64_t integer(const Token& t, bool negative) {
    mpz_class z(t.text, 10);
    if (negative) z = -z;
    if (!z.fits_slong_p()) fail("integer out of range", t);
    return z.get_si();
  }

  FiniteDomain domain() {
    FiniteDomain d;
    expect_punct("{");
    std::set<Atom> seen;
    while (true) {
      const Token at = peek();
      Atom a = value();
      if (!seen.insert(a).second) fail("duplicate domain value " + atom_to_string(a), at);
      d.values.push_back(std::move(a));
      if (at_punct(",")) {
        take();
        continue;
      }
      expect_punct("}");
      return d;
    }
  }

  Rational probability() {
    bool negative = false;
    if (at_punct("-")) {
      take();
      negative = true;
    }
    const Token& t = peek();
    if (t.kind != Token::Kind::number) fail("expected a probability" + found(), t);
    if (!is_rational_text(t.text)) fail("decimal literals are not allowed in finite models", t);
    Rational r = rational_at(take());
    if (negative) r = -r;
    if (r < 0) fail("negative probability", t);
    return r;
  }

  ExprPtr expr(int depth) {
    if (depth > kMaxDepth) fail("expression nested too deeply", peek());
    ExprPtr lhs = product(depth + 1);
    while (at_punct("+") || at_punct("-")) {
      auto kind = take().text == "+" ? Expr::Kind::add : Expr::Kind::sub;
      lhs = make_binary(kind, lhs, product(depth + 1));
    }
    return lhs;
  }

  ExprPtr product(int depth) {
    ExprPtr lhs = unary(depth + 1);
    while (at_punct("*")) {
      take();
      lhs = make_binary(Expr::Kind::mul, lhs, unary(depth + 1));
    }
    return lhs;
  }

  ExprPtr unary(int depth) {
    if (depth > kMaxDepth) fail("expression nested too deeply", peek());
    if (at_punct("-")) {
      take();
      return make_binary(Expr::Kind::neg, unary(depth + 1), nullptr);
    }
    return primary(depth + 1);
  }

  std::string comparison() {
    for (const char* op : {"==", "!=", "<", ">"})
      if (at_punct(op)) {
        take();
        return op;
      }
    fail("expected a comparison operator" + found(), peek());
  }

  ExprPtr primary(int depth) {
    if (depth > kMaxDepth) fail("expression nested too deeply", peek());
    const Token t = peek();
    if (t.kind == Token::Kind::number) {
      if (!is_rational_text(t.text)) fail("decimal literals are not allowed in finite models", t);
      take();
      return make_number(rational_at(t));
    }
    if (t.kind == Token::Kind::string) {
      take();
      return make_symbol(t.text);
    }
    if (at_punct("(")) {
      take();
      ExprPtr e = expr(depth + 1);
      expect_punct(")");
      return e;
    }
    if (at_word("ind")) {
      take();
      expect_punct("(");
      ExprPtr l = expr(depth + 1);
      std::string op = comparison();
      ExprPtr r = expr(depth + 1);
      expect_punct(")");
      return make_ind(op, l, r);
    }
    if (at_word("if")) {
      take();
      expect_punct("(");
      ExprPtr l = expr(depth + 1);
      std::string op = comparison();
      ExprPtr r = expr(depth + 1);
      expect_punct(",");
      ExprPtr a = expr(depth + 1);
      expect_punct(",");
      ExprPtr b = expr(depth + 1);
      expect_punct(")");
      return make_cond(op, l, r, a, b);
    }
    if (t.kind == Token::Kind::ident) {
      Token n = name();
      Expr e;
      e.kind = Expr::Kind::name;
      e.text = n.text;
      e.line = n.line;
      e.col = n.col;
      return std::make_shared<const Expr>(std::move(e));
    }
    fail("expected an expression" + found(), t);
  }

  void resolve_names(const FiniteScm& m, const Expr& e, std::set<VarRef>& refs) {
    if (e.kind == Expr::Kind::name) {
      auto v = m.find(e.text);
      if (!v) throw DslError("undeclared name " + e.text, e.line, e.col);
      refs.insert(*v);
    }
    for (const auto& k : e.kids) resolve_names(m, *k, refs);
  }

  TabularMechanism tabulate_eq(const FiniteScm& m, std::size_t k, const RawEq& eq) {
    std::set<VarRef> refs;
    resolve_names(m, *eq.expr, refs);
    std::vector<VarRef> args(refs.begin(), refs.end());
    std::size_t cells = 1;
    for (VarRef v : args) {
      cells *= m.domain(v).size();
      if (cells > kMaxTableCells)
        fail("equation table exceeds " + std::to_string(kMaxTableCells) + " cells", eq.target);
    }
    const auto& target = m.endogenous[k];
    std::map<std::string, Value> env;
    auto to_value = [](const Atom& a) -> Value {
      if (const auto* i = std::get_if<std::int64_t>(&a)) return Rational(*i);
      return std::get<std::string>(a);
    };
    TabularMechanism f = tabulate(m, args, [&](const std::vector<std::uint32_t>& vals) -> std::uint32_t {
      bool positive = true;
      for (std::size_t i = 0; i < args.size(); ++i) {
        const Atom& a = m.domain(args[i]).values[vals[i]];
        env[m.name(args[i])] = to_value(a);
        if (!args[i].endo() && m.exogenous[args[i].index].probs[vals[i]] == 0) positive = false;
      }
      auto where = [&] {
        std::string s;
        for (std::size_t i = 0; i < args.size(); ++i)
          s += (i ? ", " : "") + m.name(args[i]) + "=" + atom_to_string(m.domain(args[i]).values[vals[i]]);
        return args.empty() ? std::string() : " at (" + s + ")";
      };
      Value out;
      try {
        out = evaluate(*eq.expr, env);
      } catch (const InvalidArgument& e) {
        fail(std::string(e.what()) + " in equation of " + target.name + where(), eq.target);
      }
      std::optional<Atom> atom;
      if (const auto* r = std::get_if<Rational>(&out)) {
        if (r->get_den() == 1 && r->get_num().fits_slong_p()) atom = Atom(r->get_num().get_si());
      } else {
        atom = Atom(std::get<std::string>(out));
      }
      std::optional<std::uint32_t> idx;
      if (atom) idx = target.domain.find(*atom);
      if (idx) return *idx;
      if (!positive) return 0;
      std::string shown = std::holds_alternative<Rational>(out) ? std::get<Rational>(out).get_str()
                                                                : std::get<std::string>(out);
      fail("value " + shown + " of " + target.name + where() + " is outside its domain",
           eq.target);
    });
    f.expr = eq.expr;
    return f;
  }

  FiniteScm finite(ModelSource& src) {
    std::vector<RawVar> vars;
    std::vector<RawNoise> noises;
    std::vector<RawEq> eqs;
    while (peek().kind != Token::Kind::end) {
      if (at_word("var")) {
        take();
        Token n = name();
        declare(src, n);
        expect_punct(":");
        vars.push_back({n.text, domain(), n});
      } else if (at_word("noise")) {
        take();
        Token n = name();
        declare(src, n);
        expect_punct(":");
        RawNoise noise{n.text, domain(), {}, n};
        noise.probs.assign(noise.domain.size(), 0);
        expect_punct("~");
        expect_punct("{");
        std::vector<bool> given(noise.domain.size(), false);
        while (true) {
          Token at = peek();
          Atom a = value();
          auto idx = noise.domain.find(a);
          if (!idx) fail("value " + atom_to_string(a) + " is not in the domain of " + n.text, at);
          if (given[*idx]) fail("duplicate probability for " + atom_to_string(a), at);
          given[*idx] = true;
          expect_punct(":");
          noise.probs[*idx] = probability();
          if (at_punct(",")) {
            take();
            continue;
          }
          expect_punct("}");
          break;
        }
        Rational sum = 0;
        for (const auto& p : noise.probs) sum += p;
        if (sum != 1) fail("probabilities of " + n.text + " sum to " + to_pq(sum) + ", not 1", n);
        noises.push_back(std::move(noise));
      } else if (at_word("eq")) {
        take();
        Token n = name();
        expect_punct("=");
        eqs.push_back({n, expr(0)});
      } else {
        fail("expected 'var', 'noise' or 'eq'" + found(), peek());
      }
    }
    FiniteScm m;
    for (auto& v : vars) m.endogenous.push_back({v.name, v.domain});
    for (auto& v : noises) m.exogenous.push_back({v.name, v.domain, v.probs});
    std::vector<const RawEq*> by_var(vars.size(), nullptr);
    for (const auto& eq : eqs) {
      auto ref = m.find(eq.target.text);
      if (!ref) fail("undeclared name " + eq.target.text, eq.target);
      if (!ref->endo()) fail("equation given for exogenous variable " + eq.target.text, eq.target);
      if (by_var[ref->index]) fail("second equation for " + eq.target.text, eq.target);
      by_var[ref->index] = &eq;
    }
    for (std::size_t k = 0; k < vars.size(); ++k) {
      if (!by_var[k]) fail("no equation for " + vars[k].name, vars[k].at);
      m.mechanisms.push_back(tabulate_eq(m, k, *by_var[k]));
    }
    return m;
  }

  // ---- linear models ----

  double real() {
    bool negative = false;
    if (at_punct("-")) {
      take();
      negative = true;
    }
    const Token& t = peek();
    if (t.kind != Token::Kind::number) fail("expected a number" + found(), t);
    double v;
    if (t.text.find('/') != std::string::npos) {
      v = rational_at(t).get_d();
    } else {
      try {
        v = std::stod(t.text);
      } catch (...) {
        fail("number out of range", t);
      }
    }
    if (!std::isfinite(v)) fail("number out of range", t);
    take();
    return negative ? -v : v;
  }

  std::vector<double> real_list() {
    std::vector<double> out;
    expect_punct("[");
    if (at_punct("]")) {
      take();
      return out;
    }
    while (true) {
      out.push_back(real());
      if (at_punct(",")) {
        take();
        continue;
      }
      expect_punct("]");
      return out;
    }
  }

  GaussianBlock normal(const Token& n) {
    expect_word("Normal");
    expect_punct("(");
    GaussianBlock b;
    b.name = n.text;
    if (at_word("mean")) {
      take();
      expect_punct("=");
      auto mean = real_list();
      expect_punct(",");
      expect_word("cov");
      expect_punct("=");
      expect_punct("[");
      std::vector<std::vector<double>> rows;
      while (true) {
        rows.push_back(real_list());
        if (at_punct(",")) {
          take();
          continue;
        }
        expect_punct("]");
        break;
      }
      expect_punct(")");
      const auto d = static_cast<Eigen::Index>(mean.size());
      if (d == 0) fail("empty noise block " + n.text, n);
      if (static_cast<Eigen::Index>(rows.size()) != d) fail("covariance shape does not match mean", n);
      b.mean = Eigen::Map<Eigen::VectorXd>(mean.data(), d);
      b.cov.resize(d, d);
      for (Eigen::Index r = 0; r < d; ++r) {
        if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)].size()) != d)
          fail("covariance shape does not match mean", n);
        for (Eigen::Index c = 0; c < d; ++c) b.cov(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      }
    } else {
      double mu = real();
      expect_punct(",");
      double var = real();
      expect_punct(")");
      b.mean = Eigen::VectorXd::Constant(1, mu);
      b.cov = Eigen::MatrixXd::Constant(1, 1, var);
    }
    const double eps = tolerance();
    if ((b.cov - b.cov.transpose()).cwiseAbs().maxCoeff() > eps)
      fail("covariance of " + n.text + " is not symmetric", n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.cov);
    if (es.eigenvalues().minCoeff() < -eps) fail("covariance of " + n.text + " is not PSD", n);
    return b;
  }

  RawTerm term() {
    RawTerm t;
    bool negative = false;
    if (at_punct("-")) {
      take();
      negative = true;
    }
    if (peek().kind == Token::Kind::number) {
      t.coef = real();
      if (at_punct("*")) {
        take();
        t.has_ref = true;
      }
    } else {
      t.has_ref = true;
    }
    if (negative) t.coef = -t.coef;
    if (t.has_ref) {
      t.ref = name();
      if (at_punct("[")) {
        take();
        const Token& i = peek();
        if (i.kind != Token::Kind::number || !is_plain_integer(i.text) || i.text.size() > 9)
          fail("expected a coordinate index", i);
        t.index = std::stol(take().text);
        expect_punct("]");
      }
    }
    return t;
  }

  LinearScm linear(ModelSource& src) {
    std::vector<Token> vars;
    std::vector<GaussianBlock> blocks;
    std::vector<Token> block_at;
    std::vector<RawLinearEq> eqs;
    while (peek().kind != Token::Kind::end) {
      if (at_word("var")) {
        take();
        do {
          Token n = name();
          declare(src, n);
          vars.push_back(n);
        } while (peek().kind == Token::Kind::ident && !detail::is_reserved(peek().text));
      } else if (at_word("noise")) {
        take();
        Token n = name();
        declare(src, n);
        expect_punct(":");
        blocks.push_back(normal(n));
        block_at.push_back(n);
      } else if (at_word("eq")) {
        take();
        RawLinearEq eq{name(), {}};
        expect_punct("=");
        eq.terms.push_back(term());
        while (at_punct("+") || at_punct("-")) {
          bool minus = take().text == "-";
          RawTerm t = term();
          if (minus) t.coef = -t.coef;
          eq.terms.push_back(t);
        }
        eqs.push_back(std::move(eq));
      } else {
        fail("expected 'var', 'noise' or 'eq'" + found(), peek());
      }
    }
    std::vector<std::string> names;
    for (const auto& v : vars) names.push_back(v.text);
    LinearScm m = make_linear(names, blocks);
    std::vector<bool> has_eq(vars.size(), false);
    for (const auto& eq : eqs) {
      std::size_t k = 0;
      try {
        k = m.endo_index(eq.target.text);
      } catch (const UnknownName&) {
        bool noise = src.declared_at.count(eq.target.text) != 0;
        fail(noise ? "equation given for exogenous variable " + eq.target.text
                   : "undeclared name " + eq.target.text,
             eq.target);
      }
      if (has_eq[k]) fail("second equation for " + eq.target.text, eq.target);
      has_eq[k] = true;
      const auto row = static_cast<Eigen::Index>(k);
      for (const auto& t : eq.terms) {
        if (!t.has_ref) {
          m.c(row) += t.coef;
          continue;
        }
        const std::string& n = t.ref.text;
        bool found = false;
        for (std::size_t i = 0; i < m.num_endo() && !found; ++i)
          if (m.endogenous[i] == n) {
            if (t.index >= 0) fail("endogenous variable " + n + " has no coordinates", t.ref);
            m.B(row, static_cast<Eigen::Index>(i)) += t.coef;
            found = true;
          }
        for (std::size_t b = 0; b < m.blocks.size() && !found; ++b)
          if (m.blocks[b].name == n) {
            long dim = static_cast<long>(m.blocks[b].dim());
            if (t.index < 0 && dim != 1) fail("noise block " + n + " needs a coordinate index", t.ref);
            long local = t.index < 0 ? 0 : t.index;
            if (local >= dim) fail("coordinate index out of range for " + n, t.ref);
            m.Gamma(row, static_cast<Eigen::Index>(m.block_offset(b)) + local) += t.coef;
            found = true;
          }
        if (!found) fail("undeclared name " + n, t.ref);
      }
    }
    for (std::size_t k = 0; k < vars.size(); ++k)
      if (!has_eq[k]) fail("no equation for " + vars[k].text, vars[k]);
    return m;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

ModelSource parse_source(std::string_view text) {
  Parser p(text);
  return p.run(text);
}

Scm parse(std::string_view text) { return parse_source(text).model; }

FiniteScm parse_finite(std::string_view text) {
  Scm m = parse(text);
  if (auto* f = std::get_if<FiniteScm>(&m)) return std::move(*f);
  throw DslError("expected a finite model", 1, 1);
}

LinearScm parse_linear(std::string_view text) {
  Scm m = parse(text);
  if (auto* l = std::get_if<LinearScm>(&m)) return std::move(*l);
  throw DslError("expected a linear model", 1, 1);
}

Atom parse_atom(std::string_view text) {
  auto toks = detail::lex(text);
  auto bad = [&] { return DslError("malformed value '" + std::string(text) + "'", 1, 1); };
  std::size_t i = 0;
  bool negative = false;
  if (toks[i].kind == Token::Kind::punct && toks[i].text == "-") {
    negative = true;
    ++i;
  }
  const Token& t = toks[i];
  if (toks.size() != i + 2) throw bad();
  if (t.kind == Token::Kind::number && is_plain_integer(t.text)) {
    mpz_class z(t.text, 10);
    if (negative) z = -z;
    if (!z.fits_slong_p()) throw bad();
    return z.get_si();
  }
  if (negative) throw bad();
  if (t.kind == Token::Kind::string) return t.text;
  if (t.kind == Token::Kind::ident && !detail::is_reserved(t.text)) return t.text;
  throw bad();
}

double parse_real(std::string_view text) {
  auto toks = detail::lex(text);
  std::size_t i = 0;
  bool negative = false;
  if (toks[i].kind == Token::Kind::punct && toks[i].text == "-") {
    negative = true;
    ++i;
  }
  if (toks.size() != i + 2 || toks[i].kind != Token::Kind::number)
    throw DslError("malformed number '" + std::string(text) + "'", 1, 1);
  const std::string& s = toks[i].text;
  double v = 0;
  try {
    v = s.find('/') != std::string::npos ? parse_rational(s).get_d() : std::stod(s);
  } catch (const std::exception&) {
    throw DslError("malformed number '" + std::string(text) + "'", 1, 1);
  }
  return negative ? -v : v;
}

}  // namespace scmkit::dsl
