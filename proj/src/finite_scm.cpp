#include <algorithm>
#include <numeric>
#include <set>

#include "finite_util.hpp"
#include "scmkit/error.hpp"
#include "scmkit/scm.hpp"

namespace scmkit {

using detail::assign;
using detail::for_each_assignment;

std::string atom_to_string(const Atom& a) {
  if (const auto* i = std::get_if<std::int64_t>(&a)) return std::to_string(*i);
  return std::get<std::string>(a);
}

std::optional<std::uint32_t> FiniteDomain::find(const Atom& a) const {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] == a) return static_cast<std::uint32_t>(i);
  return std::nullopt;
}

std::uint32_t FiniteDomain::index_of(const Atom& a) const {
  auto i = find(a);
  if (!i) throw InvalidArgument("value " + atom_to_string(a) + " outside domain");
  return *i;
}

FiniteDomain int_domain(std::int64_t lo, std::int64_t hi) {
  FiniteDomain d;
  for (std::int64_t v = lo; v <= hi; ++v) d.values.emplace_back(v);
  return d;
}

FiniteDomain int_domain(std::initializer_list<std::int64_t> values) {
  FiniteDomain d;
  for (auto v : values) d.values.emplace_back(v);
  return d;
}

std::vector<std::uint32_t> ExogenousVar::support() const {
  std::vector<std::uint32_t> s;
  for (std::size_t i = 0; i < probs.size(); ++i)
    if (probs[i] > 0) s.push_back(static_cast<std::uint32_t>(i));
  return s;
}

std::size_t FiniteScm::endo_index(const std::string& n) const {
  for (std::size_t i = 0; i < endogenous.size(); ++i)
    if (endogenous[i].name == n) return i;
  throw UnknownName(n);
}

std::size_t FiniteScm::exo_index(const std::string& n) const {
  for (std::size_t j = 0; j < exogenous.size(); ++j)
    if (exogenous[j].name == n) return j;
  throw UnknownName(n);
}

std::optional<VarRef> FiniteScm::find(const std::string& n) const {
  for (std::size_t i = 0; i < endogenous.size(); ++i)
    if (endogenous[i].name == n) return endo_ref(i);
  for (std::size_t j = 0; j < exogenous.size(); ++j)
    if (exogenous[j].name == n) return exo_ref(j);
  return std::nullopt;
}

const std::string& FiniteScm::name(VarRef v) const {
  return v.endo() ? endogenous.at(v.index).name : exogenous.at(v.index).name;
}

const FiniteDomain& FiniteScm::domain(VarRef v) const {
  return v.endo() ? endogenous.at(v.index).domain : exogenous.at(v.index).domain;
}

std::uint32_t FiniteScm::eval(std::size_t k, const Config& x, const Config& e) const {
  const TabularMechanism& f = mechanisms[k];
  std::size_t idx = 0;
  for (VarRef v : f.args) idx = idx * domain(v).size() + detail::lookup(x, e, v);
  return f.table[idx];
}

std::size_t table_size(const FiniteScm& m, const std::vector<VarRef>& args) {
  std::size_t n = 1;
  for (VarRef v : args) n *= m.domain(v).size();
  return n;
}

TabularMechanism tabulate(const FiniteScm& m, std::vector<VarRef> args,
                          const std::function<std::uint32_t(const std::vector<std::uint32_t>&)>& fn) {
  TabularMechanism f;
  std::vector<std::vector<std::uint32_t>> choices;
  for (VarRef v : args) choices.push_back(choices_of(m, v, false));
  f.args = std::move(args);
  f.table.reserve(table_size(m, f.args));
  for (Product p(std::move(choices)); !p.done(); p.next()) f.table.push_back(fn(p.values()));
  return f;
}

Product::Product(std::vector<std::vector<std::uint32_t>> choices)
    : choices_(std::move(choices)), pos_(choices_.size(), 0), values_(choices_.size(), 0) {
  for (std::size_t i = 0; i < choices_.size(); ++i) {
    if (choices_[i].empty()) {
      done_ = true;
      return;
    }
    values_[i] = choices_[i][0];
  }
}

void Product::next() {
  for (std::size_t i = choices_.size(); i-- > 0;) {
    if (++pos_[i] < choices_[i].size()) {
      values_[i] = choices_[i][pos_[i]];
      return;
    }
    pos_[i] = 0;
    values_[i] = choices_[i][0];
  }
  done_ = true;
}

std::vector<std::uint32_t> choices_of(const FiniteScm& m, VarRef v, bool support_only) {
  if (!v.endo() && support_only) return m.exogenous.at(v.index).support();
  std::vector<std::uint32_t> all(m.domain(v).size());
  std::iota(all.begin(), all.end(), 0u);
  return all;
}

ValidationReport validate(const FiniteScm& m) {
  ValidationReport r;
  auto bad = [&](std::string s) { r.violations.push_back(std::move(s)); };
  std::set<std::string> names;
  auto check_name = [&](const std::string& n) {
    if (n.empty()) bad("empty variable name");
    else if (!names.insert(n).second) bad("duplicate name " + n);
  };
  auto check_domain = [&](const std::string& n, const FiniteDomain& d) {
    if (d.values.empty()) bad("empty domain of " + n);
    std::set<Atom> seen(d.values.begin(), d.values.end());
    if (seen.size() != d.values.size()) bad("duplicate domain value in " + n);
  };
  for (const auto& v : m.endogenous) {
    check_name(v.name);
    check_domain(v.name, v.domain);
  }
  for (const auto& v : m.exogenous) {
    check_name(v.name);
    check_domain(v.name, v.domain);
    if (v.probs.size() != v.domain.size()) {
      bad("probability table of " + v.name + " does not match its domain");
      continue;
    }
    Rational sum = 0;
    for (const auto& p : v.probs) {
      if (p < 0) bad("negative probability in " + v.name);
      sum += p;
    }
    if (sum != 1) bad("measure not normalized: " + v.name + " sums to " + to_pq(sum));
  }
  if (m.mechanisms.size() != m.endogenous.size()) {
    bad("expected one mechanism per endogenous variable");
    return r;
  }
  for (std::size_t k = 0; k < m.mechanisms.size(); ++k) {
    const auto& f = m.mechanisms[k];
    const std::string& n = m.endogenous[k].name;
    bool args_ok = true;
    std::set<VarRef> seen;
    for (VarRef v : f.args) {
      std::size_t limit = v.endo() ? m.num_endo() : m.num_exo();
      if (v.index >= limit) {
        bad("mechanism of " + n + " references an undeclared index");
        args_ok = false;
      } else if (!seen.insert(v).second) {
        bad("mechanism of " + n + " repeats an argument");
      }
    }
    if (!args_ok) continue;
    if (f.table.size() != table_size(m, f.args)) {
      bad("mechanism table of " + n + " is not total over its arguments");
      continue;
    }
    for (auto out : f.table)
      if (out >= m.endogenous[k].domain.size()) {
        bad("mechanism of " + n + " leaves its codomain");
        break;
      }
  }
  return r;
}

void require_valid(const FiniteScm& m) {
  auto r = validate(m);
  if (r.ok()) return;
  std::string msg = "invalid model:";
  for (const auto& v : r.violations) msg += " " + v + ";";
  throw InvalidArgument(msg);
}

namespace {

void require_same_signature(const FiniteScm& a, const FiniteScm& b) {
  bool same = a.num_endo() == b.num_endo() && a.num_exo() == b.num_exo();
  for (std::size_t i = 0; same && i < a.num_endo(); ++i)
    same = a.endogenous[i].name == b.endogenous[i].name &&
           a.endogenous[i].domain == b.endogenous[i].domain;
  for (std::size_t j = 0; same && j < a.num_exo(); ++j)
    same = a.exogenous[j].name == b.exogenous[j].name &&
           a.exogenous[j].domain == b.exogenous[j].domain &&
           a.exogenous[j].probs == b.exogenous[j].probs;
  if (!same) throw InvalidArgument("mismatched model signatures");
}

}  // namespace

bool mechanisms_equivalent(const FiniteScm& m1, const FiniteScm& m2) {
  require_same_signature(m1, m2);
  Config x, e;
  detail::pinned(m1, x, e);
  for (std::size_t k = 0; k < m1.num_endo(); ++k) {
    auto slots = detail::sorted_union(m1.mechanisms[k].args, m2.mechanisms[k].args);
    slots = detail::sorted_union(slots, {endo_ref(k)});
    bool ok = for_each_assignment(m1, slots, true, x, e, [&] {
      return (x[k] == m1.eval(k, x, e)) == (x[k] == m2.eval(k, x, e));
    });
    if (!ok) return false;
  }
  return true;
}

// Functional parents. For v != k, v can be dropped iff the relation
// [x_k = f_k(x,e)] is invariant in coordinate v on the support: pinning v then
// gives an equivalent mechanism without v, and any equivalent mechanism has
// the same relation, so it cannot drop v otherwise. For v = k, dropping x_k
// means writing the relation as the graph of a function of the rest, which is
// possible iff every fiber {x_k : x_k = f_k} is a singleton.
std::vector<VarRef> functional_parents(const FiniteScm& m, std::size_t k) {
  if (k >= m.num_endo()) throw InvalidArgument("endogenous index out of range");
  const auto& f = m.mechanisms[k];
  std::vector<VarRef> parents;
  Config x, e;
  detail::pinned(m, x, e);
  const VarRef self = endo_ref(k);
  for (VarRef v : f.args) {
    if (v == self) continue;
    std::vector<VarRef> rest = detail::sorted_union(f.args, {self});
    rest.erase(std::find(rest.begin(), rest.end(), v));
    auto vals = choices_of(m, v, true);
    bool invariant = for_each_assignment(m, rest, true, x, e, [&] {
      assign(x, e, v, vals[0]);
      bool base = x[k] == m.eval(k, x, e);
      for (std::size_t i = 1; i < vals.size(); ++i) {
        assign(x, e, v, vals[i]);
        if ((x[k] == m.eval(k, x, e)) != base) return false;
      }
      return true;
    });
    if (!invariant) parents.push_back(v);
  }
  if (std::find(f.args.begin(), f.args.end(), self) != f.args.end()) {
    std::vector<VarRef> rest = f.args;
    rest.erase(std::find(rest.begin(), rest.end(), self));
    const std::size_t dk = m.endogenous[k].domain.size();
    bool functional = for_each_assignment(m, rest, true, x, e, [&] {
      std::size_t hits = 0;
      for (std::uint32_t a = 0; a < dk; ++a) {
        x[k] = a;
        if (m.eval(k, x, e) == a) ++hits;
      }
      return hits == 1;
    });
    if (!functional) parents.push_back(self);
  }
  std::sort(parents.begin(), parents.end());
  return parents;
}

MixedGraph augmented_graph(const FiniteScm& m) {
  MixedGraph g;
  for (const auto& v : m.endogenous) g.add_node(v.name);
  for (const auto& v : m.exogenous) g.add_node(v.name);
  for (std::size_t k = 0; k < m.num_endo(); ++k)
    for (VarRef v : functional_parents(m, k)) g.add_directed(m.name(v), m.endogenous[k].name);
  return g;
}

MixedGraph functional_graph(const FiniteScm& m) {
  MixedGraph g;
  for (const auto& v : m.endogenous) g.add_node(v.name);
  std::vector<std::set<std::size_t>> exo_children(m.num_exo());
  for (std::size_t k = 0; k < m.num_endo(); ++k)
    for (VarRef v : functional_parents(m, k)) {
      if (v.endo()) g.add_directed(m.name(v), m.endogenous[k].name);
      else exo_children[v.index].insert(k);
    }
  for (const auto& ch : exo_children)
    for (auto a : ch)
      for (auto b : ch)
        if (a < b) g.add_bidirected(m.endogenous[a].name, m.endogenous[b].name);
  return g;
}

FiniteScm canonicalize(const FiniteScm& m) {
  require_valid(m);
  FiniteScm out = m;
  Config x, e;
  detail::pinned(m, x, e);
  for (std::size_t k = 0; k < m.num_endo(); ++k) {
    const auto& f = m.mechanisms[k];
    std::vector<VarRef> pa = functional_parents(m, k);
    std::vector<VarRef> declared = f.args;
    std::sort(declared.begin(), declared.end());
    if (pa == declared) continue;
    const VarRef self = endo_ref(k);
    const bool self_parent = std::binary_search(pa.begin(), pa.end(), self);
    Config px = x, pe = e;
    if (self_parent) {
      out.mechanisms[k] = tabulate(m, pa, [&](const std::vector<std::uint32_t>& vals) {
        for (std::size_t i = 0; i < pa.size(); ++i) assign(px, pe, pa[i], vals[i]);
        return m.eval(k, px, pe);
      });
      continue;
    }
    // Solve the relation for x_k; off-support rows take the first fiber
    // element (or the first value when the fiber is empty).
    const std::size_t dk = m.endogenous[k].domain.size();
    out.mechanisms[k] = tabulate(m, pa, [&](const std::vector<std::uint32_t>& vals) {
      for (std::size_t i = 0; i < pa.size(); ++i) assign(px, pe, pa[i], vals[i]);
      for (std::uint32_t a = 0; a < dk; ++a) {
        px[k] = a;
        if (m.eval(k, px, pe) == a) return a;
      }
      return 0u;
    });
  }
  return out;
}

}  // namespace scmkit
