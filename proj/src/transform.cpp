#include "scmkit/transform.hpp"

#include <algorithm>
#include <set>

#include "finite_util.hpp"
#include "linear_util.hpp"
#include "scmkit/error.hpp"

namespace scmkit {

std::string primed(const std::string& name) { return name + "'"; }

namespace {

ExprPtr literal(const Atom& a) {
  if (const auto* i = std::get_if<std::int64_t>(&a)) return make_number(Rational(*i));
  return make_symbol(std::get<std::string>(a));
}

void require_fresh(const std::set<std::string>& taken, const std::string& name) {
  if (taken.count(name)) throw InvalidArgument("name collision: " + name + " already exists");
}

std::set<std::string> all_names(const FiniteScm& m) {
  std::set<std::string> s;
  for (const auto& v : m.endogenous) s.insert(v.name);
  for (const auto& v : m.exogenous) s.insert(v.name);
  return s;
}

std::set<std::string> all_names(const LinearScm& m) {
  std::set<std::string> s(m.endogenous.begin(), m.endogenous.end());
  for (const auto& b : m.blocks) s.insert(b.name);
  return s;
}

}  // namespace

FiniteScm intervene(const FiniteScm& m, const FiniteIntervention& iv) {
  FiniteScm out = m;
  for (const auto& [name, value] : iv) {
    std::size_t k = m.endo_index(name);
    auto idx = m.endogenous[k].domain.find(value);
    if (!idx)
      throw InvalidArgument("intervention value " + atom_to_string(value) + " outside the domain of " +
                            name);
    out.mechanisms[k] = TabularMechanism{{}, {*idx}, literal(value)};
  }
  return out;
}

LinearScm intervene(const LinearScm& m, const LinearIntervention& iv) {
  LinearScm out = m;
  for (const auto& [name, value] : iv) {
    auto k = static_cast<Eigen::Index>(m.endo_index(name));
    out.B.row(k).setZero();
    out.Gamma.row(k).setZero();
    out.c(k) = value;
  }
  return out;
}

FiniteScm twin(const FiniteScm& m) {
  require_valid(m);
  auto taken = all_names(m);
  const std::size_t n = m.num_endo();
  FiniteScm out = m;
  std::map<std::string, std::string> rn;
  for (const auto& v : m.endogenous) {
    require_fresh(taken, primed(v.name));
    rn[v.name] = primed(v.name);
    out.endogenous.push_back({primed(v.name), v.domain});
  }
  for (std::size_t k = 0; k < n; ++k) {
    TabularMechanism f = m.mechanisms[k];
    for (VarRef& a : f.args)
      if (a.endo()) a.index += n;
    f.expr = rename(f.expr, rn);
    out.mechanisms.push_back(std::move(f));
  }
  return out;
}

LinearScm twin(const LinearScm& m) {
  require_valid(m);
  auto taken = all_names(m);
  const auto n = static_cast<Eigen::Index>(m.num_endo());
  LinearScm out = m;
  for (const auto& name : m.endogenous) {
    require_fresh(taken, primed(name));
    out.endogenous.push_back(primed(name));
  }
  out.B = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  out.B.topLeftCorner(n, n) = m.B;
  out.B.bottomRightCorner(n, n) = m.B;
  out.Gamma.resize(2 * n, m.Gamma.cols());
  out.Gamma << m.Gamma, m.Gamma;
  out.c.resize(2 * n);
  out.c << m.c, m.c;
  return out;
}

FiniteScm marginalize(const FiniteScm& m, const NodeSet& latent) {
  require_valid(m);
  if (latent.empty()) return m;
  FiniteSolveMap g = solve_map(m, latent);
  const std::size_t n = m.num_endo();
  std::vector<bool> in_l(n, false);
  for (auto k : g.targets) in_l[k] = true;
  std::vector<std::size_t> new_index(n, 0);
  FiniteScm out;
  out.exogenous = m.exogenous;
  for (std::size_t k = 0; k < n; ++k)
    if (!in_l[k]) {
      new_index[k] = out.endogenous.size();
      out.endogenous.push_back(m.endogenous[k]);
    }
  auto remap = [&](std::vector<VarRef> args) {
    for (VarRef& a : args)
      if (a.endo()) a.index = new_index[a.index];
    return args;
  };

  Config x, e;
  detail::pinned(m, x, e);
  for (std::size_t k = 0; k < n; ++k) {
    if (in_l[k]) continue;
    const auto& f = m.mechanisms[k];
    bool reads_latent = std::any_of(f.args.begin(), f.args.end(),
                                    [&](VarRef a) { return a.endo() && in_l[a.index]; });
    if (!reads_latent) {
      out.mechanisms.push_back({remap(f.args), f.table, f.expr});
      continue;
    }
    std::vector<VarRef> args;
    for (VarRef a : f.args)
      if (!a.endo() || !in_l[a.index]) args.push_back(a);
    args = detail::sorted_union(args, g.args);
    // Substitute g_L into f_k.
    TabularMechanism h = tabulate(m, args, [&](const std::vector<std::uint32_t>& vals) {
      for (std::size_t i = 0; i < args.size(); ++i) detail::assign(x, e, args[i], vals[i]);
      std::size_t row = 0;
      for (VarRef a : g.args) row = row * m.domain(a).size() + detail::lookup(x, e, a);
      for (std::size_t i = 0; i < g.targets.size(); ++i) x[g.targets[i]] = g.table[row][i];
      return m.eval(k, x, e);
    });
    h.args = remap(h.args);
    out.mechanisms.push_back(std::move(h));
  }
  return out;
}

LinearScm marginalize(const LinearScm& m, const NodeSet& latent) {
  require_valid(m);
  if (latent.empty()) return m;
  Verdict v = uniquely_solvable_wrt(m, latent);
  if (!v) throw NotUniquelySolvable("not uniquely solvable w.r.t. the latent set", v.witness);
  auto l = detail::linear_indices(m, latent);
  auto o = detail::complement(static_cast<Eigen::Index>(m.num_endo()), l);
  const auto nl = static_cast<Eigen::Index>(l.size());
  auto lu = (Eigen::MatrixXd::Identity(nl, nl) - m.B(l, l)).fullPivLu();
  Eigen::MatrixXd b_ol = m.B(o, l);
  LinearScm out;
  for (auto i : o) out.endogenous.push_back(m.endogenous[static_cast<std::size_t>(i)]);
  out.blocks = m.blocks;
  out.B = m.B(o, o) + b_ol * lu.solve(Eigen::MatrixXd(m.B(l, o)));
  out.Gamma = m.Gamma(o, Eigen::all) + b_ol * lu.solve(Eigen::MatrixXd(m.Gamma(l, Eigen::all)));
  out.c = m.c(o) + b_ol * lu.solve(Eigen::VectorXd(m.c(l)));
  return out;
}

std::vector<std::string> extended_names(const FiniteScm& m) {
  std::vector<std::string> out;
  for (const auto& v : m.exogenous) out.push_back(primed(v.name));
  return out;
}

std::vector<std::string> extended_names(const LinearScm& m) {
  std::vector<std::string> out;
  for (const auto& b : m.blocks) {
    if (b.dim() == 1) out.push_back(primed(b.name));
    else
      for (std::size_t i = 0; i < b.dim(); ++i) out.push_back(primed(b.name + "_" + std::to_string(i)));
  }
  return out;
}

FiniteScm extend(const FiniteScm& m) {
  require_valid(m);
  auto taken = all_names(m);
  const std::size_t n = m.num_endo();
  FiniteScm out = m;
  std::map<std::string, std::string> rn;
  auto names = extended_names(m);
  for (std::size_t j = 0; j < m.num_exo(); ++j) {
    require_fresh(taken, names[j]);
    rn[m.exogenous[j].name] = names[j];
  }
  // Exogenous args sit after the endogenous ones in ascending order, and so do
  // their copies; the tables keep their layout.
  for (auto& f : out.mechanisms) {
    for (VarRef& a : f.args)
      if (!a.endo()) a = endo_ref(n + a.index);
    f.expr = rename(f.expr, rn);
  }
  for (std::size_t j = 0; j < m.num_exo(); ++j) {
    out.endogenous.push_back({names[j], m.exogenous[j].domain});
    TabularMechanism copy;
    copy.args = {exo_ref(j)};
    for (std::uint32_t v = 0; v < m.exogenous[j].domain.size(); ++v) copy.table.push_back(v);
    copy.expr = make_name(m.exogenous[j].name);
    out.mechanisms.push_back(std::move(copy));
  }
  return out;
}

LinearScm extend(const LinearScm& m) {
  require_valid(m);
  auto taken = all_names(m);
  const auto n = static_cast<Eigen::Index>(m.num_endo());
  const auto d = static_cast<Eigen::Index>(m.exo_dim());
  LinearScm out = m;
  for (const auto& name : extended_names(m)) {
    require_fresh(taken, name);
    out.endogenous.push_back(name);
  }
  out.B = Eigen::MatrixXd::Zero(n + d, n + d);
  out.B.topLeftCorner(n, n) = m.B;
  out.B.topRightCorner(n, d) = m.Gamma;
  out.Gamma = Eigen::MatrixXd::Zero(n + d, d);
  out.Gamma.bottomRows(d) = Eigen::MatrixXd::Identity(d, d);
  out.c = Eigen::VectorXd::Zero(n + d);
  out.c.head(n) = m.c;
  return out;
}

}  // namespace scmkit
