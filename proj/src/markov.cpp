#include "scmkit/markov.hpp"

#include <cmath>
#include <sstream>

#include "scmkit/analysis.hpp"
#include "scmkit/error.hpp"
#include "scmkit/tolerance.hpp"

namespace scmkit {

std::string to_string(SeparationKind kind) { return kind == SeparationKind::d ? "d" : "sigma"; }

std::size_t MarkovReport::violations() const {
  std::size_t n = 0;
  for (const auto& t : triples) n += t.violation;
  return n;
}

namespace {

std::string set_text(const NodeSet& s) {
  std::string out = "{";
  for (const auto& n : s) out += (out.size() > 1 ? "," : "") + n;
  return out + "}";
}

void require_disjoint(const NodeSet& a, const NodeSet& b, const NodeSet& s) {
  for (const auto& n : a)
    if (b.count(n) || s.count(n)) throw InvalidArgument("overlapping coordinate sets at " + n);
  for (const auto& n : b)
    if (s.count(n)) throw InvalidArgument("overlapping coordinate sets at " + n);
}

}  // namespace

nlohmann::json to_json(const MarkovReport& r) {
  nlohmann::json j;
  j["kind"] = to_string(r.kind);
  j["violations"] = r.violations();
  j["triples"] = nlohmann::json::array();
  for (const auto& t : r.triples)
    j["triples"].push_back({{"a", t.a}, {"b", t.b}, {"s", t.s}, {"separated", t.separated},
                            {"independent", t.independent}, {"violation", t.violation}});
  return j;
}

std::string to_text(const MarkovReport& r) {
  std::ostringstream os;
  os << "A\tB\tS\tsep\tCI\tviolation\n";
  for (const auto& t : r.triples)
    os << set_text(t.a) << "\t" << set_text(t.b) << "\t" << set_text(t.s) << "\t"
       << (t.separated ? "yes" : "no") << "\t" << (t.independent ? "yes" : "no") << "\t"
       << (t.violation ? "VIOLATION" : "") << "\n";
  os << r.violations() << " violation(s), " << to_string(r.kind) << "-separation\n";
  return os.str();
}

bool conditional_independent(const DiscreteDistribution& d, const NodeSet& a, const NodeSet& b,
                             const NodeSet& s) {
  require_disjoint(a, b, s);
  std::vector<std::string> va(a.begin(), a.end()), vb(b.begin(), b.end()), vs(s.begin(), s.end());
  std::vector<std::string> all = vs;
  all.insert(all.end(), va.begin(), va.end());
  all.insert(all.end(), vb.begin(), vb.end());
  DiscreteDistribution j = d.marginal(all);
  const std::size_t ns = vs.size(), na = va.size();
  std::map<Config, Rational> ps, pas, pbs;
  for (const auto& [cell, q] : j.probs) {
    Config cs(cell.begin(), cell.begin() + static_cast<long>(ns));
    Config ca(cell.begin(), cell.begin() + static_cast<long>(ns + na));
    Config cb = cs;
    cb.insert(cb.end(), cell.begin() + static_cast<long>(ns + na), cell.end());
    ps[cs] += q;
    pas[ca] += q;
    pbs[cb] += q;
  }
  std::vector<std::vector<std::uint32_t>> ach, bch;
  auto dom_choices = [&](const std::string& n) {
    std::vector<std::uint32_t> c(d.domains[d.var_index(n)].size());
    for (std::uint32_t v = 0; v < c.size(); ++v) c[v] = v;
    return c;
  };
  for (const auto& n : va) ach.push_back(dom_choices(n));
  for (const auto& n : vb) bch.push_back(dom_choices(n));
  for (const auto& [cs, qs] : ps) {
    if (qs == 0) continue;
    for (Product pa(ach); !pa.done(); pa.next()) {
      Config ca = cs;
      ca.insert(ca.end(), pa.values().begin(), pa.values().end());
      auto ita = pas.find(ca);
      Rational qa = ita == pas.end() ? Rational(0) : ita->second;
      for (Product pb(bch); !pb.done(); pb.next()) {
        Config cb = cs;
        cb.insert(cb.end(), pb.values().begin(), pb.values().end());
        auto itb = pbs.find(cb);
        Rational qb = itb == pbs.end() ? Rational(0) : itb->second;
        Config cab = ca;
        cab.insert(cab.end(), pb.values().begin(), pb.values().end());
        if (j.probability(cab) * qs != qa * qb) return false;
      }
    }
  }
  return true;
}

bool conditional_independent(const GaussianDistribution& d, const NodeSet& a, const NodeSet& b,
                             const NodeSet& s) {
  require_disjoint(a, b, s);
  std::vector<Eigen::Index> is;
  for (const auto& n : s) is.push_back(static_cast<Eigen::Index>(d.var_index(n)));
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> inv;
  if (!is.empty()) inv.compute(d.cov(is, is));
  for (const auto& na : a)
    for (const auto& nb : b) {
      auto ia = static_cast<Eigen::Index>(d.var_index(na));
      auto ib = static_cast<Eigen::Index>(d.var_index(nb));
      double partial = d.cov(ia, ib);
      if (!is.empty()) {
        Eigen::VectorXd sa = d.cov(is, std::vector<Eigen::Index>{ia});
        Eigen::VectorXd sb = d.cov(is, std::vector<Eigen::Index>{ib});
        partial -= sa.dot(inv.solve(sb));
      }
      double scale = std::max(1.0, std::sqrt(std::abs(d.cov(ia, ia) * d.cov(ib, ib))));
      if (std::abs(partial) > tolerance() * scale) return false;
    }
  return true;
}

namespace {

template <class Dist>
MarkovReport run_triples(const MixedGraph& g, const Dist& dist, SeparationKind kind,
                         std::size_t max_conditioning, bool full_subsets) {
  MarkovReport r;
  r.kind = kind;
  const auto& nodes = g.nodes();
  const std::size_t n = nodes.size();
  if (n > 20) throw CapExceeded("Markov check limited to 20 variables");
  auto to_set = [&](std::uint32_t mask) {
    NodeSet s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) s.insert(nodes[i]);
    return s;
  };
  auto test = [&](std::uint32_t ma, std::uint32_t mb) {
    const std::uint32_t rest = ((1u << n) - 1) & ~ma & ~mb;
    // every subset of rest with at most max_conditioning members
    for (std::uint32_t ms = rest;; ms = (ms - 1) & rest) {
      if (static_cast<std::size_t>(__builtin_popcount(ms)) <= max_conditioning) {
        MarkovTriple t;
        t.a = to_set(ma);
        t.b = to_set(mb);
        t.s = to_set(ms);
        t.separated = kind == SeparationKind::d ? d_separated(g, t.a, t.b, t.s)
                                                : sigma_separated(g, t.a, t.b, t.s);
        t.independent = conditional_independent(dist, t.a, t.b, t.s);
        t.violation = t.separated && !t.independent;
        r.triples.push_back(std::move(t));
      }
      if (ms == 0) break;
    }
  };
  if (!full_subsets) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) test(1u << i, 1u << j);
  } else {
    const std::uint32_t all = (1u << n) - 1;
    for (std::uint32_t ma = 1; ma <= all; ++ma)
      for (std::uint32_t mb = 1; mb <= all; ++mb)
        if (!(ma & mb) && ma < mb) test(ma, mb);
  }
  return r;
}

}  // namespace

MarkovReport verify_markov(const FiniteScm& m, SeparationKind kind, std::size_t max_conditioning,
                           bool full_subsets) {
  MixedGraph g = functional_graph(m);
  if (kind == SeparationKind::sigma)
    for (const auto& comp : strongly_connected_components(g))
      if (!uniquely_solvable_wrt(m, comp))
        throw InvalidArgument("precondition failed: not uniquely solvable w.r.t. component " +
                              set_text(comp));
  return run_triples(g, observational_distribution(m), kind, max_conditioning, full_subsets);
}

MarkovReport verify_markov(const LinearScm& m, SeparationKind kind, std::size_t max_conditioning,
                           bool full_subsets) {
  MixedGraph g = functional_graph(m);
  if (kind == SeparationKind::sigma)
    for (const auto& comp : strongly_connected_components(g))
      if (!uniquely_solvable_wrt(m, comp))
        throw InvalidArgument("precondition failed: not uniquely solvable w.r.t. component " +
                              set_text(comp));
  return run_triples(g, observational_distribution(m), kind, max_conditioning, full_subsets);
}

}  // namespace scmkit
