#include "scmkit/graph.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "scmkit/error.hpp"

namespace scmkit {

namespace {

void insert_sorted(std::vector<std::size_t>& v, std::size_t x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) v.insert(it, x);
}

bool contains_sorted(const std::vector<std::size_t>& v, std::size_t x) {
  return std::binary_search(v.begin(), v.end(), x);
}

std::vector<bool> mask_of(const MixedGraph& g, const NodeSet& s) {
  std::vector<bool> m(g.size(), false);
  for (const auto& n : s) m[g.index_of(n)] = true;
  return m;
}

NodeSet names_of(const MixedGraph& g, const std::vector<bool>& m) {
  NodeSet out;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i]) out.insert(g.nodes()[i]);
  return out;
}

}  // namespace

MixedGraph::MixedGraph(const std::vector<std::string>& nodes) {
  for (const auto& n : nodes) add_node(n);
}

void MixedGraph::add_node(const std::string& name) {
  if (name.empty()) throw InvalidArgument("empty node name");
  if (has_node(name)) throw InvalidArgument("duplicate node " + name);
  index_[name] = nodes_.size();
  nodes_.push_back(name);
  out_.emplace_back();
  in_.emplace_back();
  bi_.emplace_back();
}

std::size_t MixedGraph::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw UnknownName(name);
  return it->second;
}

void MixedGraph::add_directed(const std::string& tail, const std::string& head) {
  std::size_t t = index_of(tail), h = index_of(head);
  insert_sorted(out_[t], h);
  insert_sorted(in_[h], t);
}

void MixedGraph::add_bidirected(const std::string& a, const std::string& b) {
  std::size_t i = index_of(a), j = index_of(b);
  if (i == j) throw InvalidArgument("bidirected self-loop at " + a);
  insert_sorted(bi_[i], j);
  insert_sorted(bi_[j], i);
}

bool MixedGraph::has_directed(const std::string& tail, const std::string& head) const {
  return contains_sorted(out_[index_of(tail)], index_of(head));
}

bool MixedGraph::has_bidirected(const std::string& a, const std::string& b) const {
  return contains_sorted(bi_[index_of(a)], index_of(b));
}

std::vector<std::pair<std::string, std::string>> MixedGraph::directed_edges() const {
  std::vector<std::pair<std::string, std::string>> e;
  for (std::size_t t = 0; t < size(); ++t)
    for (std::size_t h : out_[t]) e.emplace_back(nodes_[t], nodes_[h]);
  std::sort(e.begin(), e.end());
  return e;
}

std::vector<std::pair<std::string, std::string>> MixedGraph::bidirected_edges() const {
  std::vector<std::pair<std::string, std::string>> e;
  for (std::size_t a = 0; a < size(); ++a)
    for (std::size_t b : bi_[a]) {
      auto p = std::minmax(nodes_[a], nodes_[b]);
      e.emplace_back(p.first, p.second);
    }
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  return e;
}

bool MixedGraph::operator==(const MixedGraph& other) const {
  NodeSet a(nodes_.begin(), nodes_.end()), b(other.nodes_.begin(), other.nodes_.end());
  return a == b && directed_edges() == other.directed_edges() &&
         bidirected_edges() == other.bidirected_edges();
}

NodeSet relatives(const MixedGraph& g, const NodeSet& seed, Relation kind) {
  std::vector<bool> start = mask_of(g, seed);
  const auto& adj = (kind == Relation::parents || kind == Relation::ancestors) ? g.in() : g.out();
  std::vector<bool> result(g.size(), false);
  if (kind == Relation::parents || kind == Relation::children) {
    for (std::size_t v = 0; v < g.size(); ++v)
      if (start[v])
        for (std::size_t w : adj[v]) result[w] = true;
    return names_of(g, result);
  }
  std::vector<std::size_t> stack;
  for (std::size_t v = 0; v < g.size(); ++v)
    if (start[v]) {
      result[v] = true;
      stack.push_back(v);
    }
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t w : adj[v])
      if (!result[w]) {
        result[w] = true;
        stack.push_back(w);
      }
  }
  return names_of(g, result);
}

namespace {

// Tarjan; returns component id per node.
std::vector<std::size_t> tarjan(const MixedGraph& g, std::size_t& count) {
  const std::size_t n = g.size();
  const std::size_t unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, unset), low(n, 0), comp(n, unset);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::size_t next = 0;
  count = 0;
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    index[v] = low[v] = next++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t w : g.out()[v]) {
      if (index[w] == unset) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = count;
      } while (w != v);
      ++count;
    }
  };
  for (std::size_t v = 0; v < n; ++v)
    if (index[v] == unset) visit(v);
  return comp;
}

}  // namespace

std::vector<NodeSet> strongly_connected_components(const MixedGraph& g) {
  std::size_t count = 0;
  auto comp = tarjan(g, count);
  // Tarjan emits sinks first; reverse for a topological order.
  std::vector<NodeSet> out(count);
  for (std::size_t v = 0; v < g.size(); ++v) out[count - 1 - comp[v]].insert(g.nodes()[v]);
  return out;
}

NodeSet scc(const MixedGraph& g, const std::string& node) {
  std::size_t v = g.index_of(node);
  std::size_t count = 0;
  auto comp = tarjan(g, count);
  NodeSet out;
  for (std::size_t w = 0; w < g.size(); ++w)
    if (comp[w] == comp[v]) out.insert(g.nodes()[w]);
  return out;
}

bool is_acyclic(const MixedGraph& g) {
  for (std::size_t v = 0; v < g.size(); ++v)
    if (contains_sorted(g.out()[v], v)) return false;
  std::size_t count = 0;
  tarjan(g, count);
  return count == g.size();
}

MixedGraph intervene_graph(const MixedGraph& g, const NodeSet& targets) {
  std::vector<bool> t = mask_of(g, targets);
  MixedGraph r(g.nodes());
  for (std::size_t a = 0; a < g.size(); ++a) {
    for (std::size_t b : g.out()[a])
      if (!t[b]) r.add_directed(g.nodes()[a], g.nodes()[b]);
    for (std::size_t b : g.bi()[a])
      if (a < b && !t[a] && !t[b]) r.add_bidirected(g.nodes()[a], g.nodes()[b]);
  }
  return r;
}

MixedGraph latent_projection(const MixedGraph& g, const NodeSet& latent) {
  std::vector<bool> l = mask_of(g, latent);
  for (std::size_t v = 0; v < g.size(); ++v)
    if (!g.bi()[v].empty())
      throw InvalidArgument("latent projection requires a directed graph");
  std::vector<std::string> kept;
  for (std::size_t v = 0; v < g.size(); ++v)
    if (!l[v]) kept.push_back(g.nodes()[v]);
  MixedGraph r(kept);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (l[i]) continue;
    std::vector<bool> seen(g.size(), false);
    std::vector<std::size_t> stack{i};
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t w : g.out()[v]) {
        if (!l[w]) {
          r.add_directed(g.nodes()[i], g.nodes()[w]);
        } else if (!seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
      }
    }
  }
  return r;
}

MixedGraph induced_subgraph(const MixedGraph& g, const NodeSet& keep) {
  std::vector<bool> k = mask_of(g, keep);
  std::vector<std::string> kept;
  for (std::size_t v = 0; v < g.size(); ++v)
    if (k[v]) kept.push_back(g.nodes()[v]);
  MixedGraph r(kept);
  for (std::size_t a = 0; a < g.size(); ++a) {
    if (!k[a]) continue;
    for (std::size_t b : g.out()[a])
      if (k[b]) r.add_directed(g.nodes()[a], g.nodes()[b]);
    for (std::size_t b : g.bi()[a])
      if (k[b] && a < b) r.add_bidirected(g.nodes()[a], g.nodes()[b]);
  }
  return r;
}

bool is_subgraph(const MixedGraph& sub, const MixedGraph& super) {
  for (const auto& n : sub.nodes())
    if (!super.has_node(n)) return false;
  for (const auto& [a, b] : sub.directed_edges())
    if (!super.has_directed(a, b)) return false;
  for (const auto& [a, b] : sub.bidirected_edges())
    if (!super.has_bidirected(a, b)) return false;
  return true;
}

std::vector<NodeSet> enumerate_loops(const MixedGraph& g, std::size_t bound) {
  const std::size_t n = g.size();
  if (n > bound)
    throw CapExceeded("loop enumeration bound exceeded: " + std::to_string(n) + " nodes > " +
                      std::to_string(bound));
  std::vector<NodeSet> loops;
  auto reach_all = [&](std::uint64_t mask, std::size_t root, bool forward) {
    std::uint64_t seen = std::uint64_t{1} << root;
    std::vector<std::size_t> stack{root};
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t w : forward ? g.out()[v] : g.in()[v]) {
        std::uint64_t bit = std::uint64_t{1} << w;
        if ((mask & bit) && !(seen & bit)) {
          seen |= bit;
          stack.push_back(w);
        }
      }
    }
    return seen == mask;
  };
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    std::size_t root = static_cast<std::size_t>(__builtin_ctzll(mask));
    if (!reach_all(mask, root, true) || !reach_all(mask, root, false)) continue;
    NodeSet s;
    for (std::size_t v = 0; v < n; ++v)
      if (mask & (std::uint64_t{1} << v)) s.insert(g.nodes()[v]);
    loops.push_back(std::move(s));
  }
  return loops;
}

namespace {

// Exhaustive path search. A path is a sequence of distinct nodes joined by
// edges; parallel edges of different types give different paths.
bool separated(const MixedGraph& g, const NodeSet& a_set, const NodeSet& b_set,
               const NodeSet& s_set, bool sigma) {
  const std::size_t n = g.size();
  std::vector<bool> a = mask_of(g, a_set), b = mask_of(g, b_set), s = mask_of(g, s_set);
  std::vector<bool> an_s = mask_of(g, relatives(g, s_set, Relation::ancestors));
  std::size_t count = 0;
  std::vector<std::size_t> comp = tarjan(g, count);

  struct Step {
    std::size_t to;
    bool head_at_from;  // arrowhead at the node we leave
    bool head_at_to;
  };
  std::vector<std::vector<Step>> steps(n);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t w : g.out()[v])
      if (w != v) steps[v].push_back({w, false, true});
    for (std::size_t w : g.in()[v])
      if (w != v) steps[v].push_back({w, true, false});
    for (std::size_t w : g.bi()[v]) steps[v].push_back({w, true, true});
  }

  std::vector<bool> on_path(n, false);
  // v is reached from prev (n at the start) with an arrowhead at v iff head_in.
  std::function<bool(std::size_t, bool, std::size_t)> open_from =
      [&](std::size_t v, bool head_in, std::size_t prev) -> bool {
    for (const Step& st : steps[v]) {
      std::size_t w = st.to;
      if (on_path[w]) continue;
      if (prev != n) {
        bool collider = head_in && st.head_at_from;
        bool blocked;
        if (collider) {
          blocked = !an_s[v];
        } else if (!s[v]) {
          blocked = false;
        } else if (!sigma) {
          blocked = true;
        } else {
          // v is a non-collider in S: blocks iff it points at a path neighbour
          // outside its strongly connected component.
          bool to_prev = !head_in;
          bool to_next = !st.head_at_from;
          blocked = (to_prev && comp[prev] != comp[v]) || (to_next && comp[w] != comp[v]);
        }
        if (blocked) continue;
      }
      if (b[w] && !s[w]) return true;
      on_path[w] = true;
      bool found = open_from(w, st.head_at_to, v);
      on_path[w] = false;
      if (found) return true;
    }
    return false;
  };

  for (std::size_t v = 0; v < n; ++v) {
    if (!a[v] || s[v]) continue;
    if (b[v]) return false;
    on_path[v] = true;
    bool found = open_from(v, false, n);
    on_path[v] = false;
    if (found) return false;
  }
  return true;
}

void require_nonempty(const NodeSet& a, const NodeSet& b) {
  if (a.empty() || b.empty()) throw InvalidArgument("separation sets A and B must be nonempty");
}

}  // namespace

bool d_separated(const MixedGraph& g, const NodeSet& a, const NodeSet& b, const NodeSet& s) {
  require_nonempty(a, b);
  return separated(g, a, b, s, false);
}

bool sigma_separated(const MixedGraph& g, const NodeSet& a, const NodeSet& b, const NodeSet& s) {
  require_nonempty(a, b);
  return separated(g, a, b, s, true);
}

nlohmann::json to_json(const MixedGraph& g) {
  std::vector<std::string> nodes = g.nodes();
  std::sort(nodes.begin(), nodes.end());
  nlohmann::json j;
  j["nodes"] = nodes;
  j["directed"] = nlohmann::json::array();
  for (const auto& [a, b] : g.directed_edges()) j["directed"].push_back({a, b});
  j["bidirected"] = nlohmann::json::array();
  for (const auto& [a, b] : g.bidirected_edges()) j["bidirected"].push_back({a, b});
  return j;
}

MixedGraph graph_from_json(const nlohmann::json& j) {
  try {
    MixedGraph g;
    for (const auto& n : j.at("nodes")) g.add_node(n.get<std::string>());
    if (j.contains("directed"))
      for (const auto& e : j.at("directed"))
        g.add_directed(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    if (j.contains("bidirected"))
      for (const auto& e : j.at("bidirected"))
        g.add_bidirected(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed graph JSON: ") + e.what());
  }
}

std::string to_dot(const MixedGraph& g) {
  std::vector<std::string> nodes = g.nodes();
  std::sort(nodes.begin(), nodes.end());
  std::ostringstream os;
  os << "digraph G {\n";
  for (const auto& n : nodes) os << "  \"" << n << "\";\n";
  for (const auto& [a, b] : g.directed_edges()) os << "  \"" << a << "\" -> \"" << b << "\";\n";
  for (const auto& [a, b] : g.bidirected_edges())
    os << "  \"" << a << "\" -> \"" << b << "\" [dir=both, style=dashed];\n";
  os << "}\n";
  return os.str();
}

}  // namespace scmkit
