#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace scmkit {

using NodeSet = std::set<std::string>;

// Directed mixed graph: nodes in insertion order, directed edges (self-loops
// allowed) and bidirected edges between distinct nodes. Nodes compare by name.
class MixedGraph {
 public:
  MixedGraph() = default;
  explicit MixedGraph(const std::vector<std::string>& nodes);

  void add_node(const std::string& name);
  void add_directed(const std::string& tail, const std::string& head);
  void add_bidirected(const std::string& a, const std::string& b);

  const std::vector<std::string>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  bool has_node(const std::string& name) const { return index_.count(name) != 0; }
  std::size_t index_of(const std::string& name) const;

  bool has_directed(const std::string& tail, const std::string& head) const;
  bool has_bidirected(const std::string& a, const std::string& b) const;

  // By name, sorted.
  std::vector<std::pair<std::string, std::string>> directed_edges() const;
  std::vector<std::pair<std::string, std::string>> bidirected_edges() const;

  // Index-level adjacency for the algorithms.
  const std::vector<std::vector<std::size_t>>& out() const { return out_; }
  const std::vector<std::vector<std::size_t>>& in() const { return in_; }
  const std::vector<std::vector<std::size_t>>& bi() const { return bi_; }

  bool operator==(const MixedGraph& other) const;

 private:
  std::vector<std::string> nodes_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> out_, in_, bi_;
};

enum class Relation { parents, children, ancestors, descendants };

NodeSet relatives(const MixedGraph& g, const NodeSet& seed, Relation kind);
NodeSet scc(const MixedGraph& g, const std::string& node);
std::vector<NodeSet> strongly_connected_components(const MixedGraph& g);
bool is_acyclic(const MixedGraph& g);

MixedGraph intervene_graph(const MixedGraph& g, const NodeSet& targets);
MixedGraph latent_projection(const MixedGraph& g, const NodeSet& latent);
MixedGraph induced_subgraph(const MixedGraph& g, const NodeSet& keep);
bool is_subgraph(const MixedGraph& sub, const MixedGraph& super);

inline constexpr std::size_t kLoopNodeBound = 16;
std::vector<NodeSet> enumerate_loops(const MixedGraph& g, std::size_t bound = kLoopNodeBound);

bool d_separated(const MixedGraph& g, const NodeSet& a, const NodeSet& b, const NodeSet& s);
bool sigma_separated(const MixedGraph& g, const NodeSet& a, const NodeSet& b, const NodeSet& s);

nlohmann::json to_json(const MixedGraph& g);
MixedGraph graph_from_json(const nlohmann::json& j);
std::string to_dot(const MixedGraph& g);

}  // namespace scmkit
