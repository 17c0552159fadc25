#include "oracle/graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace oracle {

bool Graph::has_edge(int u, int v) const {
  const auto& nbrs = adjacency[u];
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

bool Dataset::operator==(const Dataset& o) const {
  if (num_classes != o.num_classes || feature_dim != o.feature_dim) return false;
  if (graphs.size() != o.graphs.size()) return false;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const Graph& a = graphs[i];
    const Graph& b = o.graphs[i];
    if (a.num_nodes != b.num_nodes || a.edges != b.edges || a.label != b.label ||
        !(a.features == b.features))
      return false;
  }
  return true;
}

Graph make_graph(int id, int num_nodes, std::vector<std::pair<int, int>> edges,
                 Tensor features, std::optional<int> label) {
  if (num_nodes < 0) throw std::invalid_argument("make_graph: negative node count");
  if (features.rows != num_nodes)
    throw std::invalid_argument("make_graph: features must have one row per node");
  for (auto& [u, v] : edges) {
    if (u == v) throw std::invalid_argument("make_graph: self loop");
    if (u < 0 || v < 0 || u >= num_nodes || v >= num_nodes)
      throw std::invalid_argument("make_graph: edge endpoint out of range");
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw std::invalid_argument("make_graph: duplicate edge");

  Graph g;
  g.id = id;
  g.num_nodes = num_nodes;
  g.edges = std::move(edges);
  g.features = std::move(features);
  g.label = label;
  g.adjacency.assign(num_nodes, {});
  for (const auto& [u, v] : g.edges) {
    g.adjacency[u].push_back(v);
    g.adjacency[v].push_back(u);
  }
  for (auto& nbrs : g.adjacency) std::sort(nbrs.begin(), nbrs.end());
  return g;
}

NodeSet make_node_set(const Graph& graph, std::vector<int> nodes) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  for (int v : nodes)
    if (v < 0 || v >= graph.num_nodes)
      throw std::invalid_argument("make_node_set: node index out of range");
  return NodeSet{graph.id, std::move(nodes)};
}

std::vector<int> degree_centrality(const Graph& graph) {
  std::vector<int> deg(graph.num_nodes);
  for (int v = 0; v < graph.num_nodes; ++v)
    deg[v] = static_cast<int>(graph.adjacency[v].size());
  return deg;
}

Graph induced_subgraph(const Graph& graph, const NodeSet& nodes) {
  if (nodes.nodes.empty()) throw std::invalid_argument("induced_subgraph: empty node set");
  const int n = static_cast<int>(nodes.nodes.size());

  std::vector<int> relabel(graph.num_nodes, -1);
  for (int i = 0; i < n; ++i) {
    int v = nodes.nodes[i];
    if (v < 0 || v >= graph.num_nodes)
      throw std::invalid_argument("induced_subgraph: node index out of range");
    relabel[v] = i;
  }

  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    int v = nodes.nodes[i];
    for (int u : graph.adjacency[v])
      if (relabel[u] > i) edges.emplace_back(i, relabel[u]);
  }

  Tensor features(n, graph.features.cols);
  for (int i = 0; i < n; ++i) {
    const double* src = graph.features.row(nodes.nodes[i]);
    std::copy(src, src + graph.features.cols, features.row(i));
  }

  Graph sub = make_graph(graph.id, n, std::move(edges), std::move(features));
  sub.original_nodes = nodes.nodes;
  return sub;
}

bool is_connected(const Graph& graph) {
  if (graph.num_nodes <= 1) return true;
  std::vector<char> seen(graph.num_nodes, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int u : graph.adjacency[v]) {
      if (!seen[u]) {
        seen[u] = 1;
        ++count;
        stack.push_back(u);
      }
    }
  }
  return count == graph.num_nodes;
}

}  // namespace oracle
