#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "oracle/tensor.hpp"

namespace oracle {

// Undirected simple graph with per-node features and an optional class label.
// Immutable after construction via make_graph; adjacency lists are sorted.
struct Graph {
  int id = 0;
  int num_nodes = 0;
  std::vector<std::pair<int, int>> edges;      // unordered pairs stored (lo, hi), sorted, unique
  Tensor features;                             // num_nodes x k
  std::optional<int> label;
  std::vector<std::vector<int>> adjacency;     // sorted neighbor lists
  std::vector<int> original_nodes;             // set for induced subgraphs: output node -> source node

  int feature_dim() const { return features.cols; }
  int num_edges() const { return static_cast<int>(edges.size()); }
  bool has_edge(int u, int v) const;
};

struct Splits {
  std::vector<int> train;
  std::vector<int> validation;
  std::vector<int> test;
};

struct Dataset {
  std::vector<Graph> graphs;
  int num_classes = 0;
  int feature_dim = 0;
  Splits splits;

  bool operator==(const Dataset& o) const;
};

// Canonical node subset of one graph: sorted, unique, all indices valid.
struct NodeSet {
  int parent_graph = 0;
  std::vector<int> nodes;
};

// Validates invariants (no self loops, endpoints in range, unique pairs, feature
// row count) and builds adjacency. Throws std::invalid_argument on violation.
Graph make_graph(int id, int num_nodes, std::vector<std::pair<int, int>> edges,
                 Tensor features, std::optional<int> label = std::nullopt);

// Sorts/dedups indices and checks them against the graph.
NodeSet make_node_set(const Graph& graph, std::vector<int> nodes);

std::vector<int> degree_centrality(const Graph& graph);

// Induced subgraph on the given node set, relabeled 0..|nodes|-1 in sorted order.
// Feature rows are copied; the label is dropped; original_nodes records the mapping.
Graph induced_subgraph(const Graph& graph, const NodeSet& nodes);

bool is_connected(const Graph& graph);

}  // namespace oracle
