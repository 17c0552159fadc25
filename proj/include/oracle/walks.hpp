#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oracle/graph.hpp"
#include "oracle/rng.hpp"

namespace oracle {

struct WalkConfig {
  int walk_length = 10;  // node visits per walk, including the root
  double p = 1.0;        // return parameter
  double q = 1.0;        // in-out parameter
  int top_k = 100;       // roots per batch, ranked by degree across the batch
  int batch_size = 512;  // training graphs per batch
  std::uint64_t seed = 0;

  void validate() const;
};

struct Subgraph {
  int source_graph = 0;
  NodeSet node_set;
  Graph structure;  // induced subgraph of the source on node_set
};

// Deduplicated per (source_graph, node_set); deterministic first-seen order.
struct SubgraphSet {
  std::vector<Subgraph> subgraphs;

  int size() const { return static_cast<int>(subgraphs.size()); }
};

namespace detail {
// Unnormalized second-order weights for moving from `cur` (arrived from `prev`)
// to each neighbor of `cur`, in adjacency order: 1/p back to prev, 1 to common
// neighbors of prev, 1/q otherwise.
std::vector<double> second_order_weights(const Graph& graph, int prev, int cur,
                                         const WalkConfig& config);
}  // namespace detail

// Node-visit sequence of length walk_length starting at root. The first step
// is uniform over neighbors; later steps follow the second-order weights.
// An isolated root yields just {root}.
std::vector<int> biased_random_walk(const Graph& graph, int root, const WalkConfig& config,
                                    Rng& rng);

// Batches the train split, pools all (graph, node) pairs of a batch ranked by
// degree descending (ties: graph index, then node index), walks from the top K,
// and collects deduplicated induced subgraphs of the visited node sets.
SubgraphSet extract_subgraphs(const Dataset& dataset, const WalkConfig& config);

// JSON form {schema_version, config, subgraphs: [{source_graph, nodes}]};
// structures are rebuilt from the dataset on load.
std::string subgraphs_to_json(const SubgraphSet& set, const WalkConfig& config);
SubgraphSet subgraphs_from_json(const Dataset& dataset, const std::string& text,
                                WalkConfig* config_out = nullptr);
void save_subgraphs(const SubgraphSet& set, const WalkConfig& config, const std::string& path);
SubgraphSet load_subgraphs(const Dataset& dataset, const std::string& path,
                           WalkConfig* config_out = nullptr);

}  // namespace oracle
