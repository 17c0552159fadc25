#include "oracle/walks.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "oracle/data_io.hpp"

namespace oracle {

void WalkConfig::validate() const {
  if (walk_length < 2) throw std::invalid_argument("WalkConfig: walk_length must be >= 2");
  if (p <= 0.0 || q <= 0.0) throw std::invalid_argument("WalkConfig: p and q must be > 0");
  if (top_k < 1) throw std::invalid_argument("WalkConfig: top_k must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("WalkConfig: batch_size must be >= 1");
}

namespace detail {

std::vector<double> second_order_weights(const Graph& graph, int prev, int cur,
                                         const WalkConfig& config) {
  const auto& nbrs = graph.adjacency[cur];
  std::vector<double> weights(nbrs.size());
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    const int x = nbrs[i];
    if (x == prev)
      weights[i] = 1.0 / config.p;
    else if (graph.has_edge(x, prev))
      weights[i] = 1.0;
    else
      weights[i] = 1.0 / config.q;
  }
  return weights;
}

}  // namespace detail

namespace {

int pick_weighted(const std::vector<double>& weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double u = rng.next_double() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

}  // namespace

std::vector<int> biased_random_walk(const Graph& graph, int root, const WalkConfig& config,
                                    Rng& rng) {
  config.validate();
  if (root < 0 || root >= graph.num_nodes)
    throw std::invalid_argument("biased_random_walk: root index out of range");
  if (graph.adjacency[root].empty()) return {root};

  std::vector<int> walk;
  walk.reserve(config.walk_length);
  walk.push_back(root);
  int cur = graph.adjacency[root][rng.next_int(static_cast<int>(graph.adjacency[root].size()))];
  walk.push_back(cur);
  int prev = root;
  while (static_cast<int>(walk.size()) < config.walk_length) {
    const auto weights = detail::second_order_weights(graph, prev, cur, config);
    const int next = graph.adjacency[cur][pick_weighted(weights, rng)];
    walk.push_back(next);
    prev = cur;
    cur = next;
  }
  return walk;
}

SubgraphSet extract_subgraphs(const Dataset& dataset, const WalkConfig& config) {
  config.validate();
  const std::vector<int>& train = dataset.splits.train;
  if (train.empty()) throw std::invalid_argument("extract_subgraphs: empty train split");

  SubgraphSet result;
  std::map<std::pair<int, std::vector<int>>, bool> seen;

  const int num_batches =
      (static_cast<int>(train.size()) + config.batch_size - 1) / config.batch_size;
  for (int batch = 0; batch < num_batches; ++batch) {
    const int lo = batch * config.batch_size;
    const int hi = std::min<int>(lo + config.batch_size, static_cast<int>(train.size()));

    // pool all (graph, node) pairs of the batch; rank by degree descending,
    // ties by graph index then node index
    struct Root {
      int degree;
      int graph;
      int node;
    };
    std::vector<Root> pool;
    for (int t = lo; t < hi; ++t) {
      const Graph& g = dataset.graphs[train[t]];
      for (int v = 0; v < g.num_nodes; ++v)
        pool.push_back({static_cast<int>(g.adjacency[v].size()), train[t], v});
    }
    std::sort(pool.begin(), pool.end(), [](const Root& a, const Root& b) {
      if (a.degree != b.degree) return a.degree > b.degree;
      if (a.graph != b.graph) return a.graph < b.graph;
      return a.node < b.node;
    });
    const int k = std::min<int>(config.top_k, static_cast<int>(pool.size()));

    for (int rank = 0; rank < k; ++rank) {
      const Root& root = pool[rank];
      const Graph& g = dataset.graphs[root.graph];
      Rng rng(mix64(config.seed, static_cast<std::uint64_t>(batch),
                    static_cast<std::uint64_t>(rank)));
      const std::vector<int> visited = biased_random_walk(g, root.node, config, rng);
      NodeSet nodes = make_node_set(g, visited);
      auto key = std::make_pair(root.graph, nodes.nodes);
      if (seen.emplace(std::move(key), true).second) {
        Graph structure = induced_subgraph(g, nodes);
        result.subgraphs.push_back(Subgraph{root.graph, std::move(nodes), std::move(structure)});
      }
    }
  }
  return result;
}

std::string subgraphs_to_json(const SubgraphSet& set, const WalkConfig& config) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["config"] = {{"walk_length", config.walk_length}, {"p", config.p},
                 {"q", config.q},                     {"top_k", config.top_k},
                 {"batch_size", config.batch_size},   {"seed", config.seed}};
  nlohmann::json subs = nlohmann::json::array();
  for (const Subgraph& sg : set.subgraphs)
    subs.push_back({{"source_graph", sg.source_graph}, {"nodes", sg.node_set.nodes}});
  j["subgraphs"] = std::move(subs);
  return j.dump(2);
}

SubgraphSet subgraphs_from_json(const Dataset& dataset, const std::string& text,
                                WalkConfig* config_out) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (config_out) {
    const auto& c = j.at("config");
    config_out->walk_length = c.at("walk_length").get<int>();
    config_out->p = c.at("p").get<double>();
    config_out->q = c.at("q").get<double>();
    config_out->top_k = c.at("top_k").get<int>();
    config_out->batch_size = c.at("batch_size").get<int>();
    config_out->seed = c.at("seed").get<std::uint64_t>();
  }
  SubgraphSet set;
  for (const auto& sj : j.at("subgraphs")) {
    const int src = sj.at("source_graph").get<int>();
    if (src < 0 || src >= static_cast<int>(dataset.graphs.size()))
      throw FormatError("subgraph file references graph " + std::to_string(src) +
                        " outside the dataset");
    const Graph& g = dataset.graphs[src];
    NodeSet nodes = make_node_set(g, sj.at("nodes").get<std::vector<int>>());
    Graph structure = induced_subgraph(g, nodes);
    set.subgraphs.push_back(Subgraph{src, std::move(nodes), std::move(structure)});
  }
  return set;
}

void save_subgraphs(const SubgraphSet& set, const WalkConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << subgraphs_to_json(set, config) << "\n";
}

SubgraphSet load_subgraphs(const Dataset& dataset, const std::string& path,
                           WalkConfig* config_out) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return subgraphs_from_json(dataset, ss.str(), config_out);
}

}  // namespace oracle
