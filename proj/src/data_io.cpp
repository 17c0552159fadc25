#include "oracle/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace oracle {

namespace {

constexpr int kMotifNodes = 5;

// weighted pick over 0..n-1; weights need not be normalized
int weighted_pick(const std::vector<double>& weights, Rng& rng) {
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

std::vector<std::pair<int, int>> grow_ba_edges(int n, Rng& rng, bool inverse_degree) {
  std::vector<std::pair<int, int>> edges{{0, 1}};
  std::vector<int> degree(n, 0);
  degree[0] = degree[1] = 1;
  std::vector<double> weights;
  for (int v = 2; v < n; ++v) {
    weights.assign(degree.begin(), degree.begin() + v);
    if (inverse_degree)
      for (double& w : weights) w = 1.0 / w;
    const int target = weighted_pick(weights, rng);
    edges.emplace_back(target, v);
    degree[target] += 1;
    degree[v] = 1;
  }
  return edges;
}

Tensor constant_features(int rows, int cols, double value) {
  return Tensor(rows, cols, value);
}

struct LabeledGraph {
  std::vector<std::pair<int, int>> edges;
  int num_nodes = 0;
  int label = 0;
};

Dataset assemble_generated(std::vector<LabeledGraph> raw, int feature_dim, double feature_value,
                           std::uint64_t seed) {
  // generation order is class 0 first, class 1 second; shuffle by seed
  std::vector<int> order(raw.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  Rng rng(mix64(seed, 0x5u));
  rng.shuffle(order);

  Dataset ds;
  ds.num_classes = 2;
  ds.feature_dim = feature_dim;
  ds.graphs.reserve(raw.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    LabeledGraph& g = raw[order[pos]];
    ds.graphs.push_back(make_graph(static_cast<int>(pos), g.num_nodes, std::move(g.edges),
                                   constant_features(g.num_nodes, feature_dim, feature_value),
                                   g.label));
  }
  return ds;
}

int parse_int_line(const std::string& line, const std::string& file, int line_no) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(line, &pos);
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    if (pos != line.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw FormatError(file + ":" + std::to_string(line_no) + ": expected an integer, got '" +
                      line + "'");
  }
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

}  // namespace

void GeneratorConfig::validate() const {
  if (count <= 0 || count % 2 != 0)
    throw std::invalid_argument("GeneratorConfig: count must be positive and even");
  if (base_nodes < 2) throw std::invalid_argument("GeneratorConfig: base_nodes must be >= 2");
}

void SplitRatios::validate() const {
  for (double r : {train, validation, test})
    if (r <= 0.0 || r >= 1.0)
      throw std::invalid_argument("SplitRatios: each ratio must be in (0, 1)");
  if (std::abs(train + validation + test - 1.0) > 1e-9)
    throw std::invalid_argument("SplitRatios: ratios must sum to 1");
}

Graph generate_ba(int n, Rng& rng) {
  if (n < 2) throw std::invalid_argument("generate_ba: need at least 2 nodes");
  return make_graph(0, n, grow_ba_edges(n, rng, false), constant_features(n, 1, 1.0));
}

Graph generate_ba(int n, std::uint64_t seed) {
  Rng rng(mix64(seed));
  return generate_ba(n, rng);
}

Dataset generate_ba2motifs(const GeneratorConfig& config) {
  config.validate();
  if (config.dataset_kind != DatasetKind::BA2Motifs)
    throw std::invalid_argument("generate_ba2motifs: wrong dataset kind");

  std::vector<LabeledGraph> raw(config.count);
  for (int i = 0; i < config.count; ++i) {
    Rng rng(mix64(config.seed, 1, static_cast<std::uint64_t>(i)));
    const int cls = i < config.count / 2 ? 0 : 1;
    const int base = config.base_nodes;
    LabeledGraph g;
    g.label = cls;
    g.num_nodes = base + kMotifNodes;
    g.edges = grow_ba_edges(base, rng, false);
    const int a = base, b = base + 1, c = base + 2, d = base + 3, e = base + 4;
    if (cls == 0) {
      // 5-cycle
      g.edges.insert(g.edges.end(), {{a, b}, {b, c}, {c, d}, {d, e}, {e, a}});
    } else {
      // house: 4-cycle a-b-c-d plus apex e adjacent to a and b
      g.edges.insert(g.edges.end(), {{a, b}, {b, c}, {c, d}, {d, a}, {a, e}, {b, e}});
    }
    const int bridge_base = rng.next_int(base);
    const int bridge_motif = base + rng.next_int(kMotifNodes);
    g.edges.emplace_back(bridge_base, bridge_motif);
    raw[i] = std::move(g);
  }
  return assemble_generated(std::move(raw), 10, 0.1, config.seed);
}

Dataset generate_balrp(const GeneratorConfig& config) {
  config.validate();
  if (config.dataset_kind != DatasetKind::BALRP)
    throw std::invalid_argument("generate_balrp: wrong dataset kind");

  std::vector<LabeledGraph> raw(config.count);
  for (int i = 0; i < config.count; ++i) {
    Rng rng(mix64(config.seed, 2, static_cast<std::uint64_t>(i)));
    const int cls = i < config.count / 2 ? 0 : 1;
    LabeledGraph g;
    g.label = cls;
    g.num_nodes = config.base_nodes;
    g.edges = grow_ba_edges(config.base_nodes, rng, /*inverse_degree=*/cls == 1);
    raw[i] = std::move(g);
  }
  return assemble_generated(std::move(raw), 1, 1.0, config.seed);
}

Dataset parse_tudataset(const std::string& directory, const std::string& name) {
  const std::string prefix = directory + "/" + name;
  const std::string a_file = prefix + "_A.txt";
  const std::string ind_file = prefix + "_graph_indicator.txt";
  const std::string gl_file = prefix + "_graph_labels.txt";
  const std::string nl_file = prefix + "_node_labels.txt";

  const auto ind_lines = read_lines(ind_file);
  const auto gl_lines = read_lines(gl_file);
  const auto a_lines = read_lines(a_file);

  const int total_nodes = static_cast<int>(ind_lines.size());
  const int num_graphs = static_cast<int>(gl_lines.size());

  // graph indicator: 1-based graph ids, contiguous and non-decreasing
  std::vector<int> node_graph(total_nodes);
  std::vector<int> graph_size(num_graphs, 0);
  int prev = 1;
  for (int i = 0; i < total_nodes; ++i) {
    const int gid = parse_int_line(ind_lines[i], ind_file, i + 1);
    if (gid < 1 || gid > num_graphs || gid < prev || gid > prev + 1)
      throw FormatError(ind_file + ":" + std::to_string(i + 1) +
                        ": non-contiguous graph indicator value " + std::to_string(gid));
    if (i == 0 && gid != 1)
      throw FormatError(ind_file + ":1: graph indicator must start at 1");
    node_graph[i] = gid - 1;
    graph_size[gid - 1] += 1;
    prev = gid;
  }
  if (total_nodes > 0 && prev != num_graphs)
    throw FormatError(ind_file + ": indicator covers " + std::to_string(prev) + " of " +
                      std::to_string(num_graphs) + " graphs");

  std::vector<int> node_offset(total_nodes);  // node id within its graph
  {
    std::vector<int> next(num_graphs, 0);
    for (int i = 0; i < total_nodes; ++i) node_offset[i] = next[node_graph[i]]++;
  }

  // labels remapped in sorted original order
  std::vector<int> raw_labels(num_graphs);
  std::set<int> label_values;
  for (int i = 0; i < num_graphs; ++i) {
    raw_labels[i] = parse_int_line(gl_lines[i], gl_file, i + 1);
    label_values.insert(raw_labels[i]);
  }
  std::map<int, int> label_map;
  for (int v : label_values) label_map.emplace(v, static_cast<int>(label_map.size()));

  // optional node labels -> one-hot features
  int feature_dim = 1;
  std::vector<int> node_feature_index(total_nodes, 0);
  if (std::ifstream(nl_file).good()) {
    const auto nl_lines = read_lines(nl_file);
    if (static_cast<int>(nl_lines.size()) != total_nodes)
      throw FormatError(nl_file + ": expected " + std::to_string(total_nodes) + " lines, got " +
                        std::to_string(nl_lines.size()));
    std::vector<int> raw(total_nodes);
    std::set<int> values;
    for (int i = 0; i < total_nodes; ++i) {
      raw[i] = parse_int_line(nl_lines[i], nl_file, i + 1);
      values.insert(raw[i]);
    }
    std::map<int, int> remap;
    for (int v : values) remap.emplace(v, static_cast<int>(remap.size()));
    for (int i = 0; i < total_nodes; ++i) node_feature_index[i] = remap.at(raw[i]);
    feature_dim = static_cast<int>(remap.size());
  }

  // edges: 1-based global node ids "i, j"; directed duplicates collapse
  std::vector<std::set<std::pair<int, int>>> edge_sets(num_graphs);
  for (std::size_t ln = 0; ln < a_lines.size(); ++ln) {
    const std::string& line = a_lines[ln];
    if (line.empty()) continue;
    std::string cleaned = line;
    std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
    std::istringstream ss(cleaned);
    long u1 = 0, v1 = 0;
    std::string extra;
    if (!(ss >> u1 >> v1) || (ss >> extra))
      throw FormatError(a_file + ":" + std::to_string(ln + 1) + ": expected 'i, j', got '" +
                        line + "'");
    if (u1 < 1 || u1 > total_nodes || v1 < 1 || v1 > total_nodes)
      throw FormatError(a_file + ":" + std::to_string(ln + 1) + ": dangling node reference");
    const int u = static_cast<int>(u1) - 1;
    const int v = static_cast<int>(v1) - 1;
    if (node_graph[u] != node_graph[v])
      throw FormatError(a_file + ":" + std::to_string(ln + 1) + ": edge crosses graphs");
    if (u == v)
      throw FormatError(a_file + ":" + std::to_string(ln + 1) + ": self loop");
    const int lo = std::min(node_offset[u], node_offset[v]);
    const int hi = std::max(node_offset[u], node_offset[v]);
    edge_sets[node_graph[u]].insert({lo, hi});
  }

  Dataset ds;
  ds.num_classes = static_cast<int>(label_map.size());
  ds.feature_dim = feature_dim;
  ds.graphs.reserve(num_graphs);
  int node_cursor = 0;
  for (int g = 0; g < num_graphs; ++g) {
    const int n = graph_size[g];
    Tensor features(n, feature_dim);
    if (feature_dim == 1) {
      for (int v = 0; v < n; ++v) features.at(v, 0) = 1.0;
    } else {
      for (int v = 0; v < n; ++v) features.at(v, node_feature_index[node_cursor + v]) = 1.0;
    }
    std::vector<std::pair<int, int>> edges(edge_sets[g].begin(), edge_sets[g].end());
    ds.graphs.push_back(
        make_graph(g, n, std::move(edges), std::move(features), label_map.at(raw_labels[g])));
    node_cursor += n;
  }
  return ds;
}

void write_tudataset(const Dataset& dataset, const std::string& directory,
                     const std::string& name) {
  const std::string prefix = directory + "/" + name;
  std::ofstream a_out(prefix + "_A.txt");
  std::ofstream ind_out(prefix + "_graph_indicator.txt");
  std::ofstream gl_out(prefix + "_graph_labels.txt");
  if (!a_out || !ind_out || !gl_out) throw IoError("cannot write TUDataset files under " + directory);

  const bool one_hot = dataset.feature_dim > 1;
  std::ofstream nl_out;
  if (one_hot) {
    nl_out.open(prefix + "_node_labels.txt");
    if (!nl_out) throw IoError("cannot write " + prefix + "_node_labels.txt");
  }

  int offset = 0;
  for (std::size_t gi = 0; gi < dataset.graphs.size(); ++gi) {
    const Graph& g = dataset.graphs[gi];
    gl_out << (g.label ? *g.label : 0) << "\n";
    for (int v = 0; v < g.num_nodes; ++v) {
      ind_out << (gi + 1) << "\n";
      for (int u : g.adjacency[v]) a_out << (offset + v + 1) << ", " << (offset + u + 1) << "\n";
      if (one_hot) {
        int label = 0;
        for (int c = 1; c < g.features.cols; ++c)
          if (g.features.at(v, c) > g.features.at(v, label)) label = c;
        nl_out << label << "\n";
      }
    }
    offset += g.num_nodes;
  }
}

Dataset split_dataset(Dataset dataset, const SplitRatios& ratios, std::uint64_t seed) {
  ratios.validate();
  const int n = static_cast<int>(dataset.graphs.size());
  if (n < 3) throw std::invalid_argument("split_dataset: need at least 3 graphs");

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  Rng rng(mix64(seed, 0x51u));
  rng.shuffle(order);

  const int n_val = static_cast<int>(std::floor(ratios.validation * n));
  const int n_test = static_cast<int>(std::floor(ratios.test * n));
  const int n_train = n - n_val - n_test;  // floor(train*n) plus the remainder

  Splits s;
  s.train.assign(order.begin(), order.begin() + n_train);
  s.validation.assign(order.begin() + n_train, order.begin() + n_train + n_val);
  s.test.assign(order.begin() + n_train + n_val, order.end());
  dataset.splits = std::move(s);
  return dataset;
}

std::string dataset_to_json(const Dataset& dataset) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["num_classes"] = dataset.num_classes;
  j["feature_dim"] = dataset.feature_dim;
  nlohmann::json graphs = nlohmann::json::array();
  for (const Graph& g : dataset.graphs) {
    nlohmann::json gj;
    gj["num_nodes"] = g.num_nodes;
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [u, v] : g.edges) edges.push_back({u, v});
    gj["edges"] = std::move(edges);
    nlohmann::json feats = nlohmann::json::array();
    for (int v = 0; v < g.num_nodes; ++v)
      feats.push_back(std::vector<double>(g.features.row(v), g.features.row(v) + g.features.cols));
    gj["features"] = std::move(feats);
    if (g.label)
      gj["label"] = *g.label;
    else
      gj["label"] = nullptr;
    graphs.push_back(std::move(gj));
  }
  j["graphs"] = std::move(graphs);
  j["splits"] = {{"train", dataset.splits.train},
                 {"validation", dataset.splits.validation},
                 {"test", dataset.splits.test}};
  return j.dump(2);
}

Dataset dataset_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  Dataset ds;
  ds.num_classes = j.at("num_classes").get<int>();
  ds.feature_dim = j.at("feature_dim").get<int>();
  int id = 0;
  for (const auto& gj : j.at("graphs")) {
    const int n = gj.at("num_nodes").get<int>();
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : gj.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    Tensor features(n, ds.feature_dim);
    const auto& feats = gj.at("features");
    for (int v = 0; v < n; ++v) {
      const auto row = feats.at(v).get<std::vector<double>>();
      std::copy(row.begin(), row.end(), features.row(v));
    }
    std::optional<int> label;
    if (!gj.at("label").is_null()) label = gj.at("label").get<int>();
    ds.graphs.push_back(make_graph(id++, n, std::move(edges), std::move(features), label));
  }
  ds.splits.train = j.at("splits").at("train").get<std::vector<int>>();
  ds.splits.validation = j.at("splits").at("validation").get<std::vector<int>>();
  ds.splits.test = j.at("splits").at("test").get<std::vector<int>>();
  return ds;
}

void save_dataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << dataset_to_json(dataset) << "\n";
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return dataset_from_json(ss.str());
}

}  // namespace oracle
