#include "oracle/gin.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "oracle/data_io.hpp"

namespace oracle {

void GinConfig::validate() const {
  if (num_layers < 1) throw std::invalid_argument("GinConfig: need at least one layer");
  if (static_cast<int>(hidden_dims.size()) != num_layers)
    throw std::invalid_argument("GinConfig: one hidden dim per layer required");
  for (int d : hidden_dims)
    if (d < 1) throw std::invalid_argument("GinConfig: hidden dims must be >= 1");
}

namespace {

Tensor glorot(int rows, int cols, Rng& rng) {
  const double a = std::sqrt(6.0 / (rows + cols));
  Tensor t(rows, cols);
  for (double& v : t.values) v = rng.next_double(-a, a);
  return t;
}

}  // namespace

GinParams init_gin_params(const GinConfig& config, int input_dim, Rng& rng) {
  config.validate();
  if (input_dim < 1) throw std::invalid_argument("init_gin_params: input_dim must be >= 1");
  GinParams params;
  params.config = config;
  params.input_dim = input_dim;
  int d_in = input_dim;
  for (int l = 0; l < config.num_layers; ++l) {
    const int d = config.hidden_dims[l];
    GinLayer layer;
    layer.w1 = glorot(d_in, d, rng);
    layer.b1 = Tensor(1, d);
    layer.w2 = glorot(d, d, rng);
    layer.b2 = Tensor(1, d);
    layer.eps = config.epsilon_init;
    params.layers.push_back(std::move(layer));
    d_in = d;
  }
  return params;
}

void gin_params_to_store(const GinParams& params, ParameterStore& store) {
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const std::string prefix = "gin.l" + std::to_string(l) + ".";
    const GinLayer& layer = params.layers[l];
    store.add(prefix + "w1", layer.w1);
    store.add(prefix + "b1", layer.b1);
    store.add(prefix + "w2", layer.w2);
    store.add(prefix + "b2", layer.b2);
    store.add(prefix + "eps", Tensor(1, 1, layer.eps));
  }
  store.add("gin.scale", Tensor(1, 1, params.output_scale));
}

GinParams gin_params_from_store(const GinConfig& config, int input_dim,
                                const ParameterStore& store) {
  config.validate();
  GinParams params;
  params.config = config;
  params.input_dim = input_dim;
  for (int l = 0; l < config.num_layers; ++l) {
    const std::string prefix = "gin.l" + std::to_string(l) + ".";
    GinLayer layer;
    layer.w1 = store.get(prefix + "w1");
    layer.b1 = store.get(prefix + "b1");
    layer.w2 = store.get(prefix + "w2");
    layer.b2 = store.get(prefix + "b2");
    layer.eps = store.get(prefix + "eps").values[0];
    params.layers.push_back(std::move(layer));
  }
  if (store.contains("gin.scale")) params.output_scale = store.get("gin.scale").values[0];
  return params;
}

std::vector<GinLayerRef> gin_leaves(ad::Tape& tape, const GinParams& params, bool requires_grad) {
  std::vector<GinLayerRef> refs;
  refs.reserve(params.layers.size());
  for (const GinLayer& layer : params.layers) {
    GinLayerRef r;
    r.w1 = tape.leaf(layer.w1, requires_grad);
    r.b1 = tape.leaf(layer.b1, requires_grad);
    r.w2 = tape.leaf(layer.w2, requires_grad);
    r.b2 = tape.leaf(layer.b2, requires_grad);
    r.eps = tape.leaf(Tensor(1, 1, layer.eps), requires_grad);
    refs.push_back(r);
  }
  return refs;
}

ad::ValueId gin_node_embeddings(ad::Tape& tape, const Graph& graph,
                                const std::vector<GinLayerRef>& layers, int input_dim) {
  if (graph.features.cols != input_dim)
    throw std::invalid_argument("gin: graph feature dim " + std::to_string(graph.features.cols) +
                                " does not match parameter input dim " +
                                std::to_string(input_dim));
  ad::ValueId h = tape.leaf(graph.features, false);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const GinLayerRef& layer = layers[l];
    ad::ValueId agg = tape.neighbor_sum(h, graph);
    ad::ValueId combined = tape.gin_combine(h, agg, layer.eps);
    ad::ValueId t1 = tape.relu(tape.add_row_broadcast(tape.matmul(combined, layer.w1), layer.b1));
    h = tape.add_row_broadcast(tape.matmul(t1, layer.w2), layer.b2);
    if (l + 1 < layers.size()) h = tape.relu(h);
  }
  return h;
}

ad::ValueId graph_embedding_op(ad::Tape& tape, ad::ValueId node_embeddings) {
  return tape.sum_rows(node_embeddings);
}

Tensor gin_forward(const Graph& graph, const GinParams& params) {
  ad::Tape tape;
  auto layers = gin_leaves(tape, params, false);
  return tape.value(gin_node_embeddings(tape, graph, layers, params.input_dim));
}

Tensor graph_embedding(const Tensor& node_embeddings) {
  if (node_embeddings.rows == 0) throw std::invalid_argument("graph_embedding: empty input");
  Tensor z(1, node_embeddings.cols);
  for (int r = 0; r < node_embeddings.rows; ++r)
    for (int c = 0; c < node_embeddings.cols; ++c) z.values[c] += node_embeddings.at(r, c);
  return z;
}

ad::ValueId embed_graph_rows(ad::Tape& tape, const std::vector<const Graph*>& graphs,
                             const std::vector<GinLayerRef>& layers, int input_dim,
                             double output_scale) {
  std::vector<ad::ValueId> rows;
  rows.reserve(graphs.size());
  for (const Graph* g : graphs)
    rows.push_back(graph_embedding_op(tape, gin_node_embeddings(tape, *g, layers, input_dim)));
  ad::ValueId stacked = tape.concat_rows(rows);
  if (output_scale != 1.0)
    stacked = tape.affine_combine(stacked, stacked, output_scale, 0.0);
  return stacked;
}

EmbeddingMatrix embed_all(const std::vector<Graph>& graphs, const SubgraphSet& subgraphs,
                          const GinParams& params) {
  ad::Tape tape;
  auto layers = gin_leaves(tape, params, false);
  std::vector<const Graph*> gptr;
  gptr.reserve(graphs.size());
  for (const Graph& g : graphs) gptr.push_back(&g);
  std::vector<const Graph*> sptr;
  sptr.reserve(subgraphs.subgraphs.size());
  for (const Subgraph& sg : subgraphs.subgraphs) sptr.push_back(&sg.structure);

  EmbeddingMatrix out;
  if (!gptr.empty())
    out.graph_embeddings =
        tape.value(embed_graph_rows(tape, gptr, layers, params.input_dim, params.output_scale));
  if (!sptr.empty())
    out.subgraph_embeddings =
        tape.value(embed_graph_rows(tape, sptr, layers, params.input_dim, params.output_scale));
  return out;
}

void write_embeddings_csv(const EmbeddingMatrix& embeddings, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  const int d = embeddings.graph_embeddings.rows > 0 ? embeddings.graph_embeddings.cols
                                                     : embeddings.subgraph_embeddings.cols;
  out << "kind,index";
  for (int c = 0; c < d; ++c) out << ",e" << c;
  out << "\n";
  out.precision(17);
  for (int r = 0; r < embeddings.graph_embeddings.rows; ++r) {
    out << "graph," << r;
    for (int c = 0; c < d; ++c) out << "," << embeddings.graph_embeddings.at(r, c);
    out << "\n";
  }
  for (int r = 0; r < embeddings.subgraph_embeddings.rows; ++r) {
    out << "subgraph," << r;
    for (int c = 0; c < d; ++c) out << "," << embeddings.subgraph_embeddings.at(r, c);
    out << "\n";
  }
}

}  // namespace oracle
