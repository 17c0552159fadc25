#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oracle/autodiff.hpp"
#include "oracle/graph.hpp"
#include "oracle/optim.hpp"
#include "oracle/rng.hpp"
#include "oracle/walks.hpp"

namespace oracle {

struct GinConfig {
  int num_layers = 2;
  std::vector<int> hidden_dims = {64, 64};  // one width per layer
  double epsilon_init = 0.0;

  void validate() const;
  int output_dim() const { return hidden_dims.back(); }
};

// Per layer: two-layer perceptron d_in -> d -> d with ReLU between, plus a
// learnable scalar epsilon. h_v = MLP((1+eps) h_v + sum_{u in N(v)} h_u).
// ReLU between GIN layers, none after the last.
struct GinLayer {
  Tensor w1, b1, w2, b2;
  double eps = 0.0;
};

struct GinParams {
  GinConfig config;
  int input_dim = 0;
  std::vector<GinLayer> layers;
  // Frozen constant applied to the pooled embedding. Calibrated once at init
  // so the kernel starts in its responsive range; not a trainable parameter,
  // which keeps it out of reach of the optimizer's scale drift.
  double output_scale = 1.0;
};

GinParams init_gin_params(const GinConfig& config, int input_dim, Rng& rng);

// ParameterStore naming: gin.l{i}.{w1,b1,w2,b2,eps}
void gin_params_to_store(const GinParams& params, ParameterStore& store);
GinParams gin_params_from_store(const GinConfig& config, int input_dim,
                                const ParameterStore& store);

// Tape-bound handles for one layer's parameters.
struct GinLayerRef {
  ad::ValueId w1, b1, w2, b2, eps;
};

// Leaves for all layers; requires_grad marks them trainable.
std::vector<GinLayerRef> gin_leaves(ad::Tape& tape, const GinParams& params, bool requires_grad);

// Node embedding matrix H (n x d) for one graph.
ad::ValueId gin_node_embeddings(ad::Tape& tape, const Graph& graph,
                                const std::vector<GinLayerRef>& layers, int input_dim);

// Sum pooling: 1 x d row.
ad::ValueId graph_embedding_op(ad::Tape& tape, ad::ValueId node_embeddings);

// Convenience non-tape forward for a single graph.
Tensor gin_forward(const Graph& graph, const GinParams& params);
Tensor graph_embedding(const Tensor& node_embeddings);

// Rows of pooled embeddings for a list of graphs, in input order, times
// output_scale.
ad::ValueId embed_graph_rows(ad::Tape& tape, const std::vector<const Graph*>& graphs,
                             const std::vector<GinLayerRef>& layers, int input_dim,
                             double output_scale = 1.0);

// z_G for all graphs and z_SG for all subgraphs, embedded with one parameter set.
struct EmbeddingMatrix {
  Tensor graph_embeddings;     // |G| x d
  Tensor subgraph_embeddings;  // |SG| x d
};
EmbeddingMatrix embed_all(const std::vector<Graph>& graphs, const SubgraphSet& subgraphs,
                          const GinParams& params);

// CSV export: kind(graph|subgraph), index, d values.
void write_embeddings_csv(const EmbeddingMatrix& embeddings, const std::string& path);

}  // namespace oracle
