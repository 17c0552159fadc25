#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "oracle/autodiff.hpp"
#include "oracle/gin.hpp"
#include "oracle/graph.hpp"
#include "oracle/kernels.hpp"
#include "oracle/optim.hpp"
#include "oracle/walks.hpp"

namespace oracle {

struct TrainingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Activation { ReLU, LeakyReLU, Sigmoid };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

// Fully-connected stack over dependency embeddings: m-1 hidden layers of
// width |SG| with activation and dropout, then a linear |SG| -> |C| layer
// whose weight matrix is read as the class-subgraph dependencies.
struct FcConfig {
  int num_layers = 2;  // m
  Activation activation = Activation::ReLU;
  double dropout = 0.5;

  void validate() const;
};

struct FcLayer {
  Tensor w;  // out x in
  Tensor b;  // 1 x out
};

struct TrainConfig {
  double lambda = 0.94;
  double learning_rate = 0.01;
  int epochs = 200;
  int batch_size = 512;
  std::uint64_t seed = 0;
  KernelConfig kernel;
  GinConfig gin;
  FcConfig fc;

  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  double loss = 0.0;
  double loss_clas = 0.0;
  double loss_reg = 0.0;
  double val_accuracy = 0.0;  // NaN when there is no validation split
};

struct TrainedModel {
  GinConfig gin_config;
  FcConfig fc_config;
  KernelConfig kernel;
  int feature_dim = 0;
  int num_classes = 0;
  int num_subgraphs = 0;
  ParameterStore params;  // best-validation snapshot
  std::vector<EpochStats> history;
  std::string subgraphs_file;  // reference to the extraction artifact, may be empty

  GinParams gin_params() const;
  std::vector<FcLayer> fc_layers() const;
  // Final-layer weights, |C| x |SG|: entry (i, j) is the dependency of class i
  // on subgraph j.
  const Tensor& class_dependency_matrix() const;
};

// psi vector of z_g against every subgraph embedding row, in set order.
std::vector<double> dependency_embedding(const std::vector<double>& z_g, const Tensor& all_z_sg,
                                         const KernelConfig& config);

// Eq. arithmetic helpers; the training loop computes the same quantities
// through the tape ops, these exist as the plain-value contracts.
double classification_loss(const Tensor& logits, const std::vector<int>& labels);
double entropy_regularizer(const Tensor& subgraph_logits, int num_classes);
double total_objective(double loss_clas, double loss_reg, double lambda);

// Forward through the FC stack; dropout applies only in training mode.
Tensor fc_forward(const Tensor& dep_rows, const std::vector<FcLayer>& layers,
                  Activation activation, double dropout, bool training, Rng* rng);

TrainedModel train(const Dataset& dataset, const SubgraphSet& subgraphs,
                   const TrainConfig& config);

// Eval-mode plumbing shared by validation, fidelity, and the exports.
Tensor subgraph_embedding_matrix(const TrainedModel& model, const SubgraphSet& subgraphs);
Tensor model_dependency_matrix(const TrainedModel& model, const std::vector<const Graph*>& graphs,
                               const Tensor& subgraph_embeddings);
Tensor fc_eval(const TrainedModel& model, const Tensor& dep_rows);
double accuracy(const TrainedModel& model, const Dataset& dataset,
                const std::vector<int>& indices, const SubgraphSet& subgraphs);
// Mean softmax entropy of per-subgraph predictions (the quantity Eq.-8-style
// regularization drives down).
double mean_subgraph_entropy(const TrainedModel& model, const SubgraphSet& subgraphs);

struct RankedSubgraph {
  int subgraph_id = 0;
  double weight = 0.0;
};

// Per class: subgraphs ranked by final-layer weight descending, ties by lower
// index. top_n beyond |SG| clips with a warning.
std::vector<std::vector<RankedSubgraph>> class_explanations(const TrainedModel& model, int top_n);

// Row-softmax-normalized W^m; optionally column-sorted by class-0 weight descending.
// Returns the matrix and the column order (original subgraph ids).
std::pair<Tensor, std::vector<int>> heatmap_export(const TrainedModel& model,
                                                   bool sort_by_class0 = false);

void write_explanations_csv(const TrainedModel& model, const SubgraphSet& subgraphs, int top_n,
                            const std::string& path);
void write_heatmap_csv(const TrainedModel& model, bool sort_by_class0, const std::string& path);
void write_history_csv(const TrainedModel& model, const std::string& path);

std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& text);
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

}  // namespace oracle
