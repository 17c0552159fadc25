#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oracle/data_io.hpp"
#include "oracle/explainer.hpp"
#include "oracle/fidelity.hpp"
#include "oracle/walks.hpp"

namespace oracle::run {

// Effective configuration for one invocation. Precedence: CLI flags override
// config-file values override per-dataset defaults (resolved by finalize()).
// Sentinels mark "unset": 0 for the auto-resolved ints, -1 for lambda,
// "auto" for the activation.
struct RunConfig {
  std::string dataset_kind = "ba2motifs";  // ba2motifs | balrp | tudataset
  std::string tudataset_dir;
  std::string tudataset_name;
  int gen_count = 1000;
  int gen_base_nodes = 20;
  double split_train = 0.8, split_validation = 0.1, split_test = 0.1;

  int walk_length = 0;  // auto: 10
  double walk_p = 1.0, walk_q = 1.0;
  int top_k = 0;       // auto: 200 ba2motifs, 100 tudataset, 5 balrp
  int batch_size = 0;  // auto: 800 ba2motifs, 150 MUTAG, 512 otherwise

  double lambda = -1.0;  // auto: 0.87 ba2motifs, 0.88 balrp, 0.94 tudataset
  double learning_rate = 0.01;
  int epochs = 0;  // auto: 20 balrp, 200 otherwise
  std::vector<int> hidden_dims = {64, 64};
  std::string kernel_kind = "rbf";  // rbf | inner | poly
  double theta = 1.0;
  double poly_c = 1.0;
  int poly_degree = 2;
  int fc_layers = 2;
  std::string activation = "auto";  // auto: relu tudataset, sigmoid generators
  double dropout = 0.5;

  std::vector<double> sparsity_levels = default_sparsity_levels();
  int top_n = 4;
  bool sort_heatmap = false;
  bool export_embeddings = false;

  std::string out_dir = ".";
  std::string dataset_path;    // input overrides; default <out_dir>/<fixed name>
  std::string subgraphs_path;
  std::string model_path;
  std::uint64_t seed = 0;
  int threads = 1;

  // resolved by finalize()
  WalkConfig walk;
  TrainConfig train;

  void finalize();

  std::string to_json() const;
  void merge_json(const std::string& text);  // config-file values over defaults
};

// Fixed artifact names under out_dir.
struct Paths {
  explicit Paths(const RunConfig& config);
  std::string dataset, subgraphs, model, history, explanations, heatmap, fidelity, embeddings,
      run_json;
};

std::uint64_t fnv1a64(const std::string& bytes);
std::string config_hash(const RunConfig& config);
std::string file_hash(const std::string& path);

void cmd_gen_data(const RunConfig& config);
void cmd_extract(const RunConfig& config);
void cmd_train(const RunConfig& config);
void cmd_explain(const RunConfig& config);
void cmd_eval(const RunConfig& config);
void cmd_pipeline(const RunConfig& config);

}  // namespace oracle::run
