// Command-line front end: gen-data, extract, train, explain, eval, pipeline.
// Exit codes: 0 success, 1 usage/validation error, 2 runtime/IO error.

#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "oracle/run.hpp"

namespace {

using oracle::run::RunConfig;

void add_common(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--out-dir", cfg.out_dir, "output directory (fixed artifact names)");
  cmd->add_option("--seed", cfg.seed, "master RNG seed");
  cmd->add_option("--threads", cfg.threads, "thread budget for parallel kernels");
}

void add_dataset_inputs(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--dataset", cfg.dataset_path, "dataset cache file (dataset.json)");
}

void add_gen_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--kind", cfg.dataset_kind, "ba2motifs | balrp | tudataset");
  cmd->add_option("--count", cfg.gen_count, "number of generated graphs (even)");
  cmd->add_option("--base-nodes", cfg.gen_base_nodes, "BA base size");
  cmd->add_option("--dir", cfg.tudataset_dir, "TUDataset directory");
  cmd->add_option("--name", cfg.tudataset_name, "TUDataset name prefix");
  cmd->add_option("--split-train", cfg.split_train, "train fraction");
  cmd->add_option("--split-val", cfg.split_validation, "validation fraction");
  cmd->add_option("--split-test", cfg.split_test, "test fraction");
}

void add_extract_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--walk-len", cfg.walk_length, "node visits per walk");
  cmd->add_option("--p", cfg.walk_p, "return parameter");
  cmd->add_option("--q", cfg.walk_q, "in-out parameter");
  cmd->add_option("--top-k", cfg.top_k, "roots per batch");
  cmd->add_option("--batch-size", cfg.batch_size, "graphs per batch");
}

void add_train_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--subgraphs", cfg.subgraphs_path, "subgraph set file (subgraphs.json)");
  cmd->add_option("--lambda", cfg.lambda, "objective trade-off in [0, 1]");
  cmd->add_option("--epochs", cfg.epochs, "training epochs");
  cmd->add_option("--lr", cfg.learning_rate, "Adam learning rate");
  cmd->add_option("--hidden", cfg.hidden_dims, "GIN layer widths")->delimiter(',');
  cmd->add_option("--kernel", cfg.kernel_kind, "rbf | inner | poly");
  cmd->add_option("--theta", cfg.theta, "RBF bandwidth");
  cmd->add_option("--poly-c", cfg.poly_c, "polynomial kernel constant");
  cmd->add_option("--poly-degree", cfg.poly_degree, "polynomial kernel degree");
  cmd->add_option("--fc-layers", cfg.fc_layers, "fully-connected layer count m");
  cmd->add_option("--activation", cfg.activation, "relu | leakyrelu | sigmoid");
  cmd->add_option("--dropout", cfg.dropout, "hidden-layer dropout rate");
}

void add_model_inputs(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--subgraphs", cfg.subgraphs_path, "subgraph set file");
  cmd->add_option("--model", cfg.model_path, "model checkpoint file");
}

// --config is applied before flag parsing so explicit flags win.
std::string find_config_arg(int argc, char** argv) {
  for (int i = 1; i < argc - 1; ++i)
    if (std::string(argv[i]) == "--config") return argv[i + 1];
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  const std::string config_path = find_config_arg(argc, argv);
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::fprintf(stderr, "error: cannot open config file %s\n", config_path.c_str());
      return 1;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      cfg.merge_json(ss.str());
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: bad config file: %s\n", e.what());
      return 1;
    }
  }

  CLI::App app{"GraphOracle: class-level self-explainable graph classification"};
  app.require_subcommand(1);
  std::string config_dummy;
  app.add_option("--config", config_dummy, "JSON config file (flags override it)");

  auto* gen = app.add_subcommand("gen-data", "generate or ingest a dataset cache");
  add_common(gen, cfg);
  gen->add_option("--config", config_dummy, "JSON config file");
  add_gen_options(gen, cfg);

  auto* extract = app.add_subcommand("extract", "extract the subgraph set from the train split");
  add_common(extract, cfg);
  extract->add_option("--config", config_dummy, "JSON config file");
  add_dataset_inputs(extract, cfg);
  add_extract_options(extract, cfg);

  auto* tr = app.add_subcommand("train", "train the classifier and explainer head");
  add_common(tr, cfg);
  tr->add_option("--config", config_dummy, "JSON config file");
  add_dataset_inputs(tr, cfg);
  add_train_options(tr, cfg);
  tr->add_option("--batch-size", cfg.batch_size, "training batch size");

  auto* ex = app.add_subcommand("explain", "export per-class subgraph rankings");
  add_common(ex, cfg);
  ex->add_option("--config", config_dummy, "JSON config file");
  add_dataset_inputs(ex, cfg);
  add_model_inputs(ex, cfg);
  ex->add_option("--top-n", cfg.top_n, "subgraphs per class");
  ex->add_flag("--sort-heatmap", cfg.sort_heatmap, "sort heatmap columns by class-0 weight");
  ex->add_flag("--embeddings", cfg.export_embeddings, "export GNN embeddings CSV");

  auto* ev = app.add_subcommand("eval", "masking-based fidelity evaluation on the test split");
  add_common(ev, cfg);
  ev->add_option("--config", config_dummy, "JSON config file");
  add_dataset_inputs(ev, cfg);
  add_model_inputs(ev, cfg);
  ev->add_option("--levels", cfg.sparsity_levels, "sparsity levels")->delimiter(',');

  auto* pipe = app.add_subcommand("pipeline", "gen-data, extract, train, explain, eval in order");
  add_common(pipe, cfg);
  pipe->add_option("--config", config_dummy, "JSON config file");
  add_gen_options(pipe, cfg);
  add_extract_options(pipe, cfg);
  add_train_options(pipe, cfg);
  pipe->add_option("--top-n", cfg.top_n, "subgraphs per class");
  pipe->add_flag("--sort-heatmap", cfg.sort_heatmap, "sort heatmap columns by class-0 weight");
  pipe->add_flag("--embeddings", cfg.export_embeddings, "export GNN embeddings CSV");
  pipe->add_option("--levels", cfg.sparsity_levels, "sparsity levels")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    cfg.finalize();
    if (gen->parsed())
      oracle::run::cmd_gen_data(cfg);
    else if (extract->parsed())
      oracle::run::cmd_extract(cfg);
    else if (tr->parsed())
      oracle::run::cmd_train(cfg);
    else if (ex->parsed())
      oracle::run::cmd_explain(cfg);
    else if (ev->parsed())
      oracle::run::cmd_eval(cfg);
    else if (pipe->parsed())
      oracle::run::cmd_pipeline(cfg);
    return 0;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
