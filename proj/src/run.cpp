#include "oracle/run.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "oracle/gin.hpp"
#include "oracle/kernels.hpp"

namespace oracle::run {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

// Artifacts carry provenance so downstream stages can refuse stale mixes:
// the producing config hash plus content hashes of the inputs they consumed.
void inject_provenance(std::string& artifact_json, const RunConfig& config,
                       const std::vector<std::pair<std::string, std::string>>& inputs) {
  nlohmann::json j = nlohmann::json::parse(artifact_json);
  nlohmann::json prov;
  prov["config_hash"] = config_hash(config);
  nlohmann::json in = nlohmann::json::object();
  for (const auto& [name, hash] : inputs) in[name] = hash;
  prov["inputs"] = std::move(in);
  j["provenance"] = std::move(prov);
  artifact_json = j.dump(2) + "\n";
}

std::string recorded_input_hash(const std::string& artifact_path, const std::string& input_name) {
  nlohmann::json j = nlohmann::json::parse(read_file(artifact_path));
  if (!j.contains("provenance")) return {};
  const auto& prov = j.at("provenance");
  if (!prov.contains("inputs") || !prov.at("inputs").contains(input_name)) return {};
  return prov.at("inputs").at(input_name).get<std::string>();
}

void check_provenance(const std::string& artifact_path, const std::string& input_name,
                      const std::string& input_path) {
  const std::string recorded = recorded_input_hash(artifact_path, input_name);
  if (recorded.empty()) return;  // artifact written outside the CLI; nothing to check
  const std::string actual = file_hash(input_path);
  if (recorded != actual)
    throw std::runtime_error("stale artifacts: " + artifact_path + " was produced from a " +
                             input_name + " that does not match " + input_path);
}

Dataset build_dataset(const RunConfig& config) {
  Dataset ds;
  if (config.dataset_kind == "ba2motifs") {
    GeneratorConfig gen{config.gen_count, config.gen_base_nodes, config.seed,
                        DatasetKind::BA2Motifs};
    ds = generate_ba2motifs(gen);
  } else if (config.dataset_kind == "balrp") {
    GeneratorConfig gen{config.gen_count, config.gen_base_nodes, config.seed, DatasetKind::BALRP};
    ds = generate_balrp(gen);
  } else if (config.dataset_kind == "tudataset") {
    if (config.tudataset_dir.empty() || config.tudataset_name.empty())
      throw std::invalid_argument("gen-data: tudataset needs --dir and --name");
    ds = parse_tudataset(config.tudataset_dir, config.tudataset_name);
  } else {
    throw std::invalid_argument("gen-data: unknown dataset kind '" + config.dataset_kind + "'");
  }
  SplitRatios ratios{config.split_train, config.split_validation, config.split_test};
  return split_dataset(std::move(ds), ratios, config.seed);
}

void write_run_json(const RunConfig& config, const Paths& paths, const std::string& command,
                    const std::vector<std::string>& artifacts) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["command"] = command;
  j["seed"] = config.seed;
  j["config_hash"] = config_hash(config);
  j["config"] = nlohmann::json::parse(config.to_json());
  nlohmann::json files = nlohmann::json::object();
  for (const std::string& path : artifacts)
    files[std::filesystem::path(path).filename().string()] = file_hash(path);
  j["artifacts"] = std::move(files);
  write_file(paths.run_json, j.dump(2) + "\n");
}

}  // namespace

void RunConfig::finalize() {
  const bool tud = dataset_kind == "tudataset";
  const bool mutag_like = tud && tudataset_name == "MUTAG";
  if (walk_length == 0) walk_length = 10;
  if (top_k == 0) top_k = dataset_kind == "ba2motifs" ? 200 : (tud ? 100 : 5);
  if (batch_size == 0)
    batch_size = dataset_kind == "ba2motifs" ? 800 : (mutag_like ? 150 : 512);
  if (lambda < 0.0)
    lambda = dataset_kind == "ba2motifs" ? 0.87 : (dataset_kind == "balrp" ? 0.88 : 0.94);
  if (epochs == 0) epochs = dataset_kind == "balrp" ? 20 : 200;
  if (activation == "auto") activation = tud ? "relu" : "sigmoid";

  walk.walk_length = walk_length;
  walk.p = walk_p;
  walk.q = walk_q;
  walk.top_k = top_k;
  walk.batch_size = batch_size;
  walk.seed = seed;

  train.lambda = lambda;
  train.learning_rate = learning_rate;
  train.epochs = epochs;
  train.batch_size = batch_size;
  train.seed = seed;
  if (kernel_kind == "rbf")
    train.kernel.kind = KernelKind::RBF;
  else if (kernel_kind == "inner")
    train.kernel.kind = KernelKind::InnerProduct;
  else if (kernel_kind == "poly")
    train.kernel.kind = KernelKind::Polynomial;
  else
    throw std::invalid_argument("unknown kernel kind '" + kernel_kind + "'");
  train.kernel.theta = theta;
  train.kernel.poly_c = poly_c;
  train.kernel.poly_degree = poly_degree;
  train.gin.num_layers = static_cast<int>(hidden_dims.size());
  train.gin.hidden_dims = hidden_dims;
  train.fc.num_layers = fc_layers;
  train.fc.activation = activation_from_name(activation);
  train.fc.dropout = dropout;

  if (threads < 1) throw std::invalid_argument("--threads must be >= 1");
  set_num_threads(threads);

  if (dataset_path.empty()) dataset_path = out_dir + "/dataset.json";
  if (subgraphs_path.empty()) subgraphs_path = out_dir + "/subgraphs.json";
  if (model_path.empty()) model_path = out_dir + "/model.json";

  SplitRatios ratios{split_train, split_validation, split_test};
  ratios.validate();
  walk.validate();
  train.validate();
}

std::string RunConfig::to_json() const {
  nlohmann::json j;
  j["dataset"] = {{"kind", dataset_kind},       {"dir", tudataset_dir},
                  {"name", tudataset_name},     {"count", gen_count},
                  {"base_nodes", gen_base_nodes},
                  {"split", {{"train", split_train},
                             {"validation", split_validation},
                             {"test", split_test}}}};
  j["extract"] = {{"walk_length", walk_length}, {"p", walk_p}, {"q", walk_q},
                  {"top_k", top_k}};
  j["train"] = {{"lambda", lambda},
                {"learning_rate", learning_rate},
                {"epochs", epochs},
                {"batch_size", batch_size},
                {"hidden_dims", hidden_dims},
                {"kernel", kernel_kind},
                {"theta", theta},
                {"poly_c", poly_c},
                {"poly_degree", poly_degree},
                {"fc_layers", fc_layers},
                {"activation", activation},
                {"dropout", dropout}};
  j["eval"] = {{"sparsity_levels", sparsity_levels}, {"top_n", top_n},
               {"sort_heatmap", sort_heatmap},       {"export_embeddings", export_embeddings}};
  j["out_dir"] = out_dir;
  j["seed"] = seed;
  j["threads"] = threads;
  return j.dump(2);
}

void RunConfig::merge_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.contains("dataset")) {
    const auto& d = j["dataset"];
    if (d.contains("kind")) dataset_kind = d["kind"].get<std::string>();
    if (d.contains("dir")) tudataset_dir = d["dir"].get<std::string>();
    if (d.contains("name")) tudataset_name = d["name"].get<std::string>();
    if (d.contains("count")) gen_count = d["count"].get<int>();
    if (d.contains("base_nodes")) gen_base_nodes = d["base_nodes"].get<int>();
    if (d.contains("split")) {
      const auto& s = d["split"];
      if (s.contains("train")) split_train = s["train"].get<double>();
      if (s.contains("validation")) split_validation = s["validation"].get<double>();
      if (s.contains("test")) split_test = s["test"].get<double>();
    }
  }
  if (j.contains("extract")) {
    const auto& e = j["extract"];
    if (e.contains("walk_length")) walk_length = e["walk_length"].get<int>();
    if (e.contains("p")) walk_p = e["p"].get<double>();
    if (e.contains("q")) walk_q = e["q"].get<double>();
    if (e.contains("top_k")) top_k = e["top_k"].get<int>();
  }
  if (j.contains("train")) {
    const auto& t = j["train"];
    if (t.contains("lambda")) lambda = t["lambda"].get<double>();
    if (t.contains("learning_rate")) learning_rate = t["learning_rate"].get<double>();
    if (t.contains("epochs")) epochs = t["epochs"].get<int>();
    if (t.contains("batch_size")) batch_size = t["batch_size"].get<int>();
    if (t.contains("hidden_dims")) hidden_dims = t["hidden_dims"].get<std::vector<int>>();
    if (t.contains("kernel")) kernel_kind = t["kernel"].get<std::string>();
    if (t.contains("theta")) theta = t["theta"].get<double>();
    if (t.contains("poly_c")) poly_c = t["poly_c"].get<double>();
    if (t.contains("poly_degree")) poly_degree = t["poly_degree"].get<int>();
    if (t.contains("fc_layers")) fc_layers = t["fc_layers"].get<int>();
    if (t.contains("activation")) activation = t["activation"].get<std::string>();
    if (t.contains("dropout")) dropout = t["dropout"].get<double>();
  }
  if (j.contains("eval")) {
    const auto& e = j["eval"];
    if (e.contains("sparsity_levels"))
      sparsity_levels = e["sparsity_levels"].get<std::vector<double>>();
    if (e.contains("top_n")) top_n = e["top_n"].get<int>();
    if (e.contains("sort_heatmap")) sort_heatmap = e["sort_heatmap"].get<bool>();
    if (e.contains("export_embeddings")) export_embeddings = e["export_embeddings"].get<bool>();
  }
  if (j.contains("out_dir")) out_dir = j["out_dir"].get<std::string>();
  if (j.contains("seed")) seed = j["seed"].get<std::uint64_t>();
  if (j.contains("threads")) threads = j["threads"].get<int>();
}

Paths::Paths(const RunConfig& config) {
  const std::string& dir = config.out_dir;
  dataset = dir + "/dataset.json";
  subgraphs = dir + "/subgraphs.json";
  model = dir + "/model.json";
  history = dir + "/history.csv";
  explanations = dir + "/explanations.csv";
  heatmap = dir + "/heatmap.csv";
  fidelity = dir + "/fidelity.csv";
  embeddings = dir + "/embeddings.csv";
  run_json = dir + "/run.json";
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const RunConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(config.to_json())));
  return buf;
}

std::string file_hash(const std::string& path) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(read_file(path))));
  return buf;
}

void cmd_gen_data(const RunConfig& config) {
  Paths paths(config);
  std::filesystem::create_directories(config.out_dir);
  Dataset ds = build_dataset(config);
  std::string json = dataset_to_json(ds);
  inject_provenance(json, config, {});
  write_file(paths.dataset, json);
  write_run_json(config, paths, "gen-data", {paths.dataset});
}

void cmd_extract(const RunConfig& config) {
  Paths paths(config);
  std::filesystem::create_directories(config.out_dir);
  Dataset ds = load_dataset(config.dataset_path);
  SubgraphSet set = extract_subgraphs(ds, config.walk);
  std::string json = subgraphs_to_json(set, config.walk);
  inject_provenance(json, config, {{"dataset", file_hash(config.dataset_path)}});
  write_file(paths.subgraphs, json);
  write_run_json(config, paths, "extract", {paths.subgraphs});
}

void cmd_train(const RunConfig& config) {
  Paths paths(config);
  std::filesystem::create_directories(config.out_dir);
  check_provenance(config.subgraphs_path, "dataset", config.dataset_path);
  Dataset ds = load_dataset(config.dataset_path);
  SubgraphSet set = load_subgraphs(ds, config.subgraphs_path);
  TrainedModel model = train(ds, set, config.train);
  model.subgraphs_file = config.subgraphs_path;
  std::string json = model_to_json(model);
  inject_provenance(json, config,
                    {{"dataset", file_hash(config.dataset_path)},
                     {"subgraphs", file_hash(config.subgraphs_path)}});
  write_file(paths.model, json);
  write_history_csv(model, paths.history);
  write_run_json(config, paths, "train", {paths.model, paths.history});
}

void cmd_explain(const RunConfig& config) {
  Paths paths(config);
  std::filesystem::create_directories(config.out_dir);
  check_provenance(config.subgraphs_path, "dataset", config.dataset_path);
  check_provenance(config.model_path, "dataset", config.dataset_path);
  check_provenance(config.model_path, "subgraphs", config.subgraphs_path);
  Dataset ds = load_dataset(config.dataset_path);
  SubgraphSet set = load_subgraphs(ds, config.subgraphs_path);
  TrainedModel model = load_model(config.model_path);
  write_explanations_csv(model, set, config.top_n, paths.explanations);
  write_heatmap_csv(model, config.sort_heatmap, paths.heatmap);
  std::vector<std::string> artifacts{paths.explanations, paths.heatmap};
  if (config.export_embeddings) {
    EmbeddingMatrix em = embed_all(ds.graphs, set, model.gin_params());
    write_embeddings_csv(em, paths.embeddings);
    artifacts.push_back(paths.embeddings);
  }
  write_run_json(config, paths, "explain", artifacts);
}

void cmd_eval(const RunConfig& config) {
  Paths paths(config);
  std::filesystem::create_directories(config.out_dir);
  check_provenance(config.subgraphs_path, "dataset", config.dataset_path);
  check_provenance(config.model_path, "dataset", config.dataset_path);
  check_provenance(config.model_path, "subgraphs", config.subgraphs_path);
  Dataset ds = load_dataset(config.dataset_path);
  SubgraphSet set = load_subgraphs(ds, config.subgraphs_path);
  TrainedModel model = load_model(config.model_path);
  auto results = evaluate_sweep(model, ds, ds.splits.test, set, config.sparsity_levels);
  write_fidelity_csv(results, paths.fidelity);
  write_run_json(config, paths, "eval", {paths.fidelity});
}

void cmd_pipeline(const RunConfig& config) {
  Paths paths(config);
  struct Stage {
    const char* name;
    void (*fn)(const RunConfig&);
  };
  const Stage stages[] = {{"gen-data", cmd_gen_data},
                          {"extract", cmd_extract},
                          {"train", cmd_train},
                          {"explain", cmd_explain},
                          {"eval", cmd_eval}};
  for (const Stage& stage : stages) {
    try {
      stage.fn(config);
    } catch (const std::exception& e) {
      throw std::runtime_error("pipeline stage '" + std::string(stage.name) +
                               "' failed: " + e.what());
    }
  }
  write_run_json(config, paths, "pipeline",
                 {paths.dataset, paths.subgraphs, paths.model, paths.history, paths.explanations,
                  paths.heatmap, paths.fidelity});
}

}  // namespace oracle::run
