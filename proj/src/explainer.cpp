#include "oracle/explainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "oracle/data_io.hpp"

namespace oracle {

namespace {

struct FcLayerRef {
  ad::ValueId w, b;
};

ad::ValueId apply_activation(ad::Tape& tape, ad::ValueId x, Activation act) {
  switch (act) {
    case Activation::ReLU:
      return tape.relu(x);
    case Activation::LeakyReLU:
      return tape.leaky_relu(x);
    case Activation::Sigmoid:
      return tape.sigmoid(x);
  }
  return x;
}

// hidden layers: activation then dropout; final layer affine only
ad::ValueId fc_forward_op(ad::Tape& tape, ad::ValueId x, const std::vector<FcLayerRef>& layers,
                          Activation act, double dropout, bool training, Rng* rng) {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    x = tape.add_row_broadcast(tape.matmul(x, layers[l].w, false, true), layers[l].b);
    if (l + 1 < layers.size()) {
      x = apply_activation(tape, x, act);
      if (dropout > 0.0 && training) {
        if (!rng) throw std::invalid_argument("fc_forward: training dropout needs an rng");
        x = tape.dropout(x, dropout, *rng, true);
      }
    }
  }
  return x;
}

std::vector<FcLayerRef> fc_leaves(ad::Tape& tape, const std::vector<FcLayer>& layers,
                                  bool requires_grad) {
  std::vector<FcLayerRef> refs;
  refs.reserve(layers.size());
  for (const FcLayer& layer : layers)
    refs.push_back({tape.leaf(layer.w, requires_grad), tape.leaf(layer.b, requires_grad)});
  return refs;
}

Tensor glorot(int rows, int cols, Rng& rng) {
  const double a = std::sqrt(6.0 / (rows + cols));
  Tensor t(rows, cols);
  for (double& v : t.values) v = rng.next_double(-a, a);
  return t;
}

std::vector<const Graph*> subgraph_structures(const SubgraphSet& subgraphs) {
  std::vector<const Graph*> ptrs;
  ptrs.reserve(subgraphs.subgraphs.size());
  for (const Subgraph& sg : subgraphs.subgraphs) ptrs.push_back(&sg.structure);
  return ptrs;
}

int argmax_row(const Tensor& t, int row) {
  int best = 0;
  for (int c = 1; c < t.cols; ++c)
    if (t.at(row, c) > t.at(row, best)) best = c;
  return best;
}

nlohmann::json kernel_to_json(const KernelConfig& k) {
  const char* kind = k.kind == KernelKind::RBF            ? "rbf"
                     : k.kind == KernelKind::InnerProduct ? "inner"
                                                          : "poly";
  return {{"kind", kind}, {"theta", k.theta}, {"poly_c", k.poly_c}, {"poly_degree", k.poly_degree}};
}

KernelConfig kernel_from_json(const nlohmann::json& j) {
  KernelConfig k;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "rbf")
    k.kind = KernelKind::RBF;
  else if (kind == "inner")
    k.kind = KernelKind::InnerProduct;
  else if (kind == "poly")
    k.kind = KernelKind::Polynomial;
  else
    throw FormatError("unknown kernel kind '" + kind + "'");
  k.theta = j.at("theta").get<double>();
  k.poly_c = j.at("poly_c").get<double>();
  k.poly_degree = j.at("poly_degree").get<int>();
  return k;
}

}  // namespace

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::ReLU:
      return "relu";
    case Activation::LeakyReLU:
      return "leakyrelu";
    case Activation::Sigmoid:
      return "sigmoid";
  }
  return "relu";
}

Activation activation_from_name(const std::string& name) {
  if (name == "relu") return Activation::ReLU;
  if (name == "leakyrelu") return Activation::LeakyReLU;
  if (name == "sigmoid") return Activation::Sigmoid;
  throw std::invalid_argument("unknown activation '" + name + "'");
}

void FcConfig::validate() const {
  if (num_layers < 1) throw std::invalid_argument("FcConfig: need at least one layer");
  if (dropout < 0.0 || dropout >= 1.0)
    throw std::invalid_argument("FcConfig: dropout must be in [0, 1)");
}

void TrainConfig::validate() const {
  if (lambda < 0.0 || lambda > 1.0)
    throw std::invalid_argument("TrainConfig: lambda must be in [0, 1]");
  if (learning_rate <= 0.0) throw std::invalid_argument("TrainConfig: learning rate must be > 0");
  if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
  kernel.validate();
  gin.validate();
  fc.validate();
}

GinParams TrainedModel::gin_params() const {
  return gin_params_from_store(gin_config, feature_dim, params);
}

std::vector<FcLayer> TrainedModel::fc_layers() const {
  std::vector<FcLayer> layers;
  for (int l = 0; l < fc_config.num_layers; ++l) {
    const std::string prefix = "fc.l" + std::to_string(l) + ".";
    layers.push_back({params.get(prefix + "w"), params.get(prefix + "b")});
  }
  return layers;
}

const Tensor& TrainedModel::class_dependency_matrix() const {
  return params.get("fc.l" + std::to_string(fc_config.num_layers - 1) + ".w");
}

std::vector<double> dependency_embedding(const std::vector<double>& z_g, const Tensor& all_z_sg,
                                         const KernelConfig& config) {
  if (all_z_sg.rows == 0) throw std::invalid_argument("dependency_embedding: empty subgraph set");
  std::vector<double> out(all_z_sg.rows);
  std::vector<double> row(all_z_sg.cols);
  for (int j = 0; j < all_z_sg.rows; ++j) {
    std::copy(all_z_sg.row(j), all_z_sg.row(j) + all_z_sg.cols, row.begin());
    out[j] = kernel_dependency(z_g, row, config);
  }
  return out;
}

double classification_loss(const Tensor& logits, const std::vector<int>& labels) {
  ad::Tape tape;
  ad::ValueId x = tape.leaf(logits, false);
  return tape.scalar(tape.cross_entropy(x, labels));
}

double entropy_regularizer(const Tensor& subgraph_logits, int num_classes) {
  ad::Tape tape;
  ad::ValueId x = tape.leaf(subgraph_logits, false);
  return tape.scalar(tape.softmax_entropy(x, num_classes));
}

double total_objective(double loss_clas, double loss_reg, double lambda) {
  if (lambda < 0.0 || lambda > 1.0)
    throw std::invalid_argument("total_objective: lambda must be in [0, 1]");
  return lambda * loss_clas + (1.0 - lambda) * loss_reg;
}

Tensor fc_forward(const Tensor& dep_rows, const std::vector<FcLayer>& layers,
                  Activation activation, double dropout, bool training, Rng* rng) {
  if (layers.empty()) throw std::invalid_argument("fc_forward: no layers");
  if (dep_rows.cols != layers.front().w.cols)
    throw std::invalid_argument("fc_forward: input width " + std::to_string(dep_rows.cols) +
                                " does not match layer input " +
                                std::to_string(layers.front().w.cols));
  ad::Tape tape;
  ad::ValueId x = tape.leaf(dep_rows, false);
  auto refs = fc_leaves(tape, layers, false);
  return tape.value(fc_forward_op(tape, x, refs, activation, dropout, training, rng));
}

TrainedModel train(const Dataset& dataset, const SubgraphSet& subgraphs,
                   const TrainConfig& config) {
  config.validate();
  if (subgraphs.subgraphs.empty()) throw std::invalid_argument("train: empty subgraph set");
  if (dataset.splits.train.empty()) throw std::invalid_argument("train: dataset has no train split");
  for (int idx : dataset.splits.train)
    if (!dataset.graphs[idx].label) throw std::invalid_argument("train: unlabeled training graph");

  const int num_subgraphs = subgraphs.size();
  const int num_classes = dataset.num_classes;

  // parameter init: GIN stack plus m FC layers, hidden widths all |SG|
  Rng init_rng(mix64(config.seed, 0x1717u));
  TrainedModel model;
  model.gin_config = config.gin;
  model.fc_config = config.fc;
  model.kernel = config.kernel;
  model.feature_dim = dataset.feature_dim;
  model.num_classes = num_classes;
  model.num_subgraphs = num_subgraphs;

  ParameterStore store;
  gin_params_to_store(init_gin_params(config.gin, dataset.feature_dim, init_rng), store);
  for (int l = 0; l < config.fc.num_layers; ++l) {
    const bool last = l + 1 == config.fc.num_layers;
    const int out_dim = last ? num_classes : num_subgraphs;
    const std::string prefix = "fc.l" + std::to_string(l) + ".";
    Tensor w = glorot(out_dim, num_subgraphs, init_rng);
    if (!last) {
      // Hidden layers start identity-dominant: the width-|SG| stack exists so
      // final-layer columns keep indexing subgraphs one-to-one, which only
      // holds if the hidden map preserves that correspondence.
      for (std::size_t i = 0; i < w.values.size(); ++i) w.values[i] *= 0.1;
      for (int d = 0; d < out_dim; ++d) w.at(d, d) += 1.0;
    }
    store.add(prefix + "w", w);
    store.add(prefix + "b", Tensor(1, out_dim));
  }

  // The kernel bandwidth is fixed, so the embedding scale decides whether the
  // dependency features sit in the kernel's responsive range: RBF distances
  // far above theta give psi ~ 0 with vanishing gradients, and oversized dot
  // products saturate the softmax the same way. A frozen output_scale on the
  // pooled embedding holds the mean graph-subgraph squared distance at
  // theta^2 (RBF) or the mean squared dot product at 1; it is re-anchored
  // every epoch because the optimizer freely drifts the weight magnitudes.
  std::vector<Graph> scale_sample;
  const int sample = std::min<int>(64, static_cast<int>(dataset.splits.train.size()));
  for (int i = 0; i < sample; ++i)
    scale_sample.push_back(dataset.graphs[dataset.splits.train[i]]);
  const auto recalibrate_scale = [&]() {
    EmbeddingMatrix em = embed_all(scale_sample, subgraphs,
                                   gin_params_from_store(config.gin, dataset.feature_dim, store));
    double mean_sq_dist = 0.0, mean_sq_dot = 0.0;
    long pairs = 0;
    for (int i = 0; i < em.graph_embeddings.rows; ++i) {
      for (int j = 0; j < em.subgraph_embeddings.rows; ++j) {
        double sq = 0.0, dot = 0.0;
        for (int c = 0; c < em.graph_embeddings.cols; ++c) {
          const double a = em.graph_embeddings.at(i, c);
          const double b = em.subgraph_embeddings.at(j, c);
          sq += (a - b) * (a - b);
          dot += a * b;
        }
        mean_sq_dist += sq;
        mean_sq_dot += dot * dot;
        ++pairs;
      }
    }
    double factor = 1.0;
    if (pairs > 0) {
      mean_sq_dist /= pairs;
      mean_sq_dot /= pairs;
      if (config.kernel.kind == KernelKind::RBF && mean_sq_dist > 0.0)
        factor = std::sqrt(4.0 * config.kernel.theta * config.kernel.theta / mean_sq_dist);
      else if (config.kernel.kind != KernelKind::RBF && mean_sq_dot > 0.0)
        factor = std::pow(1.0 / mean_sq_dot, 0.25);
    }
    double& s = store.get("gin.scale").values[0];
    s = std::clamp(s * factor, 1e-6, 1e6);
  };
  recalibrate_scale();

  const auto sg_ptrs = subgraph_structures(subgraphs);
  Rng train_rng(mix64(config.seed, 0x7e57u));
  std::vector<int> order = dataset.splits.train;

  ParameterStore best = store;
  double best_val = -1.0;
  AdamConfig adam{config.learning_rate};

  // The scale anchor runs through the first quarter of training while the
  // representation settles, then freezes so the classifier can sharpen
  // confidence without the features shifting under it.
  const int anchor_epochs = std::max(1, config.epochs / 4);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    if (epoch > 1 && epoch <= anchor_epochs) recalibrate_scale();
    train_rng.shuffle(order);
    double epoch_loss = 0.0, epoch_clas = 0.0, epoch_reg = 0.0;
    int steps = 0;

    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      std::vector<const Graph*> batch;
      std::vector<int> labels;
      batch.reserve(end - start);
      for (std::size_t t = start; t < end; ++t) {
        batch.push_back(&dataset.graphs[order[t]]);
        labels.push_back(*dataset.graphs[order[t]].label);
      }

      ad::Tape tape;
      const GinParams gin_now = gin_params_from_store(config.gin, dataset.feature_dim, store);
      auto gin_refs = gin_leaves(tape, gin_now, true);
      auto fc_refs = fc_leaves(tape, [&] {
        std::vector<FcLayer> layers;
        for (int l = 0; l < config.fc.num_layers; ++l) {
          const std::string prefix = "fc.l" + std::to_string(l) + ".";
          layers.push_back({store.get(prefix + "w"), store.get(prefix + "b")});
        }
        return layers;
      }(), true);

      ad::ValueId z_sg =
          embed_graph_rows(tape, sg_ptrs, gin_refs, dataset.feature_dim, gin_now.output_scale);
      ad::ValueId z_batch =
          embed_graph_rows(tape, batch, gin_refs, dataset.feature_dim, gin_now.output_scale);
      ad::ValueId dep_batch = tape.kernel_matrix(z_batch, z_sg, config.kernel);
      ad::ValueId logits = fc_forward_op(tape, dep_batch, fc_refs, config.fc.activation,
                                         config.fc.dropout, true, &train_rng);
      ad::ValueId loss_clas = tape.cross_entropy(logits, labels);

      ad::ValueId total;
      double reg_value = 0.0;
      if (config.lambda < 1.0) {
        ad::ValueId dep_sg = tape.kernel_matrix(z_sg, z_sg, config.kernel);
        ad::ValueId sg_logits = fc_forward_op(tape, dep_sg, fc_refs, config.fc.activation,
                                              config.fc.dropout, true, &train_rng);
        ad::ValueId loss_reg = tape.softmax_entropy(sg_logits, num_classes);
        reg_value = tape.scalar(loss_reg);
        total = tape.affine_combine(loss_clas, loss_reg, config.lambda, 1.0 - config.lambda);
      } else {
        total = loss_clas;
      }

      const double loss_value = tape.scalar(total);
      if (!std::isfinite(loss_value))
        throw TrainingError("training diverged at epoch " + std::to_string(epoch) +
                            ": non-finite loss");

      tape.backward(total);

      std::map<std::string, Tensor> grads;
      int ref_idx = 0;
      for (const GinLayerRef& r : gin_refs) {
        const std::string prefix = "gin.l" + std::to_string(ref_idx++) + ".";
        grads.emplace(prefix + "w1", tape.grad(r.w1));
        grads.emplace(prefix + "b1", tape.grad(r.b1));
        grads.emplace(prefix + "w2", tape.grad(r.w2));
        grads.emplace(prefix + "b2", tape.grad(r.b2));
        grads.emplace(prefix + "eps", tape.grad(r.eps));
      }
      for (std::size_t l = 0; l < fc_refs.size(); ++l) {
        const std::string prefix = "fc.l" + std::to_string(l) + ".";
        grads.emplace(prefix + "w", tape.grad(fc_refs[l].w));
        grads.emplace(prefix + "b", tape.grad(fc_refs[l].b));
      }
      adam_step(store, grads, adam);
      if (!store.all_finite())
        throw TrainingError("training diverged at epoch " + std::to_string(epoch) +
                            ": non-finite parameters");

      epoch_loss += loss_value;
      epoch_clas += tape.scalar(loss_clas);
      epoch_reg += reg_value;
      ++steps;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.loss = epoch_loss / steps;
    stats.loss_clas = epoch_clas / steps;
    stats.loss_reg = epoch_reg / steps;

    if (!dataset.splits.validation.empty()) {
      TrainedModel probe = model;
      probe.params = store;
      stats.val_accuracy = accuracy(probe, dataset, dataset.splits.validation, subgraphs);
      if (stats.val_accuracy >= best_val) {
        best_val = stats.val_accuracy;
        best = store;
      }
    } else {
      stats.val_accuracy = std::numeric_limits<double>::quiet_NaN();
      best = store;
    }
    model.history.push_back(stats);
  }

  model.params = std::move(best);
  return model;
}

Tensor subgraph_embedding_matrix(const TrainedModel& model, const SubgraphSet& subgraphs) {
  EmbeddingMatrix em = embed_all({}, subgraphs, model.gin_params());
  return em.subgraph_embeddings;
}

Tensor model_dependency_matrix(const TrainedModel& model, const std::vector<const Graph*>& graphs,
                               const Tensor& subgraph_embeddings) {
  ad::Tape tape;
  const GinParams params = model.gin_params();
  auto refs = gin_leaves(tape, params, false);
  ad::ValueId z = embed_graph_rows(tape, graphs, refs, model.feature_dim, params.output_scale);
  return kernels::kernel_matrix(tape.value(z), subgraph_embeddings, model.kernel);
}

Tensor fc_eval(const TrainedModel& model, const Tensor& dep_rows) {
  return fc_forward(dep_rows, model.fc_layers(), model.fc_config.activation,
                    model.fc_config.dropout, false, nullptr);
}

double accuracy(const TrainedModel& model, const Dataset& dataset,
                const std::vector<int>& indices, const SubgraphSet& subgraphs) {
  if (indices.empty()) throw std::invalid_argument("accuracy: empty index set");
  const Tensor z_sg = subgraph_embedding_matrix(model, subgraphs);
  std::vector<const Graph*> graphs;
  graphs.reserve(indices.size());
  for (int idx : indices) graphs.push_back(&dataset.graphs[idx]);
  const Tensor dep = model_dependency_matrix(model, graphs, z_sg);
  const Tensor logits = fc_eval(model, dep);
  int correct = 0;
  for (std::size_t i = 0; i < indices.size(); ++i)
    if (argmax_row(logits, static_cast<int>(i)) == *dataset.graphs[indices[i]].label) ++correct;
  return static_cast<double>(correct) / indices.size();
}

double mean_subgraph_entropy(const TrainedModel& model, const SubgraphSet& subgraphs) {
  const Tensor z_sg = subgraph_embedding_matrix(model, subgraphs);
  const Tensor dep = kernels::kernel_matrix(z_sg, z_sg, model.kernel);
  const Tensor logits = fc_eval(model, dep);
  // entropy_regularizer is sum over subgraphs / |C|; convert to a mean per subgraph
  return entropy_regularizer(logits, model.num_classes) * model.num_classes / logits.rows;
}

std::vector<std::vector<RankedSubgraph>> class_explanations(const TrainedModel& model, int top_n) {
  if (top_n < 0) throw std::invalid_argument("class_explanations: top_n must be >= 0");
  const Tensor& w = model.class_dependency_matrix();
  int n = top_n;
  if (n > w.cols) {
    std::fprintf(stderr, "warning: top_n %d exceeds %d subgraphs, clipping\n", n, w.cols);
    n = w.cols;
  }
  std::vector<std::vector<RankedSubgraph>> out(w.rows);
  for (int cls = 0; cls < w.rows; ++cls) {
    std::vector<int> order(w.cols);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      if (w.at(cls, a) != w.at(cls, b)) return w.at(cls, a) > w.at(cls, b);
      return a < b;
    });
    for (int r = 0; r < n; ++r) out[cls].push_back({order[r], w.at(cls, order[r])});
  }
  return out;
}

std::pair<Tensor, std::vector<int>> heatmap_export(const TrainedModel& model,
                                                   bool sort_by_class0) {
  const Tensor& w = model.class_dependency_matrix();
  ad::Tape tape;
  Tensor normalized = tape.value(tape.row_softmax(tape.leaf(w, false)));

  std::vector<int> cols(w.cols);
  std::iota(cols.begin(), cols.end(), 0);
  if (sort_by_class0 && w.rows > 0) {
    std::stable_sort(cols.begin(), cols.end(), [&](int a, int b) {
      if (normalized.at(0, a) != normalized.at(0, b)) return normalized.at(0, a) > normalized.at(0, b);
      return a < b;
    });
    Tensor sorted(normalized.rows, normalized.cols);
    for (int r = 0; r < normalized.rows; ++r)
      for (int c = 0; c < normalized.cols; ++c) sorted.at(r, c) = normalized.at(r, cols[c]);
    normalized = std::move(sorted);
  }
  return {std::move(normalized), std::move(cols)};
}

void write_explanations_csv(const TrainedModel& model, const SubgraphSet& subgraphs, int top_n,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "class,rank,subgraph_id,weight,source_graph,nodes\n";
  out.precision(17);
  const auto ranked = class_explanations(model, top_n);
  for (std::size_t cls = 0; cls < ranked.size(); ++cls) {
    for (std::size_t r = 0; r < ranked[cls].size(); ++r) {
      const RankedSubgraph& e = ranked[cls][r];
      const Subgraph& sg = subgraphs.subgraphs[e.subgraph_id];
      out << cls << "," << (r + 1) << "," << e.subgraph_id << "," << e.weight << ","
          << sg.source_graph << ",\"";
      for (std::size_t i = 0; i < sg.node_set.nodes.size(); ++i) {
        if (i) out << " ";
        out << sg.node_set.nodes[i];
      }
      out << "\"\n";
    }
  }
}

void write_heatmap_csv(const TrainedModel& model, bool sort_by_class0, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  auto [matrix, cols] = heatmap_export(model, sort_by_class0);
  out << "class";
  for (int c : cols) out << ",sg_" << c;
  out << "\n";
  out.precision(17);
  for (int r = 0; r < matrix.rows; ++r) {
    out << r;
    for (int c = 0; c < matrix.cols; ++c) out << "," << matrix.at(r, c);
    out << "\n";
  }
}

void write_history_csv(const TrainedModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "epoch,loss,loss_clas,loss_reg,val_accuracy\n";
  out.precision(17);
  for (const EpochStats& s : model.history) {
    out << s.epoch << "," << s.loss << "," << s.loss_clas << "," << s.loss_reg << ",";
    if (std::isfinite(s.val_accuracy)) out << s.val_accuracy;
    out << "\n";
  }
}

std::string model_to_json(const TrainedModel& model) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["gin_config"] = {{"num_layers", model.gin_config.num_layers},
                     {"hidden_dims", model.gin_config.hidden_dims},
                     {"epsilon_init", model.gin_config.epsilon_init}};
  j["fc_config"] = {{"num_layers", model.fc_config.num_layers},
                    {"activation", activation_name(model.fc_config.activation)},
                    {"dropout", model.fc_config.dropout}};
  j["kernel"] = kernel_to_json(model.kernel);
  j["feature_dim"] = model.feature_dim;
  j["num_classes"] = model.num_classes;
  j["num_subgraphs"] = model.num_subgraphs;
  j["subgraphs_file"] = model.subgraphs_file;
  nlohmann::json hist = nlohmann::json::array();
  for (const EpochStats& s : model.history) {
    nlohmann::json e = {{"epoch", s.epoch},
                        {"loss", s.loss},
                        {"loss_clas", s.loss_clas},
                        {"loss_reg", s.loss_reg}};
    if (std::isfinite(s.val_accuracy))
      e["val_accuracy"] = s.val_accuracy;
    else
      e["val_accuracy"] = nullptr;
    hist.push_back(std::move(e));
  }
  j["history"] = std::move(hist);
  j["params"] = nlohmann::json::parse(parameters_to_json(model.params)).at("params");
  return j.dump(2);
}

TrainedModel model_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  TrainedModel model;
  model.gin_config.num_layers = j.at("gin_config").at("num_layers").get<int>();
  model.gin_config.hidden_dims = j.at("gin_config").at("hidden_dims").get<std::vector<int>>();
  model.gin_config.epsilon_init = j.at("gin_config").at("epsilon_init").get<double>();
  model.fc_config.num_layers = j.at("fc_config").at("num_layers").get<int>();
  model.fc_config.activation =
      activation_from_name(j.at("fc_config").at("activation").get<std::string>());
  model.fc_config.dropout = j.at("fc_config").at("dropout").get<double>();
  model.kernel = kernel_from_json(j.at("kernel"));
  model.feature_dim = j.at("feature_dim").get<int>();
  model.num_classes = j.at("num_classes").get<int>();
  model.num_subgraphs = j.at("num_subgraphs").get<int>();
  model.subgraphs_file = j.at("subgraphs_file").get<std::string>();
  for (const auto& e : j.at("history")) {
    EpochStats s;
    s.epoch = e.at("epoch").get<int>();
    s.loss = e.at("loss").get<double>();
    s.loss_clas = e.at("loss_clas").get<double>();
    s.loss_reg = e.at("loss_reg").get<double>();
    s.val_accuracy = e.at("val_accuracy").is_null()
                         ? std::numeric_limits<double>::quiet_NaN()
                         : e.at("val_accuracy").get<double>();
    model.history.push_back(s);
  }
  nlohmann::json pj;
  pj["params"] = j.at("params");
  model.params = parameters_from_json(pj.dump());
  return model;
}

void save_model(const TrainedModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << model_to_json(model) << "\n";
}

TrainedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace oracle
