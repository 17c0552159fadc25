#include "oracle/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "oracle/data_io.hpp"

namespace oracle {

namespace {

int critical_count(SparsityLevel sparsity, int num_total) {
  return static_cast<int>(std::llround((1.0 - sparsity.value) * num_total));
}

Tensor mask_columns(const Tensor& dep, const std::vector<int>& critical, MaskMode mode,
                    int num_total) {
  std::vector<char> is_critical(num_total, 0);
  for (int c : critical) {
    if (c < 0 || c >= num_total)
      throw std::invalid_argument("mask: subgraph index out of range");
    is_critical[c] = 1;
  }
  Tensor out = dep;
  for (int r = 0; r < out.rows; ++r) {
    double* row = out.row(r);
    for (int c = 0; c < out.cols; ++c) {
      const bool zero = mode == MaskMode::Remove ? is_critical[c] : !is_critical[c];
      if (zero) row[c] = 0.0;
    }
  }
  return out;
}

// softmax probability of the true class for every row
std::vector<double> true_class_probs(const TrainedModel& model, const Tensor& dep,
                                     const std::vector<int>& labels) {
  const Tensor logits = fc_eval(model, dep);
  ad::Tape tape;
  const Tensor probs = tape.value(tape.row_softmax(tape.leaf(logits, false)));
  std::vector<double> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = probs.at(static_cast<int>(i), labels[i]);
  return out;
}

double masked_mean_drop(const TrainedModel& model, const Dataset& dataset,
                        const std::vector<int>& test_indices, const SubgraphSet& subgraphs,
                        SparsityLevel sparsity, MaskMode mode) {
  if (sparsity.value < 0.0 || sparsity.value > 1.0)
    throw std::invalid_argument("fidelity: sparsity must be in [0, 1]");
  if (test_indices.empty()) throw std::invalid_argument("fidelity: empty test set");
  for (int idx : test_indices)
    if (!dataset.graphs[idx].label) throw std::invalid_argument("fidelity: unlabeled test graph");

  const Tensor z_sg = subgraph_embedding_matrix(model, subgraphs);
  std::vector<const Graph*> graphs;
  std::vector<int> labels;
  graphs.reserve(test_indices.size());
  for (int idx : test_indices) {
    graphs.push_back(&dataset.graphs[idx]);
    labels.push_back(*dataset.graphs[idx].label);
  }
  const Tensor dep = model_dependency_matrix(model, graphs, z_sg);
  const auto critical = select_critical(model.class_dependency_matrix(), sparsity);
  const Tensor masked = mask_columns(dep, critical, mode, subgraphs.size());

  const auto base = true_class_probs(model, dep, labels);
  const auto changed = true_class_probs(model, masked, labels);
  double sum = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) sum += base[i] - changed[i];
  return sum / base.size();
}

}  // namespace

SparsityLevel sparsity_of(int num_critical, int num_total) {
  if (num_total < 1) throw std::invalid_argument("sparsity_of: num_total must be >= 1");
  if (num_critical < 0 || num_critical > num_total)
    throw std::invalid_argument("sparsity_of: num_critical out of bounds");
  return SparsityLevel{1.0 - static_cast<double>(num_critical) / num_total};
}

std::vector<int> select_critical(const Tensor& class_dependency, SparsityLevel sparsity) {
  if (sparsity.value < 0.0 || sparsity.value > 1.0)
    throw std::invalid_argument("select_critical: sparsity must be in [0, 1]");
  const int num_total = class_dependency.cols;
  const int take = critical_count(sparsity, num_total);

  // variation score: max - min of the raw column across classes
  std::vector<double> score(num_total);
  for (int c = 0; c < num_total; ++c) {
    double lo = class_dependency.at(0, c);
    double hi = lo;
    for (int r = 1; r < class_dependency.rows; ++r) {
      lo = std::min(lo, class_dependency.at(r, c));
      hi = std::max(hi, class_dependency.at(r, c));
    }
    score[c] = hi - lo;
  }
  std::vector<int> order(num_total);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return a < b;
  });
  order.resize(take);
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<double> mask_embedding(const std::vector<double>& dep, const std::vector<int>& critical,
                                   MaskMode mode) {
  std::vector<char> is_critical(dep.size(), 0);
  for (int c : critical) {
    if (c < 0 || c >= static_cast<int>(dep.size()))
      throw std::invalid_argument("mask_embedding: index out of range");
    is_critical[c] = 1;
  }
  std::vector<double> out = dep;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const bool zero = mode == MaskMode::Remove ? is_critical[i] : !is_critical[i];
    if (zero) out[i] = 0.0;
  }
  return out;
}

double fidelity_plus(const TrainedModel& model, const Dataset& dataset,
                     const std::vector<int>& test_indices, const SubgraphSet& subgraphs,
                     SparsityLevel sparsity) {
  return masked_mean_drop(model, dataset, test_indices, subgraphs, sparsity, MaskMode::Remove);
}

double fidelity_minus(const TrainedModel& model, const Dataset& dataset,
                      const std::vector<int>& test_indices, const SubgraphSet& subgraphs,
                      SparsityLevel sparsity) {
  return masked_mean_drop(model, dataset, test_indices, subgraphs, sparsity, MaskMode::Retain);
}

double fidelity_delta(double plus, double minus) { return plus - minus; }

std::vector<double> default_sparsity_levels() { return {0.50, 0.55, 0.60, 0.65, 0.70, 0.75}; }

std::vector<FidelityResult> evaluate_sweep(const TrainedModel& model, const Dataset& dataset,
                                           const std::vector<int>& test_indices,
                                           const SubgraphSet& subgraphs,
                                           const std::vector<double>& levels) {
  std::vector<FidelityResult> results;
  results.reserve(levels.size());
  for (double level : levels) {
    FidelityResult r;
    r.sparsity = SparsityLevel{level};
    r.fidelity_plus = fidelity_plus(model, dataset, test_indices, subgraphs, r.sparsity);
    r.fidelity_minus = fidelity_minus(model, dataset, test_indices, subgraphs, r.sparsity);
    r.fidelity_delta = fidelity_delta(r.fidelity_plus, r.fidelity_minus);
    r.num_critical = critical_count(r.sparsity, subgraphs.size());
    results.push_back(r);
  }
  return results;
}

void write_fidelity_csv(const std::vector<FidelityResult>& results, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "sparsity,fidelity_plus,fidelity_minus,fidelity_delta,num_critical\n";
  out.precision(17);
  for (const FidelityResult& r : results) {
    out << r.sparsity.value << "," << r.fidelity_plus << "," << r.fidelity_minus << ","
        << r.fidelity_delta << "," << r.num_critical << "\n";
  }
}

}  // namespace oracle
