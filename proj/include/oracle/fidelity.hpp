#pragma once

#include <string>
#include <vector>

#include "oracle/explainer.hpp"
#include "oracle/graph.hpp"
#include "oracle/walks.hpp"

namespace oracle {

struct SparsityLevel {
  double value = 0.0;  // in [0, 1]
};

struct FidelityResult {
  SparsityLevel sparsity;
  double fidelity_plus = 0.0;
  double fidelity_minus = 0.0;
  double fidelity_delta = 0.0;  // always plus - minus of the stored components
  int num_critical = 0;
};

enum class MaskMode { Remove, Retain };

SparsityLevel sparsity_of(int num_critical, int num_total);

// Critical subgraphs by cross-class weight variation (max - min over classes
// of raw W^m columns); selects round((1 - sparsity) * |SG|) columns, ties by
// lower index.
std::vector<int> select_critical(const Tensor& class_dependency, SparsityLevel sparsity);

// Remove zeroes the critical entries; retain zeroes the complement.
std::vector<double> mask_embedding(const std::vector<double>& dep, const std::vector<int>& critical,
                                   MaskMode mode);

double fidelity_plus(const TrainedModel& model, const Dataset& dataset,
                     const std::vector<int>& test_indices, const SubgraphSet& subgraphs,
                     SparsityLevel sparsity);
double fidelity_minus(const TrainedModel& model, const Dataset& dataset,
                      const std::vector<int>& test_indices, const SubgraphSet& subgraphs,
                      SparsityLevel sparsity);
double fidelity_delta(double plus, double minus);

std::vector<double> default_sparsity_levels();  // {0.50, 0.55, 0.60, 0.65, 0.70, 0.75}

std::vector<FidelityResult> evaluate_sweep(const TrainedModel& model, const Dataset& dataset,
                                           const std::vector<int>& test_indices,
                                           const SubgraphSet& subgraphs,
                                           const std::vector<double>& levels);

void write_fidelity_csv(const std::vector<FidelityResult>& results, const std::string& path);

}  // namespace oracle
