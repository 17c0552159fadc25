#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "oracle/graph.hpp"
#include "oracle/rng.hpp"

namespace oracle {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class DatasetKind { BA2Motifs, BALRP };

struct GeneratorConfig {
  int count = 1000;
  int base_nodes = 20;
  std::uint64_t seed = 0;
  DatasetKind dataset_kind = DatasetKind::BA2Motifs;

  void validate() const;  // count even and positive, base_nodes >= 2
};

struct SplitRatios {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;

  void validate() const;  // each in (0,1), sum 1 within 1e-9
};

// Barabasi-Albert growth: 2-node seed with one edge, every new node attaches
// one edge to an existing node with probability proportional to degree.
Graph generate_ba(int n, Rng& rng);
Graph generate_ba(int n, std::uint64_t seed);

// 20-node BA base plus a 5-node motif joined by one random bridge edge.
// Class 0 carries a 5-cycle, class 1 a house (4-cycle with an apex adjacent
// to two cycle nodes). Node features are constant 0.1 ten-dim vectors.
Dataset generate_ba2motifs(const GeneratorConfig& config);

// Class 0 grows with attachment probability ~ degree, class 1 with ~ 1/degree.
// Constant scalar 1.0 features.
Dataset generate_balrp(const GeneratorConfig& config);

// TUDataset text format: {name}_A.txt ("i, j" 1-based), {name}_graph_indicator.txt,
// {name}_graph_labels.txt, optional {name}_node_labels.txt (one-hot encoded into
// features). Directed duplicates collapse; labels remap to 0..C-1 in sorted order.
Dataset parse_tudataset(const std::string& directory, const std::string& name);

// Inverse of parse_tudataset for round-trip tests; writes the four files.
void write_tudataset(const Dataset& dataset, const std::string& directory,
                     const std::string& name);

// Shuffles indices by seed, then assigns floor(ratio*N) per split with the
// remainder going to train.
Dataset split_dataset(Dataset dataset, const SplitRatios& ratios, std::uint64_t seed);

// Single-file JSON cache {schema_version, num_classes, feature_dim, graphs, splits}.
std::string dataset_to_json(const Dataset& dataset);
Dataset dataset_from_json(const std::string& text);
void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace oracle
