#pragma once

#include <string>
#include <vector>

#include "oracle/graph.hpp"
#include "oracle/kernels.hpp"
#include "oracle/rng.hpp"
#include "oracle/tensor.hpp"

namespace oracle::ad {

using ValueId = int;

// Reverse-mode tape over the primitive set the model needs. Ops execute
// eagerly when recorded; recompute_forward() replays the trace (dropout masks
// are drawn once at record time and reused), which is what the finite
// difference checks rely on.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  ValueId leaf(Tensor value, bool requires_grad = false);

  ValueId matmul(ValueId a, ValueId b, bool trans_a = false, bool trans_b = false);
  ValueId add_row_broadcast(ValueId a, ValueId bias);
  ValueId relu(ValueId a);
  ValueId leaky_relu(ValueId a, double slope = 0.01);
  ValueId sigmoid(ValueId a);
  ValueId row_softmax(ValueId a);
  ValueId neighbor_sum(ValueId h, const Graph& graph);  // graph must outlive the tape
  ValueId gin_combine(ValueId h, ValueId nsum, ValueId eps);  // (1+eps)*h + nsum
  ValueId sum_rows(ValueId a);
  ValueId concat_rows(const std::vector<ValueId>& parts);
  ValueId kernel_matrix(ValueId a, ValueId b, const KernelConfig& cfg);
  ValueId dropout(ValueId a, double rate, Rng& rng, bool training);
  ValueId cross_entropy(ValueId logits, std::vector<int> labels);
  ValueId softmax_entropy(ValueId logits, int num_classes);
  ValueId affine_combine(ValueId a, ValueId b, double ca, double cb);

  // Replays every recorded op in order, refreshing all non-leaf values.
  void recompute_forward();

  // Seeds d(seed)/d(seed) = 1 and accumulates gradients into every slot on a
  // requires_grad path. seed must be a 1x1 value. Throws std::logic_error if
  // called on a tape with no recorded operations.
  void backward(ValueId seed);

  const Tensor& value(ValueId id) const { return slots_[check(id)].value; }
  double scalar(ValueId id) const;
  const Tensor& grad(ValueId id) const;
  bool requires_grad(ValueId id) const { return slots_[check(id)].requires_grad; }

  // Direct leaf mutation for finite-difference probing.
  Tensor& leaf_value(ValueId id);

 private:
  enum class Op {
    Matmul,
    AddRowBroadcast,
    Relu,
    LeakyRelu,
    Sigmoid,
    RowSoftmax,
    NeighborSum,
    GinCombine,
    SumRows,
    ConcatRows,
    KernelMatrix,
    Dropout,
    CrossEntropy,
    SoftmaxEntropy,
    AffineCombine,
  };

  struct Node {
    Op op;
    std::vector<ValueId> inputs;
    ValueId out = -1;
    bool trans_a = false;
    bool trans_b = false;
    double c0 = 0.0;
    double c1 = 0.0;
    KernelConfig kernel;
    const Graph* graph = nullptr;
    std::vector<int> labels;
    Tensor saved;   // dropout mask; softmax probabilities for the loss ops
    Tensor saved2;  // polynomial kernel dot matrix
  };

  struct Slot {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    bool is_leaf = false;
  };

  ValueId check(ValueId id) const;
  ValueId push_slot(Tensor value, bool requires_grad, bool is_leaf);
  ValueId record(Node node);
  void execute(Node& node);
  void backprop(const Node& node);
  void accumulate(ValueId id, const Tensor& g);

  std::vector<Slot> slots_;
  std::vector<Node> nodes_;
};

}  // namespace oracle::ad
