#pragma once

#include <map>
#include <string>

#include "oracle/tensor.hpp"

namespace oracle {

struct AdamConfig {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Named parameter tensors with per-parameter Adam state.
class ParameterStore {
 public:
  struct Entry {
    Tensor value;
    Tensor m;  // first moment
    Tensor v;  // second moment
    long step = 0;
  };

  void add(const std::string& name, Tensor value);
  bool contains(const std::string& name) const { return entries_.count(name) != 0; }
  Tensor& get(const std::string& name);
  const Tensor& get(const std::string& name) const;

  const std::map<std::string, Entry>& entries() const { return entries_; }
  std::map<std::string, Entry>& entries() { return entries_; }

  bool all_finite() const;

 private:
  std::map<std::string, Entry> entries_;
};

// Standard bias-corrected Adam update applied to every named gradient.
// Gradients must shape-match their parameters.
void adam_step(ParameterStore& store, const std::map<std::string, Tensor>& gradients,
               const AdamConfig& config);

// JSON round trip; doubles survive bit-exactly (shortest round-trip encoding).
std::string parameters_to_json(const ParameterStore& store);
ParameterStore parameters_from_json(const std::string& text);

}  // namespace oracle
