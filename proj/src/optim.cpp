#include "oracle/optim.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace oracle {

void ParameterStore::add(const std::string& name, Tensor value) {
  if (contains(name)) throw std::invalid_argument("ParameterStore: duplicate parameter " + name);
  Entry e;
  e.m = Tensor(value.rows, value.cols);
  e.v = Tensor(value.rows, value.cols);
  e.value = std::move(value);
  entries_.emplace(name, std::move(e));
}

Tensor& ParameterStore::get(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw std::invalid_argument("ParameterStore: unknown parameter " + name);
  return it->second.value;
}

const Tensor& ParameterStore::get(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw std::invalid_argument("ParameterStore: unknown parameter " + name);
  return it->second.value;
}

bool ParameterStore::all_finite() const {
  for (const auto& [name, e] : entries_)
    if (!e.value.all_finite()) return false;
  return true;
}

void adam_step(ParameterStore& store, const std::map<std::string, Tensor>& gradients,
               const AdamConfig& config) {
  for (const auto& [name, grad] : gradients) {
    auto it = store.entries().find(name);
    if (it == store.entries().end())
      throw std::invalid_argument("adam_step: unknown parameter " + name);
    ParameterStore::Entry& e = it->second;
    if (!grad.same_shape(e.value))
      throw std::invalid_argument("adam_step: gradient shape mismatch for " + name);
    e.step += 1;
    const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(e.step));
    const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(e.step));
    for (std::size_t i = 0; i < grad.values.size(); ++i) {
      const double g = grad.values[i];
      e.m.values[i] = config.beta1 * e.m.values[i] + (1.0 - config.beta1) * g;
      e.v.values[i] = config.beta2 * e.v.values[i] + (1.0 - config.beta2) * g * g;
      const double m_hat = e.m.values[i] / bc1;
      const double v_hat = e.v.values[i] / bc2;
      e.value.values[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

std::string parameters_to_json(const ParameterStore& store) {
  nlohmann::json j;
  j["schema_version"] = 1;
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [name, e] : store.entries()) {
    params[name] = {{"rows", e.value.rows}, {"cols", e.value.cols}, {"values", e.value.values}};
  }
  j["params"] = std::move(params);
  return j.dump(2);
}

ParameterStore parameters_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ParameterStore store;
  for (const auto& [name, pj] : j.at("params").items()) {
    Tensor t(pj.at("rows").get<int>(), pj.at("cols").get<int>(),
             pj.at("values").get<std::vector<double>>());
    store.add(name, std::move(t));
  }
  return store;
}

}  // namespace oracle
