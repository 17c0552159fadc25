#include "oracle/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracle::ad {

namespace {

// log-softmax of one row with max-shift; returns the row max-shifted logsumexp pieces
void log_softmax_row(const double* x, int n, double* out) {
  double mx = x[0];
  for (int i = 1; i < n; ++i) mx = std::max(mx, x[i]);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += std::exp(x[i] - mx);
  const double lse = mx + std::log(sum);
  for (int i = 0; i < n; ++i) out[i] = x[i] - lse;
}

}  // namespace

ValueId Tape::check(ValueId id) const {
  if (id < 0 || id >= static_cast<ValueId>(slots_.size()))
    throw std::invalid_argument("tape: invalid value id");
  return id;
}

ValueId Tape::push_slot(Tensor value, bool requires_grad, bool is_leaf) {
  slots_.push_back(Slot{std::move(value), Tensor{}, requires_grad, is_leaf});
  return static_cast<ValueId>(slots_.size() - 1);
}

ValueId Tape::leaf(Tensor value, bool requires_grad) {
  return push_slot(std::move(value), requires_grad, true);
}

ValueId Tape::record(Node node) {
  bool req = false;
  for (ValueId in : node.inputs) req = req || slots_[check(in)].requires_grad;
  node.out = push_slot(Tensor{}, req, false);
  nodes_.push_back(std::move(node));
  execute(nodes_.back());
  return nodes_.back().out;
}

double Tape::scalar(ValueId id) const {
  const Tensor& t = slots_[check(id)].value;
  if (t.rows != 1 || t.cols != 1) throw std::invalid_argument("tape: value is not a scalar");
  return t.values[0];
}

const Tensor& Tape::grad(ValueId id) const {
  const Slot& s = slots_[check(id)];
  if (s.grad.size() == 0) throw std::logic_error("tape: no gradient for this value");
  return s.grad;
}

Tensor& Tape::leaf_value(ValueId id) {
  Slot& s = slots_[check(id)];
  if (!s.is_leaf) throw std::invalid_argument("tape: only leaf values may be mutated");
  return s.value;
}

ValueId Tape::matmul(ValueId a, ValueId b, bool trans_a, bool trans_b) {
  Node n;
  n.op = Op::Matmul;
  n.inputs = {check(a), check(b)};
  n.trans_a = trans_a;
  n.trans_b = trans_b;
  return record(std::move(n));
}

ValueId Tape::add_row_broadcast(ValueId a, ValueId bias) {
  Node n;
  n.op = Op::AddRowBroadcast;
  n.inputs = {check(a), check(bias)};
  return record(std::move(n));
}

ValueId Tape::relu(ValueId a) {
  Node n;
  n.op = Op::Relu;
  n.inputs = {check(a)};
  return record(std::move(n));
}

ValueId Tape::leaky_relu(ValueId a, double slope) {
  Node n;
  n.op = Op::LeakyRelu;
  n.inputs = {check(a)};
  n.c0 = slope;
  return record(std::move(n));
}

ValueId Tape::sigmoid(ValueId a) {
  Node n;
  n.op = Op::Sigmoid;
  n.inputs = {check(a)};
  return record(std::move(n));
}

ValueId Tape::row_softmax(ValueId a) {
  Node n;
  n.op = Op::RowSoftmax;
  n.inputs = {check(a)};
  return record(std::move(n));
}

ValueId Tape::neighbor_sum(ValueId h, const Graph& graph) {
  Node n;
  n.op = Op::NeighborSum;
  n.inputs = {check(h)};
  n.graph = &graph;
  return record(std::move(n));
}

ValueId Tape::gin_combine(ValueId h, ValueId nsum, ValueId eps) {
  Node n;
  n.op = Op::GinCombine;
  n.inputs = {check(h), check(nsum), check(eps)};
  return record(std::move(n));
}

ValueId Tape::sum_rows(ValueId a) {
  Node n;
  n.op = Op::SumRows;
  n.inputs = {check(a)};
  return record(std::move(n));
}

ValueId Tape::concat_rows(const std::vector<ValueId>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_rows: no inputs");
  Node n;
  n.op = Op::ConcatRows;
  for (ValueId p : parts) n.inputs.push_back(check(p));
  return record(std::move(n));
}

ValueId Tape::kernel_matrix(ValueId a, ValueId b, const KernelConfig& cfg) {
  cfg.validate();
  Node n;
  n.op = Op::KernelMatrix;
  n.inputs = {check(a), check(b)};
  n.kernel = cfg;
  return record(std::move(n));
}

ValueId Tape::dropout(ValueId a, double rate, Rng& rng, bool training) {
  if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout: rate must be in [0, 1)");
  const Tensor& x = slots_[check(a)].value;
  Node n;
  n.op = Op::Dropout;
  n.inputs = {a};
  // mask drawn once; replays reuse it
  n.saved = Tensor(x.rows, x.cols, 1.0);
  if (training && rate > 0.0) {
    const double scale = 1.0 / (1.0 - rate);
    for (double& m : n.saved.values) m = rng.next_double() < rate ? 0.0 : scale;
  }
  return record(std::move(n));
}

ValueId Tape::cross_entropy(ValueId logits, std::vector<int> labels) {
  const Tensor& x = slots_[check(logits)].value;
  if (labels.empty()) throw std::invalid_argument("cross_entropy: empty batch");
  if (static_cast<int>(labels.size()) != x.rows)
    throw std::invalid_argument("cross_entropy: one label per logits row required");
  for (int y : labels)
    if (y < 0 || y >= x.cols) throw std::invalid_argument("cross_entropy: label out of range");
  Node n;
  n.op = Op::CrossEntropy;
  n.inputs = {logits};
  n.labels = std::move(labels);
  return record(std::move(n));
}

ValueId Tape::softmax_entropy(ValueId logits, int num_classes) {
  if (num_classes < 1) throw std::invalid_argument("softmax_entropy: need at least one class");
  Node n;
  n.op = Op::SoftmaxEntropy;
  n.inputs = {check(logits)};
  n.c0 = static_cast<double>(num_classes);
  return record(std::move(n));
}

ValueId Tape::affine_combine(ValueId a, ValueId b, double ca, double cb) {
  Node n;
  n.op = Op::AffineCombine;
  n.inputs = {check(a), check(b)};
  n.c0 = ca;
  n.c1 = cb;
  return record(std::move(n));
}

void Tape::execute(Node& node) {
  Tensor& out = slots_[node.out].value;
  switch (node.op) {
    case Op::Matmul: {
      out = kernels::matmul(slots_[node.inputs[0]].value, slots_[node.inputs[1]].value,
                            node.trans_a, node.trans_b);
      break;
    }
    case Op::AddRowBroadcast: {
      const Tensor& a = slots_[node.inputs[0]].value;
      const Tensor& bias = slots_[node.inputs[1]].value;
      if (bias.rows != 1 || bias.cols != a.cols)
        throw std::invalid_argument("add_row_broadcast: bias must be 1x" +
                                    std::to_string(a.cols) + ", got " + bias.shape_str());
      out = a;
      for (int r = 0; r < out.rows; ++r) {
        double* row = out.row(r);
        for (int c = 0; c < out.cols; ++c) row[c] += bias.values[c];
      }
      break;
    }
    case Op::Relu: {
      out = slots_[node.inputs[0]].value;
      for (double& v : out.values) v = v > 0.0 ? v : 0.0;
      break;
    }
    case Op::LeakyRelu: {
      out = slots_[node.inputs[0]].value;
      for (double& v : out.values) v = v > 0.0 ? v : node.c0 * v;
      break;
    }
    case Op::Sigmoid: {
      out = slots_[node.inputs[0]].value;
      for (double& v : out.values) v = 1.0 / (1.0 + std::exp(-v));
      break;
    }
    case Op::RowSoftmax: {
      const Tensor& x = slots_[node.inputs[0]].value;
      out = Tensor(x.rows, x.cols);
      std::vector<double> ls(x.cols);
      for (int r = 0; r < x.rows; ++r) {
        log_softmax_row(x.row(r), x.cols, ls.data());
        double* o = out.row(r);
        for (int c = 0; c < x.cols; ++c) o[c] = std::exp(ls[c]);
      }
      break;
    }
    case Op::NeighborSum: {
      out = kernels::neighbor_sum(*node.graph, slots_[node.inputs[0]].value);
      break;
    }
    case Op::GinCombine: {
      const Tensor& h = slots_[node.inputs[0]].value;
      const Tensor& ns = slots_[node.inputs[1]].value;
      const Tensor& eps = slots_[node.inputs[2]].value;
      if (!h.same_shape(ns))
        throw std::invalid_argument("gin_combine: shape mismatch " + h.shape_str() + " vs " +
                                    ns.shape_str());
      if (eps.rows != 1 || eps.cols != 1)
        throw std::invalid_argument("gin_combine: eps must be a scalar");
      const double scale = 1.0 + eps.values[0];
      out = Tensor(h.rows, h.cols);
      for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = scale * h.values[i] + ns.values[i];
      break;
    }
    case Op::SumRows: {
      const Tensor& a = slots_[node.inputs[0]].value;
      if (a.rows == 0) throw std::invalid_argument("sum_rows: empty input");
      out = Tensor(1, a.cols);
      for (int r = 0; r < a.rows; ++r) {
        const double* row = a.row(r);
        for (int c = 0; c < a.cols; ++c) out.values[c] += row[c];
      }
      break;
    }
    case Op::ConcatRows: {
      int rows = 0;
      const int cols = slots_[node.inputs[0]].value.cols;
      for (ValueId in : node.inputs) {
        const Tensor& t = slots_[in].value;
        if (t.cols != cols)
          throw std::invalid_argument("concat_rows: column mismatch " + t.shape_str());
        rows += t.rows;
      }
      out = Tensor(rows, cols);
      int at = 0;
      for (ValueId in : node.inputs) {
        const Tensor& t = slots_[in].value;
        std::copy(t.values.begin(), t.values.end(), out.row(at));
        at += t.rows;
      }
      break;
    }
    case Op::KernelMatrix: {
      const Tensor& a = slots_[node.inputs[0]].value;
      const Tensor& b = slots_[node.inputs[1]].value;
      if (node.kernel.kind == KernelKind::Polynomial)
        node.saved2 = kernels::matmul(a, b, false, true);
      out = kernels::kernel_matrix(a, b, node.kernel);
      break;
    }
    case Op::Dropout: {
      const Tensor& a = slots_[node.inputs[0]].value;
      if (!a.same_shape(node.saved))
        throw std::invalid_argument("dropout: input shape changed between replays");
      out = Tensor(a.rows, a.cols);
      for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = a.values[i] * node.saved.values[i];
      break;
    }
    case Op::CrossEntropy: {
      const Tensor& x = slots_[node.inputs[0]].value;
      node.saved = Tensor(x.rows, x.cols);
      double loss = 0.0;
      std::vector<double> ls(x.cols);
      for (int r = 0; r < x.rows; ++r) {
        log_softmax_row(x.row(r), x.cols, ls.data());
        loss -= ls[node.labels[r]];
        double* p = node.saved.row(r);
        for (int c = 0; c < x.cols; ++c) p[c] = std::exp(ls[c]);
      }
      out = Tensor(1, 1, loss / x.rows);
      break;
    }
    case Op::SoftmaxEntropy: {
      const Tensor& x = slots_[node.inputs[0]].value;
      node.saved = Tensor(x.rows, x.cols);
      double total = 0.0;
      std::vector<double> ls(x.cols);
      for (int r = 0; r < x.rows; ++r) {
        log_softmax_row(x.row(r), x.cols, ls.data());
        double* p = node.saved.row(r);
        for (int c = 0; c < x.cols; ++c) {
          p[c] = std::exp(ls[c]);
          total -= p[c] * ls[c];  // p*log p with 0*log 0 -> 0 handled by p = exp(ls)
        }
      }
      out = Tensor(1, 1, total / node.c0);
      break;
    }
    case Op::AffineCombine: {
      const Tensor& a = slots_[node.inputs[0]].value;
      const Tensor& b = slots_[node.inputs[1]].value;
      if (!a.same_shape(b))
        throw std::invalid_argument("affine_combine: shape mismatch " + a.shape_str() + " vs " +
                                    b.shape_str());
      out = Tensor(a.rows, a.cols);
      for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = node.c0 * a.values[i] + node.c1 * b.values[i];
      break;
    }
  }
}

void Tape::recompute_forward() {
  for (Node& n : nodes_) execute(n);
}

void Tape::accumulate(ValueId id, const Tensor& g) {
  Slot& s = slots_[id];
  if (!s.requires_grad) return;
  if (s.grad.size() == 0) s.grad = Tensor(s.value.rows, s.value.cols);
  for (std::size_t i = 0; i < g.values.size(); ++i) s.grad.values[i] += g.values[i];
}

void Tape::backward(ValueId seed) {
  if (nodes_.empty()) throw std::logic_error("tape: backward before forward");
  const Slot& s = slots_[check(seed)];
  if (s.value.rows != 1 || s.value.cols != 1)
    throw std::invalid_argument("tape: backward seed must be a scalar");
  for (Slot& slot : slots_)
    if (slot.requires_grad) slot.grad = Tensor(slot.value.rows, slot.value.cols);
  slots_[seed].grad = Tensor(1, 1, 1.0);
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    if (!slots_[it->out].requires_grad) continue;
    backprop(*it);
  }
}

void Tape::backprop(const Node& node) {
  const Tensor& g = slots_[node.out].grad;
  switch (node.op) {
    case Op::Matmul: {
      const ValueId a = node.inputs[0];
      const ValueId b = node.inputs[1];
      const Tensor& av = slots_[a].value;
      const Tensor& bv = slots_[b].value;
      if (slots_[a].requires_grad) {
        Tensor da = !node.trans_a
                        ? kernels::matmul(g, bv, false, !node.trans_b)
                        : (!node.trans_b ? kernels::matmul(bv, g, false, true)
                                         : kernels::matmul(bv, g, true, true));
        accumulate(a, da);
      }
      if (slots_[b].requires_grad) {
        Tensor db = !node.trans_b
                        ? kernels::matmul(av, g, !node.trans_a, false)
                        : (!node.trans_a ? kernels::matmul(g, av, true, false)
                                         : kernels::matmul(g, av, true, true));
        accumulate(b, db);
      }
      break;
    }
    case Op::AddRowBroadcast: {
      accumulate(node.inputs[0], g);
      if (slots_[node.inputs[1]].requires_grad) {
        Tensor db(1, g.cols);
        for (int r = 0; r < g.rows; ++r) {
          const double* row = g.row(r);
          for (int c = 0; c < g.cols; ++c) db.values[c] += row[c];
        }
        accumulate(node.inputs[1], db);
      }
      break;
    }
    case Op::Relu: {
      const Tensor& out = slots_[node.out].value;
      Tensor da(g.rows, g.cols);
      for (std::size_t i = 0; i < da.values.size(); ++i)
        da.values[i] = out.values[i] > 0.0 ? g.values[i] : 0.0;
      accumulate(node.inputs[0], da);
      break;
    }
    case Op::LeakyRelu: {
      const Tensor& in = slots_[node.inputs[0]].value;
      Tensor da(g.rows, g.cols);
      for (std::size_t i = 0; i < da.values.size(); ++i)
        da.values[i] = g.values[i] * (in.values[i] > 0.0 ? 1.0 : node.c0);
      accumulate(node.inputs[0], da);
      break;
    }
    case Op::Sigmoid: {
      const Tensor& out = slots_[node.out].value;
      Tensor da(g.rows, g.cols);
      for (std::size_t i = 0; i < da.values.size(); ++i)
        da.values[i] = g.values[i] * out.values[i] * (1.0 - out.values[i]);
      accumulate(node.inputs[0], da);
      break;
    }
    case Op::RowSoftmax: {
      const Tensor& p = slots_[node.out].value;
      Tensor da(g.rows, g.cols);
      for (int r = 0; r < g.rows; ++r) {
        const double* gr = g.row(r);
        const double* pr = p.row(r);
        double dot = 0.0;
        for (int c = 0; c < g.cols; ++c) dot += gr[c] * pr[c];
        double* dr = da.row(r);
        for (int c = 0; c < g.cols; ++c) dr[c] = pr[c] * (gr[c] - dot);
      }
      accumulate(node.inputs[0], da);
      break;
    }
    case Op::NeighborSum: {
      // undirected adjacency is symmetric, so the adjoint is the same op
      accumulate(node.inputs[0], kernels::neighbor_sum(*node.graph, g));
      break;
    }
    case Op::GinCombine: {
      const Tensor& h = slots_[node.inputs[0]].value;
      const double scale = 1.0 + slots_[node.inputs[2]].value.values[0];
      if (slots_[node.inputs[0]].requires_grad) {
        Tensor dh(g.rows, g.cols);
        for (std::size_t i = 0; i < dh.values.size(); ++i) dh.values[i] = scale * g.values[i];
        accumulate(node.inputs[0], dh);
      }
      accumulate(node.inputs[1], g);
      if (slots_[node.inputs[2]].requires_grad) {
        double deps = 0.0;
        for (std::size_t i = 0; i < g.values.size(); ++i) deps += g.values[i] * h.values[i];
        accumulate(node.inputs[2], Tensor(1, 1, deps));
      }
      break;
    }
    case Op::SumRows: {
      const Tensor& in = slots_[node.inputs[0]].value;
      Tensor da(in.rows, in.cols);
      for (int r = 0; r < in.rows; ++r)
        std::copy(g.values.begin(), g.values.end(), da.row(r));
      accumulate(node.inputs[0], da);
      break;
    }
    case Op::ConcatRows: {
      int at = 0;
      for (ValueId in : node.inputs) {
        const Tensor& t = slots_[in].value;
        if (slots_[in].requires_grad) {
          Tensor part(t.rows, t.cols);
          std::copy(g.row(at), g.row(at) + t.size(), part.values.begin());
          accumulate(in, part);
        }
        at += t.rows;
      }
      break;
    }
    case Op::KernelMatrix: {
      const Tensor& a = slots_[node.inputs[0]].value;
      const Tensor& b = slots_[node.inputs[1]].value;
      Tensor da(a.rows, a.cols);
      Tensor db(b.rows, b.cols);
      kernels::kernel_matrix_backward(a, b, node.kernel, slots_[node.out].value, node.saved2, g,
                                      da, db);
      accumulate(node.inputs[0], da);
      accumulate(node.inputs[1], db);
      break;
    }
    case Op::Dropout: {
      Tensor da(g.rows, g.cols);
      for (std::size_t i = 0; i < da.values.size(); ++i)
        da.values[i] = g.values[i] * node.saved.values[i];
      accumulate(node.inputs[0], da);
      break;
    }
    case Op::CrossEntropy: {
      const double gs = g.values[0];
      const Tensor& p = node.saved;
      Tensor da(p.rows, p.cols);
      const double inv = gs / p.rows;
      for (int r = 0; r < p.rows; ++r) {
        const double* pr = p.row(r);
        double* dr = da.row(r);
        for (int c = 0; c < p.cols; ++c) dr[c] = inv * pr[c];
        dr[node.labels[r]] -= inv;
      }
      accumulate(node.inputs[0], da);
      break;
    }
    case Op::SoftmaxEntropy: {
      const double gs = g.values[0] / node.c0;
      const Tensor& p = node.saved;
      Tensor da(p.rows, p.cols);
      for (int r = 0; r < p.rows; ++r) {
        const double* pr = p.row(r);
        double* dr = da.row(r);
        double row_entropy = 0.0;
        for (int c = 0; c < p.cols; ++c)
          if (pr[c] > 0.0) row_entropy -= pr[c] * std::log(pr[c]);
        for (int c = 0; c < p.cols; ++c) {
          const double logp = pr[c] > 0.0 ? std::log(pr[c]) : 0.0;
          dr[c] = -gs * pr[c] * (logp + row_entropy);
        }
      }
      accumulate(node.inputs[0], da);
      break;
    }
    case Op::AffineCombine: {
      if (slots_[node.inputs[0]].requires_grad) {
        Tensor da(g.rows, g.cols);
        for (std::size_t i = 0; i < da.values.size(); ++i) da.values[i] = node.c0 * g.values[i];
        accumulate(node.inputs[0], da);
      }
      if (slots_[node.inputs[1]].requires_grad) {
        Tensor db(g.rows, g.cols);
        for (std::size_t i = 0; i < db.values.size(); ++i) db.values[i] = node.c1 * g.values[i];
        accumulate(node.inputs[1], db);
      }
      break;
    }
  }
}

}  // namespace oracle::ad
