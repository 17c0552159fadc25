#pragma once

#include <vector>

#include "oracle/graph.hpp"
#include "oracle/tensor.hpp"

namespace oracle {

enum class KernelKind { RBF, InnerProduct, Polynomial };

// Graph-subgraph dependency kernel parameters.
struct KernelConfig {
  KernelKind kind = KernelKind::RBF;
  double theta = 1.0;       // RBF bandwidth
  double poly_c = 1.0;
  int poly_degree = 2;

  void validate() const;
};

// Number of threads the parallel kernels may use (default 1). Every kernel
// computes each output entry on exactly one thread with a fixed inner
// summation order, so results are bit-identical for any thread count.
void set_num_threads(int n);
int num_threads();

namespace kernels {

// C = op(A) * op(B), op = transpose when the flag is set.
Tensor matmul(const Tensor& a, const Tensor& b, bool trans_a = false, bool trans_b = false);

// K[i][j] = psi(A.row(i), B.row(j)) for the configured kernel.
Tensor kernel_matrix(const Tensor& a, const Tensor& b, const KernelConfig& cfg);

// out.row(v) = sum of h.row(u) over neighbors u of v.
Tensor neighbor_sum(const Graph& graph, const Tensor& h);

// Gradients of sum(grad . K) for K = kernel_matrix(a, b, cfg). `k` is the
// forward output (used by RBF); `dot` is A*B^T (used by Polynomial; may be
// empty otherwise). Accumulates into da/db, which must be pre-shaped.
void kernel_matrix_backward(const Tensor& a, const Tensor& b, const KernelConfig& cfg,
                            const Tensor& k, const Tensor& dot, const Tensor& grad,
                            Tensor& da, Tensor& db);

// Serial reference implementations, kept for testing and benchmarking the
// parallel kernels against.
namespace reference {
Tensor matmul(const Tensor& a, const Tensor& b, bool trans_a = false, bool trans_b = false);
Tensor kernel_matrix(const Tensor& a, const Tensor& b, const KernelConfig& cfg);
Tensor neighbor_sum(const Graph& graph, const Tensor& h);
}  // namespace reference

}  // namespace kernels

// psi(z_g, z_sg): RBF exp(-||z_g - z_sg||^2 / (2 theta^2)), inner product, or
// polynomial (dot + c)^degree. Throws on dimension mismatch.
double kernel_dependency(const std::vector<double>& z_g, const std::vector<double>& z_sg,
                         const KernelConfig& config);

}  // namespace oracle
