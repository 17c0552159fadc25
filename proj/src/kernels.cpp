#include "oracle/kernels.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace oracle {

namespace {
int g_threads = 1;

void check_matmul_shapes(const Tensor& a, const Tensor& b, bool trans_a, bool trans_b,
                         int& m, int& k, int& n) {
  m = trans_a ? a.cols : a.rows;
  k = trans_a ? a.rows : a.cols;
  const int kb = trans_b ? b.cols : b.rows;
  n = trans_b ? b.rows : b.cols;
  if (k != kb)
    throw std::invalid_argument("matmul: inner dimensions mismatch " + a.shape_str() + " vs " +
                                b.shape_str());
}

double poly_int_pow(double base, int deg) {
  double r = 1.0;
  for (int i = 0; i < deg; ++i) r *= base;
  return r;
}

double kernel_entry(const double* x, const double* y, int d, const KernelConfig& cfg) {
  switch (cfg.kind) {
    case KernelKind::RBF: {
      double sq = 0.0;
      for (int t = 0; t < d; ++t) {
        const double diff = x[t] - y[t];
        sq += diff * diff;
      }
      return std::exp(-sq / (2.0 * cfg.theta * cfg.theta));
    }
    case KernelKind::InnerProduct: {
      double dot = 0.0;
      for (int t = 0; t < d; ++t) dot += x[t] * y[t];
      return dot;
    }
    case KernelKind::Polynomial: {
      double dot = 0.0;
      for (int t = 0; t < d; ++t) dot += x[t] * y[t];
      return poly_int_pow(dot + cfg.poly_c, cfg.poly_degree);
    }
  }
  return 0.0;
}
}  // namespace

void KernelConfig::validate() const {
  if (theta <= 0.0) throw std::invalid_argument("KernelConfig: theta must be > 0");
  if (poly_degree < 1) throw std::invalid_argument("KernelConfig: poly_degree must be >= 1");
}

void set_num_threads(int n) {
  if (n < 1) throw std::invalid_argument("set_num_threads: need at least one thread");
  g_threads = n;
}

int num_threads() { return g_threads; }

namespace kernels {

Tensor matmul(const Tensor& a, const Tensor& b, bool trans_a, bool trans_b) {
  int m, k, n;
  check_matmul_shapes(a, b, trans_a, trans_b, m, k, n);
  Tensor c(m, n);
#pragma omp parallel for schedule(static) num_threads(g_threads) if (g_threads > 1)
  for (int i = 0; i < m; ++i) {
    double* out = c.row(i);
    if (!trans_a && !trans_b) {
      // row-major friendly order: accumulate row i over a[i][p] * b[p][:]
      const double* ar = a.row(i);
      for (int p = 0; p < k; ++p) {
        const double av = ar[p];
        if (av == 0.0) continue;
        const double* br = b.row(p);
        for (int j = 0; j < n; ++j) out[j] += av * br[j];
      }
    } else if (!trans_a && trans_b) {
      const double* ar = a.row(i);
      for (int j = 0; j < n; ++j) {
        const double* br = b.row(j);
        double s = 0.0;
        for (int p = 0; p < k; ++p) s += ar[p] * br[p];
        out[j] = s;
      }
    } else if (trans_a && !trans_b) {
      for (int p = 0; p < k; ++p) {
        const double av = a.at(p, i);
        if (av == 0.0) continue;
        const double* br = b.row(p);
        for (int j = 0; j < n; ++j) out[j] += av * br[j];
      }
    } else {
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int p = 0; p < k; ++p) s += a.at(p, i) * b.at(j, p);
        out[j] = s;
      }
    }
  }
  return c;
}

Tensor kernel_matrix(const Tensor& a, const Tensor& b, const KernelConfig& cfg) {
  if (a.cols != b.cols)
    throw std::invalid_argument("kernel_matrix: dimension mismatch " + a.shape_str() + " vs " +
                                b.shape_str());
  Tensor k(a.rows, b.rows);
#pragma omp parallel for schedule(static) num_threads(g_threads) if (g_threads > 1)
  for (int i = 0; i < a.rows; ++i) {
    const double* x = a.row(i);
    double* out = k.row(i);
    for (int j = 0; j < b.rows; ++j) out[j] = kernel_entry(x, b.row(j), a.cols, cfg);
  }
  return k;
}

Tensor neighbor_sum(const Graph& graph, const Tensor& h) {
  if (h.rows != graph.num_nodes)
    throw std::invalid_argument("neighbor_sum: H must have one row per node");
  Tensor out(h.rows, h.cols);
#pragma omp parallel for schedule(static) num_threads(g_threads) if (g_threads > 1)
  for (int v = 0; v < graph.num_nodes; ++v) {
    double* dst = out.row(v);
    for (int u : graph.adjacency[v]) {
      const double* src = h.row(u);
      for (int t = 0; t < h.cols; ++t) dst[t] += src[t];
    }
  }
  return out;
}

void kernel_matrix_backward(const Tensor& a, const Tensor& b, const KernelConfig& cfg,
                            const Tensor& k, const Tensor& dot, const Tensor& grad,
                            Tensor& da, Tensor& db) {
  const int d = a.cols;
  switch (cfg.kind) {
    case KernelKind::RBF: {
      const double inv_theta_sq = 1.0 / (cfg.theta * cfg.theta);
      // dK/da_i = K_ij * (b_j - a_i) / theta^2 ; dK/db_j is the negation
#pragma omp parallel for schedule(static) num_threads(g_threads) if (g_threads > 1)
      for (int i = 0; i < a.rows; ++i) {
        double* dai = da.row(i);
        const double* ai = a.row(i);
        for (int j = 0; j < b.rows; ++j) {
          const double w = grad.at(i, j) * k.at(i, j) * inv_theta_sq;
          if (w == 0.0) continue;
          const double* bj = b.row(j);
          for (int t = 0; t < d; ++t) dai[t] += w * (bj[t] - ai[t]);
        }
      }
#pragma omp parallel for schedule(static) num_threads(g_threads) if (g_threads > 1)
      for (int j = 0; j < b.rows; ++j) {
        double* dbj = db.row(j);
        const double* bj = b.row(j);
        for (int i = 0; i < a.rows; ++i) {
          const double w = grad.at(i, j) * k.at(i, j) * inv_theta_sq;
          if (w == 0.0) continue;
          const double* ai = a.row(i);
          for (int t = 0; t < d; ++t) dbj[t] += w * (ai[t] - bj[t]);
        }
      }
      break;
    }
    case KernelKind::InnerProduct: {
      // K = A B^T: dA += G B, dB += G^T A
      Tensor ga = matmul(grad, b);
      Tensor gb = matmul(grad, a, /*trans_a=*/true);
      for (std::size_t t = 0; t < da.values.size(); ++t) da.values[t] += ga.values[t];
      for (std::size_t t = 0; t < db.values.size(); ++t) db.values[t] += gb.values[t];
      break;
    }
    case KernelKind::Polynomial: {
      // K = (dot + c)^deg: chain through W = G .* deg * (dot + c)^(deg-1)
      Tensor w(grad.rows, grad.cols);
      for (std::size_t t = 0; t < w.values.size(); ++t)
        w.values[t] = grad.values[t] * cfg.poly_degree *
                      poly_int_pow(dot.values[t] + cfg.poly_c, cfg.poly_degree - 1);
      Tensor ga = matmul(w, b);
      Tensor gb = matmul(w, a, /*trans_a=*/true);
      for (std::size_t t = 0; t < da.values.size(); ++t) da.values[t] += ga.values[t];
      for (std::size_t t = 0; t < db.values.size(); ++t) db.values[t] += gb.values[t];
      break;
    }
  }
}

namespace reference {

Tensor matmul(const Tensor& a, const Tensor& b, bool trans_a, bool trans_b) {
  int m, k, n;
  check_matmul_shapes(a, b, trans_a, trans_b, m, k, n);
  Tensor c(m, n);
  for (int i = 0; i < m; ++i) {
    double* out = c.row(i);
    if (!trans_a && !trans_b) {
      const double* ar = a.row(i);
      for (int p = 0; p < k; ++p) {
        const double av = ar[p];
        if (av == 0.0) continue;
        const double* br = b.row(p);
        for (int j = 0; j < n; ++j) out[j] += av * br[j];
      }
    } else if (!trans_a && trans_b) {
      const double* ar = a.row(i);
      for (int j = 0; j < n; ++j) {
        const double* br = b.row(j);
        double s = 0.0;
        for (int p = 0; p < k; ++p) s += ar[p] * br[p];
        out[j] = s;
      }
    } else if (trans_a && !trans_b) {
      for (int p = 0; p < k; ++p) {
        const double av = a.at(p, i);
        if (av == 0.0) continue;
        const double* br = b.row(p);
        for (int j = 0; j < n; ++j) out[j] += av * br[j];
      }
    } else {
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int p = 0; p < k; ++p) s += a.at(p, i) * b.at(j, p);
        out[j] = s;
      }
    }
  }
  return c;
}

Tensor kernel_matrix(const Tensor& a, const Tensor& b, const KernelConfig& cfg) {
  if (a.cols != b.cols)
    throw std::invalid_argument("kernel_matrix: dimension mismatch " + a.shape_str() + " vs " +
                                b.shape_str());
  Tensor k(a.rows, b.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < b.rows; ++j)
      k.at(i, j) = kernel_entry(a.row(i), b.row(j), a.cols, cfg);
  return k;
}

Tensor neighbor_sum(const Graph& graph, const Tensor& h) {
  if (h.rows != graph.num_nodes)
    throw std::invalid_argument("neighbor_sum: H must have one row per node");
  Tensor out(h.rows, h.cols);
  for (int v = 0; v < graph.num_nodes; ++v)
    for (int u : graph.adjacency[v])
      for (int t = 0; t < h.cols; ++t) out.at(v, t) += h.at(u, t);
  return out;
}

}  // namespace reference
}  // namespace kernels

double kernel_dependency(const std::vector<double>& z_g, const std::vector<double>& z_sg,
                         const KernelConfig& config) {
  if (z_g.size() != z_sg.size())
    throw std::invalid_argument("kernel_dependency: embedding dimensions differ");
  config.validate();
  return kernel_entry(z_g.data(), z_sg.data(), static_cast<int>(z_g.size()), config);
}

}  // namespace oracle
