// Benchmarks the OpenMP kernels against the serial reference implementations
// and verifies the outputs stay bit-identical at every thread count.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <thread>
#include <vector>

#include "oracle/data_io.hpp"
#include "oracle/kernels.hpp"
#include "oracle/rng.hpp"

using namespace oracle;

namespace {

Tensor random_tensor(int rows, int cols, Rng& rng) {
  Tensor t(rows, cols);
  for (double& v : t.values) v = rng.next_double(-1.0, 1.0);
  return t;
}

double time_ms(const std::function<void()>& fn, int reps) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

void report(const char* name, double serial_ms, const std::vector<std::pair<int, double>>& rows,
            double diff) {
  std::printf("%-16s serial %8.2f ms   ", name, serial_ms);
  for (const auto& [threads, ms] : rows)
    std::printf("t=%d %8.2f ms (x%.2f)   ", threads, ms, serial_ms / ms);
  std::printf("max|diff| %.1e\n", diff);
}

}  // namespace

int main() {
  Rng rng(42);
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  std::vector<int> thread_counts{1, 2, 4};
  if (hw > 4) thread_counts.push_back(hw);
  const int reps = 3;

  {
    const Tensor a = random_tensor(768, 768, rng);
    const Tensor b = random_tensor(768, 768, rng);
    set_num_threads(1);
    const Tensor ref = kernels::reference::matmul(a, b);
    const double serial = time_ms([&] { kernels::reference::matmul(a, b); }, reps);
    std::vector<std::pair<int, double>> rows;
    double diff = 0.0;
    for (int t : thread_counts) {
      set_num_threads(t);
      diff = std::max(diff, max_abs_diff(ref, kernels::matmul(a, b)));
      rows.emplace_back(t, time_ms([&] { kernels::matmul(a, b); }, reps));
    }
    report("matmul 768^3", serial, rows, diff);
  }

  {
    const Tensor a = random_tensor(4096, 64, rng);
    const Tensor b = random_tensor(1024, 64, rng);
    KernelConfig cfg;
    set_num_threads(1);
    const Tensor ref = kernels::reference::kernel_matrix(a, b, cfg);
    const double serial = time_ms([&] { kernels::reference::kernel_matrix(a, b, cfg); }, reps);
    std::vector<std::pair<int, double>> rows;
    double diff = 0.0;
    for (int t : thread_counts) {
      set_num_threads(t);
      diff = std::max(diff, max_abs_diff(ref, kernels::kernel_matrix(a, b, cfg)));
      rows.emplace_back(t, time_ms([&] { kernels::kernel_matrix(a, b, cfg); }, reps));
    }
    report("rbf 4096x1024", serial, rows, diff);
  }

  {
    Rng gen(7);
    const Graph g = generate_ba(200000, gen);
    const Tensor h = random_tensor(g.num_nodes, 64, rng);
    set_num_threads(1);
    const Tensor ref = kernels::reference::neighbor_sum(g, h);
    const double serial = time_ms([&] { kernels::reference::neighbor_sum(g, h); }, reps);
    std::vector<std::pair<int, double>> rows;
    double diff = 0.0;
    for (int t : thread_counts) {
      set_num_threads(t);
      diff = std::max(diff, max_abs_diff(ref, kernels::neighbor_sum(g, h)));
      rows.emplace_back(t, time_ms([&] { kernels::neighbor_sum(g, h); }, reps));
    }
    report("nbrsum 200k", serial, rows, diff);
  }

  return 0;
}
