#include <benchmark/benchmark.h>

#include "msgt/rng.hpp"
#include "msgt/tensor.hpp"

using namespace msgt;

namespace {

Tensor random_tensor(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Tensor t(rows, cols);
  for (double& v : t.values()) v = 2.0 * rng.uniform() - 1.0;
  return t;
}

SparseMatrix random_sparse(int n, double density, std::uint64_t seed) {
  Rng rng(seed);
  Tensor dense(n, n);
  for (double& v : dense.values())
    if (rng.uniform() < density) v = rng.uniform();
  return SparseMatrix::from_dense(dense);
}

}  // namespace

static void BM_Matmul(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Tensor a = random_tensor(n, n, 1);
  Tensor b = random_tensor(n, n, 2);
  for (auto _ : state) {
    Tensor c = matmul(a, b);
    benchmark::DoNotOptimize(c.values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n) * n * n);
}
BENCHMARK(BM_Matmul)->Arg(64)->Arg(128)->Arg(256)->Arg(512);

static void BM_Spmm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SparseMatrix a = random_sparse(n, 0.02, 3);
  Tensor b = random_tensor(n, 64, 4);
  for (auto _ : state) {
    Tensor c = spmm(a, b);
    benchmark::DoNotOptimize(c.values().data());
  }
  state.SetItemsProcessed(state.iterations() * a.nnz() * 64);
}
BENCHMARK(BM_Spmm)->Arg(500)->Arg(2000)->Arg(8000);

static void BM_SoftmaxRows(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Tensor x = random_tensor(n, n, 5);
  for (auto _ : state) {
    Tensor y = softmax_rows(x);
    benchmark::DoNotOptimize(y.values().data());
  }
}
BENCHMARK(BM_SoftmaxRows)->Arg(128)->Arg(512);

static void BM_MatmulBackward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Tensor a = random_tensor(n, n, 6);
  Tensor b = random_tensor(n, n, 7);
  for (auto _ : state) {
    Tape tape;
    tape.watch(a);
    tape.watch(b);
    Tensor loss = mean_all(matmul(a, b));
    tape.backward(loss);
    benchmark::DoNotOptimize(tape.grad(a).values().data());
  }
}
BENCHMARK(BM_MatmulBackward)->Arg(64)->Arg(128)->Arg(256);

BENCHMARK_MAIN();
