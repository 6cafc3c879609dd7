// Parallel kernels against their serial references.
#include <benchmark/benchmark.h>

#include <algorithm>

#include "trihet/kernels.hpp"
#include "trihet/rng.hpp"

using namespace trihet;

namespace {

Matrix dense(std::size_t r, std::size_t c, Rng& rng) {
  Matrix m(r, c);
  for (double& v : m.values()) v = rng.uniform(-1, 1);
  return m;
}

// Random symmetric-ish pattern with ~deg entries per row.
CsrMatrix sparse(std::size_t n, std::size_t deg, Rng& rng) {
  CsrMatrix a;
  a.rows = a.cols = n;
  a.offsets.assign(1, 0);
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<std::size_t> cols;
    for (std::size_t k = 0; k < deg; ++k) cols.push_back(rng.below(n));
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    for (auto c : cols) {
      a.indices.push_back(c);
      a.values.push_back(rng.uniform());
    }
    a.offsets.push_back(a.indices.size());
  }
  return a;
}

template <bool Parallel>
void BM_spmm(benchmark::State& st) {
  Rng rng(1);
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto a = sparse(n, 8, rng);
  const auto b = dense(n, 128, rng);
  Matrix out;
  for (auto _ : st) {
    if constexpr (Parallel) kernels::spmm(CsrView::of(a), b, out);
    else kernels::reference::spmm(CsrView::of(a), b, out);
    benchmark::DoNotOptimize(out.values().data());
  }
}

template <bool Parallel>
void BM_gemm(benchmark::State& st) {
  Rng rng(2);
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto a = dense(n, 128, rng);
  const auto b = dense(128, 128, rng);
  Matrix out;
  for (auto _ : st) {
    if constexpr (Parallel) kernels::gemm(a, b, out);
    else kernels::reference::gemm(a, b, out);
    benchmark::DoNotOptimize(out.values().data());
  }
}

template <bool Parallel>
void BM_sampled_dot(benchmark::State& st) {
  Rng rng(3);
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto p = sparse(n, 8, rng);
  const auto g = dense(n, 128, rng);
  const auto h = dense(n, 128, rng);
  std::vector<double> out(p.nnz());
  for (auto _ : st) {
    if constexpr (Parallel) kernels::sampled_dot(CsrView::of(p), g, h, out);
    else kernels::reference::sampled_dot(CsrView::of(p), g, h, out);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_spmm<false>)->Arg(2708)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_spmm<true>)->Arg(2708)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gemm<false>)->Arg(2708)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gemm<true>)->Arg(2708)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sampled_dot<false>)->Arg(2708)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sampled_dot<true>)->Arg(2708)->Arg(20000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
