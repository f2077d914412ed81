#include <benchmark/benchmark.h>

#include <string>
#include <utility>
#include <vector>

#include "arc/aggregation.hpp"
#include "arc/clipping.hpp"
#include "arc/rng.hpp"

namespace {

arc::GradientSet random_set(std::size_t n, std::size_t d, std::uint64_t seed = 1) {
  arc::Rng rng(arc::mix64(seed));
  std::vector<double> flat(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    const double scale = 1.0 + 9.0 * rng.uniform();
    for (std::size_t j = 0; j < d; ++j) flat[i * d + j] = scale * rng.normal();
  }
  return arc::GradientSet::from_flat(n, d, std::move(flat));
}

void BM_Arc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const auto g = random_set(n, d);
  for (auto _ : state) benchmark::DoNotOptimize(arc::adaptive_robust_clip(g, n / 8));
}
BENCHMARK(BM_Arc)->ArgsProduct({{16, 64, 256}, {1000, 10000}})->Unit(benchmark::kMicrosecond);

void BM_Nnm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = random_set(n, 1000);
  for (auto _ : state) benchmark::DoNotOptimize(arc::nearest_neighbor_mixing(g, n / 4));
}
BENCHMARK(BM_Nnm)->Arg(11)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_Pipeline(benchmark::State& state, const std::string& spec) {
  const auto pipeline = arc::Pipeline(arc::AggregatorSpec::parse(spec));
  const auto g = random_set(32, 1000);
  for (auto _ : state) benchmark::DoNotOptimize(pipeline(g, 7));
}
BENCHMARK_CAPTURE(BM_Pipeline, cwtm, std::string("cwtm"))->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_Pipeline, cwmed, std::string("cwmed"))->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_Pipeline, gm, std::string("gm"))->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_Pipeline, mk, std::string("mk"))->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_Pipeline, cwtm_nnm_arc, std::string("cwtm+nnm+arc"))->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
