#include <benchmark/benchmark.h>

#include <vector>

#include "ggsd/boundaries.hpp"

namespace {

void BM_ComputeBoundaries(benchmark::State& state) {
  std::vector<double> t;
  const auto looks = static_cast<int>(state.range(0));
  for (int k = 1; k <= looks; ++k) t.push_back(double(k) / looks);
  const auto fn = ggsd::SpendingFunction::lan_demets_obf();
  for (auto _ : state) benchmark::DoNotOptimize(ggsd::compute_boundaries(0.025, t, fn));
}
BENCHMARK(BM_ComputeBoundaries)->DenseRange(1, 5)->Unit(benchmark::kMicrosecond);

void BM_CrossingProbability(benchmark::State& state) {
  const std::vector<double> t{0.66, 0.91, 1.0};
  const auto set = ggsd::compute_boundaries(0.0128, t, ggsd::SpendingFunction::lan_demets_obf());
  for (auto _ : state) benchmark::DoNotOptimize(ggsd::crossing_probability(set));
}
BENCHMARK(BM_CrossingProbability)->Unit(benchmark::kMicrosecond);

}  // namespace
