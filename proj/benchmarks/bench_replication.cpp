#include <benchmark/benchmark.h>

#include <string>

#include "ggsd/config.hpp"
#include "ggsd/engine.hpp"
#include "ggsd/harness.hpp"
#include "ggsd/simdata.hpp"

namespace {

const ggsd::RunConfig& setting1() {
  static const auto cfg = ggsd::parse_config(std::string(GGSD_SOURCE_DIR) + "/configs/setting1.json");
  return cfg;
}

void BM_GenerateTrial(benchmark::State& state) {
  const auto& s = setting1().settings.at(0);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(ggsd::generate_trial(s, seed++));
}
BENCHMARK(BM_GenerateTrial)->Unit(benchmark::kMicrosecond);

void BM_Snapshot(benchmark::State& state) {
  const auto recs = ggsd::generate_trial(setting1().settings.at(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(ggsd::snapshot_at(recs, 40.0));
}
BENCHMARK(BM_Snapshot)->Unit(benchmark::kMicrosecond);

// One replication through every design and all configured weight sets.
void BM_Replication(benchmark::State& state) {
  const auto& cfg = setting1();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ggsd::run_monte_carlo(cfg.settings.at(0), cfg.designs,
                                                   cfg.weight_sets, 1, seed++));
  }
}
BENCHMARK(BM_Replication)->Unit(benchmark::kMillisecond);

}  // namespace
