#include <benchmark/benchmark.h>

#include <random>

#include "grab/miner.hpp"
#include "grab/trainer.hpp"
#include "random_instances.hpp"

namespace {

grab::TransactionDatabase synthetic(std::size_t m, std::size_t d) {
  std::mt19937_64 rng(m * 131 + d);
  return grab::testing::random_database(rng, m, d, 0.2);
}

void BM_MineSigned(benchmark::State& state) {
  const auto db = synthetic(static_cast<std::size_t>(state.range(0)), 40);
  std::mt19937_64 rng(3);
  const auto alpha = grab::testing::random_weights(rng, db.size(), -1.0, 1.0);
  const double theta = 0.02 * static_cast<double>(db.size());
  for (auto _ : state) {
    auto result = grab::mine_signed(db, alpha, theta, grab::DegreeCap{3});
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_MineSigned)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_TopK(benchmark::State& state) {
  const auto db = synthetic(2000, 60);
  std::mt19937_64 rng(5);
  const auto alpha = grab::testing::random_weights(rng, db.size(), -1.0, 1.0);
  for (auto _ : state) {
    auto result = grab::top_k_candidates(db, alpha, grab::DegreeCap{}, static_cast<std::size_t>(state.range(0)));
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_TopK)->Arg(1)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_Train(benchmark::State& state) {
  const auto db = synthetic(static_cast<std::size_t>(state.range(0)), 30);
  grab::GrabConfig config;
  config.k = grab::DegreeCap{3};
  for (auto _ : state) {
    auto result = grab::train(db, config);
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_Train)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
