#include <benchmark/benchmark.h>

#include "binmargin/analysis.hpp"
#include "binmargin/entropy.hpp"
#include "binmargin/exact_oracle.hpp"
#include "binmargin/mcmc.hpp"

namespace bm = binmargin;

namespace {

bm::BlockParams family(std::int64_t n) { return {n, 0.5, 1.2, 0.5}; }

void BM_SolveTypical(benchmark::State& state) {
  const auto mp = bm::build_block_margins(family(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bm::solve_typical(mp).entropy);
}
BENCHMARK(BM_SolveTypical)->Arg(16)->Arg(54)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_SolveBlock(benchmark::State& state) {
  const auto p = family(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bm::solve_block(p).z_br);
}
BENCHMARK(BM_SolveBlock)->Arg(100)->Arg(10000)->Arg(1000000);

void BM_CountTables(benchmark::State& state) {
  const auto mp = bm::build_block_margins(family(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bm::count_tables(mp).log_count);
}
BENCHMARK(BM_CountTables)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_ExactDraw(benchmark::State& state) {
  bm::ExactSampler sampler(bm::build_block_margins(family(state.range(0))));
  bm::Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sampler.draw(rng).rows());
}
BENCHMARK(BM_ExactDraw)->Arg(4)->Arg(8);

void BM_SwapStep(benchmark::State& state) {
  auto table = bm::initial_table(bm::build_block_margins(family(state.range(0))));
  bm::Rng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(bm::swap_chain_step(table, rng));
}
BENCHMARK(BM_SwapStep)->Arg(16)->Arg(54);

void BM_RejectionDraw(benchmark::State& state) {
  const bm::MarginPair mp(std::vector<std::int64_t>{2, 1, 1, 1}, std::vector<std::int64_t>{2, 1, 1, 1});
  const auto t = bm::solve_typical(mp);
  bm::Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(bm::bernoulli_rejection_sample(t, mp, rng, 1'000'000).tries);
}
BENCHMARK(BM_RejectionDraw);

}  // namespace

BENCHMARK_MAIN();
