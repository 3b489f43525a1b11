#include <benchmark/benchmark.h>

#include "consel/consistency.hpp"
#include "consel/policy.hpp"
#include "consel/reward.hpp"
#include "consel/rng.hpp"
#include "consel/selection.hpp"
#include "consel/toy_task.hpp"
#include "consel/trainer.hpp"

using namespace consel;

static void BM_ScoreGroups(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  ToyTaskSpec task;
  const auto policy = ToyPolicy::initial(task, 1.0, 1);
  const auto queries = gen_task(task, 64, 2);
  std::vector<ResponseGroup> groups;
  for (std::size_t i = 0; i < queries.size(); ++i) groups.push_back(sample_responses(policy, queries[i], k, 1.0, i));
  const SelectionConfig cfg;
  for (auto _ : state)
    for (const auto& g : groups) benchmark::DoNotOptimize(score_group(g, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(groups.size()));
}
BENCHMARK(BM_ScoreGroups)->Arg(8)->Arg(64);

static void BM_SampleResponses(benchmark::State& state) {
  ToyTaskSpec task;
  task.modulus = 20;
  task.answer_length = 2;
  const auto policy = ToyPolicy::initial(task, 1.0, 1);
  const auto q = gen_task(task, 1, 2)[0];
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_responses(policy, q, 8, 1.0, seed++));
}
BENCHMARK(BM_SampleResponses);

static void BM_LossGradient(benchmark::State& state) {
  ToyTaskSpec task;
  const auto policy = ToyPolicy::initial(task, 1.0, 1);
  const auto queries = gen_task(task, 32, 2);
  std::vector<ResponseGroup> groups;
  std::vector<BatchItem> batch;
  for (std::size_t i = 0; i < queries.size(); ++i) groups.push_back(sample_responses(policy, queries[i], 8, 1.0, i));
  for (std::size_t i = 0; i < queries.size(); ++i)
    batch.push_back({&queries[i], &groups[i], advantages(groups[i].rewards(), AdvantageEstimator::grpo)});
  for (auto _ : state) benchmark::DoNotOptimize(rlvr_loss_and_grad(policy, batch));
}
BENCHMARK(BM_LossGradient);

static void BM_KCenter(benchmark::State& state) {
  Rng rng(3);
  VectorMap points;
  for (int i = 0; i < state.range(0); ++i) {
    std::vector<double> v(16);
    for (double& x : v) x = rng.uniform();
    points["q" + std::to_string(10000 + i)] = v;
  }
  for (auto _ : state) benchmark::DoNotOptimize(select_kcenter(points, 0.3));
}
BENCHMARK(BM_KCenter)->Arg(200)->Arg(2000);
BENCHMARK_MAIN();
