#include <benchmark/benchmark.h>

#include <random>

#include "rescore/data.hpp"
#include "rescore/features.hpp"
#include "rescore/joint.hpp"
#include "rescore/pipeline.hpp"

namespace {

using namespace rescore;

std::vector<EpochSeries> nights(int count, int epochs) {
  SimConfig c;
  c.n_participants = count;
  c.mean_night_epochs = epochs;
  c.seed = 1;
  return simulate(c);
}

void BM_FeatureFrame(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u;
  std::vector<double> s(static_cast<std::size_t>(state.range(0)));
  for (auto& v : s) v = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(feature_frame(s, 0.5));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FeatureFrame)->Arg(960)->Arg(10000);

void BM_WindowGlmFit(benchmark::State& state) {
  const auto data = nights(static_cast<int>(state.range(0)), 960);
  for (auto _ : state) benchmark::DoNotOptimize(fit_window_glm(data, {-5, 2}));
}
BENCHMARK(BM_WindowGlmFit)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_JointGradient(benchmark::State& state) {
  const auto data = nights(4, static_cast<int>(state.range(0)));
  PipelineRecipe r;
  r.method = Method::kGlmContinuous;
  const auto seq = fit_pipeline(r, data);
  const auto model = init_joint(r.window, seq.window_model, *seq.rescore_model);
  for (auto _ : state) benchmark::DoNotOptimize(loss_and_gradient(model, data));
}
BENCHMARK(BM_JointGradient)->Arg(960)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
