#include "gradarg/analysis.hpp"
#include "gradarg/corpus.hpp"
#include "gradarg/dynamics.hpp"

#include <benchmark/benchmark.h>

using namespace gradarg;

namespace {

Framework everything_on(const std::string& name) {
  const auto e = load_corpus(name);
  Framework f = e.framework;
  for (const auto& id : e.scenario.toggles) f = apply_edit(f, SetActive{id, true});
  return f;
}

void BM_ExactShapleyScenario1(benchmark::State& state) {
  const auto f = everything_on("frailty_scenario1");
  AttributionOptions opts;
  opts.method = AttributionMethod::ExactShapley;
  for (auto _ : state) benchmark::DoNotOptimize(relation_attribution(f, SemanticsKind::QuadraticEnergy, opts));
}
BENCHMARK(BM_ExactShapleyScenario1)->Unit(benchmark::kMillisecond);

void BM_SampledShapleyScenario2(benchmark::State& state) {
  const auto f = everything_on("frailty_scenario2");
  AttributionOptions opts;
  opts.method = AttributionMethod::PermutationSampling;
  opts.samples = static_cast<std::size_t>(state.range(0));
  opts.seed = 7;
  for (auto _ : state) benchmark::DoNotOptimize(relation_attribution(f, SemanticsKind::QuadraticEnergy, opts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampledShapleyScenario2)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

}  // namespace
