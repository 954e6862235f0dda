#include "gradarg/corpus.hpp"
#include "gradarg/dynamics.hpp"
#include "gradarg/semantics.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace gradarg;

namespace {

Framework everything_on(const CorpusEntry& e) {
  Framework f = e.framework;
  for (const auto& id : e.scenario.toggles) f = apply_edit(f, SetActive{id, true});
  return f;
}

void BM_EvaluateScenario2(benchmark::State& state) {
  const auto f = everything_on(load_corpus("frailty_scenario2"));
  const auto kind = static_cast<SemanticsKind>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(f, kind));
}
BENCHMARK(BM_EvaluateScenario2)->Arg(0)->Arg(1)->Arg(2);

void BM_CompiledScenario2(benchmark::State& state) {
  const auto e = load_corpus("frailty_scenario2");
  const CompiledGraph g(e.framework);
  std::vector<double> out(g.size());
  for (auto _ : state) {
    g.evaluate(SemanticsKind::QuadraticEnergy, {}, g.base_scores(), {}, {}, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_CompiledScenario2);

}  // namespace
