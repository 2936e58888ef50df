#include <benchmark/benchmark.h>

#include "robustrl/adversarial_sampler.hpp"
#include "robustrl/envs.hpp"
#include "robustrl/robust_dp.hpp"
#include "robustrl/uncertainty.hpp"

namespace {

void BM_WorstCaseKl(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  robustrl::Rng rng(1);
  std::vector<double> q(n), v(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    q[i] = 0.1 + robustrl::uniform01(rng);
    total += q[i];
    v[i] = robustrl::uniform01(rng) * 10.0;
  }
  for (double& x : q) x /= total;
  for (auto _ : state) benchmark::DoNotOptimize(robustrl::worst_case_expectation_kl(q, v, 0.1));
}
BENCHMARK(BM_WorstCaseKl)->Arg(4)->Arg(50)->Arg(500);

void BM_RobustValueIteration(benchmark::State& state) {
  const auto mdp = robustrl::make_garnet({.n_states = static_cast<int>(state.range(0)),
                                          .n_actions = 4, .branching = 5, .discount = 0.95,
                                          .seed = 3});
  const auto spec = robustrl::UncertaintySpec::uniform(robustrl::DivergenceKind::kl,
                                                       mdp.n_states(), 4, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(robustrl::robust_value_iteration(mdp, spec, 1e-8));
}
BENCHMARK(BM_RobustValueIteration)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_WrappedStep(benchmark::State& state) {
  const auto env = robustrl::WindyGridworld::standard();
  const robustrl::SamplerConfig cfg{static_cast<int>(state.range(0)), 0.5, 0};
  const robustrl::ValueFn value = [](int s) { return 0.01 * s; };
  robustrl::Rng rng(2);
  int s = env.initial(rng);
  for (auto _ : state) {
    const auto t = robustrl::wrapped_step(env, s, 1, value, cfg, rng);
    s = t.terminal ? env.initial(rng) : t.next_state;
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_WrappedStep)->Arg(1)->Arg(10)->Arg(50);

}  // namespace
BENCHMARK_MAIN();
