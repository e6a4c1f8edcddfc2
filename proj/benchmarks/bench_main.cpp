#include <benchmark/benchmark.h>

#include "risklab/analytic_perceptron.hpp"
#include "risklab/datasets.hpp"
#include "risklab/gardner_replica.hpp"
#include "risklab/mcmc.hpp"
#include "risklab/predictors.hpp"

using namespace risklab;

static void BM_BoltzmannRiskExact(benchmark::State& state) {
    const auto spec = GaussianClassSpec::make(static_cast<int>(state.range(0)), 2.0);
    for (auto _ : state) benchmark::DoNotOptimize(boltzmann_risk_exact(50.0, spec));
}
BENCHMARK(BM_BoltzmannRiskExact)->Arg(20)->Arg(200);

static void BM_GardnerSaddle(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(solve_saddle(static_cast<double>(state.range(0))));
}
BENCHMARK(BM_GardnerSaddle)->Arg(10)->Arg(200);

static void BM_EmpiricalRiskMlp(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto data = gen_gaussian_pair(GaussianClassSpec::make(20, 2.0), n, 1);
    const auto spec = PredictorSpec::mlp(20, {16, 2});
    const auto w = random_weights(spec, 1.0, 2);
    for (auto _ : state) benchmark::DoNotOptimize(empirical_risk(spec, w, data));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_EmpiricalRiskMlp)->Arg(1000)->Arg(10000);

static void BM_MetropolisStepPerceptron(benchmark::State& state) {
    const auto gspec = GaussianClassSpec::make(20, 2.0);
    const auto pspec = PredictorSpec::sphere_linear(20);
    const auto target = exact_perceptron_target(gspec);
    ChainConfig cfg;
    cfg.beta = 10.0;
    auto rng = Rng::stream(3, {});
    ChainState chain;
    chain.w = random_weights(pspec, 1.0, rng);
    chain.current_acceptance_risk = target.acceptance(chain.w);
    for (auto _ : state) metropolis_step(chain, cfg, target, rng);
}
BENCHMARK(BM_MetropolisStepPerceptron);
BENCHMARK_MAIN();
