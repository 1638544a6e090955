#include <benchmark/benchmark.h>

#include <cmath>

#include "datamarket/equilibrium.hpp"
#include "datamarket/regulation.hpp"

namespace {

using namespace datamarket;

MarketParams sized_params(int k) {
  MarketParams p;
  p.K = k;
  p.alpha = 0.75 * k + 2.0;  // comfortably above the sharp threshold
  p.beta = 4.0 * k;
  for (int i = 0; i < k; ++i) {
    p.gamma.push_back(0.8 + 0.2 * (i % 2));
    p.cost.push_back(0.3 + 0.05 * i);
  }
  return p;
}

void BM_RevealedInfo(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const MarketParams p = sized_params(k);
  const NoiseProfile noise = NoiseProfile::uniform(k, 1.3);
  for (auto _ : state)
    benchmark::DoNotOptimize(revealed_info(p, noise, full_set(k)));
}
BENCHMARK(BM_RevealedInfo)->Arg(4)->Arg(8)->Arg(16);

void BM_UserBestResponse(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const MarketParams p = sized_params(k);
  const NoiseProfile noise = NoiseProfile::uniform(k, 2.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(user_best_response(p, noise, full_set(k)));
}
BENCHMARK(BM_UserBestResponse)->Arg(6)->Arg(10)->Arg(14);

void BM_VerifyCandidate(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const MarketParams p = sized_params(k);
  const NoiseProfile cand = candidate_profile(p, full_set(k));
  for (auto _ : state)
    benchmark::DoNotOptimize(verify_equilibrium(p, cand, full_set(k)));
}
BENCHMARK(BM_VerifyCandidate)->Arg(2)->Arg(4)->Arg(6);

void BM_Solve(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const MarketParams p = sized_params(k);
  for (auto _ : state) benchmark::DoNotOptimize(solve(p));
}
BENCHMARK(BM_Solve)->Arg(2)->Arg(4)->Arg(6);

void BM_SolveWithUniformMandate(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const MarketParams p = sized_params(k);
  const RegulationPolicy policy = RegulationPolicy::uniform(k, std::sqrt(20.0));
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_with_policy(p, policy));
}
BENCHMARK(BM_SolveWithUniformMandate)->Arg(2)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
