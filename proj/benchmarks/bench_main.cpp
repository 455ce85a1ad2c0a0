#include <benchmark/benchmark.h>

#include "modpoly/bounds.hpp"
#include "modpoly/modfunc.hpp"
#include "modpoly/phi.hpp"

using namespace modpoly;
using modfunc::PrecisionBudget;
using modfunc::TauPoint;

static void BM_EvalJ(benchmark::State& state) {
  const auto budget = PrecisionBudget::for_target_bits(state.range(0));
  const TauPoint tau = TauPoint::from_doubles(0.21, 1.07, budget.working_bits());
  for (auto _ : state) benchmark::DoNotOptimize(modfunc::eval_j(tau, budget));
}
BENCHMARK(BM_EvalJ)->Arg(64)->Arg(256)->Arg(1024)->Arg(4096);

static void BM_Reduce(benchmark::State& state) {
  const auto budget = PrecisionBudget::for_target_bits(128);
  const TauPoint tau = TauPoint::from_doubles(17.3, 1e-6, budget.working_bits());
  for (auto _ : state)
    benchmark::DoNotOptimize(
        modfunc::reduce_to_fundamental_domain(tau, budget, modfunc::BoundaryPolicy::Tolerant));
}
BENCHMARK(BM_Reduce);

static void BM_TheoremConstant(benchmark::State& state) {
  const bounds::BoundParams params;
  const auto budget = PrecisionBudget::for_target_bits(64);
  for (auto _ : state) benchmark::DoNotOptimize(bounds::theorem1_constant(params, budget));
}
BENCHMARK(BM_TheoremConstant)->Unit(benchmark::kMillisecond);

static void BM_ComputePhi(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(phi::compute_phi(static_cast<std::uint64_t>(state.range(0))));
}
BENCHMARK(BM_ComputePhi)->Arg(5)->Arg(11)->Arg(17)->Arg(23)->Unit(benchmark::kMillisecond);

static void BM_ProofChain(benchmark::State& state) {
  const auto budget = PrecisionBudget::for_target_bits(128);
  const TauPoint tau = TauPoint::from_doubles(0.1, 1.3, budget.working_bits());
  for (auto _ : state)
    benchmark::DoNotOptimize(
        bounds::verify_proof_chain(static_cast<std::uint64_t>(state.range(0)), tau, budget, false));
}
BENCHMARK(BM_ProofChain)->Arg(12)->Arg(60)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
