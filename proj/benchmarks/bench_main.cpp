#include <benchmark/benchmark.h>

#include "bribery/chain_sim.hpp"
#include "bribery/contract.hpp"
#include "bribery/equilibrium.hpp"
#include "bribery/rng.hpp"

using namespace bribery;

namespace {

GameParams random_params(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return generate_params(rng, n);
}

void BM_StrictNashAllCommit(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = random_params(n, 1);
  const auto profile = StrategyProfile::all(GameVariant::kContract, n, Strategy::kCommitToContract);
  for (auto _ : state) benchmark::DoNotOptimize(is_strict_nash(p, profile));
}
BENCHMARK(BM_StrictNashAllCommit)->DenseRange(3, 8);

void BM_DeviationFloorScan(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = random_params(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(check_deviation_never_hurts(p));
}
BENCHMARK(BM_DeviationFloorScan)->DenseRange(3, 8);

void BM_WeakDominance(benchmark::State& state) {
  const auto p = random_params(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(check_weak_dominance(p));
}
BENCHMARK(BM_WeakDominance)->Arg(4)->Arg(8)->Arg(12);

void BM_ContractLifecycle(benchmark::State& state) {
  const auto p = random_params(8, 4);
  const ContractConfig cfg{100, 10, "double_spend", p.threshold,
                           PowerDistribution::create(p.powers)};
  for (auto _ : state) {
    auto s = contract_init(cfg);
    for (std::size_t i = 0; i < p.size() && s.phase() == ContractPhase::kOpen; ++i) {
      s = contract_commit(s, NodeId{i}, 5);
    }
    OracleReport oracle{true, {}};
    for (const auto& [node, d] : s.minions()) oracle.executed[node] = Protocol::kMalicious;
    std::vector<NodeId> nodes;
    for (const auto& [node, d] : s.minions()) nodes.push_back(node);
    for (auto node : nodes) s = contract_distribute(s, node, oracle).state;
    benchmark::DoNotOptimize(settlement_summary(s));
  }
}
BENCHMARK(BM_ContractLifecycle);

void BM_PowAttack(benchmark::State& state) {
  SimConfig cfg{PowerDistribution::create({Rational(2, 5), Rational(7, 20), Rational(1, 4)}),
                {NodeId{0}, NodeId{1}},
                Consensus::kProofOfWork,
                state.range(0),
                10000};
  std::uint64_t seed = 0;
  for (auto _ : state) {
    cfg.seed = seed++;
    benchmark::DoNotOptimize(run_attack(cfg));
  }
}
BENCHMARK(BM_PowAttack)->Arg(1)->Arg(6)->Arg(24);

void BM_PosAttack(benchmark::State& state) {
  SimConfig cfg{PowerDistribution::create({Rational(2, 5), Rational(7, 20), Rational(1, 4)}),
                {NodeId{0}, NodeId{1}},
                Consensus::kProofOfStake,
                state.range(0),
                10000};
  std::uint64_t seed = 0;
  for (auto _ : state) {
    cfg.seed = seed++;
    benchmark::DoNotOptimize(run_attack(cfg));
  }
}
BENCHMARK(BM_PosAttack)->Arg(1)->Arg(6);

}  // namespace

BENCHMARK_MAIN();
