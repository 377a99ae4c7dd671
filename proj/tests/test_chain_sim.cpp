#include <gtest/gtest.h>

#include "bribery/chain_sim.hpp"
#include "bribery/error.hpp"
#include "bribery/rng.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace bribery;

namespace {

SimConfig p3_sim(std::vector<NodeId> minions, Consensus c, std::int64_t k, std::uint64_t seed = 1) {
  SimConfig cfg{PowerDistribution::create(fixtures::p3().powers), std::move(minions), c, k};
  cfg.seed = seed;
  return cfg;
}

SimConfig uniform_sim(std::size_t n, std::size_t minions, Consensus c, std::int64_t k) {
  std::vector<Rational> powers(n, Rational(1, static_cast<int>(n)));
  std::vector<NodeId> m;
  for (std::size_t i = 0; i < minions; ++i) m.push_back(NodeId{i});
  return SimConfig{PowerDistribution::create(powers), m, c, k};
}

}  // namespace

TEST(ChainState, GenesisAndForkChoice) {
  ChainState c(2);
  EXPECT_EQ(c.block(c.genesis()).height, 0);
  EXPECT_FALSE(c.block(c.genesis()).parent);
  const auto a = c.append(c.genesis(), NodeId{0}, 0, true, 0);
  const auto b = c.append(c.genesis(), NodeId{1}, 1, false, 0);
  EXPECT_EQ(c.canonical_tip(), a);  // first seen wins the tie
  const auto b2 = c.append(b, NodeId{1}, 2, false, 0);
  EXPECT_EQ(c.canonical_tip(), b2);
  EXPECT_TRUE(c.is_ancestor(b, b2));
  EXPECT_FALSE(c.is_ancestor(a, b2));
  EXPECT_EQ(c.chain_to(b2), (std::vector<BlockId>{c.genesis(), b, b2}));
  EXPECT_TRUE(c.well_formed());
}

TEST(SimConfig, Validation) {
  auto cfg = p3_sim({NodeId{0}}, Consensus::kProofOfWork, 0);
  EXPECT_THROW(validate_sim_config(cfg), Error);
  cfg.confirmations = 1;
  cfg.horizon_slots = 0;
  EXPECT_THROW(validate_sim_config(cfg), Error);
  cfg.horizon_slots = 10;
  cfg.minions = {NodeId{0}, NodeId{0}};
  EXPECT_THROW(validate_sim_config(cfg), Error);
  cfg.minions = {NodeId{5}};
  EXPECT_THROW(validate_sim_config(cfg), Error);
}

TEST(Pow, MajorityCoalitionUsuallySucceeds) {
  int wins = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    wins += run_attack(p3_sim({NodeId{0}, NodeId{1}}, Consensus::kProofOfWork, 3, s)).success;
  }
  EXPECT_GE(wins, 48);
}

TEST(Pow, NoMinionsNeverSucceeds) {
  const auto r = run_attack(p3_sim({}, Consensus::kProofOfWork, 3));
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.resolution, "no_minions");
  EXPECT_EQ(r.fork_length, 0);
}

TEST(Pow, SuccessfulForkReplacesTarget) {
  auto sim = simulate(p3_sim({NodeId{0}, NodeId{1}}, Consensus::kProofOfWork, 3, 4), true);
  ASSERT_TRUE(sim.result.success);
  const auto& chain = sim.chain;
  ASSERT_TRUE(chain.target_block());
  EXPECT_FALSE(chain.is_ancestor(*chain.target_block(), chain.canonical_tip()));
  EXPECT_GT(sim.result.fork_length, 3 + 1);
  // Everything the honest side built from the target onwards is orphaned.
  EXPECT_GE(sim.result.reverted_blocks, 4);
  EXPECT_LT(sim.result.reverted_blocks, sim.result.fork_length);
  EXPECT_TRUE(chain.well_formed());
  EXPECT_EQ(sim.trace.size(), static_cast<std::size_t>(sim.result.slots_elapsed));
  EXPECT_NE(trace_to_csv(sim.trace).find("success"), std::string::npos);
}

TEST(Pow, SameSeedSameResult) {
  const auto cfg = p3_sim({NodeId{2}}, Consensus::kProofOfWork, 2, 77);
  EXPECT_EQ(run_attack(cfg), run_attack(cfg));
}

TEST(Pow, MinorityRateTracksClosedForm) {
  // 2/5 of the power against a 4-block deficit (k = 2): (2/3)^4 ~ 0.198.
  auto cfg = uniform_sim(5, 2, Consensus::kProofOfWork, 2);
  cfg.seed = 5;
  const auto batch = simulate_batch(cfg, 4000);
  const double rate = static_cast<double>(batch.successes) / batch.runs;
  const double expected = oracle::catch_up(0.4, 4);
  const double sd = std::sqrt(expected * (1 - expected) / batch.runs);
  EXPECT_NEAR(rate, expected, 4 * sd);
}

TEST(Pow, FiniteHorizonOracleBoundsShortRuns) {
  // With a 40 slot horizon the race is truncated; the finite-horizon oracle
  // must not be beaten by more than sampling noise.
  auto cfg = uniform_sim(5, 2, Consensus::kProofOfWork, 2);
  cfg.horizon_slots = 40;
  cfg.seed = 8;
  const auto batch = simulate_batch(cfg, 3000);
  const double rate = static_cast<double>(batch.successes) / batch.runs;
  const double upper = oracle::catch_up_within(0.4, 4, 40);
  EXPECT_LE(rate, upper + 4 * std::sqrt(upper * (1 - upper) / batch.runs));
  EXPECT_LT(upper, oracle::catch_up(0.4, 4));
}

TEST(Pos, SuccessfulAttackCensorsProofs) {
  int successes = 0;
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto r = run_attack(p3_sim({NodeId{0}, NodeId{1}}, Consensus::kProofOfStake, 3, s));
    if (!r.success) continue;
    ++successes;
    EXPECT_EQ(r.slashing_proofs_included, 0);
    EXPECT_GT(r.double_signs[0], 0);
    EXPECT_GT(r.double_signs[1], 0);
    EXPECT_EQ(r.double_signs[2], 0);
    const auto audit = pos_slashing_audit(r);
    EXPECT_TRUE(audit.censorship_held);
    EXPECT_TRUE(audit.slashable_minions.empty());
  }
  EXPECT_GT(successes, 20);
}

TEST(Pos, NoMinionsNoOffenses) {
  const auto r = run_attack(p3_sim({}, Consensus::kProofOfStake, 3));
  const auto audit = pos_slashing_audit(r);
  EXPECT_EQ(audit.offenses, 0);
  EXPECT_EQ(audit.proofs_included, 0);
}

TEST(Pos, FailedAttackLeavesMinionsSlashable) {
  auto cfg = p3_sim({NodeId{2}}, Consensus::kProofOfStake, 3, 12);
  cfg.horizon_slots = 400;
  const auto r = run_attack(cfg);
  EXPECT_FALSE(r.success);  // 1/4 of the stake can never finalize
  const auto audit = pos_slashing_audit(r);
  EXPECT_GE(audit.proofs_included, 0);
  if (audit.offenses > 0) {
    ASSERT_EQ(audit.slashable_minions.size(), 1U);
    EXPECT_EQ(audit.slashable_minions[0], NodeId{2});
  }
}

TEST(Pos, AuditRejectsPow) {
  const auto r = run_attack(p3_sim({NodeId{0}}, Consensus::kProofOfWork, 1));
  try {
    pos_slashing_audit(r);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kWrongConsensus);
  }
}

TEST(DeriveParams, AddsPowerShareOfPool) {
  const auto cfg = p3_sim({NodeId{0}, NodeId{1}}, Consensus::kProofOfWork, 3);
  const std::vector<Rational> rh(3, 2), rd(3, -1), rdp(3, -3);
  const auto p = derive_game_params(cfg, rh, rd, rdp, 9);
  EXPECT_EQ(p.reward_malicious,
            (std::vector<Rational>{Rational(28, 5), Rational(103, 20), Rational(17, 4)}));
  try {
    derive_game_params(cfg, rh, rd, rdp, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidParams);
  }
}

TEST(DeriveParams, UniformPowers) {
  auto cfg = uniform_sim(3, 2, Consensus::kProofOfWork, 3);
  const std::vector<Rational> rh{1, 2, 3}, rd(3, -1), rdp(3, -1);
  const auto p = derive_game_params(cfg, rh, rd, rdp, 3);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(p.reward_malicious[i], rh[i] + 1);
}

TEST(DeriveParams, FundingWarning) {
  auto cfg = uniform_sim(3, 2, Consensus::kProofOfWork, 3);
  cfg.double_spend_value = 5;
  EXPECT_FALSE(bribe_funding_warning(cfg, 3));
  EXPECT_TRUE(bribe_funding_warning(cfg, 6));
}
