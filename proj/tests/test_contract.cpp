#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "bribery/contract.hpp"
#include "bribery/error.hpp"
#include "fixtures.hpp"

using namespace bribery;

namespace {

ContractConfig p3_config(Rational magnate = 9, LogicalTime expiration = 100) {
  return {expiration, magnate, "double_spend", Rational(1, 2),
          PowerDistribution::create(fixtures::p3().powers)};
}

OracleReport report(bool success, std::initializer_list<std::pair<std::size_t, Protocol>> ran) {
  OracleReport r;
  r.attack_successful = success;
  for (auto [n, p] : ran) r.executed[NodeId{n}] = p;
  return r;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

}  // namespace

TEST(ContractInit, OpenWithHonestOrder) {
  const auto s = contract_init(p3_config());
  EXPECT_EQ(s.phase(), ContractPhase::kOpen);
  EXPECT_EQ(s.order(), Protocol::kHonest);
  EXPECT_TRUE(s.minions().empty());
  EXPECT_EQ(code_of([] { contract_init(p3_config(0)); }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of([] { contract_init(p3_config(9, 0)); }), ErrorCode::kInvalidConfig);
}

TEST(ContractCommit, OrdersAttackAboveThreshold) {
  const auto s0 = contract_init(p3_config());
  const auto s1 = contract_commit(s0, NodeId{0}, 9);
  EXPECT_EQ(s1.phase(), ContractPhase::kOpen);
  EXPECT_EQ(s1.order(), Protocol::kHonest);
  const auto s2 = contract_commit(s1, NodeId{1}, 9);
  EXPECT_EQ(s2.phase(), ContractPhase::kAttackOrdered);
  EXPECT_EQ(s2.order(), Protocol::kMalicious);
  EXPECT_EQ(s2.committed_power(), Rational(3, 4));
  // The inputs are untouched.
  EXPECT_TRUE(s0.minions().empty());
  EXPECT_EQ(s1.minions().size(), 1U);
}

TEST(ContractCommit, Errors) {
  const auto s1 = contract_commit(contract_init(p3_config()), NodeId{0}, 9);
  EXPECT_EQ(code_of([&] { contract_commit(s1, NodeId{0}, 9); }), ErrorCode::kDoubleCommit);
  EXPECT_EQ(code_of([&] { contract_commit(s1, NodeId{7}, 9); }), ErrorCode::kUnknownNode);
  const auto late = advance_clock(s1, 100);
  EXPECT_EQ(code_of([&] { contract_commit(late, NodeId{1}, 9); }),
            ErrorCode::kCommitAfterExpiration);
  const auto ordered = contract_commit(s1, NodeId{1}, 9);
  EXPECT_EQ(code_of([&] { contract_commit(ordered, NodeId{2}, 9); }),
            ErrorCode::kCommitAfterAttackOrdered);
}

TEST(ContractClock, Transitions) {
  const auto s = contract_init(p3_config());
  const auto s50 = advance_clock(s, 50);
  EXPECT_EQ(s50.now(), 50);
  EXPECT_EQ(advance_clock(s50, 50), s50);
  EXPECT_EQ(code_of([&] { advance_clock(s50, 10); }), ErrorCode::kTimeRegression);
}

TEST(ContractDistribute, RewardAfterSuccessfulAttack) {
  auto s = contract_commit(contract_init(p3_config()), NodeId{0}, 9);
  s = contract_commit(s, NodeId{1}, 9);
  const auto r = contract_distribute(
      s, NodeId{0}, report(true, {{0, Protocol::kMalicious}, {1, Protocol::kMalicious}}));
  EXPECT_EQ(r.outcome, Settlement::kRewarded);
  EXPECT_EQ(r.payout, Rational(63, 5));
}

TEST(ContractDistribute, RefundAfterExpiry) {
  auto s = contract_commit(contract_init(p3_config()), NodeId{0}, 9);
  const auto oracle = report(false, {{0, Protocol::kHonest}});
  // Not settleable before expiration.
  const auto early = contract_distribute(s, NodeId{0}, oracle);
  EXPECT_EQ(early.outcome, Settlement::kNotSettleable);
  EXPECT_EQ(early.state, s);
  s = advance_clock(s, 101);
  const auto r = contract_distribute(s, NodeId{0}, oracle);
  EXPECT_EQ(r.outcome, Settlement::kRefunded);
  EXPECT_EQ(r.payout, 9);
}

TEST(ContractDistribute, BurnWhenOrderIgnored) {
  auto s = contract_commit(contract_init(p3_config()), NodeId{0}, 9);
  s = contract_commit(s, NodeId{1}, 9);
  const auto oracle = report(false, {{0, Protocol::kHonest}, {1, Protocol::kMalicious}});
  const auto r = contract_distribute(s, NodeId{0}, oracle);
  EXPECT_EQ(r.outcome, Settlement::kBurned);
  EXPECT_EQ(r.payout, 0);
  EXPECT_TRUE(r.state.burned().contains(NodeId{0}));
}

TEST(ContractDistribute, Errors) {
  auto s = contract_commit(contract_init(p3_config()), NodeId{0}, 9);
  s = advance_clock(s, 101);
  const auto ok = report(false, {{0, Protocol::kHonest}});
  EXPECT_EQ(code_of([&] { contract_distribute(s, NodeId{1}, ok); }), ErrorCode::kUnknownNode);
  EXPECT_EQ(code_of([&] { contract_distribute(s, NodeId{0}, report(false, {})); }),
            ErrorCode::kInvalidOracle);
  EXPECT_EQ(code_of([&] {
              contract_distribute(s, NodeId{0}, report(true, {{0, Protocol::kMalicious}}));
            }),
            ErrorCode::kInvalidOracle);
  const auto done = contract_distribute(s, NodeId{0}, ok).state;
  EXPECT_EQ(code_of([&] { contract_distribute(done, NodeId{0}, ok); }),
            ErrorCode::kAlreadySettled);
}

TEST(Settlement, TwoRewardedMinions) {
  auto s = contract_commit(contract_init(p3_config()), NodeId{0}, 9);
  s = contract_commit(s, NodeId{1}, 9);
  const auto oracle = report(true, {{0, Protocol::kMalicious}, {1, Protocol::kMalicious}});
  s = contract_distribute(s, NodeId{0}, oracle).state;
  EXPECT_EQ(code_of([&] { settlement_summary(s); }), ErrorCode::kUnsettledMinions);
  s = contract_distribute(s, NodeId{1}, oracle).state;
  EXPECT_EQ(s.phase(), ContractPhase::kSettled);

  const auto sum = settlement_summary(s);
  EXPECT_EQ(sum.payouts.at(NodeId{0}) - 9, Rational(18, 5));
  EXPECT_EQ(sum.payouts.at(NodeId{1}) - 9, Rational(63, 20));
  EXPECT_EQ(sum.residual_to_magnate, Rational(9, 4));
  EXPECT_TRUE(sum.conserved);
}

TEST(Settlement, NoMinionsReturnsEverything) {
  const auto s = advance_clock(contract_init(p3_config()), 101);
  const auto sum = settlement_summary(s);
  EXPECT_EQ(sum.residual_to_magnate, 9);
  EXPECT_TRUE(sum.conserved);
}

TEST(Settlement, DefectorBurnAppears) {
  auto s = contract_commit(contract_init(p3_config()), NodeId{0}, 9);
  s = contract_commit(s, NodeId{1}, 9);
  const auto oracle = report(true, {{0, Protocol::kHonest}, {1, Protocol::kMalicious}});
  s = contract_distribute(s, NodeId{0}, oracle).state;
  s = contract_distribute(s, NodeId{1}, oracle).state;
  const auto sum = settlement_summary(s);
  EXPECT_EQ(sum.total_burned, 9);
  EXPECT_EQ(sum.burned_deposits.at(NodeId{0}), 9);
  EXPECT_TRUE(sum.conserved);
  const auto csv = settlement_to_csv(sum);
  EXPECT_NE(csv.find("0,burned,9"), std::string::npos) << csv;
}

TEST(Replay, FixtureLog) {
  std::ifstream in(fixtures::dir() / "p3_events.jsonl");
  ASSERT_TRUE(in);
  const auto r = replay_events(in);
  ASSERT_EQ(r.outcomes.size(), 2U);
  EXPECT_EQ(r.outcomes[0], Settlement::kRewarded);
  EXPECT_EQ(r.state.ledger().at(NodeId{0}), Rational(63, 5));
  EXPECT_TRUE(settlement_summary(r.state).conserved);
}

TEST(Replay, ErrorsCarryLineNumbers) {
  std::istringstream in(
      "{\"event\": \"init\", \"expiration\": 10, \"magnate_deposit\": \"1\", \"t\": \"1/2\", "
      "\"powers\": [\"2/5\", \"7/20\", \"1/4\"]}\n"
      "\n"
      "{\"event\": \"commit\", \"node\": 0, \"deposit\": \"1\"}\n"
      "{\"event\": \"commit\", \"node\": 0, \"deposit\": \"1\"}\n");
  try {
    replay_events(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDoubleCommit);
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
}

TEST(Replay, EventBeforeInit) {
  std::istringstream in("{\"event\": \"advance_clock\", \"to\": 3}\n");
  EXPECT_THROW(replay_events(in), Error);
}
