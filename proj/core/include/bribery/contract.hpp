#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bribery/game.hpp"

namespace bribery {

using LogicalTime = std::int64_t;

enum class Protocol { kHonest, kMalicious };  // P_h, P_m

const char* to_string(Protocol p);  // "P_h" / "P_m"

struct ContractConfig {
  LogicalTime expiration = 0;  // T_e
  Rational magnate_deposit;    // D_m
  std::string malicious_protocol_id;
  Rational threshold;
  PowerDistribution powers;
};

enum class ContractPhase { kOpen, kAttackOrdered, kSettled };

const char* to_string(ContractPhase phase);

// Perfect oracle output: whether the attack on the target chain succeeded and
// which protocol each committed minion actually executed.
struct OracleReport {
  bool attack_successful = false;
  std::map<NodeId, Protocol> executed;
};

// Immutable snapshot of the bribery contract. Transitions are free functions
// that return a new state and leave the input untouched.
class ContractState {
 public:
  const ContractConfig& config() const { return config_; }
  ContractPhase phase() const { return phase_; }
  Protocol order() const { return order_; }
  LogicalTime now() const { return now_; }
  const std::map<NodeId, Rational>& minions() const { return minions_; }
  const std::set<NodeId>& distributed() const { return distributed_; }
  const std::set<NodeId>& burned() const { return burned_; }
  const std::map<NodeId, Rational>& ledger() const { return ledger_; }
  const Rational& committed_power() const { return committed_power_; }

  bool settled(NodeId node) const { return distributed_.contains(node) || burned_.contains(node); }
  bool all_settled() const { return distributed_.size() + burned_.size() == minions_.size(); }

  friend bool operator==(const ContractState& a, const ContractState& b);

 private:
  explicit ContractState(ContractConfig config) : config_(std::move(config)) {}

  friend ContractState contract_init(ContractConfig config);
  friend ContractState contract_commit(const ContractState&, NodeId, const Rational&);
  friend ContractState advance_clock(const ContractState&, LogicalTime);
  friend struct DistributeResult contract_distribute(const ContractState&, NodeId,
                                                     const OracleReport&);

  ContractConfig config_;
  ContractPhase phase_ = ContractPhase::kOpen;
  Protocol order_ = Protocol::kHonest;
  LogicalTime now_ = 0;
  Rational committed_power_;
  std::map<NodeId, Rational> minions_;  // node -> deposit D_i
  std::set<NodeId> distributed_;
  std::set<NodeId> burned_;
  std::map<NodeId, Rational> ledger_;   // node -> payout
};

// Throws kInvalidConfig unless D_m > 0 and T_e > 0.
ContractState contract_init(ContractConfig config);

// Adds a minion and its deposit; orders P_m once committed power strictly
// exceeds t. Commits are rejected after expiration, after the attack order,
// and for nodes already committed.
ContractState contract_commit(const ContractState& state, NodeId node, const Rational& deposit);

ContractState advance_clock(const ContractState& state, LogicalTime to);

enum class Settlement {
  kRewarded,       // attack succeeded and the minion ran P_m: v_i * D_m + D_i
  kRefunded,       // no successful attack and the contract expired: D_i
  kBurned,         // P_m was ordered but the minion ran P_h: 0, deposit burned
  kNotSettleable,  // nothing applies yet; state unchanged
};

const char* to_string(Settlement s);

struct DistributeResult {
  ContractState state;
  Settlement outcome = Settlement::kNotSettleable;
  Rational payout;
};

// Throws kUnknownNode for a non-minion, kAlreadySettled for a second
// settlement and kInvalidOracle when the report omits the node or claims
// success without an attack order.
DistributeResult contract_distribute(const ContractState& state, NodeId node,
                                     const OracleReport& oracle);

struct SettlementSummary {
  std::map<NodeId, Rational> payouts;
  std::map<NodeId, Rational> burned_deposits;
  Rational total_payouts;
  Rational total_burned;
  Rational bribe_paid;            // sum of v_i * D_m over rewarded minions
  Rational residual_to_magnate;   // unclaimed share of D_m
  Rational total_deposits;        // sum of committed D_i
  Rational magnate_deposit;
  bool conserved = false;         // payouts + burned + residual == D_m + deposits
};

// Throws kUnsettledMinions while any committed minion is unsettled.
SettlementSummary settlement_summary(const ContractState& state);

nlohmann::json to_json(const ContractState& state);
nlohmann::json to_json(const SettlementSummary& summary);
std::string settlement_to_csv(const SettlementSummary& summary);

// Event log replay. One JSON object per line with an "event" field among
// init, commit, advance_clock, oracle_report, distribute. Blank lines are
// skipped. Errors carry the 1-based line number.
struct ReplayResult {
  ContractState state;
  std::vector<Settlement> outcomes;  // one per distribute event
};

ReplayResult replay_events(std::istream& in);

}  // namespace bribery
