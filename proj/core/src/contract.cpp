#include "bribery/contract.hpp"

#include <sstream>

#include "bribery/error.hpp"
#include "bribery/json_io.hpp"

namespace bribery {

const char* to_string(Protocol p) { return p == Protocol::kHonest ? "P_h" : "P_m"; }

const char* to_string(ContractPhase phase) {
  switch (phase) {
    case ContractPhase::kOpen: return "open";
    case ContractPhase::kAttackOrdered: return "attack_ordered";
    case ContractPhase::kSettled: return "settled";
  }
  return "?";
}

const char* to_string(Settlement s) {
  switch (s) {
    case Settlement::kRewarded: return "rewarded";
    case Settlement::kRefunded: return "refunded";
    case Settlement::kBurned: return "burned";
    case Settlement::kNotSettleable: return "not_settleable";
  }
  return "?";
}

bool operator==(const ContractState& a, const ContractState& b) {
  const auto& ca = a.config_;
  const auto& cb = b.config_;
  return ca.expiration == cb.expiration && ca.magnate_deposit == cb.magnate_deposit &&
         ca.malicious_protocol_id == cb.malicious_protocol_id && ca.threshold == cb.threshold &&
         ca.powers.values() == cb.powers.values() && a.phase_ == b.phase_ &&
         a.order_ == b.order_ && a.now_ == b.now_ && a.committed_power_ == b.committed_power_ &&
         a.minions_ == b.minions_ && a.distributed_ == b.distributed_ && a.burned_ == b.burned_ &&
         a.ledger_ == b.ledger_;
}

ContractState contract_init(ContractConfig config) {
  if (config.magnate_deposit <= 0) {
    throw Error(ErrorCode::kInvalidConfig,
                "magnate deposit must be positive, got " + to_string(config.magnate_deposit));
  }
  if (config.expiration <= 0) {
    throw Error(ErrorCode::kInvalidConfig,
                "expiration must be positive, got " + std::to_string(config.expiration));
  }
  return ContractState(std::move(config));
}

ContractState contract_commit(const ContractState& state, NodeId node, const Rational& deposit) {
  if (node.value >= state.config_.powers.size()) {
    throw Error(ErrorCode::kUnknownNode, "node " + std::to_string(node.value) + " out of range");
  }
  if (state.phase_ != ContractPhase::kOpen) {
    throw Error(ErrorCode::kCommitAfterAttackOrdered,
                "commit by node " + std::to_string(node.value) + " after the attack order");
  }
  if (state.minions_.contains(node)) {
    throw Error(ErrorCode::kDoubleCommit,
                "node " + std::to_string(node.value) + " already committed");
  }
  if (state.now_ >= state.config_.expiration) {
    throw Error(ErrorCode::kCommitAfterExpiration,
                "commit at time " + std::to_string(state.now_) + " >= expiration " +
                    std::to_string(state.config_.expiration));
  }
  if (deposit < 0) {
    throw Error(ErrorCode::kInvalidConfig, "negative deposit " + to_string(deposit));
  }

  ContractState next = state;
  next.minions_.emplace(node, deposit);
  next.committed_power_ += state.config_.powers[node];
  if (next.committed_power_ > state.config_.threshold) {
    next.phase_ = ContractPhase::kAttackOrdered;
    next.order_ = Protocol::kMalicious;
  }
  return next;
}

ContractState advance_clock(const ContractState& state, LogicalTime to) {
  if (to < state.now_) {
    throw Error(ErrorCode::kTimeRegression,
                "clock cannot move from " + std::to_string(state.now_) + " to " + std::to_string(to));
  }
  ContractState next = state;
  next.now_ = to;
  return next;
}

DistributeResult contract_distribute(const ContractState& state, NodeId node,
                                     const OracleReport& oracle) {
  const auto minion = state.minions_.find(node);
  if (minion == state.minions_.end()) {
    throw Error(ErrorCode::kUnknownNode, "node " + std::to_string(node.value) + " is not a minion");
  }
  if (state.settled(node)) {
    throw Error(ErrorCode::kAlreadySettled,
                "node " + std::to_string(node.value) + " already settled");
  }
  const auto executed = oracle.executed.find(node);
  if (executed == oracle.executed.end()) {
    throw Error(ErrorCode::kInvalidOracle,
                "oracle report does not cover node " + std::to_string(node.value));
  }
  if (oracle.attack_successful && state.order_ != Protocol::kMalicious) {
    throw Error(ErrorCode::kInvalidOracle, "oracle reports success but no attack was ordered");
  }

  const Rational& deposit = minion->second;
  DistributeResult result{state, Settlement::kNotSettleable, 0};
  ContractState& next = result.state;

  if (oracle.attack_successful && executed->second == Protocol::kMalicious) {
    result.outcome = Settlement::kRewarded;
    result.payout = state.config_.powers[node] * state.config_.magnate_deposit + deposit;
  } else if (state.order_ == Protocol::kMalicious && executed->second == Protocol::kHonest) {
    result.outcome = Settlement::kBurned;
  } else if (!oracle.attack_successful && state.now_ > state.config_.expiration) {
    // Also covers an ordered attack that failed: minions that obeyed get
    // their deposit back.
    result.outcome = Settlement::kRefunded;
    result.payout = deposit;
  } else {
    return result;
  }

  if (result.outcome == Settlement::kBurned) {
    next.burned_.insert(node);
  } else {
    next.distributed_.insert(node);
  }
  next.ledger_[node] = result.payout;
  if (next.all_settled()) next.phase_ = ContractPhase::kSettled;
  return result;
}

SettlementSummary settlement_summary(const ContractState& state) {
  if (!state.all_settled()) {
    throw Error(ErrorCode::kUnsettledMinions,
                std::to_string(state.minions().size() - state.distributed().size() -
                               state.burned().size()) +
                    " minion(s) not settled");
  }
  const auto& config = state.config();
  SettlementSummary s;
  s.magnate_deposit = config.magnate_deposit;
  for (const auto& [node, deposit] : state.minions()) {
    s.total_deposits += deposit;
    if (state.burned().contains(node)) {
      s.burned_deposits[node] = deposit;
      s.total_burned += deposit;
      continue;
    }
    const Rational& paid = state.ledger().at(node);
    s.payouts[node] = paid;
    s.total_payouts += paid;
    s.bribe_paid += paid - deposit;  // v_i * D_m when rewarded, 0 when refunded
  }
  s.residual_to_magnate = config.magnate_deposit - s.bribe_paid;
  s.conserved = s.total_payouts + s.total_burned + s.residual_to_magnate ==
                config.magnate_deposit + s.total_deposits;
  return s;
}

nlohmann::json to_json(const ContractState& state) {
  const auto& c = state.config();
  nlohmann::json minions = nlohmann::json::array();
  for (const auto& [node, deposit] : state.minions()) {
    minions.push_back({{"node", node.value}, {"deposit", to_string(deposit)}});
  }
  nlohmann::json ledger = nlohmann::json::array();
  for (const auto& [node, paid] : state.ledger()) {
    ledger.push_back({{"node", node.value}, {"payout", to_string(paid)}});
  }
  auto ids = [](const std::set<NodeId>& s) {
    nlohmann::json a = nlohmann::json::array();
    for (auto n : s) a.push_back(n.value);
    return a;
  };
  return {
      {"expiration", c.expiration},
      {"magnate_deposit", to_string(c.magnate_deposit)},
      {"malicious_protocol", c.malicious_protocol_id},
      {"t", to_string(c.threshold)},
      {"powers", rationals_to_json(c.powers.values())},
      {"phase", to_string(state.phase())},
      {"order", to_string(state.order())},
      {"now", state.now()},
      {"committed_power", to_string(state.committed_power())},
      {"minions", minions},
      {"distributed", ids(state.distributed())},
      {"burned", ids(state.burned())},
      {"ledger", ledger},
  };
}

nlohmann::json to_json(const SettlementSummary& s) {
  auto by_node = [](const std::map<NodeId, Rational>& m) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& [node, v] : m) a.push_back({{"node", node.value}, {"amount", to_string(v)}});
    return a;
  };
  return {
      {"payouts", by_node(s.payouts)},
      {"burned", by_node(s.burned_deposits)},
      {"total_payouts", to_string(s.total_payouts)},
      {"total_burned", to_string(s.total_burned)},
      {"bribe_paid", to_string(s.bribe_paid)},
      {"residual_to_magnate", to_string(s.residual_to_magnate)},
      {"total_deposits", to_string(s.total_deposits)},
      {"magnate_deposit", to_string(s.magnate_deposit)},
      {"conserved", s.conserved},
  };
}

std::string settlement_to_csv(const SettlementSummary& s) {
  std::ostringstream os;
  os << "node,outcome,amount\n";
  for (const auto& [node, v] : s.payouts) os << node.value << ",paid," << to_string(v) << '\n';
  for (const auto& [node, v] : s.burned_deposits) {
    os << node.value << ",burned," << to_string(v) << '\n';
  }
  os << "magnate,residual," << to_string(s.residual_to_magnate) << '\n';
  return os.str();
}

namespace {

Protocol protocol_from_string(const std::string& s) {
  if (s == "P_h") return Protocol::kHonest;
  if (s == "P_m") return Protocol::kMalicious;
  throw Error(ErrorCode::kParse, "unknown protocol \"" + s + "\"");
}

OracleReport oracle_from_json(const nlohmann::json& j) {
  OracleReport report;
  report.attack_successful = require_field(j, "attack_successful").get<bool>();
  for (const auto& entry : require_field(j, "executed")) {
    report.executed[NodeId{require_field(entry, "node").get<std::size_t>()}] =
        protocol_from_string(require_field(entry, "protocol").get<std::string>());
  }
  return report;
}

}  // namespace

ReplayResult replay_events(std::istream& in) {
  std::optional<ContractState> state;
  std::optional<OracleReport> oracle;
  std::vector<Settlement> outcomes;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const auto event = require_field(j, "event").get<std::string>();
      if (event == "init") {
        if (state) throw Error(ErrorCode::kParse, "second init event");
        state = contract_init(ContractConfig{
            require_field(j, "expiration").get<LogicalTime>(),
            rational_from_json(require_field(j, "magnate_deposit")),
            j.value("malicious_protocol", std::string("double_spend")),
            rational_from_json(require_field(j, "t")),
            PowerDistribution::create(rationals_from_json(require_field(j, "powers")))});
        continue;
      }
      if (!state) throw Error(ErrorCode::kParse, "event \"" + event + "\" before init");
      if (event == "commit") {
        state = contract_commit(*state, NodeId{require_field(j, "node").get<std::size_t>()},
                                rational_from_json(require_field(j, "deposit")));
      } else if (event == "advance_clock") {
        state = advance_clock(*state, require_field(j, "to").get<LogicalTime>());
      } else if (event == "oracle_report") {
        oracle = oracle_from_json(j);
      } else if (event == "distribute") {
        if (!oracle) throw Error(ErrorCode::kInvalidOracle, "distribute before any oracle_report");
        auto result =
            contract_distribute(*state, NodeId{require_field(j, "node").get<std::size_t>()}, *oracle);
        outcomes.push_back(result.outcome);
        state = std::move(result.state);
      } else {
        throw Error(ErrorCode::kParse, "unknown event \"" + event + "\"");
      }
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!state) throw Error(ErrorCode::kParse, "event log has no init event");
  return ReplayResult{std::move(*state), std::move(outcomes)};
}

}  // namespace bribery
