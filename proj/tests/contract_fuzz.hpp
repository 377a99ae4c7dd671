#pragma once

// Random event sequences against the bribery contract, shared by the property
// tests and the acceptance suite.

#include <vector>

#include "bribery/contract.hpp"
#include "bribery/equilibrium.hpp"
#include "bribery/error.hpp"
#include "bribery/rng.hpp"

namespace fuzz {

using namespace bribery;

struct Run {
  ContractState final_state;
  bool attack_ordered = false;
  bool order_reverted = false;   // P_m seen and later P_h: must never happen
  int rejected_events = 0;       // transitions that threw, state kept
  std::vector<Settlement> outcomes;
};

inline Run random_run(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n = 3 + rng.below(6);
  const auto params = generate_params(rng, n);
  const LogicalTime expiration = 1 + static_cast<LogicalTime>(rng.below(50));
  const Rational magnate(1 + static_cast<long long>(rng.below(40)),
                         1 + static_cast<long long>(rng.below(4)));
  ContractState state = contract_init({expiration, magnate, "double_spend", params.threshold,
                                       PowerDistribution::create(params.powers)});
  Run run{state};
  bool seen_order = false;

  // The oracle is fixed up front; its contents are consulted only at settlement.
  OracleReport oracle;
  for (std::size_t i = 0; i < n; ++i) {
    oracle.executed[NodeId{i}] = rng.below(4) == 0 ? Protocol::kHonest : Protocol::kMalicious;
  }
  const bool claims_success = rng.below(2) == 0;

  const std::size_t events = 2 + rng.below(20);
  for (std::size_t e = 0; e < events; ++e) {
    try {
      switch (rng.below(4)) {
        case 0:
        case 1: {
          const NodeId node{rng.below(n + 1)};  // occasionally unknown
          const Rational deposit(static_cast<long long>(rng.below(25)));
          state = contract_commit(state, node, deposit);
          break;
        }
        case 2:
          state = advance_clock(state, state.now() + static_cast<LogicalTime>(rng.below(12)));
          break;
        case 3: {
          if (state.minions().empty()) break;
          auto it = state.minions().begin();
          std::advance(it, static_cast<long>(rng.below(state.minions().size())));
          OracleReport early = oracle;
          early.attack_successful = claims_success && state.order() == Protocol::kMalicious;
          state = contract_distribute(state, it->first, early).state;
          break;
        }
      }
    } catch (const Error&) {
      ++run.rejected_events;
    }
    if (state.order() == Protocol::kMalicious) seen_order = true;
    if (seen_order && state.order() != Protocol::kMalicious) run.order_reverted = true;
  }

  state = advance_clock(state, std::max(state.now(), expiration) + 1);
  oracle.attack_successful = claims_success && state.order() == Protocol::kMalicious;
  std::vector<NodeId> pending;
  for (const auto& [node, deposit] : state.minions()) {
    if (!state.settled(node)) pending.push_back(node);
  }
  for (const NodeId node : pending) {
    auto r = contract_distribute(state, node, oracle);
    run.outcomes.push_back(r.outcome);
    state = std::move(r.state);
  }
  run.attack_ordered = seen_order;
  run.final_state = state;
  return run;
}

}  // namespace fuzz
