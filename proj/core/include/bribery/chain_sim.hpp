#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bribery/game.hpp"

namespace bribery {

enum class Consensus { kProofOfWork, kProofOfStake };

const char* to_string(Consensus c);  // "pow" / "pos"
Consensus consensus_from_string(const std::string& s);

using BlockId = std::size_t;

struct Block {
  BlockId id = 0;
  std::optional<BlockId> parent;
  std::int64_t height = 0;
  std::optional<NodeId> producer;  // empty for genesis
  std::int64_t slot = -1;
  bool contains_target_tx = false;
  bool contains_slashing_proof = false;
  // Slashing proofs are numbered in discovery order and honest producers
  // include every known proof, so the proofs on a chain are always a prefix
  // of that sequence. This is the prefix length through this block.
  std::size_t proofs_through = 0;
};

// Append-only block tree. The canonical tip is the longest chain, keeping the
// first-seen block on height ties.
class ChainState {
 public:
  explicit ChainState(std::int64_t confirmations);

  const std::vector<Block>& blocks() const { return blocks_; }
  const Block& block(BlockId id) const { return blocks_.at(id); }
  BlockId genesis() const { return 0; }
  BlockId canonical_tip() const { return canonical_tip_; }
  std::optional<BlockId> target_block() const { return target_; }
  std::int64_t confirmations_required() const { return confirmations_; }

  BlockId append(BlockId parent, NodeId producer, std::int64_t slot, bool target_tx,
                 std::size_t proofs_through);
  void mark_target(BlockId id);

  bool is_ancestor(BlockId ancestor, BlockId descendant) const;
  std::vector<BlockId> chain_to(BlockId tip) const;  // genesis first

  // Heights are consistent and the canonical tip is a maximal-height leaf.
  bool well_formed() const;

 private:
  std::vector<Block> blocks_;
  std::vector<bool> has_child_;
  BlockId canonical_tip_ = 0;
  std::optional<BlockId> target_;
  std::int64_t confirmations_;
};

struct SimConfig {
  PowerDistribution powers;
  std::vector<NodeId> minions;
  Consensus consensus = Consensus::kProofOfWork;
  std::int64_t confirmations = 6;  // k
  std::int64_t horizon_slots = 10000;
  Rational block_reward = 1;
  Rational double_spend_value = 0;
  Rational threshold = Rational(1, 2);  // finality threshold under PoS
  std::uint64_t seed = 0;
};

// Throws kInvalidConfig for horizon <= 0, k < 1 or unknown/duplicate minions.
void validate_sim_config(const SimConfig& config);

struct AttackResult {
  Consensus consensus = Consensus::kProofOfWork;
  bool success = false;
  std::string resolution;  // success, horizon_exhausted, no_minions
  std::int64_t slots_elapsed = 0;
  std::optional<std::int64_t> confirmed_at_slot;
  std::int64_t fork_length = 0;
  std::int64_t reverted_blocks = 0;
  std::vector<std::int64_t> per_node_blocks_canonical;
  std::int64_t slashing_proofs_included = 0;  // on the final canonical chain
  std::int64_t slashing_proofs_censored = 0;
  std::vector<std::int64_t> double_signs;
  std::vector<NodeId> minions;

  friend bool operator==(const AttackResult&, const AttackResult&) = default;
};

struct TraceRow {
  std::int64_t slot = 0;
  NodeId producer;
  std::string chain;  // honest / fork
  std::int64_t height = 0;
  std::string event;  // ';'-joined tags
};

struct Simulation {
  AttackResult result;
  ChainState chain;
  std::vector<TraceRow> trace;
};

// One block per slot, producer drawn proportionally to power. Every node
// follows the honest chain until the target block (height 1) has k
// descendants; then minions build a fork from the target's parent.
//
// PoW: honest nodes follow the longest chain; the attack succeeds as soon as
// the fork is strictly longer than the honest chain.
// PoS: every validator attests each block of the chain it follows, so a
// minion attesting a fork block at a height where it already attested an
// honest block double-signs. Honest nodes keep their chain (they hold the
// slashing evidence) and include all known proofs in their blocks; minions
// never include proofs. The fork is final once minion power exceeds t and the
// fork has been the canonical tip for k consecutive slots.
Simulation simulate(const SimConfig& config, bool record_trace = false);

AttackResult run_attack(const SimConfig& config);

std::string trace_to_csv(const std::vector<TraceRow>& trace);

struct BatchResult {
  std::size_t runs = 0;
  std::size_t successes = 0;
  Rational frequency() const { return runs ? Rational(successes, runs) : Rational(0); }
};

// Run i uses seed derive_seed(config.seed, i).
BatchResult simulate_batch(const SimConfig& config, std::size_t runs);

// R_m = R_h + v_i * D_m; other rewards pass through. Throws kInvalidParams
// when the result violates any assumption (including D_m <= 0).
GameParams derive_game_params(const SimConfig& config, const std::vector<Rational>& reward_honest,
                              const std::vector<Rational>& reward_deviant_vs_honest,
                              const std::vector<Rational>& reward_deviant_vs_malicious,
                              const Rational& bribe_pool);

// Warning text when the bribe pool exceeds what the double spend yields.
std::optional<std::string> bribe_funding_warning(const SimConfig& config,
                                                 const Rational& bribe_pool);

struct SlashingAudit {
  bool attack_success = false;
  std::int64_t offenses = 0;
  std::vector<std::int64_t> per_minion_offenses;  // aligned with AttackResult::minions
  std::int64_t proofs_included = 0;
  std::int64_t proofs_censored = 0;
  std::vector<NodeId> slashable_minions;  // offended minions of a failed attack
  bool censorship_held = true;            // success implies zero proofs on the canonical chain
};

// Throws kWrongConsensus for a PoW result.
SlashingAudit pos_slashing_audit(const AttackResult& result);

nlohmann::json to_json(const AttackResult& result);
nlohmann::json to_json(const SlashingAudit& audit);

}  // namespace bribery
