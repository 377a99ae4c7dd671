#include "bribery/chain_sim.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "bribery/error.hpp"
#include "bribery/json_io.hpp"
#include "bribery/rng.hpp"

namespace bribery {

const char* to_string(Consensus c) { return c == Consensus::kProofOfWork ? "pow" : "pos"; }

Consensus consensus_from_string(const std::string& s) {
  if (s == "pow") return Consensus::kProofOfWork;
  if (s == "pos") return Consensus::kProofOfStake;
  throw Error(ErrorCode::kParse, "unknown consensus \"" + s + "\" (expected pow or pos)");
}

ChainState::ChainState(std::int64_t confirmations) : confirmations_(confirmations) {
  blocks_.push_back(Block{});
  has_child_.push_back(false);
}

BlockId ChainState::append(BlockId parent, NodeId producer, std::int64_t slot, bool target_tx,
                           std::size_t proofs_through) {
  const Block& p = blocks_.at(parent);
  Block b;
  b.id = blocks_.size();
  b.parent = parent;
  b.height = p.height + 1;
  b.producer = producer;
  b.slot = slot;
  b.contains_target_tx = target_tx;
  b.contains_slashing_proof = proofs_through > p.proofs_through;
  b.proofs_through = proofs_through;
  blocks_.push_back(b);
  has_child_[parent] = true;
  has_child_.push_back(false);
  if (b.height > blocks_[canonical_tip_].height) canonical_tip_ = b.id;
  return b.id;
}

void ChainState::mark_target(BlockId id) { target_ = blocks_.at(id).id; }

bool ChainState::is_ancestor(BlockId ancestor, BlockId descendant) const {
  std::optional<BlockId> cur = descendant;
  const auto h = blocks_.at(ancestor).height;
  while (cur && blocks_[*cur].height >= h) {
    if (*cur == ancestor) return true;
    cur = blocks_[*cur].parent;
  }
  return false;
}

std::vector<BlockId> ChainState::chain_to(BlockId tip) const {
  std::vector<BlockId> out;
  for (std::optional<BlockId> cur = tip; cur; cur = blocks_.at(*cur).parent) out.push_back(*cur);
  std::reverse(out.begin(), out.end());
  return out;
}

bool ChainState::well_formed() const {
  std::int64_t max_height = 0;
  for (const auto& b : blocks_) {
    if (!b.parent) {
      if (b.id != 0 || b.height != 0) return false;
    } else if (*b.parent >= b.id || b.height != blocks_[*b.parent].height + 1) {
      return false;
    }
    max_height = std::max(max_height, b.height);
  }
  return !has_child_[canonical_tip_] && blocks_[canonical_tip_].height == max_height;
}

void validate_sim_config(const SimConfig& config) {
  if (config.horizon_slots <= 0) {
    throw Error(ErrorCode::kInvalidConfig, "horizon_slots must be positive");
  }
  if (config.confirmations < 1) throw Error(ErrorCode::kInvalidConfig, "k must be >= 1");
  std::vector<bool> seen(config.powers.size(), false);
  for (auto m : config.minions) {
    if (m.value >= config.powers.size() || seen[m.value]) {
      throw Error(ErrorCode::kInvalidConfig,
                  "minion " + std::to_string(m.value) + " is unknown or listed twice");
    }
    seen[m.value] = true;
  }
}

namespace {

// Draws a producer with probability equal to its power, using integer
// weights over the common denominator of all powers.
class ProducerSampler {
 public:
  explicit ProducerSampler(const PowerDistribution& powers) {
    BigInt common = 1;
    for (const auto& v : powers.values()) {
      common = boost::multiprecision::lcm(common, boost::multiprecision::denominator(v));
    }
    if (common > std::numeric_limits<std::uint64_t>::max()) {
      throw Error(ErrorCode::kInvalidConfig, "power denominators too large to sample exactly");
    }
    total_ = common.convert_to<std::uint64_t>();
    std::uint64_t acc = 0;
    for (const auto& v : powers.values()) {
      const Rational scaled = v * common;
      acc += boost::multiprecision::numerator(scaled).convert_to<std::uint64_t>();
      cumulative_.push_back(acc);
    }
  }

  NodeId draw(Rng& rng) const {
    const std::uint64_t r = rng.below(total_);
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
    return NodeId{static_cast<std::size_t>(it - cumulative_.begin())};
  }

 private:
  std::uint64_t total_ = 0;
  std::vector<std::uint64_t> cumulative_;
};

}  // namespace

Simulation simulate(const SimConfig& config, bool record_trace) {
  validate_sim_config(config);
  const std::size_t n = config.powers.size();
  const bool pos = config.consensus == Consensus::kProofOfStake;

  std::vector<bool> is_minion(n, false);
  Rational minion_power = 0;
  for (auto m : config.minions) {
    is_minion[m.value] = true;
    minion_power += config.powers[m];
  }
  const bool can_finalize = minion_power > config.threshold;

  Simulation sim{AttackResult{}, ChainState(config.confirmations), {}};
  AttackResult& result = sim.result;
  ChainState& chain = sim.chain;
  result.consensus = config.consensus;
  result.minions = config.minions;
  std::sort(result.minions.begin(), result.minions.end());
  result.double_signs.assign(n, 0);
  result.per_node_blocks_canonical.assign(n, 0);

  const ProducerSampler sampler(config.powers);
  Rng rng(config.seed);

  BlockId honest_tip = chain.genesis();
  BlockId fork_tip = chain.genesis();
  bool attacking = false;
  std::int64_t confirmed_height = 0;  // honest height when the fork starts
  std::size_t proofs_known = 0;
  std::int64_t lead_streak = 0;
  result.resolution = "horizon_exhausted";

  for (std::int64_t slot = 0; slot < config.horizon_slots; ++slot) {
    const NodeId producer = sampler.draw(rng);
    const bool minion = is_minion[producer.value];
    std::string events = "block";
    result.slots_elapsed = slot + 1;

    BlockId made;
    if (attacking && minion) {
      made = chain.append(fork_tip, producer, slot, false, chain.block(fork_tip).proofs_through);
      fork_tip = made;
      if (pos && chain.block(made).height <= confirmed_height) {
        // Each minion attested the honest block at this height before the fork.
        for (auto m : result.minions) ++result.double_signs[m.value];
        proofs_known += result.minions.size();
        events += ";double_sign";
      }
    } else {
      const BlockId parent = (attacking && pos) ? honest_tip : chain.canonical_tip();
      const bool target = !chain.target_block();
      const std::size_t proofs = std::max(proofs_known, chain.block(parent).proofs_through);
      made = chain.append(parent, producer, slot, target, proofs);
      honest_tip = made;
      if (target) chain.mark_target(made);
      if (chain.block(made).contains_slashing_proof) events += ";proofs_included";
    }

    if (!attacking && chain.block(honest_tip).height >= 1 + config.confirmations) {
      attacking = true;
      confirmed_height = chain.block(honest_tip).height;
      result.confirmed_at_slot = slot;
      events += ";confirmed";
    }

    bool done = false;
    if (attacking) {
      if (config.minions.empty()) {
        result.resolution = "no_minions";
        done = true;
      } else if (!pos) {
        // The fork only becomes canonical by being strictly longer.
        done = chain.canonical_tip() == fork_tip && fork_tip != chain.genesis();
      } else {
        lead_streak = chain.canonical_tip() == fork_tip && fork_tip != chain.genesis()
                          ? lead_streak + 1
                          : 0;
        done = can_finalize && lead_streak >= config.confirmations;
      }
      if (done && result.resolution != "no_minions") {
        result.success = true;
        result.resolution = "success";
        events += ";success";
      }
    }

    if (record_trace) {
      const Block& b = chain.block(made);
      const bool on_fork = attacking && minion && made == fork_tip;
      sim.trace.push_back(TraceRow{slot, producer, on_fork ? "fork" : "honest", b.height, events});
    }
    if (done) break;
  }

  result.fork_length = chain.block(fork_tip).height;
  if (result.success) result.reverted_blocks = chain.block(honest_tip).height;
  const BlockId final_tip = result.success ? fork_tip : chain.canonical_tip();
  for (BlockId id : chain.chain_to(final_tip)) {
    if (auto p = chain.block(id).producer) ++result.per_node_blocks_canonical[p->value];
  }
  result.slashing_proofs_included = static_cast<std::int64_t>(chain.block(final_tip).proofs_through);
  result.slashing_proofs_censored =
      static_cast<std::int64_t>(proofs_known) - result.slashing_proofs_included;
  return sim;
}

AttackResult run_attack(const SimConfig& config) { return simulate(config).result; }

std::string trace_to_csv(const std::vector<TraceRow>& trace) {
  std::ostringstream os;
  os << "slot,producer,chain,height,event\n";
  for (const auto& r : trace) {
    os << r.slot << ',' << r.producer.value << ',' << r.chain << ',' << r.height << ',' << r.event
       << '\n';
  }
  return os.str();
}

BatchResult simulate_batch(const SimConfig& config, std::size_t runs) {
  BatchResult batch;
  SimConfig run = config;
  for (std::size_t i = 0; i < runs; ++i) {
    run.seed = derive_seed(config.seed, i);
    if (run_attack(run).success) ++batch.successes;
    ++batch.runs;
  }
  return batch;
}

GameParams derive_game_params(const SimConfig& config, const std::vector<Rational>& reward_honest,
                              const std::vector<Rational>& reward_deviant_vs_honest,
                              const std::vector<Rational>& reward_deviant_vs_malicious,
                              const Rational& bribe_pool) {
  const std::size_t n = config.powers.size();
  if (reward_honest.size() != n) {
    throw Error(ErrorCode::kInvalidParams, "r_h must have one entry per node");
  }
  GameParams p;
  p.powers = config.powers.values();
  p.threshold = config.threshold;
  p.reward_honest = reward_honest;
  p.reward_deviant_vs_honest = reward_deviant_vs_honest;
  p.reward_deviant_vs_malicious = reward_deviant_vs_malicious;
  for (std::size_t i = 0; i < n; ++i) {
    p.reward_malicious.push_back(reward_honest[i] + config.powers.values()[i] * bribe_pool);
  }
  require_valid(p);
  return p;
}

std::optional<std::string> bribe_funding_warning(const SimConfig& config,
                                                 const Rational& bribe_pool) {
  if (bribe_pool <= config.double_spend_value) return std::nullopt;
  return "bribe pool " + to_string(bribe_pool) + " exceeds the double-spend value " +
         to_string(config.double_spend_value) + "; the magnate loses money";
}

SlashingAudit pos_slashing_audit(const AttackResult& result) {
  if (result.consensus != Consensus::kProofOfStake) {
    throw Error(ErrorCode::kWrongConsensus, "slashing audit needs a PoS run");
  }
  SlashingAudit audit;
  audit.attack_success = result.success;
  for (auto m : result.minions) {
    const auto count = result.double_signs.at(m.value);
    audit.per_minion_offenses.push_back(count);
    audit.offenses += count;
    if (count > 0 && !result.success) audit.slashable_minions.push_back(m);
  }
  audit.proofs_included = result.slashing_proofs_included;
  audit.proofs_censored = result.slashing_proofs_censored;
  audit.censorship_held = !result.success || result.slashing_proofs_included == 0;
  return audit;
}

nlohmann::json to_json(const AttackResult& r) {
  nlohmann::json minions = nlohmann::json::array();
  for (auto m : r.minions) minions.push_back(m.value);
  return {
      {"consensus", to_string(r.consensus)},
      {"success", r.success},
      {"resolution", r.resolution},
      {"slots_elapsed", r.slots_elapsed},
      {"confirmed_at_slot", r.confirmed_at_slot ? nlohmann::json(*r.confirmed_at_slot)
                                                : nlohmann::json(nullptr)},
      {"fork_length", r.fork_length},
      {"reverted_blocks", r.reverted_blocks},
      {"per_node_blocks_canonical", r.per_node_blocks_canonical},
      {"slashing_proofs_included", r.slashing_proofs_included},
      {"slashing_proofs_censored", r.slashing_proofs_censored},
      {"double_signs", r.double_signs},
      {"minions", minions},
  };
}

nlohmann::json to_json(const SlashingAudit& a) {
  nlohmann::json slashable = nlohmann::json::array();
  for (auto m : a.slashable_minions) slashable.push_back(m.value);
  return {
      {"attack_success", a.attack_success},
      {"offenses", a.offenses},
      {"per_minion_offenses", a.per_minion_offenses},
      {"proofs_included", a.proofs_included},
      {"proofs_censored", a.proofs_censored},
      {"slashable_minions", slashable},
      {"censorship_held", a.censorship_held},
  };
}

}  // namespace bribery
