#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bribery/rational.hpp"

namespace bribery {

// Zero-based node index.
struct NodeId {
  std::size_t value = 0;

  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

// Validated voting-power vector: every entry strictly positive and the sum
// exactly one.
class PowerDistribution {
 public:
  // Throws Error(kInvalidParams) describing the first violation.
  static PowerDistribution create(std::vector<Rational> powers);

  const std::vector<Rational>& values() const { return powers_; }
  std::size_t size() const { return powers_.size(); }
  const Rational& operator[](NodeId node) const { return powers_.at(node.value); }

 private:
  explicit PowerDistribution(std::vector<Rational> powers) : powers_(std::move(powers)) {}

  std::vector<Rational> powers_;
};

// Candidate game parameters. Nothing is enforced on construction; call
// validate_params before using a value with the utility functions.
struct GameParams {
  std::vector<Rational> powers;
  Rational threshold;
  std::vector<Rational> reward_honest;                // paid to honest nodes when P_h runs
  std::vector<Rational> reward_deviant_vs_honest;     // paid to non-honest nodes when P_h runs
  std::vector<Rational> reward_malicious;             // paid to malicious nodes when P_m runs
  std::vector<Rational> reward_deviant_vs_malicious;  // paid to honest nodes when P_m runs

  std::size_t size() const { return powers.size(); }

  // Same rewards for every node.
  static GameParams uniform(std::vector<Rational> powers, Rational threshold, Rational honest,
                            Rational deviant_vs_honest, Rational malicious,
                            Rational deviant_vs_malicious);

  friend bool operator==(const GameParams&, const GameParams&) = default;
};

struct Violation {
  int assumption = 0;  // 1, 3, 4 or 5
  std::optional<NodeId> node;
  std::string message;
};

struct ValidationResult {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::string describe() const;
};

ValidationResult validate_params(const GameParams& params);

// Throws Error(kInvalidParams) carrying ValidationResult::describe().
void require_valid(const GameParams& params);

enum class Strategy {
  kHonest,            // follow P_h
  kMalicious,         // run P_m unconditionally; only legal without collusion
  kCommitToContract,  // commit to the bribery contract and follow its order
};

enum class GameVariant {
  kNoCollusion,  // strategies {honest, malicious}
  kContract,     // strategies {honest, commit}
};

const char* to_string(Strategy s);
const char* to_string(GameVariant v);

struct StrategyProfile {
  GameVariant variant = GameVariant::kNoCollusion;
  std::vector<Strategy> choices;

  static StrategyProfile all(GameVariant variant, std::size_t n, Strategy s) {
    return {variant, std::vector<Strategy>(n, s)};
  }

  std::size_t size() const { return choices.size(); }
  Strategy operator[](NodeId node) const { return choices.at(node.value); }

  friend bool operator==(const StrategyProfile&, const StrategyProfile&) = default;
};

// The strategy opposing honesty in a variant: kMalicious or kCommitToContract.
Strategy opposing_strategy(GameVariant variant);

// Throws Error(kVariantMismatch) when the profile has the wrong length or
// uses a strategy that is not legal for its variant.
void check_profile(const StrategyProfile& profile, std::size_t n);

struct AggregatePowers {
  Rational honest;
  Rational opposing;  // malicious power without collusion, committed power with the contract
};

AggregatePowers aggregate_powers(const StrategyProfile& profile,
                                 const std::vector<Rational>& powers);

enum class Outcome {
  kHonestRuns,     // honest power > t
  kMaliciousRuns,  // opposing power > t (with the contract: the contract ordered P_m)
  kStalled,        // neither side > t
};

// Strict comparison against t: an aggregate equal to t does not execute.
Outcome classify(const AggregatePowers& aggregate, const Rational& threshold);

Rational utility_without_collusion(const GameParams& params, const StrategyProfile& profile,
                                   NodeId node);
Rational utility_with_contract(const GameParams& params, const StrategyProfile& profile,
                               NodeId node);

// Dispatches on profile.variant.
Rational utility(const GameParams& params, const StrategyProfile& profile, NodeId node);

std::vector<Rational> payoff_vector(const GameParams& params, const StrategyProfile& profile);

}  // namespace bribery
