#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bribery/game.hpp"
#include "bribery/rng.hpp"

namespace bribery {

// A unilateral deviation that did not strictly lower the deviator's payoff.
struct Deviation {
  NodeId node;
  Strategy to = Strategy::kHonest;
  Rational payoff_before;
  Rational payoff_after;
};

struct NashReport {
  bool is_strict_nash = true;
  std::optional<Deviation> counterexample;
  std::size_t profiles_checked = 0;
};

// Flips each node's strategy in turn (within the profile's variant) and checks
// that every flip strictly lowers the flipping node's utility.
NashReport is_strict_nash(const GameParams& params, const StrategyProfile& profile);

struct NodeDominance {
  bool never_worse = true;
  bool strictly_better_somewhere = false;
  // Opponent profile (full profile with this node's slot set to commit) where
  // committing beats staying honest by the widest margin, if any.
  std::optional<StrategyProfile> witness;
};

struct DominanceReport {
  bool weakly_dominates = false;
  std::vector<NodeDominance> per_node;
  std::size_t opponent_profiles_checked = 0;
};

inline constexpr std::size_t kDefaultEnumerationLimit = 12;

// Checks that committing to the contract weakly dominates honesty for every
// node, over all 2^(n-1) opponent profiles. Throws kInvalidParams for invalid
// params and kEnumerationLimit when n exceeds `limit`.
DominanceReport check_weak_dominance(const GameParams& params,
                                     std::size_t limit = kDefaultEnumerationLimit);

struct CascadeStep {
  std::vector<NodeId> deviating;  // in order of deviation
  StrategyProfile profile;
  std::vector<Rational> payoffs;
  bool deviator_monotone = true;
};

struct CascadeTrace {
  std::vector<Rational> initial_payoffs;  // all-honest baseline
  std::vector<CascadeStep> steps;
  StrategyProfile final_profile;

  bool monotone() const;
};

// Starting from all-honest with the contract present, moves nodes to commit
// one at a time in `order`. `order` may be a prefix of a permutation; repeated
// or out-of-range entries throw kNotPermutation.
CascadeTrace find_deviation_cascade(const GameParams& params, const std::vector<NodeId>& order);

// Columns: step, deviating_set, payoff_0..payoff_{n-1}, monotone. Row 0 is
// the all-honest baseline. deviating_set entries are joined with ';'.
std::string cascade_to_csv(const CascadeTrace& trace);

// Infimum of sufficient minion deposits; valid deposits are strictly greater.
Rational deposit_bound(const GameParams& params);

struct DepositPair {
  Rational follow;   // x: payoff when following the contract
  Rational deviate;  // y: payoff when deviating, before the deposit is lost
  NodeId node;
};

struct DepositCheck {
  bool sufficient = true;
  std::optional<DepositPair> violating;
};

// Scans the 16 (x, y) pairs drawn from {R_m, R_h, R_d, R_d'} for each node
// and requires y - deposit < x. The reported pair prefers strictly profitable
// deviations (y > x) in scan order x-major over (R_m, R_h, R_d, R_d').
DepositCheck verify_deposit_bound(const GameParams& params, const Rational& deposit);

enum class Theorem {
  kHonestStrictWithoutCollusion,  // T1
  kDepositBound,                  // T2
  kDeviationNeverHurts,           // T3
  kCommitStrictWithContract,      // T4
};

const char* to_string(Theorem theorem);  // "T1".."T4"
std::optional<Theorem> theorem_from_string(const std::string& id);

struct GeneratorOptions {
  std::int64_t max_power_weight = 20;  // powers are normalized draws from [1, max_power_weight]
  std::int64_t reward_range = 20;      // rewards are integers within [-range, 2 * range]
  // Mutation hook: skip the R_d < R_h repair so deviation can become
  // profitable. Only used to prove the verifier can fail.
  bool corrupt_deviation_reward = false;
};

// Draws a GameParams with n nodes satisfying every assumption (unless
// corrupted). Powers are resampled until every node is below t; t is
// 1/2 + j/20 for j in [0, 5].
GameParams generate_params(Rng& rng, std::size_t n, const GeneratorOptions& options = {});

struct VerificationFailure {
  GameParams params;
  std::string witness;
};

struct VerificationReport {
  Theorem theorem = Theorem::kHonestStrictWithoutCollusion;
  std::uint64_t seed = 0;
  std::size_t instances_tested = 0;
  bool all_passed = true;
  std::optional<VerificationFailure> first_failure;
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  std::size_t instances = 1000;
  std::size_t n_min = 3;
  std::size_t n_max = 8;
  GeneratorOptions generator;
};

// Instance i draws n and GameParams from Rng(derive_seed(seed, i)), so a
// report depends only on the options. Checks every instance; first_failure
// records the lowest failing index.
VerificationReport verify_theorem(Theorem theorem, const VerifyOptions& options);

// Single-instance checks used by verify_theorem. Return a witness description
// on failure.
std::optional<std::string> check_honest_strict_without_collusion(const GameParams& params);
std::optional<std::string> check_deposit_bound(const GameParams& params);
std::optional<std::string> check_deviation_never_hurts(const GameParams& params);
std::optional<std::string> check_commit_strict_with_contract(const GameParams& params);

}  // namespace bribery
