#include "bribery/game.hpp"

#include <sstream>

#include "bribery/error.hpp"

namespace bribery {

namespace {

std::string node_label(std::size_t i) { return "v_" + std::to_string(i); }

void check_power_vector(const std::vector<Rational>& powers, std::vector<Violation>& out) {
  if (powers.size() < 2) {
    out.push_back({1, std::nullopt,
                   "Assumption 1: need at least 2 nodes, got " + std::to_string(powers.size())});
  }
  Rational sum = 0;
  for (std::size_t i = 0; i < powers.size(); ++i) {
    if (powers[i] <= 0) {
      out.push_back({1, NodeId{i},
                     "Assumption 1: " + node_label(i) + " = " + to_string(powers[i]) +
                         " is not positive"});
    }
    sum += powers[i];
  }
  if (!powers.empty() && sum != 1) {
    out.push_back({1, std::nullopt,
                   "Assumption 1: powers sum to " + to_string(sum) + ", not 1"});
  }
}

void require_fit(const GameParams& params, const StrategyProfile& profile, GameVariant variant,
                 NodeId node) {
  if (profile.variant != variant) {
    throw Error(ErrorCode::kVariantMismatch,
                std::string("expected a ") + to_string(variant) + " profile, got " +
                    to_string(profile.variant));
  }
  check_profile(profile, params.size());
  if (node.value >= params.size()) {
    throw Error(ErrorCode::kUnknownNode, "node " + std::to_string(node.value) + " out of range");
  }
}

}  // namespace

PowerDistribution PowerDistribution::create(std::vector<Rational> powers) {
  std::vector<Violation> violations;
  check_power_vector(powers, violations);
  if (!violations.empty()) throw Error(ErrorCode::kInvalidParams, violations.front().message);
  return PowerDistribution(std::move(powers));
}

GameParams GameParams::uniform(std::vector<Rational> powers, Rational threshold, Rational honest,
                               Rational deviant_vs_honest, Rational malicious,
                               Rational deviant_vs_malicious) {
  const std::size_t n = powers.size();
  return GameParams{std::move(powers),
                    std::move(threshold),
                    std::vector<Rational>(n, honest),
                    std::vector<Rational>(n, deviant_vs_honest),
                    std::vector<Rational>(n, malicious),
                    std::vector<Rational>(n, deviant_vs_malicious)};
}

std::string ValidationResult::describe() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << violations[i].message;
  }
  return os.str();
}

ValidationResult validate_params(const GameParams& params) {
  ValidationResult result;
  auto& out = result.violations;
  check_power_vector(params.powers, out);

  const std::size_t n = params.size();
  auto check_len = [&](const std::vector<Rational>& v, const char* name, int assumption) {
    if (v.size() != n) {
      out.push_back({assumption, std::nullopt,
                     "Assumption " + std::to_string(assumption) + ": " + name + " has " +
                         std::to_string(v.size()) + " entries, expected " + std::to_string(n)});
      return false;
    }
    return true;
  };
  const bool rewards_ok = check_len(params.reward_honest, "r_h", 3) &
                          check_len(params.reward_deviant_vs_honest, "r_d", 3) &
                          check_len(params.reward_malicious, "r_m", 4) &
                          check_len(params.reward_deviant_vs_malicious, "r_dp", 4);

  if (params.threshold < Rational(1, 2)) {
    out.push_back({5, std::nullopt, "Assumption 5: t = " + to_string(params.threshold) + " < 1/2"});
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (params.powers[i] >= params.threshold) {
      out.push_back({5, NodeId{i},
                     "Assumption 5: " + node_label(i) + " = " + to_string(params.powers[i]) +
                         " >= t = " + to_string(params.threshold)});
    }
  }

  if (!rewards_ok) return result;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& rh = params.reward_honest[i];
    const auto& rd = params.reward_deviant_vs_honest[i];
    const auto& rm = params.reward_malicious[i];
    const auto& rdp = params.reward_deviant_vs_malicious[i];
    const std::string at = " at node " + std::to_string(i);
    if (rh <= 0) {
      out.push_back({3, NodeId{i}, "Assumption 3: R_h = " + to_string(rh) + " is not positive" + at});
    }
    if (rd >= rh) {
      out.push_back({3, NodeId{i},
                     "Assumption 3: R_d = " + to_string(rd) + " >= R_h = " + to_string(rh) + at});
    }
    if (rm <= rh) {
      out.push_back({4, NodeId{i},
                     "Assumption 4: R_m = " + to_string(rm) + " <= R_h = " + to_string(rh) + at});
    }
    if (rdp >= rm) {
      out.push_back({4, NodeId{i},
                     "Assumption 4: R_d' = " + to_string(rdp) + " >= R_m = " + to_string(rm) + at});
    }
  }
  return result;
}

void require_valid(const GameParams& params) {
  auto result = validate_params(params);
  if (!result.ok()) throw Error(ErrorCode::kInvalidParams, result.describe());
}

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::kHonest: return "S_h";
    case Strategy::kMalicious: return "S_m";
    case Strategy::kCommitToContract: return "S'_m";
  }
  return "?";
}

const char* to_string(GameVariant v) {
  switch (v) {
    case GameVariant::kNoCollusion: return "no_collusion";
    case GameVariant::kContract: return "contract";
  }
  return "?";
}

Strategy opposing_strategy(GameVariant variant) {
  return variant == GameVariant::kNoCollusion ? Strategy::kMalicious : Strategy::kCommitToContract;
}

void check_profile(const StrategyProfile& profile, std::size_t n) {
  if (profile.size() != n) {
    throw Error(ErrorCode::kVariantMismatch, "profile has " + std::to_string(profile.size()) +
                                                 " choices for " + std::to_string(n) + " nodes");
  }
  const Strategy allowed = opposing_strategy(profile.variant);
  for (std::size_t i = 0; i < n; ++i) {
    const Strategy s = profile.choices[i];
    if (s != Strategy::kHonest && s != allowed) {
      throw Error(ErrorCode::kVariantMismatch, std::string(to_string(s)) + " at node " +
                                                   std::to_string(i) + " is not legal in a " +
                                                   to_string(profile.variant) + " profile");
    }
  }
}

AggregatePowers aggregate_powers(const StrategyProfile& profile,
                                 const std::vector<Rational>& powers) {
  check_profile(profile, powers.size());
  AggregatePowers agg;
  Rational total = 0;
  for (std::size_t i = 0; i < powers.size(); ++i) {
    total += powers[i];
    if (profile.choices[i] == Strategy::kHonest) agg.honest += powers[i];
  }
  agg.opposing = total - agg.honest;
  return agg;
}

Outcome classify(const AggregatePowers& aggregate, const Rational& threshold) {
  if (aggregate.honest > threshold) return Outcome::kHonestRuns;
  if (aggregate.opposing > threshold) return Outcome::kMaliciousRuns;
  return Outcome::kStalled;
}

Rational utility_without_collusion(const GameParams& params, const StrategyProfile& profile,
                                   NodeId node) {
  require_fit(params, profile, GameVariant::kNoCollusion, node);
  const bool honest = profile[node] == Strategy::kHonest;
  switch (classify(aggregate_powers(profile, params.powers), params.threshold)) {
    case Outcome::kHonestRuns:
      return (honest ? params.reward_honest : params.reward_deviant_vs_honest).at(node.value);
    case Outcome::kMaliciousRuns:
      return (honest ? params.reward_deviant_vs_malicious : params.reward_malicious).at(node.value);
    case Outcome::kStalled:
      return 0;
  }
  return 0;
}

Rational utility_with_contract(const GameParams& params, const StrategyProfile& profile,
                               NodeId node) {
  require_fit(params, profile, GameVariant::kContract, node);
  const bool honest = profile[node] == Strategy::kHonest;
  switch (classify(aggregate_powers(profile, params.powers), params.threshold)) {
    case Outcome::kMaliciousRuns:
      return (honest ? params.reward_deviant_vs_malicious : params.reward_malicious).at(node.value);
    case Outcome::kHonestRuns:
    case Outcome::kStalled:
      // The contract orders P_h, so minions run the honest protocol with
      // everyone else and the full power executes it.
      return params.reward_honest.at(node.value);
  }
  return 0;
}

Rational utility(const GameParams& params, const StrategyProfile& profile, NodeId node) {
  return profile.variant == GameVariant::kNoCollusion
             ? utility_without_collusion(params, profile, node)
             : utility_with_contract(params, profile, node);
}

std::vector<Rational> payoff_vector(const GameParams& params, const StrategyProfile& profile) {
  std::vector<Rational> out;
  out.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) out.push_back(utility(params, profile, NodeId{i}));
  return out;
}

}  // namespace bribery
