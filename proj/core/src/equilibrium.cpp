#include "bribery/equilibrium.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "bribery/error.hpp"

namespace bribery {

namespace {

Strategy flipped(Strategy s, GameVariant variant) {
  return s == Strategy::kHonest ? opposing_strategy(variant) : Strategy::kHonest;
}

std::string describe(const Deviation& d) {
  std::ostringstream os;
  os << "node " << d.node.value << " deviating to " << to_string(d.to) << ": payoff "
     << to_string(d.payoff_before) << " -> " << to_string(d.payoff_after);
  return os.str();
}

StrategyProfile profile_from_mask(GameVariant variant, std::size_t n, std::uint64_t mask) {
  StrategyProfile p = StrategyProfile::all(variant, n, Strategy::kHonest);
  for (std::size_t i = 0; i < n; ++i) {
    if (mask & (std::uint64_t{1} << i)) p.choices[i] = opposing_strategy(variant);
  }
  return p;
}

}  // namespace

NashReport is_strict_nash(const GameParams& params, const StrategyProfile& profile) {
  check_profile(profile, params.size());
  NashReport report;
  const auto base = payoff_vector(params, profile);
  report.profiles_checked = 1;

  for (std::size_t i = 0; i < params.size(); ++i) {
    StrategyProfile deviated = profile;
    deviated.choices[i] = flipped(profile.choices[i], profile.variant);
    const Rational after = utility(params, deviated, NodeId{i});
    ++report.profiles_checked;
    if (!(after < base[i]) && !report.counterexample) {
      report.is_strict_nash = false;
      report.counterexample = Deviation{NodeId{i}, deviated.choices[i], base[i], after};
    }
  }
  return report;
}

DominanceReport check_weak_dominance(const GameParams& params, std::size_t limit) {
  require_valid(params);
  const std::size_t n = params.size();
  if (n > limit) {
    throw Error(ErrorCode::kEnumerationLimit, std::to_string(n) + " nodes exceeds enumeration limit " +
                                                  std::to_string(limit));
  }

  DominanceReport report;
  report.per_node.resize(n);
  const std::uint64_t opponents = std::uint64_t{1} << (n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    auto& node = report.per_node[i];
    Rational best_gain;
    for (std::uint64_t m = 0; m < opponents; ++m) {
      // Spread the (n-1)-bit opponent mask around bit i.
      const std::uint64_t low = m & ((std::uint64_t{1} << i) - 1);
      const std::uint64_t high = (m >> i) << (i + 1);
      StrategyProfile profile = profile_from_mask(GameVariant::kContract, n, low | high);

      const Rational honest = utility_with_contract(params, profile, NodeId{i});
      profile.choices[i] = Strategy::kCommitToContract;
      const Rational commit = utility_with_contract(params, profile, NodeId{i});
      ++report.opponent_profiles_checked;

      if (commit < honest) node.never_worse = false;
      // Keep the opponent profile with the largest gain as the witness.
      if (commit > honest && (!node.strictly_better_somewhere || commit - honest > best_gain)) {
        node.strictly_better_somewhere = true;
        node.witness = profile;
        best_gain = commit - honest;
      }
    }
  }
  report.weakly_dominates = std::all_of(report.per_node.begin(), report.per_node.end(),
                                        [](const NodeDominance& d) {
                                          return d.never_worse && d.strictly_better_somewhere;
                                        });
  return report;
}

bool CascadeTrace::monotone() const {
  return std::all_of(steps.begin(), steps.end(),
                     [](const CascadeStep& s) { return s.deviator_monotone; });
}

CascadeTrace find_deviation_cascade(const GameParams& params, const std::vector<NodeId>& order) {
  const std::size_t n = params.size();
  std::vector<bool> seen(n, false);
  for (const NodeId node : order) {
    if (node.value >= n || seen[node.value]) {
      throw Error(ErrorCode::kNotPermutation,
                  "deviation order repeats or exceeds node " + std::to_string(node.value));
    }
    seen[node.value] = true;
  }

  CascadeTrace trace;
  StrategyProfile profile = StrategyProfile::all(GameVariant::kContract, n, Strategy::kHonest);
  trace.initial_payoffs = payoff_vector(params, profile);

  std::vector<NodeId> deviating;
  const std::vector<Rational>* previous = &trace.initial_payoffs;
  for (const NodeId node : order) {
    deviating.push_back(node);
    profile.choices[node.value] = Strategy::kCommitToContract;

    CascadeStep step{deviating, profile, payoff_vector(params, profile), true};
    for (const NodeId d : deviating) {
      if (step.payoffs[d.value] < (*previous)[d.value]) step.deviator_monotone = false;
    }
    trace.steps.push_back(std::move(step));
    previous = &trace.steps.back().payoffs;
  }
  trace.final_profile = profile;
  return trace;
}

std::string cascade_to_csv(const CascadeTrace& trace) {
  std::ostringstream os;
  const std::size_t n = trace.initial_payoffs.size();
  os << "step,deviating_set";
  for (std::size_t i = 0; i < n; ++i) os << ",payoff_" << i;
  os << ",monotone\n";

  auto row = [&](std::size_t step, const std::vector<NodeId>& set,
                 const std::vector<Rational>& payoffs, bool monotone) {
    os << step << ',';
    for (std::size_t k = 0; k < set.size(); ++k) os << (k ? ";" : "") << set[k].value;
    for (const auto& p : payoffs) os << ',' << to_string(p);
    os << ',' << (monotone ? "true" : "false") << '\n';
  };
  row(0, {}, trace.initial_payoffs, true);
  for (std::size_t s = 0; s < trace.steps.size(); ++s) {
    const auto& step = trace.steps[s];
    row(s + 1, step.deviating, step.payoffs, step.deviator_monotone);
  }
  return os.str();
}

Rational deposit_bound(const GameParams& params) {
  require_valid(params);
  Rational bound;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Rational penalty = std::max(abs(params.reward_deviant_vs_honest[i]),
                                      abs(params.reward_deviant_vs_malicious[i]));
    const Rational candidate = params.reward_malicious[i] + penalty;
    if (i == 0 || candidate > bound) bound = candidate;
  }
  return bound;
}

DepositCheck verify_deposit_bound(const GameParams& params, const Rational& deposit) {
  require_valid(params);
  DepositCheck check;
  std::optional<DepositPair> any_violation;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::array<const Rational*, 4> values{
        &params.reward_malicious[i], &params.reward_honest[i],
        &params.reward_deviant_vs_honest[i], &params.reward_deviant_vs_malicious[i]};
    for (const Rational* x : values) {
      for (const Rational* y : values) {
        if (*y - deposit < *x) continue;
        check.sufficient = false;
        const DepositPair pair{*x, *y, NodeId{i}};
        if (*y > *x && !check.violating) check.violating = pair;
        if (!any_violation) any_violation = pair;
      }
    }
  }
  if (!check.violating) check.violating = any_violation;
  return check;
}

const char* to_string(Theorem theorem) {
  switch (theorem) {
    case Theorem::kHonestStrictWithoutCollusion: return "T1";
    case Theorem::kDepositBound: return "T2";
    case Theorem::kDeviationNeverHurts: return "T3";
    case Theorem::kCommitStrictWithContract: return "T4";
  }
  return "?";
}

std::optional<Theorem> theorem_from_string(const std::string& id) {
  if (id == "T1") return Theorem::kHonestStrictWithoutCollusion;
  if (id == "T2") return Theorem::kDepositBound;
  if (id == "T3") return Theorem::kDeviationNeverHurts;
  if (id == "T4") return Theorem::kCommitStrictWithContract;
  return std::nullopt;
}

GameParams generate_params(Rng& rng, std::size_t n, const GeneratorOptions& options) {
  GameParams p;
  p.threshold = Rational(1, 2) + Rational(rng.between(0, 5), 20);

  for (;;) {
    std::vector<std::int64_t> weights(n);
    std::int64_t total = 0;
    for (auto& w : weights) {
      w = rng.between(1, options.max_power_weight);
      total += w;
    }
    p.powers.clear();
    bool below = true;
    for (auto w : weights) {
      p.powers.emplace_back(w, total);
      below = below && p.powers.back() < p.threshold;
    }
    if (below) break;
  }

  const std::int64_t r = options.reward_range;
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t rh = rng.between(1, r);
    std::int64_t rd = rng.between(-r, r);
    if (rd >= rh && !options.corrupt_deviation_reward) rd -= r + 1;
    const std::int64_t rm = rh + rng.between(1, r);
    std::int64_t rdp = rng.between(-r, 2 * r);
    if (rdp >= rm) rdp -= 3 * r + 1;
    p.reward_honest.emplace_back(rh);
    p.reward_deviant_vs_honest.emplace_back(rd);
    p.reward_malicious.emplace_back(rm);
    p.reward_deviant_vs_malicious.emplace_back(rdp);
  }
  return p;
}

std::optional<std::string> check_honest_strict_without_collusion(const GameParams& params) {
  const auto report = is_strict_nash(
      params, StrategyProfile::all(GameVariant::kNoCollusion, params.size(), Strategy::kHonest));
  if (report.is_strict_nash) return std::nullopt;
  return "all-honest is not strict without collusion: " + describe(*report.counterexample);
}

std::optional<std::string> check_deposit_bound(const GameParams& params) {
  const Rational bound = deposit_bound(params);
  const auto above = verify_deposit_bound(params, bound + 1);
  if (!above.sufficient) {
    const auto& v = *above.violating;
    return "deposit " + to_string(bound + 1) + " insufficient at node " +
           std::to_string(v.node.value) + " (x = " + to_string(v.follow) +
           ", y = " + to_string(v.deviate) + ")";
  }
  // When the extreme pair (y = R_m, x = most negative penalty) reaches the
  // bound exactly, a deposit equal to the bound must fail.
  bool attained = false;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Rational low = std::min(params.reward_deviant_vs_honest[i],
                                  params.reward_deviant_vs_malicious[i]);
    if (params.reward_malicious[i] - low == bound) attained = true;
  }
  if (attained && verify_deposit_bound(params, bound).sufficient) {
    return "deposit equal to the bound " + to_string(bound) + " passed although the bound is attained";
  }
  return std::nullopt;
}

std::optional<std::string> check_deviation_never_hurts(const GameParams& params) {
  const std::size_t n = params.size();
  const std::uint64_t subsets = std::uint64_t{1} << n;
  for (std::uint64_t mask = 1; mask < subsets; ++mask) {
    const StrategyProfile profile = profile_from_mask(GameVariant::kContract, n, mask);
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask & (std::uint64_t{1} << i))) continue;
      const Rational payoff = utility_with_contract(params, profile, NodeId{i});
      if (payoff < params.reward_honest[i]) {
        std::ostringstream os;
        os << "deviating subset mask " << mask << ": node " << i << " gets " << to_string(payoff)
           << " < R_h = " << to_string(params.reward_honest[i]);
        return os.str();
      }
    }
  }
  const auto honest = is_strict_nash(
      params, StrategyProfile::all(GameVariant::kContract, n, Strategy::kHonest));
  if (honest.is_strict_nash) return "all-honest is a strict equilibrium with the contract";
  return std::nullopt;
}

std::optional<std::string> check_commit_strict_with_contract(const GameParams& params) {
  const auto report = is_strict_nash(
      params, StrategyProfile::all(GameVariant::kContract, params.size(),
                                   Strategy::kCommitToContract));
  if (report.is_strict_nash) return std::nullopt;
  return "all-commit is not strict with the contract: " + describe(*report.counterexample);
}

VerificationReport verify_theorem(Theorem theorem, const VerifyOptions& options) {
  if (options.instances == 0) throw Error(ErrorCode::kInvalidConfig, "instances must be >= 1");
  if (options.n_min < 3 || options.n_max > 8 || options.n_min > options.n_max) {
    throw Error(ErrorCode::kInvalidConfig, "n range must lie within [3, 8]");
  }

  VerificationReport report;
  report.theorem = theorem;
  report.seed = options.seed;
  const auto span = static_cast<std::int64_t>(options.n_max - options.n_min);
  for (std::size_t i = 0; i < options.instances; ++i) {
    Rng rng(derive_seed(options.seed, i));
    const auto n = options.n_min + static_cast<std::size_t>(rng.between(0, span));
    const GameParams params = generate_params(rng, n, options.generator);
    if (!options.generator.corrupt_deviation_reward) require_valid(params);

    std::optional<std::string> failure;
    switch (theorem) {
      case Theorem::kHonestStrictWithoutCollusion:
        failure = check_honest_strict_without_collusion(params);
        break;
      case Theorem::kDepositBound:
        failure = check_deposit_bound(params);
        break;
      case Theorem::kDeviationNeverHurts:
        failure = check_deviation_never_hurts(params);
        break;
      case Theorem::kCommitStrictWithContract:
        failure = check_commit_strict_with_contract(params);
        break;
    }
    ++report.instances_tested;
    if (failure && !report.first_failure) {
      report.all_passed = false;
      report.first_failure = VerificationFailure{params, "instance " + std::to_string(i) + ": " + *failure};
    }
  }
  return report;
}

}  // namespace bribery
