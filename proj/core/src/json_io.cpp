#include "bribery/json_io.hpp"

#include "bribery/error.hpp"

namespace bribery {

nlohmann::json rationals_to_json(const std::vector<Rational>& values) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& v : values) a.push_back(to_string(v));
  return a;
}

Rational rational_from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  throw Error(ErrorCode::kParse, "expected a rational string, got " + j.dump());
}

std::vector<Rational> rationals_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorCode::kParse, "expected an array, got " + j.dump());
  std::vector<Rational> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(rational_from_json(e));
  return out;
}

const nlohmann::json& require_field(const nlohmann::json& j, const std::string& field) {
  if (!j.is_object() || !j.contains(field)) {
    throw Error(ErrorCode::kParse, "missing field '" + field + "'");
  }
  return j.at(field);
}

nlohmann::json to_json(const GameParams& p) {
  return {
      {"powers", rationals_to_json(p.powers)},
      {"t", to_string(p.threshold)},
      {"r_h", rationals_to_json(p.reward_honest)},
      {"r_d", rationals_to_json(p.reward_deviant_vs_honest)},
      {"r_m", rationals_to_json(p.reward_malicious)},
      {"r_dp", rationals_to_json(p.reward_deviant_vs_malicious)},
  };
}

GameParams params_from_json(const nlohmann::json& j) {
  auto field = [&](const char* name) {
    try {
      return rationals_from_json(require_field(j, name));
    } catch (const Error& e) {
      throw Error(e.code(), std::string("field '") + name + "': " + e.what());
    }
  };
  GameParams p;
  p.powers = field("powers");
  try {
    p.threshold = rational_from_json(require_field(j, "t"));
  } catch (const Error& e) {
    throw Error(e.code(), std::string("field 't': ") + e.what());
  }
  p.reward_honest = field("r_h");
  p.reward_deviant_vs_honest = field("r_d");
  p.reward_malicious = field("r_m");
  p.reward_deviant_vs_malicious = field("r_dp");
  return p;
}

nlohmann::json to_json(const StrategyProfile& profile) {
  nlohmann::json choices = nlohmann::json::array();
  for (auto s : profile.choices) choices.push_back(to_string(s));
  return {{"variant", to_string(profile.variant)}, {"choices", choices}};
}

nlohmann::json to_json(const NashReport& r) {
  nlohmann::json j = {{"is_strict_nash", r.is_strict_nash},
                      {"profiles_checked", r.profiles_checked},
                      {"counterexample", nullptr}};
  if (r.counterexample) {
    const auto& d = *r.counterexample;
    j["counterexample"] = {{"node", d.node.value},
                           {"to", to_string(d.to)},
                           {"payoff_before", to_string(d.payoff_before)},
                           {"payoff_after", to_string(d.payoff_after)}};
  }
  return j;
}

nlohmann::json to_json(const DominanceReport& r) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& d : r.per_node) {
    nodes.push_back({{"never_worse", d.never_worse},
                     {"strictly_better_somewhere", d.strictly_better_somewhere},
                     {"witness", d.witness ? to_json(*d.witness) : nlohmann::json(nullptr)}});
  }
  return {{"weakly_dominates", r.weakly_dominates},
          {"per_node", nodes},
          {"opponent_profiles_checked", r.opponent_profiles_checked}};
}

nlohmann::json to_json(const CascadeTrace& t) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : t.steps) {
    nlohmann::json set = nlohmann::json::array();
    for (auto n : s.deviating) set.push_back(n.value);
    steps.push_back({{"deviating_set", set},
                     {"profile", to_json(s.profile)},
                     {"payoffs", rationals_to_json(s.payoffs)},
                     {"deviator_monotone", s.deviator_monotone}});
  }
  return {{"initial_payoffs", rationals_to_json(t.initial_payoffs)},
          {"steps", steps},
          {"final_profile", to_json(t.final_profile)},
          {"monotone", t.monotone()}};
}

nlohmann::json to_json(const DepositCheck& c) {
  nlohmann::json j = {{"sufficient", c.sufficient}, {"violating_pair", nullptr}};
  if (c.violating) {
    j["violating_pair"] = {{"node", c.violating->node.value},
                           {"x", to_string(c.violating->follow)},
                           {"y", to_string(c.violating->deviate)}};
  }
  return j;
}

nlohmann::json to_json(const VerificationReport& r) {
  nlohmann::json j = {{"theorem", to_string(r.theorem)},
                      {"seed", r.seed},
                      {"instances_tested", r.instances_tested},
                      {"all_passed", r.all_passed},
                      {"first_failure", nullptr}};
  if (r.first_failure) {
    j["first_failure"] = {{"params", to_json(r.first_failure->params)},
                          {"witness", r.first_failure->witness}};
  }
  return j;
}

}  // namespace bribery
