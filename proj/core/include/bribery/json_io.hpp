#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bribery/equilibrium.hpp"
#include "bribery/game.hpp"

namespace bribery {

// Rationals travel as strings ("n/d") so no precision is lost. Numbers are
// accepted on input when they are integers.
nlohmann::json rationals_to_json(const std::vector<Rational>& values);
Rational rational_from_json(const nlohmann::json& j);
std::vector<Rational> rationals_from_json(const nlohmann::json& j);

// Throws Error(kParse) naming `field` when it is absent.
const nlohmann::json& require_field(const nlohmann::json& j, const std::string& field);

// Fields: powers, t, r_h, r_d, r_m, r_dp. Does not validate assumptions.
nlohmann::json to_json(const GameParams& params);
GameParams params_from_json(const nlohmann::json& j);

nlohmann::json to_json(const StrategyProfile& profile);

nlohmann::json to_json(const NashReport& report);
nlohmann::json to_json(const DominanceReport& report);
nlohmann::json to_json(const CascadeTrace& trace);
nlohmann::json to_json(const DepositCheck& check);
nlohmann::json to_json(const VerificationReport& report);

}  // namespace bribery
