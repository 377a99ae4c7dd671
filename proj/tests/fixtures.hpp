#pragma once

#include <filesystem>

#include "bribery/game.hpp"

namespace fixtures {

// Three nodes, t = 1/2, R_h = 2, R_d = -1, R_m = 5, R_d' = -3.
inline bribery::GameParams p3() {
  using bribery::Rational;
  return bribery::GameParams::uniform({Rational(2, 5), Rational(7, 20), Rational(1, 4)},
                                      Rational(1, 2), 2, -1, 5, -3);
}

inline std::filesystem::path dir() { return BRIBERY_FIXTURE_DIR; }

}  // namespace fixtures
