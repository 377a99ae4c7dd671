#pragma once

// Reference implementations used only by the tests. They are written
// independently of the library: payoffs straight from the case table, the
// fork race from the random-walk closed form and a dynamic program.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "bribery/game.hpp"

namespace oracle {

using bribery::Rational;

// Side labels: 0 honest, 1 opposing (malicious or committed).
inline Rational payoff(const bribery::GameParams& p, const std::vector<int>& side, std::size_t i,
                       bool contract) {
  Rational honest = 0, opposing = 0;
  for (std::size_t j = 0; j < side.size(); ++j) (side[j] ? opposing : honest) += p.powers[j];
  const bool mine_honest = side[i] == 0;
  if (contract) {
    // The contract orders P_m only above t; otherwise every node runs P_h.
    if (opposing > p.threshold) {
      return mine_honest ? p.reward_deviant_vs_malicious[i] : p.reward_malicious[i];
    }
    return p.reward_honest[i];
  }
  if (honest > p.threshold) return mine_honest ? p.reward_honest[i] : p.reward_deviant_vs_honest[i];
  if (opposing > p.threshold) {
    return mine_honest ? p.reward_deviant_vs_malicious[i] : p.reward_malicious[i];
  }
  return 0;  // stalled
}

inline std::vector<int> sides_of(std::size_t mask, std::size_t n) {
  std::vector<int> s(n);
  for (std::size_t j = 0; j < n; ++j) s[j] = (mask >> j) & 1U;
  return s;
}

// Minimal deposit bound by its definition.
inline Rational deposit_bound(const bribery::GameParams& p) {
  Rational best;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Rational d = p.reward_deviant_vs_honest[i] < 0 ? Rational(-p.reward_deviant_vs_honest[i])
                                                         : p.reward_deviant_vs_honest[i];
    const Rational dp = p.reward_deviant_vs_malicious[i] < 0
                            ? Rational(-p.reward_deviant_vs_malicious[i])
                            : p.reward_deviant_vs_malicious[i];
    const Rational v = p.reward_malicious[i] + std::max(d, dp);
    if (i == 0 || v > best) best = v;
  }
  return best;
}

// Probability that an attacker with share q ever closes a deficit of z blocks
// against honest share p = 1 - q: (q/p)^z when q < p, otherwise 1.
inline double catch_up(double q, int z) {
  const double p = 1.0 - q;
  if (q >= p) return 1.0;
  return std::pow(q / p, z);
}

// The same race truncated to `steps` blocks: probability that the walk
// starting at deficit z reaches 0 within `steps` moves.
inline double catch_up_within(double q, int z, int steps) {
  std::vector<double> dist(static_cast<std::size_t>(z + steps + 2), 0.0);
  dist[static_cast<std::size_t>(z)] = 1.0;
  double hit = 0.0;
  for (int s = 0; s < steps; ++s) {
    std::vector<double> next(dist.size(), 0.0);
    for (std::size_t d = 1; d + 1 < dist.size(); ++d) {
      if (dist[d] == 0.0) continue;
      next[d - 1] += dist[d] * q;
      next[d + 1] += dist[d] * (1.0 - q);
    }
    hit += next[0];
    next[0] = 0.0;
    dist.swap(next);
  }
  return hit;
}

}  // namespace oracle
