#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bribery/chain_sim.hpp"
#include "bribery/equilibrium.hpp"
#include "bribery/game.hpp"

namespace bribery {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;
inline constexpr std::size_t kDefaultSweepCap = 10000;

enum class TaskKind {
  kVerifyT1,
  kVerifyT2,
  kVerifyT3,
  kVerifyT4,
  kDominance,
  kCascade,
  kDepositBound,
  kContractTrace,
  kChainSim,
  kSweep,
};

const char* to_string(TaskKind kind);
std::optional<TaskKind> task_kind_from_string(const std::string& name);

// Verification tasks decide the process exit status.
bool is_verification(TaskKind kind);

struct SimulationSpec {
  std::vector<NodeId> minions;
  Consensus consensus = Consensus::kProofOfWork;
  std::int64_t confirmations = 6;
  std::int64_t horizon_slots = 10000;
  Rational block_reward = 1;
  Rational double_spend_value = 0;
  Rational bribe_pool = 1;  // D_m
  std::size_t runs = 1;
};

struct SweepGrid {
  std::vector<Rational> bribe_pool;
  std::vector<Rational> minion_share;
  std::vector<std::int64_t> confirmations;
  std::vector<Rational> threshold;
  std::size_t seeds = 100;
  // Uniform base rewards for the synthetic population of every cell.
  Rational reward_honest = 1;
  Rational reward_deviant_vs_honest = -1;
  Rational reward_deviant_vs_malicious = -1;

  std::size_t cells() const {
    return bribe_pool.size() * minion_share.size() * confirmations.size() * threshold.size();
  }
};

struct Task {
  TaskKind kind = TaskKind::kVerifyT1;
  VerifyOptions verify;                 // verify_t*
  std::vector<NodeId> order;            // cascade; empty means 0..n-1
  std::optional<Rational> deposit;      // deposit_bound
  std::filesystem::path events;         // contract_trace, resolved against the scenario file
  SweepGrid grid;                       // sweep
};

struct Scenario {
  int schema_version = kSchemaVersion;
  std::string name;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;
  std::optional<GameParams> params;
  std::optional<SimulationSpec> simulation;
  std::vector<Task> tasks;
};

// Parses and validates a scenario. Errors are Error(kParse) with the line and
// column or the missing field, or Error(kInvalidParams) listing every
// violated assumption.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir = {});

// The SimConfig for chain_sim tasks, seeded with `seed`.
SimConfig make_sim_config(const Scenario& scenario, std::uint64_t seed);

struct SweepRow {
  std::size_t cell = 0;
  Rational bribe_pool;
  Rational minion_share;
  std::int64_t confirmations = 0;
  Rational threshold;
  std::size_t nodes = 0;
  std::size_t minions = 0;
  BatchResult batch;
  std::optional<Rational> r_m_min;
  std::optional<Rational> r_m_max;
  std::optional<Rational> deposit_bound;
  std::string status = "ok";  // or the assumption violations that rejected the cell
};

// One row per grid cell in bribe_pool-major, threshold-minor order. Cell i
// simulates with seed derive_seed(seed, i). `base` supplies consensus and
// horizon. Throws kCapExceeded when the grid is larger than `cap`.
std::vector<SweepRow> run_sweep(const SweepGrid& grid, const SimulationSpec& base,
                                std::uint64_t seed, std::size_t cap = kDefaultSweepCap);
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

// Minion bloc of `share` and honest bloc of 1 - share, each split into the
// fewest equal nodes that keep every node strictly below t. Minions come
// first.
struct SweepPopulation {
  std::vector<Rational> powers;
  std::size_t minions = 0;
};
SweepPopulation sweep_population(const Rational& share, const Rational& threshold);

struct TaskReport {
  std::size_t index = 0;
  TaskKind kind = TaskKind::kVerifyT1;
  std::optional<bool> passed;  // set for verification tasks
  nlohmann::json result;
  std::string csv;  // the task's CSV export, if it has one
  std::vector<std::string> artifacts;
};

struct RunReport {
  std::string scenario;
  std::string tool_version = kToolVersion;
  std::uint64_t seed = 0;
  std::vector<TaskReport> tasks;
  std::vector<std::string> warnings;
  double wall_time_seconds = 0;

  bool all_passed() const;
  int exit_code() const { return all_passed() ? 0 : 1; }
  // Deterministic payload: wall time is excluded.
  nlohmann::json to_json() const;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;            // overrides the scenario seed
  std::optional<std::filesystem::path> output;  // overrides output_dir; empty path disables files
  std::set<TaskKind> only;                      // empty means every task
  std::optional<std::vector<NodeId>> cascade_order;
};

// Runs tasks in declared order. Task i gets seed derive_seed(seed, i). Writes
// report.json, timing.json and per-task CSV files when an output directory is
// set; throws Error(kIo) when they cannot be written.
RunReport run_scenario(const Scenario& scenario, const RunOptions& options = {});

}  // namespace bribery
