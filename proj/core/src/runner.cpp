#include "bribery/runner.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "bribery/contract.hpp"
#include "bribery/error.hpp"
#include "bribery/json_io.hpp"
#include "bribery/rng.hpp"

namespace bribery {

namespace {

struct TaskName {
  TaskKind kind;
  const char* name;
};

constexpr TaskName kTaskNames[] = {
    {TaskKind::kVerifyT1, "verify_t1"},       {TaskKind::kVerifyT2, "verify_t2"},
    {TaskKind::kVerifyT3, "verify_t3"},       {TaskKind::kVerifyT4, "verify_t4"},
    {TaskKind::kDominance, "dominance"},      {TaskKind::kCascade, "cascade"},
    {TaskKind::kDepositBound, "deposit_bound"}, {TaskKind::kContractTrace, "contract_trace"},
    {TaskKind::kChainSim, "chain_sim"},       {TaskKind::kSweep, "sweep"},
};

Theorem theorem_for(TaskKind kind) {
  switch (kind) {
    case TaskKind::kVerifyT2: return Theorem::kDepositBound;
    case TaskKind::kVerifyT3: return Theorem::kDeviationNeverHurts;
    case TaskKind::kVerifyT4: return Theorem::kCommitStrictWithContract;
    default: return Theorem::kHonestStrictWithoutCollusion;
  }
}

std::vector<NodeId> node_list(const nlohmann::json& j) {
  std::vector<NodeId> out;
  for (const auto& e : j) out.push_back(NodeId{e.get<std::size_t>()});
  return out;
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

Rational rational_or(const nlohmann::json& j, const char* key, const Rational& fallback) {
  return j.contains(key) ? rational_from_json(j.at(key)) : fallback;
}

SimulationSpec parse_simulation(const nlohmann::json& j) {
  SimulationSpec s;
  if (j.contains("minions")) s.minions = node_list(j.at("minions"));
  if (j.contains("consensus")) s.consensus = consensus_from_string(j.at("consensus").get<std::string>());
  s.confirmations = get_or<std::int64_t>(j, "k", s.confirmations);
  s.horizon_slots = get_or<std::int64_t>(j, "horizon_slots", s.horizon_slots);
  s.block_reward = rational_or(j, "block_reward", s.block_reward);
  s.double_spend_value = rational_or(j, "double_spend_value", s.double_spend_value);
  s.bribe_pool = rational_or(j, "bribe_pool", s.bribe_pool);
  s.runs = get_or<std::size_t>(j, "runs", s.runs);
  if (s.runs == 0) throw Error(ErrorCode::kParse, "field 'simulation.runs' must be >= 1");
  return s;
}

SweepGrid parse_grid(const nlohmann::json& task) {
  SweepGrid g;
  const auto& grid = require_field(task, "grid");
  auto axis = [&](const char* name) {
    try {
      return rationals_from_json(require_field(grid, name));
    } catch (const Error& e) {
      throw Error(e.code(), std::string("grid axis '") + name + "': " + e.what());
    }
  };
  g.bribe_pool = axis("bribe_pool");
  g.minion_share = axis("minion_share");
  g.threshold = axis("t");
  for (const auto& k : require_field(grid, "k")) g.confirmations.push_back(k.get<std::int64_t>());
  g.seeds = get_or<std::size_t>(task, "seeds", g.seeds);
  g.reward_honest = rational_or(task, "r_h", g.reward_honest);
  g.reward_deviant_vs_honest = rational_or(task, "r_d", g.reward_deviant_vs_honest);
  g.reward_deviant_vs_malicious = rational_or(task, "r_dp", g.reward_deviant_vs_malicious);
  return g;
}

Task parse_task(const nlohmann::json& j, const std::filesystem::path& base_dir,
                std::size_t max_cells) {
  Task t;
  const auto type = require_field(j, "type").get<std::string>();
  const auto kind = task_kind_from_string(type);
  if (!kind) throw Error(ErrorCode::kParse, "unknown task type \"" + type + "\"");
  t.kind = *kind;
  switch (t.kind) {
    case TaskKind::kVerifyT1:
    case TaskKind::kVerifyT2:
    case TaskKind::kVerifyT3:
    case TaskKind::kVerifyT4:
      t.verify.instances = get_or<std::size_t>(j, "instances", t.verify.instances);
      t.verify.n_min = get_or<std::size_t>(j, "n_min", t.verify.n_min);
      t.verify.n_max = get_or<std::size_t>(j, "n_max", t.verify.n_max);
      t.verify.generator.corrupt_deviation_reward = get_or<bool>(j, "corrupt_generator", false);
      if (t.verify.instances == 0) throw Error(ErrorCode::kParse, "'instances' must be >= 1");
      if (t.verify.n_min < 3 || t.verify.n_max > 8 || t.verify.n_min > t.verify.n_max) {
        throw Error(ErrorCode::kParse, "'n_min'..'n_max' must lie within [3, 8]");
      }
      break;
    case TaskKind::kCascade:
      if (j.contains("order")) t.order = node_list(j.at("order"));
      break;
    case TaskKind::kDepositBound:
      if (j.contains("deposit")) t.deposit = rational_from_json(j.at("deposit"));
      break;
    case TaskKind::kContractTrace: {
      std::filesystem::path events = require_field(j, "events").get<std::string>();
      t.events = events.is_relative() ? base_dir / events : events;
      break;
    }
    case TaskKind::kSweep:
      t.grid = parse_grid(j);
      if (t.grid.cells() > max_cells) {
        throw Error(ErrorCode::kCapExceeded, "sweep grid has " + std::to_string(t.grid.cells()) +
                                                 " cells, cap is " + std::to_string(max_cells));
      }
      break;
    case TaskKind::kDominance:
    case TaskKind::kChainSim:
      break;
  }
  return t;
}

// 1-based line and column of a byte offset.
std::string position(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

bool needs_params(TaskKind kind) {
  return kind == TaskKind::kDominance || kind == TaskKind::kCascade ||
         kind == TaskKind::kDepositBound;
}

}  // namespace

const char* to_string(TaskKind kind) {
  for (const auto& t : kTaskNames) {
    if (t.kind == kind) return t.name;
  }
  return "?";
}

std::optional<TaskKind> task_kind_from_string(const std::string& name) {
  for (const auto& t : kTaskNames) {
    if (name == t.name) return t.kind;
  }
  return std::nullopt;
}

bool is_verification(TaskKind kind) {
  switch (kind) {
    case TaskKind::kVerifyT1:
    case TaskKind::kVerifyT2:
    case TaskKind::kVerifyT3:
    case TaskKind::kVerifyT4:
    case TaskKind::kDominance:
    case TaskKind::kCascade:
      return true;
    default:
      return false;
  }
}

Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, "scenario JSON syntax error at " + position(text, e.byte));
  }

  Scenario s;
  try {
    s.schema_version = require_field(j, "schema_version").get<int>();
    if (s.schema_version != kSchemaVersion) {
      throw Error(ErrorCode::kParse, "unsupported schema_version " +
                                         std::to_string(s.schema_version) + " (expected " +
                                         std::to_string(kSchemaVersion) + ")");
    }
    s.name = require_field(j, "name").get<std::string>();
    s.seed = get_or<std::uint64_t>(j, "seed", 0);
    s.output_dir = get_or<std::string>(j, "output_dir", "");

    if (j.contains("simulation")) s.simulation = parse_simulation(j.at("simulation"));

    if (j.contains("params")) {
      try {
        s.params = params_from_json(j.at("params"));
      } catch (const Error& e) {
        throw Error(e.code(), std::string("params: ") + e.what());
      }
      require_valid(*s.params);
    } else if (s.simulation) {
      // Rewards derived from the bribe pool: R_m = R_h + v_i * D_m.
      const auto& sim = j.at("simulation");
      const auto powers = rationals_from_json(require_field(sim, "powers"));
      const auto& base = require_field(sim, "base_rewards");
      GameParams candidate;
      candidate.powers = powers;
      candidate.threshold = rational_from_json(require_field(sim, "t"));
      candidate.reward_honest = rationals_from_json(require_field(base, "r_h"));
      candidate.reward_deviant_vs_honest = rationals_from_json(require_field(base, "r_d"));
      candidate.reward_deviant_vs_malicious = rationals_from_json(require_field(base, "r_dp"));
      for (std::size_t i = 0; i < powers.size() && i < candidate.reward_honest.size(); ++i) {
        candidate.reward_malicious.push_back(candidate.reward_honest[i] +
                                             powers[i] * s.simulation->bribe_pool);
      }
      require_valid(candidate);
      s.params = std::move(candidate);
    }

    const auto& tasks = require_field(j, "tasks");
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      try {
        s.tasks.push_back(parse_task(tasks[i], base_dir, kDefaultSweepCap));
      } catch (const Error& e) {
        throw Error(e.code(), "tasks[" + std::to_string(i) + "]: " + e.what());
      }
      const auto kind = s.tasks.back().kind;
      if (needs_params(kind) && !s.params) {
        throw Error(ErrorCode::kParse, std::string("task ") + to_string(kind) +
                                           " needs a 'params' block");
      }
      if (kind == TaskKind::kChainSim && !s.simulation) {
        throw Error(ErrorCode::kParse, "task chain_sim needs a 'simulation' block");
      }
    }
    if (s.simulation) {
      validate_sim_config(make_sim_config(s, 0));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("scenario: ") + e.what());
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open scenario " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_scenario(buffer.str(), path.parent_path());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

SimConfig make_sim_config(const Scenario& scenario, std::uint64_t seed) {
  if (!scenario.simulation || !scenario.params) {
    throw Error(ErrorCode::kInvalidConfig, "scenario has no simulation setup");
  }
  const auto& sim = *scenario.simulation;
  return SimConfig{PowerDistribution::create(scenario.params->powers),
                   sim.minions,
                   sim.consensus,
                   sim.confirmations,
                   sim.horizon_slots,
                   sim.block_reward,
                   sim.double_spend_value,
                   scenario.params->threshold,
                   seed};
}

SweepPopulation sweep_population(const Rational& share, const Rational& threshold) {
  SweepPopulation pop;
  auto split = [&](const Rational& bloc) -> std::size_t {
    if (bloc <= 0) return 0;
    if (threshold <= 0) return 1;
    // Fewest equal parts with bloc / parts < t.
    const Rational ratio = bloc / threshold;
    BigInt parts = boost::multiprecision::numerator(ratio) / boost::multiprecision::denominator(ratio);
    return parts.convert_to<std::size_t>() + 1;
  };
  const std::size_t m = split(share);
  const std::size_t h = split(1 - share);
  for (std::size_t i = 0; i < m; ++i) pop.powers.push_back(share / m);
  for (std::size_t i = 0; i < h; ++i) pop.powers.push_back((1 - share) / h);
  pop.minions = m;
  return pop;
}

std::vector<SweepRow> run_sweep(const SweepGrid& grid, const SimulationSpec& base,
                                std::uint64_t seed, std::size_t cap) {
  if (grid.cells() > cap) {
    throw Error(ErrorCode::kCapExceeded, "sweep grid has " + std::to_string(grid.cells()) +
                                             " cells, cap is " + std::to_string(cap));
  }
  std::vector<SweepRow> rows;
  std::size_t cell = 0;
  for (const auto& pool : grid.bribe_pool) {
    for (const auto& share : grid.minion_share) {
      for (const auto k : grid.confirmations) {
        for (const auto& t : grid.threshold) {
          SweepRow row;
          row.cell = cell;
          row.bribe_pool = pool;
          row.minion_share = share;
          row.confirmations = k;
          row.threshold = t;
          const std::uint64_t cell_seed = derive_seed(seed, cell++);

          if (share < 0 || share >= 1) {
            row.status = "minion share must lie in [0, 1)";
            rows.push_back(std::move(row));
            continue;
          }
          const auto pop = sweep_population(share, t);
          row.nodes = pop.powers.size();
          row.minions = pop.minions;
          const std::size_t n = pop.powers.size();
          GameParams candidate = GameParams::uniform(
              pop.powers, t, grid.reward_honest, grid.reward_deviant_vs_honest, 0,
              grid.reward_deviant_vs_malicious);
          for (std::size_t i = 0; i < n; ++i) {
            candidate.reward_malicious[i] = grid.reward_honest + pop.powers[i] * pool;
          }
          const auto validation = validate_params(candidate);
          if (!validation.ok()) {
            row.status = validation.describe();
            rows.push_back(std::move(row));
            continue;
          }

          SimConfig config{PowerDistribution::create(pop.powers), {}, base.consensus, k,
                           base.horizon_slots, base.block_reward, base.double_spend_value, t,
                           cell_seed};
          for (std::size_t i = 0; i < pop.minions; ++i) config.minions.push_back(NodeId{i});
          row.batch = simulate_batch(config, grid.seeds);

          const auto& rm = candidate.reward_malicious;
          row.r_m_min = *std::min_element(rm.begin(), rm.end());
          row.r_m_max = *std::max_element(rm.begin(), rm.end());
          row.deposit_bound = bribery::deposit_bound(candidate);
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "cell,bribe_pool,minion_share,k,t,nodes,minions,runs,successes,frequency,"
        "frequency_decimal,r_m_min,r_m_max,deposit_bound,status\n";
  auto opt = [](const std::optional<Rational>& v) { return v ? to_string(*v) : std::string(); };
  for (const auto& r : rows) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ' ');
    os << r.cell << ',' << to_string(r.bribe_pool) << ',' << to_string(r.minion_share) << ','
       << r.confirmations << ',' << to_string(r.threshold) << ',' << r.nodes << ',' << r.minions
       << ',' << r.batch.runs << ',' << r.batch.successes << ','
       << r.batch.successes << '/' << r.batch.runs << ','
       << to_decimal_string(r.batch.frequency(), 4) << ',' << opt(r.r_m_min) << ','
       << opt(r.r_m_max) << ',' << opt(r.deposit_bound) << ',' << status << '\n';
  }
  return os.str();
}

namespace {

nlohmann::json sweep_rows_json(const std::vector<SweepRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  auto opt = [](const std::optional<Rational>& v) {
    return v ? nlohmann::json(to_string(*v)) : nlohmann::json(nullptr);
  };
  for (const auto& r : rows) {
    out.push_back({{"cell", r.cell},
                   {"bribe_pool", to_string(r.bribe_pool)},
                   {"minion_share", to_string(r.minion_share)},
                   {"k", r.confirmations},
                   {"t", to_string(r.threshold)},
                   {"nodes", r.nodes},
                   {"minions", r.minions},
                   {"runs", r.batch.runs},
                   {"successes", r.batch.successes},
                   {"frequency", to_string(r.batch.frequency())},
                   {"frequency_decimal", to_decimal_string(r.batch.frequency(), 4)},
                   {"r_m_min", opt(r.r_m_min)},
                   {"r_m_max", opt(r.r_m_max)},
                   {"deposit_bound", opt(r.deposit_bound)},
                   {"status", r.status}});
  }
  return out;
}

class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::optional<std::filesystem::path> dir) : dir_(std::move(dir)) {
    if (dir_) {
      std::error_code ec;
      std::filesystem::create_directories(*dir_, ec);
      if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir_->string() + ": " + ec.message());
    }
  }

  void write(const std::string& name, const std::string& content, TaskReport* task = nullptr) {
    if (task) task->csv = content;
    if (!dir_) return;
    const auto path = *dir_ / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
    if (task) task->artifacts.push_back(name);
  }

 private:
  std::optional<std::filesystem::path> dir_;
};

void run_task(const Scenario& scenario, const Task& task, std::uint64_t seed,
              const RunOptions& options, TaskReport& report, ArtifactWriter& files,
              std::vector<std::string>& warnings) {
  const std::string prefix = "task" + std::to_string(report.index) + "_" + to_string(task.kind);
  switch (task.kind) {
    case TaskKind::kVerifyT1:
    case TaskKind::kVerifyT2:
    case TaskKind::kVerifyT3:
    case TaskKind::kVerifyT4: {
      VerifyOptions verify = task.verify;
      verify.seed = seed;
      const auto result = verify_theorem(theorem_for(task.kind), verify);
      report.passed = result.all_passed;
      report.result = to_json(result);
      break;
    }
    case TaskKind::kDominance: {
      const auto result = check_weak_dominance(*scenario.params);
      report.passed = result.weakly_dominates;
      report.result = to_json(result);
      break;
    }
    case TaskKind::kCascade: {
      const auto& params = *scenario.params;
      std::vector<NodeId> order = options.cascade_order.value_or(task.order);
      if (order.empty()) {
        for (std::size_t i = 0; i < params.size(); ++i) order.push_back(NodeId{i});
      }
      const auto trace = find_deviation_cascade(params, order);
      const bool complete = order.size() == params.size();
      bool reaches_malicious = true;
      if (complete) {
        const auto& last = trace.steps.empty() ? trace.initial_payoffs : trace.steps.back().payoffs;
        reaches_malicious = last == params.reward_malicious;
      }
      report.passed = trace.monotone() && reaches_malicious;
      report.result = to_json(trace);
      report.result["reaches_malicious_rewards"] = reaches_malicious;
      files.write(prefix + ".csv", cascade_to_csv(trace), &report);
      break;
    }
    case TaskKind::kDepositBound: {
      const auto& params = *scenario.params;
      const Rational bound = deposit_bound(params);
      report.result = {{"bound", to_string(bound)}, {"exclusive", true}};
      if (task.deposit) {
        report.result["deposit"] = to_string(*task.deposit);
        report.result["check"] = to_json(verify_deposit_bound(params, *task.deposit));
      }
      break;
    }
    case TaskKind::kContractTrace: {
      std::ifstream in(task.events);
      if (!in) throw Error(ErrorCode::kIo, "cannot open event log " + task.events.string());
      try {
        const auto replay = replay_events(in);
        report.result = {{"final_state", to_json(replay.state)}, {"summary", nullptr}};
        if (replay.state.all_settled()) {
          const auto summary = settlement_summary(replay.state);
          report.result["summary"] = to_json(summary);
          files.write(prefix + ".csv", settlement_to_csv(summary), &report);
        } else {
          report.result["note"] = "minions remain unsettled";
        }
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kIo) throw;
        report.result = {{"error", e.what()}};
      }
      break;
    }
    case TaskKind::kChainSim: {
      const auto& sim = *scenario.simulation;
      const SimConfig config = make_sim_config(scenario, seed);
      SimConfig first = config;
      first.seed = derive_seed(config.seed, 0);
      const auto detail = simulate(first, true);
      const auto batch = simulate_batch(config, sim.runs);
      report.result = {{"first_run", to_json(detail.result)},
                       {"runs", batch.runs},
                       {"successes", batch.successes},
                       {"frequency", to_string(batch.frequency())},
                       {"frequency_decimal", to_decimal_string(batch.frequency(), 4)}};
      if (config.consensus == Consensus::kProofOfStake) {
        report.result["slashing_audit"] = to_json(pos_slashing_audit(detail.result));
      }
      if (auto w = bribe_funding_warning(config, sim.bribe_pool)) warnings.push_back(*w);
      files.write(prefix + "_trace.csv", trace_to_csv(detail.trace), &report);
      break;
    }
    case TaskKind::kSweep: {
      SimulationSpec base = scenario.simulation.value_or(SimulationSpec{});
      const auto rows = run_sweep(task.grid, base, seed);
      report.result = {{"rows", sweep_rows_json(rows)}};
      files.write(prefix + ".csv", sweep_to_csv(rows), &report);
      break;
    }
  }
}

}  // namespace

bool RunReport::all_passed() const {
  return std::all_of(tasks.begin(), tasks.end(),
                     [](const TaskReport& t) { return t.passed.value_or(true); });
}

nlohmann::json RunReport::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& t : tasks) {
    list.push_back({{"index", t.index},
                    {"type", bribery::to_string(t.kind)},
                    {"passed", t.passed ? nlohmann::json(*t.passed) : nlohmann::json(nullptr)},
                    {"result", t.result},
                    {"artifacts", t.artifacts}});
  }
  return {{"scenario", scenario},    {"schema_version", kSchemaVersion},
          {"tool_version", tool_version}, {"seed", seed},
          {"tasks", list},           {"warnings", warnings},
          {"all_passed", all_passed()}};
}

RunReport run_scenario(const Scenario& scenario, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.scenario = scenario.name;
  report.seed = options.seed.value_or(scenario.seed);

  std::optional<std::filesystem::path> dir = options.output;
  if (!dir && !scenario.output_dir.empty()) dir = scenario.output_dir;
  if (dir && dir->empty()) dir.reset();
  ArtifactWriter files(dir);

  for (std::size_t i = 0; i < scenario.tasks.size(); ++i) {
    const Task& task = scenario.tasks[i];
    if (!options.only.empty() && !options.only.contains(task.kind)) continue;
    TaskReport t;
    t.index = i;
    t.kind = task.kind;
    try {
      run_task(scenario, task, derive_seed(report.seed, i), options, t, files, report.warnings);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kIo) throw;
      t.result = {{"error", e.what()}};
      t.artifacts.clear();
      t.csv.clear();
      if (is_verification(task.kind)) t.passed = false;
    }
    report.tasks.push_back(std::move(t));
  }

  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  files.write("report.json", report.to_json().dump(2) + "\n");
  files.write("timing.json",
              nlohmann::json{{"wall_time_seconds", report.wall_time_seconds}}.dump(2) + "\n");
  return report;
}

}  // namespace bribery
