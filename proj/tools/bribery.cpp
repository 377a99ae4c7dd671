// Command-line front end for scenario runs, contract traces and sweeps.
//
//   bribery verify <scenario.json>
//   bribery cascade <scenario.json> --order 2,1,0
//   bribery contract-trace <events.jsonl>
//   bribery chain-sim <scenario.json>
//   bribery sweep <scenario.json>
//   bribery run <scenario.json>
//
// Exit status: 0 when every verification task passed, 1 when one failed,
// 2 on invalid input or I/O errors.

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "bribery/contract.hpp"
#include "bribery/error.hpp"
#include "bribery/json_io.hpp"
#include "bribery/runner.hpp"

namespace {

using bribery::TaskKind;

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::string format = "json";
};

bribery::RunOptions run_options(const GlobalOptions& g, std::set<TaskKind> only) {
  bribery::RunOptions o;
  o.seed = g.seed;
  if (g.out) o.output = std::filesystem::path(*g.out);
  o.only = std::move(only);
  return o;
}

// Appends a default task of `kind` when the scenario declares none.
void ensure_task(bribery::Scenario& s, TaskKind kind) {
  for (const auto& t : s.tasks) {
    if (t.kind == kind) return;
  }
  bribery::Task t;
  t.kind = kind;
  s.tasks.push_back(t);
}

// A single task prints its own CSV export; otherwise a task summary table.
std::string csv_for(const bribery::RunReport& report) {
  if (report.tasks.size() == 1 && !report.tasks.front().csv.empty()) {
    return report.tasks.front().csv;
  }
  std::ostringstream os;
  os << "index,type,passed\n";
  for (const auto& t : report.tasks) {
    os << t.index << ',' << bribery::to_string(t.kind) << ','
       << (t.passed ? (*t.passed ? "true" : "false") : "") << '\n';
  }
  return os.str();
}

int run(const std::string& path, const GlobalOptions& g, std::set<TaskKind> only,
        std::optional<TaskKind> default_task = std::nullopt,
        std::optional<std::vector<bribery::NodeId>> order = std::nullopt) {
  auto scenario = bribery::load_scenario(path);
  if (default_task) ensure_task(scenario, *default_task);
  auto options = run_options(g, std::move(only));
  options.cascade_order = std::move(order);
  if (options.cascade_order) {
    for (auto& t : scenario.tasks) {
      if (t.kind == TaskKind::kCascade) t.order = *options.cascade_order;
    }
  }
  const auto report = bribery::run_scenario(scenario, options);
  if (g.format == "csv") {
    std::cout << csv_for(report);
  } else {
    std::cout << report.to_json().dump(2) << '\n';
  }
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  return report.exit_code();
}

int contract_trace(const std::string& path, const GlobalOptions& g) {
  std::ifstream in(path);
  if (!in) throw bribery::Error(bribery::ErrorCode::kIo, "cannot open " + path);
  const auto replay = bribery::replay_events(in);
  const auto summary = bribery::settlement_summary(replay.state);
  const auto json = nlohmann::json{{"summary", bribery::to_json(summary)},
                                   {"final_state", bribery::to_json(replay.state)}};
  const auto csv = bribery::settlement_to_csv(summary);
  if (g.out) {
    std::filesystem::create_directories(*g.out);
    std::ofstream(std::filesystem::path(*g.out) / "settlement.json") << json.dump(2) << '\n';
    std::ofstream(std::filesystem::path(*g.out) / "settlement.csv") << csv;
  }
  std::cout << (g.format == "csv" ? csv : json.dump(2) + "\n");
  return summary.conserved ? 0 : 1;
}

std::vector<bribery::NodeId> parse_order(const std::string& text) {
  std::vector<bribery::NodeId> order;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      order.push_back(bribery::NodeId{static_cast<std::size_t>(std::stoul(item))});
    } catch (const std::exception&) {
      throw bribery::Error(bribery::ErrorCode::kParse, "bad --order entry \"" + item + "\"");
    }
  }
  return order;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bribery attack simulator and equilibrium verifier"};
  app.require_subcommand(1);
  app.set_version_flag("--version", bribery::kToolVersion);

  GlobalOptions g;
  std::uint64_t seed = 0;
  std::string out;
  app.add_option("--seed", seed, "Override the scenario seed")->each([&](const std::string&) {
    g.seed = seed;
  });
  app.add_option("--out", out, "Output directory for reports and CSV files")
      ->each([&](const std::string& s) { g.out = s; });
  app.add_option("--format", g.format, "Stdout format")
      ->check(CLI::IsMember({"json", "csv"}));

  std::string scenario_path;
  std::string events_path;
  std::string order_text;

  auto* verify = app.add_subcommand("verify", "Run the verification tasks of a scenario");
  verify->add_option("scenario", scenario_path)->required()->check(CLI::ExistingFile);

  auto* cascade = app.add_subcommand("cascade", "Trace a deviation cascade");
  cascade->add_option("scenario", scenario_path)->required()->check(CLI::ExistingFile);
  cascade->add_option("--order", order_text, "Comma-separated deviation order, e.g. 2,1,0");

  auto* trace = app.add_subcommand("contract-trace", "Replay a contract event log");
  trace->add_option("events", events_path)->required()->check(CLI::ExistingFile);

  auto* chain = app.add_subcommand("chain-sim", "Run the double-spend chain simulation");
  chain->add_option("scenario", scenario_path)->required()->check(CLI::ExistingFile);

  auto* sweep = app.add_subcommand("sweep", "Run the parameter sweeps of a scenario");
  sweep->add_option("scenario", scenario_path)->required()->check(CLI::ExistingFile);

  auto* all = app.add_subcommand("run", "Run every task of a scenario");
  all->add_option("scenario", scenario_path)->required()->check(CLI::ExistingFile);

  for (auto* sub : {verify, cascade, trace, chain, sweep, all}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) {
      return run(scenario_path, g,
                 {TaskKind::kVerifyT1, TaskKind::kVerifyT2, TaskKind::kVerifyT3,
                  TaskKind::kVerifyT4, TaskKind::kDominance, TaskKind::kDepositBound});
    }
    if (*cascade) {
      std::optional<std::vector<bribery::NodeId>> order;
      if (!order_text.empty()) order = parse_order(order_text);
      return run(scenario_path, g, {TaskKind::kCascade}, TaskKind::kCascade, order);
    }
    if (*trace) return contract_trace(events_path, g);
    if (*chain) return run(scenario_path, g, {TaskKind::kChainSim}, TaskKind::kChainSim);
    if (*sweep) return run(scenario_path, g, {TaskKind::kSweep});
    if (*all) return run(scenario_path, g, {});
  } catch (const bribery::Error& e) {
    std::cerr << "error (" << bribery::to_string(e.code()) << "): " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
