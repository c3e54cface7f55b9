// patternlab CLI: run pattern sweeps through the simulator, predict them with
// the queueing-network solver, and compare the two sides.
//
//   patternlab run      --pattern gateway_offloading --offload 0 --offload 5 --out out/
//   patternlab predict  --pattern gateway_offloading --out out/
//   patternlab compare  --out out/
//   patternlab replay   --out out/ --id gateway_offloading-off5-p040-rep2
//   patternlab report   --pattern pipes_and_filters --out out/
//
// PATTERNLAB_SEED overrides the configured seed when set.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "patternlab/experiment.hpp"

namespace {

struct CliOptions {
  std::string pattern = "gateway_aggregation";
  std::vector<int> offloads;
  std::vector<std::string> variants;
  std::string dist = "exponential";
  std::string out = "out";
  patternlab::ExperimentConfig cfg;
};

void add_experiment_flags(CLI::App* cmd, CliOptions& opts) {
  cmd->add_option("--pattern", opts.pattern,
                  "gateway_aggregation | gateway_offloading | pipes_and_filters, "
                  "or a path to a topology config file")
      ->capture_default_str();
  cmd->add_option("--offload", opts.offloads,
                  "offloaded work units for gateway_offloading (repeatable; default 0 5 10)")
      ->check(CLI::Range(0, 10));
  cmd->add_option("--variant", opts.variants,
                  "pipes_and_filters variant (repeatable): joint_1cpu | joint_2cpu | separated");
  cmd->add_option("--gateway-overhead", opts.cfg.gateway_overhead,
                  "work units the aggregation gateway charges every request")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--granularity", opts.cfg.granularity, "mix sweep granularity")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--users", opts.cfg.sim.users, "closed-loop population")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--duration", opts.cfg.sim.duration, "simulated seconds per run")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--time-unit", opts.cfg.sim.time_unit, "seconds per work unit")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--sample-interval", opts.cfg.sim.sample_interval,
                  "seconds between cumulative-CPU samples")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--reps", opts.cfg.repetitions, "repetitions per experiment")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--seed", opts.cfg.sim.seed, "base seed (run i uses seed + i)")
      ->capture_default_str();
  cmd->add_option("--dist", opts.dist, "service time distribution")
      ->check(CLI::IsMember({"exponential", "deterministic"}))
      ->capture_default_str();
  cmd->add_option("--out", opts.out, "output directory")->capture_default_str();
}

patternlab::ExperimentConfig resolve(CliOptions& opts) {
  patternlab::ExperimentConfig cfg = opts.cfg;
  if (opts.pattern == "gateway_aggregation" || opts.pattern == "gateway_offloading" ||
      opts.pattern == "pipes_and_filters") {
    cfg.pattern = patternlab::pattern_kind_from_string(opts.pattern);
  } else if (std::filesystem::exists(opts.pattern)) {
    cfg.pattern = patternlab::PatternKind::Custom;
    cfg.custom_topology = opts.pattern;
  } else {
    throw CLI::ValidationError("--pattern", "unknown pattern and no such config file: '" +
                                                opts.pattern + "'");
  }
  if (!opts.offloads.empty()) cfg.offloads = opts.offloads;
  if (!opts.variants.empty()) {
    cfg.variants.clear();
    for (const auto& v : opts.variants)
      cfg.variants.push_back(patternlab::pipes_variant_from_string(v));
  }
  cfg.sim.service_time_dist = patternlab::service_time_dist_from_string(opts.dist);
  cfg.analytic_users = cfg.sim.users;
  cfg.out_dir = opts.out;
  if (const char* seed_env = std::getenv("PATTERNLAB_SEED")) {
    cfg.sim.seed = std::stoull(seed_env);
    std::cerr << "note: PATTERNLAB_SEED overrides the configured seed (" << cfg.sim.seed << ")\n";
  }
  if (cfg.pattern == patternlab::PatternKind::Custom) {
    std::vector<std::string> warnings;
    patternlab::load_topology_file(cfg.custom_topology, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Microservice design-pattern lab: queueing-network predictions vs "
               "discrete-event measurements under heterogeneous load mixes"};
  app.require_subcommand(1);

  CliOptions opts;

  auto* run_cmd = app.add_subcommand("run", "simulate sweeps and write runs.csv / summary.csv");
  add_experiment_flags(run_cmd, opts);

  auto* predict_cmd =
      app.add_subcommand("predict", "solve the sweeps analytically and write theoretical.csv");
  add_experiment_flags(predict_cmd, opts);

  auto* compare_cmd = app.add_subcommand(
      "compare", "join theoretical.csv with summary.csv into comparison.csv and report.md");
  std::string theoretical_path;
  std::string summary_path;
  std::string compare_out = "out";
  compare_cmd->add_option("--theoretical", theoretical_path,
                          "theoretical.csv (default <out>/theoretical.csv)");
  compare_cmd->add_option("--summary", summary_path, "summary.csv (default <out>/summary.csv)");
  compare_cmd->add_option("--out", compare_out, "output directory")->capture_default_str();

  auto* replay_cmd =
      app.add_subcommand("replay", "re-simulate a recorded run and verify its summary rows");
  std::string replay_out = "out";
  std::string replay_id;
  bool replay_all = false;
  replay_cmd->add_option("--out", replay_out, "experiment output directory")
      ->capture_default_str();
  replay_cmd->add_option("--id", replay_id, "experiment id to verify");
  replay_cmd->add_flag("--all", replay_all, "verify every recorded run");

  auto* report_cmd =
      app.add_subcommand("report", "run + predict + compare in one pass");
  add_experiment_flags(report_cmd, opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      auto cfg = resolve(opts);
      auto artifacts = patternlab::run_experiment(cfg);
      std::cout << "wrote " << artifacts.runs_csv.string() << ", "
                << artifacts.summary_csv.string() << " (" << artifacts.total_runs << " runs)\n";
    } else if (predict_cmd->parsed()) {
      auto cfg = resolve(opts);
      auto path = patternlab::predict_experiment(cfg);
      std::cout << "wrote " << path.string() << "\n";
    } else if (compare_cmd->parsed()) {
      std::filesystem::path out_dir = compare_out;
      std::filesystem::path theo =
          theoretical_path.empty() ? out_dir / "theoretical.csv"
                                   : std::filesystem::path(theoretical_path);
      std::filesystem::path sum = summary_path.empty() ? out_dir / "summary.csv"
                                                       : std::filesystem::path(summary_path);
      auto artifacts = patternlab::compare_experiment(theo, sum, out_dir);
      std::cout << "wrote " << artifacts.comparison_csv.string() << " and "
                << artifacts.report_md.string() << "\n";
    } else if (replay_cmd->parsed()) {
      if (replay_id.empty() && !replay_all)
        throw CLI::ValidationError("--id", "pass an experiment id or --all");
      int verified =
          patternlab::replay_experiment(replay_out, replay_all ? "all" : replay_id);
      std::cout << "replay verified " << verified << " run(s)\n";
    } else if (report_cmd->parsed()) {
      auto cfg = resolve(opts);
      auto run_artifacts = patternlab::run_experiment(cfg);
      auto theoretical = patternlab::predict_experiment(cfg);
      auto artifacts = patternlab::compare_experiment(theoretical, run_artifacts.summary_csv,
                                                      cfg.out_dir);
      std::cout << "wrote " << artifacts.comparison_csv.string() << " and "
                << artifacts.report_md.string() << " (" << run_artifacts.total_runs
                << " runs)\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
