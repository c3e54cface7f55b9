#pragma once

#include <atomic>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "csv.hpp"
#include "patterns.hpp"
#include "stats.hpp"
#include "topology_io.hpp"

namespace patternlab {

enum class PatternKind { GatewayAggregation, GatewayOffloading, PipesAndFilters, Custom };

inline const char* to_string(PatternKind kind) {
  switch (kind) {
    case PatternKind::GatewayAggregation: return "gateway_aggregation";
    case PatternKind::GatewayOffloading: return "gateway_offloading";
    case PatternKind::PipesAndFilters: return "pipes_and_filters";
    case PatternKind::Custom: return "custom";
  }
  return "custom";
}

inline PatternKind pattern_kind_from_string(const std::string& text) {
  if (text == "gateway_aggregation") return PatternKind::GatewayAggregation;
  if (text == "gateway_offloading") return PatternKind::GatewayOffloading;
  if (text == "pipes_and_filters") return PatternKind::PipesAndFilters;
  if (text == "custom") return PatternKind::Custom;
  throw std::invalid_argument("unknown pattern '" + text + "'");
}

struct ExperimentConfig {
  PatternKind pattern = PatternKind::GatewayAggregation;
  std::string custom_topology;  // config file path when pattern == Custom
  std::vector<int> offloads = {0, 5, 10};
  std::vector<PipesVariant> variants = {PipesVariant::Joint1Cpu, PipesVariant::Joint2Cpu,
                                        PipesVariant::Separated};
  double gateway_overhead = 0.0;
  int granularity = 5;
  int repetitions = 6;
  int analytic_users = 16;
  SimConfig sim;
  std::filesystem::path out_dir = "out";
};

// One pattern variant and the slug all of its rows share.
struct SweepGroup {
  std::string id;
  PatternModel model;
};

inline std::vector<SweepGroup> expand_groups(const ExperimentConfig& cfg) {
  std::vector<SweepGroup> groups;
  switch (cfg.pattern) {
    case PatternKind::GatewayAggregation:
      groups.push_back({"gateway_aggregation-ovh" + format_double(cfg.gateway_overhead),
                        build_gateway_aggregation(cfg.gateway_overhead)});
      break;
    case PatternKind::GatewayOffloading:
      for (int offload : cfg.offloads)
        groups.push_back({"gateway_offloading-off" + std::to_string(offload),
                          build_gateway_offloading(offload)});
      break;
    case PatternKind::PipesAndFilters:
      for (PipesVariant variant : cfg.variants)
        groups.push_back({std::string("pipes_and_filters-") + to_string(variant),
                          build_pipes_and_filters(variant)});
      break;
    case PatternKind::Custom: {
      auto model = load_topology_file(cfg.custom_topology);
      groups.push_back({"custom-" + model.name, std::move(model)});
      break;
    }
  }
  return groups;
}

inline std::string mix_slug(double p) {
  char buffer[8];
  std::snprintf(buffer, sizeof buffer, "p%03d", static_cast<int>(std::lround(p * 100.0)));
  return buffer;
}

inline std::string point_id(const std::string& group, double mix_p) {
  return group + "-" + mix_slug(mix_p);
}

inline std::string run_id(const std::string& group, double mix_p, int rep) {
  return point_id(group, mix_p) + "-rep" + std::to_string(rep);
}

namespace detail {

// Fixed-size worker pool; tasks write into disjoint slots so output does not
// depend on scheduling.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  unsigned hw = std::thread::hardware_concurrency();
  std::size_t workers = std::min<std::size_t>(std::max(1u, hw), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
  if (!out) throw std::runtime_error("cannot write to '" + path.string() + "'");
  return out;
}

inline std::string iso8601_now() {
  std::time_t now = std::time(nullptr);
  char buffer[32];
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buffer;
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json sim{{"duration", cfg.sim.duration},
                     {"users", cfg.sim.users},
                     {"time_unit", cfg.sim.time_unit},
                     {"dist", to_string(cfg.sim.service_time_dist)},
                     {"sample_interval", cfg.sim.sample_interval},
                     {"warmup_fraction", cfg.sim.warmup_fraction},
                     {"seed", cfg.sim.seed}};
  nlohmann::json variants = nlohmann::json::array();
  for (auto v : cfg.variants) variants.push_back(to_string(v));
  return nlohmann::json{{"pattern", to_string(cfg.pattern)},
                        {"custom_topology", cfg.custom_topology},
                        {"offloads", cfg.offloads},
                        {"variants", variants},
                        {"gateway_overhead", cfg.gateway_overhead},
                        {"granularity", cfg.granularity},
                        {"repetitions", cfg.repetitions},
                        {"analytic_users", cfg.analytic_users},
                        {"sim", sim},
                        {"out_dir", cfg.out_dir.string()}};
}

inline ExperimentConfig config_from_json(const nlohmann::json& doc) {
  ExperimentConfig cfg;
  cfg.pattern = pattern_kind_from_string(doc.at("pattern").get<std::string>());
  cfg.custom_topology = doc.at("custom_topology").get<std::string>();
  cfg.offloads = doc.at("offloads").get<std::vector<int>>();
  cfg.variants.clear();
  for (const auto& v : doc.at("variants"))
    cfg.variants.push_back(pipes_variant_from_string(v.get<std::string>()));
  cfg.gateway_overhead = doc.at("gateway_overhead").get<double>();
  cfg.granularity = doc.at("granularity").get<int>();
  cfg.repetitions = doc.at("repetitions").get<int>();
  cfg.analytic_users = doc.at("analytic_users").get<int>();
  const auto& sim = doc.at("sim");
  cfg.sim.duration = sim.at("duration").get<double>();
  cfg.sim.users = sim.at("users").get<int>();
  cfg.sim.time_unit = sim.at("time_unit").get<double>();
  cfg.sim.service_time_dist = service_time_dist_from_string(sim.at("dist").get<std::string>());
  cfg.sim.sample_interval = sim.at("sample_interval").get<double>();
  cfg.sim.warmup_fraction = sim.at("warmup_fraction").get<double>();
  cfg.sim.seed = sim.at("seed").get<std::uint64_t>();
  cfg.out_dir = doc.at("out_dir").get<std::string>();
  return cfg;
}

struct RunRow {
  std::string group;
  double mix_p;
  int rep;
  std::string scope;
  double t;
  double value;
};

struct SummaryRow {
  std::string group;
  double mix_p;
  int rep;
  std::string scope;
  double mean_value;
};

inline bool operator<(const RunRow& a, const RunRow& b) {
  return std::tie(a.group, a.mix_p, a.rep, a.scope, a.t) <
         std::tie(b.group, b.mix_p, b.rep, b.scope, b.t);
}

inline bool operator<(const SummaryRow& a, const SummaryRow& b) {
  return std::tie(a.group, a.mix_p, a.rep, a.scope) <
         std::tie(b.group, b.mix_p, b.rep, b.scope);
}

inline std::string summary_line(const SummaryRow& row) {
  return csv_escape(run_id(row.group, row.mix_p, row.rep)) + "," + std::to_string(row.rep) +
         "," + format_double(row.mix_p) + "," + csv_escape(row.scope) + "," +
         format_double(row.mean_value) + "\n";
}

inline std::vector<SummaryRow> summary_rows_for(const std::string& group, double mix_p, int rep,
                                                const RunSummary& summary) {
  std::vector<SummaryRow> rows;
  rows.push_back({group, mix_p, rep, "delay", summary.mean_delay});
  rows.push_back({group, mix_p, rep, "throughput", summary.throughput});
  for (const auto& [service, value] : summary.utilization)
    rows.push_back({group, mix_p, rep, "util:" + service, value});
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace detail

struct RunArtifacts {
  std::filesystem::path runs_csv;
  std::filesystem::path summary_csv;
  std::filesystem::path manifest;
  int total_runs = 0;
};

// Executes repetitions x mixes simulations for every group in the config and
// persists runs.csv (per-sample utilization + delay percentiles), summary.csv
// (per-run means) and manifest.json (config echo + per-run seeds, for
// replay). Independent runs execute on a worker pool; rows are sorted before
// writing so the files are identical regardless of scheduling.
inline RunArtifacts run_experiment(const ExperimentConfig& cfg) {
  if (cfg.granularity < 1) throw std::invalid_argument("granularity must be >= 1");
  if (cfg.repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");

  auto groups = expand_groups(cfg);

  struct Task {
    std::size_t group;
    LoadMix mix;
    double mix_p;
    int rep;
  };
  std::vector<Task> tasks;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    auto sweep = enumerate_mixes(cfg.granularity, groups[g].model.request_types);
    const std::string& first_type = groups[g].model.request_types.front().label;
    for (const auto& mix : sweep.mixes)
      for (int rep = 0; rep < cfg.repetitions; ++rep)
        tasks.push_back({g, mix, mix.probability(first_type), rep});
  }

  struct TaskOutput {
    std::vector<detail::RunRow> run_rows;
    std::vector<detail::SummaryRow> summary_rows;
  };
  std::vector<TaskOutput> outputs(tasks.size());

  detail::parallel_for(tasks.size(), [&](std::size_t i) {
    const Task& task = tasks[i];
    const auto& group = groups[task.group];
    SimConfig run_cfg = cfg.sim;
    run_cfg.seed = cfg.sim.seed + static_cast<std::uint64_t>(task.rep);
    RunResult result = simulate(group.model, task.mix, run_cfg);
    RunSummary summary = summarize_run(result);

    auto& out = outputs[i];
    for (const auto& trace : result.services)
      for (const auto& [t, value] : cpu_utilization(trace.cpu_samples))
        out.run_rows.push_back(
            {group.id, task.mix_p, task.rep, "util:" + trace.service, t, value});
    for (const auto& [q, value] : summary.delay_percentiles)
      out.run_rows.push_back(
          {group.id, task.mix_p, task.rep, "delay_percentile", static_cast<double>(q), value});
    out.summary_rows = detail::summary_rows_for(group.id, task.mix_p, task.rep, summary);
  });

  std::vector<detail::RunRow> run_rows;
  std::vector<detail::SummaryRow> summary_rows;
  for (auto& out : outputs) {
    run_rows.insert(run_rows.end(), out.run_rows.begin(), out.run_rows.end());
    summary_rows.insert(summary_rows.end(), out.summary_rows.begin(), out.summary_rows.end());
  }
  std::sort(run_rows.begin(), run_rows.end());
  std::sort(summary_rows.begin(), summary_rows.end());

  std::filesystem::create_directories(cfg.out_dir);
  RunArtifacts artifacts;
  artifacts.total_runs = static_cast<int>(tasks.size());
  artifacts.runs_csv = cfg.out_dir / "runs.csv";
  artifacts.summary_csv = cfg.out_dir / "summary.csv";
  artifacts.manifest = cfg.out_dir / "manifest.json";

  {
    auto out = detail::open_output(artifacts.runs_csv);
    out << "experiment_id,rep,mix_p,scope,t,value\n";
    for (const auto& row : run_rows)
      out << csv_escape(run_id(row.group, row.mix_p, row.rep)) << "," << row.rep << ","
          << format_double(row.mix_p) << "," << csv_escape(row.scope) << ","
          << format_double(row.t) << "," << format_double(row.value) << "\n";
  }
  {
    auto out = detail::open_output(artifacts.summary_csv);
    out << "experiment_id,rep,mix_p,scope,mean_value\n";
    for (const auto& row : summary_rows) out << detail::summary_line(row);
  }
  {
    nlohmann::json runs = nlohmann::json::array();
    std::vector<const Task*> ordered;
    for (const auto& task : tasks) ordered.push_back(&task);
    std::sort(ordered.begin(), ordered.end(), [&](const Task* a, const Task* b) {
      return std::tie(groups[a->group].id, a->mix_p, a->rep) <
             std::tie(groups[b->group].id, b->mix_p, b->rep);
    });
    for (const Task* task : ordered)
      runs.push_back({{"id", run_id(groups[task->group].id, task->mix_p, task->rep)},
                      {"group", groups[task->group].id},
                      {"mix_p", task->mix_p},
                      {"rep", task->rep},
                      {"seed", cfg.sim.seed + static_cast<std::uint64_t>(task->rep)}});
    nlohmann::json manifest{{"schema", "patternlab-manifest-v1"},
                            {"created", detail::iso8601_now()},
                            {"config", detail::config_to_json(cfg)},
                            {"runs", runs}};
    auto out = detail::open_output(artifacts.manifest);
    out << manifest.dump(2) << "\n";
  }
  return artifacts;
}

// Solver sweep for the same configuration: one theoretical.csv row per
// (mix, scope), with the predicted bottleneck on every row.
inline std::filesystem::path predict_experiment(const ExperimentConfig& cfg) {
  if (cfg.granularity < 1) throw std::invalid_argument("granularity must be >= 1");
  auto groups = expand_groups(cfg);

  struct Row {
    std::string group;
    double mix_p;
    std::string scope;
    double value;
    std::string bottleneck;
  };
  std::vector<Row> rows;
  for (const auto& group : groups) {
    auto sweep = enumerate_mixes(cfg.granularity, group.model.request_types);
    const std::string& first_type = group.model.request_types.front().label;
    auto predictions = predict_sweep(group.model, sweep, cfg.analytic_users, cfg.sim.time_unit);
    for (const auto& prediction : predictions) {
      double p = prediction.mix.probability(first_type);
      rows.push_back({group.id, p, "delay", prediction.response_time, prediction.bottleneck});
      rows.push_back({group.id, p, "throughput", prediction.throughput, prediction.bottleneck});
      for (const auto& [service, value] : prediction.utilization)
        rows.push_back({group.id, p, "util:" + service, value, prediction.bottleneck});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.group, a.mix_p, a.scope) < std::tie(b.group, b.mix_p, b.scope);
  });

  std::filesystem::create_directories(cfg.out_dir);
  auto path = cfg.out_dir / "theoretical.csv";
  auto out = detail::open_output(path);
  out << "experiment_id,mix_p,scope,value,bottleneck\n";
  for (const auto& row : rows)
    out << csv_escape(point_id(row.group, row.mix_p)) << "," << format_double(row.mix_p) << ","
        << csv_escape(row.scope) << "," << format_double(row.value) << ","
        << csv_escape(row.bottleneck) << "\n";
  return path;
}

struct CompareArtifacts {
  std::filesystem::path comparison_csv;
  std::filesystem::path report_md;
  std::vector<std::filesystem::path> plot_csvs;
  std::map<std::string, ComparisonReport> reports;  // by group
};

namespace detail {

inline std::string strip_suffix_tag(const std::string& id, const std::string& marker) {
  auto pos = id.rfind(marker);
  if (pos == std::string::npos) return id;
  for (std::size_t i = pos + marker.size(); i < id.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(id[i]))) return id;
  return id.substr(0, pos);
}

inline std::string group_of_summary_id(const std::string& id) {
  return strip_suffix_tag(strip_suffix_tag(id, "-rep"), "-p");
}

inline std::string group_of_point_id(const std::string& id) {
  return strip_suffix_tag(id, "-p");
}

inline std::string plot_column(const std::string& scope) {
  std::string out = scope;
  for (char& c : out)
    if (c == ':') c = '_';
  return out;
}

}  // namespace detail

// Joins theoretical.csv with summary.csv: experimental values are averaged
// per experiment across repetitions, then each scope (system delay, each
// service's utilization) is compared with Spearman, MAE and normalized MAE.
// Emits comparison.csv, a readable report.md and one plot-data CSV per group
// (mix on the x axis, theoretical and experimental columns side by side).
inline CompareArtifacts compare_experiment(const std::filesystem::path& theoretical_csv,
                                           const std::filesystem::path& summary_csv,
                                           const std::filesystem::path& out_dir) {
  auto theoretical = read_csv(theoretical_csv.string());
  auto summary = read_csv(summary_csv.string());

  // group -> mix -> scope -> value (+ bottleneck per mix)
  std::map<std::string, std::map<double, std::map<std::string, double>>> theo;
  std::map<std::string, std::map<double, std::string>> bottlenecks;
  {
    auto id_col = theoretical.column("experiment_id");
    auto mix_col = theoretical.column("mix_p");
    auto scope_col = theoretical.column("scope");
    auto value_col = theoretical.column("value");
    auto bn_col = theoretical.column("bottleneck");
    for (const auto& row : theoretical.rows) {
      std::string group = detail::group_of_point_id(row[id_col]);
      double mix_p = parse_double(row[mix_col]);
      theo[group][mix_p][row[scope_col]] = parse_double(row[value_col]);
      bottlenecks[group][mix_p] = row[bn_col];
    }
  }

  // group -> mix -> scope -> per-rep values
  std::map<std::string, std::map<double, std::map<std::string, std::vector<double>>>> experimental;
  {
    auto id_col = summary.column("experiment_id");
    auto mix_col = summary.column("mix_p");
    auto scope_col = summary.column("scope");
    auto value_col = summary.column("mean_value");
    for (const auto& row : summary.rows) {
      std::string group = detail::group_of_summary_id(row[id_col]);
      double mix_p = parse_double(row[mix_col]);
      experimental[group][mix_p][row[scope_col]].push_back(parse_double(row[value_col]));
    }
  }

  std::vector<std::string> unmatched;
  for (const auto& [group, unused] : theo)
    if (!experimental.count(group)) unmatched.push_back(group + " (theoretical only)");
  for (const auto& [group, unused] : experimental)
    if (!theo.count(group)) unmatched.push_back(group + " (experimental only)");
  if (!unmatched.empty()) {
    std::string message = "experiment id mismatch; unmatched groups:";
    for (const auto& g : unmatched) message += " " + g;
    throw std::invalid_argument(message);
  }

  std::filesystem::create_directories(out_dir);
  CompareArtifacts artifacts;
  artifacts.comparison_csv = out_dir / "comparison.csv";
  artifacts.report_md = out_dir / "report.md";

  auto comparison_out = detail::open_output(artifacts.comparison_csv);
  comparison_out << "experiment_id_group,scope,spearman_rho,p_value,mae,mae_normalized\n";
  auto report_out = detail::open_output(artifacts.report_md);
  report_out << "# Theoretical vs experimental comparison\n";

  for (const auto& [group, theo_points] : theo) {
    const auto& exp_points = experimental.at(group);
    std::vector<double> mixes;
    for (const auto& [mix_p, unused] : theo_points) {
      if (!exp_points.count(mix_p))
        throw std::invalid_argument("group '" + group + "': mix p=" + format_double(mix_p) +
                                    " missing from experimental data");
      mixes.push_back(mix_p);
    }
    for (const auto& [mix_p, unused] : exp_points)
      if (!theo_points.count(mix_p))
        throw std::invalid_argument("group '" + group + "': mix p=" + format_double(mix_p) +
                                    " missing from theoretical data");

    // comparison scopes: delay plus every predicted utilization series
    std::vector<std::string> scope_names;
    for (const auto& [scope, unused] : theo_points.begin()->second)
      if (scope == "delay" || scope.rfind("util:", 0) == 0) scope_names.push_back(scope);

    std::vector<SweepScope> scopes;
    for (const auto& scope : scope_names) {
      SweepScope series{scope, {}, {}};
      for (double mix_p : mixes) {
        series.theoretical.push_back(theo_points.at(mix_p).at(scope));
        auto it = exp_points.at(mix_p).find(scope);
        if (it == exp_points.at(mix_p).end() || it->second.empty())
          throw std::invalid_argument("group '" + group + "': scope '" + scope +
                                      "' missing from experimental data at p=" +
                                      format_double(mix_p));
        double sum = 0.0;
        for (double v : it->second) sum += v;
        series.experimental.push_back(sum / static_cast<double>(it->second.size()));
      }
      scopes.push_back(std::move(series));
    }

    auto report = compare_series(mixes, std::move(scopes));

    auto emit_row = [&](const ScopeComparison& sc) {
      comparison_out << csv_escape(group) << "," << csv_escape(sc.scope) << ","
                     << format_double(sc.correlation.rho) << ","
                     << format_double(sc.correlation.p_value) << "," << format_double(sc.mae)
                     << "," << format_double(sc.mae_normalized) << "\n";
    };
    for (const auto& sc : report.scopes) emit_row(sc);
    if (report.pooled_normalized) emit_row(*report.pooled_normalized);

    report_out << "\n## " << group << "\n\n";
    report_out << "Predicted bottleneck by mix:";
    for (double mix_p : mixes)
      report_out << " p=" << format_double(mix_p) << ": " << bottlenecks[group][mix_p] << ";";
    report_out << "\n\n";
    report_out << "| scope | spearman rho | p-value | p method | MAE | MAE (normalized) |\n";
    report_out << "|---|---|---|---|---|---|\n";
    auto emit_md = [&](const ScopeComparison& sc) {
      report_out << "| " << sc.scope << " | " << format_double(sc.correlation.rho) << " | "
                 << format_double(sc.correlation.p_value) << " | " << sc.correlation.p_method
                 << " | " << format_double(sc.mae) << " | " << format_double(sc.mae_normalized)
                 << " |\n";
    };
    for (const auto& sc : report.scopes) emit_md(sc);
    if (report.pooled_normalized) emit_md(*report.pooled_normalized);

    auto plot_path = out_dir / ("plot_" + group + ".csv");
    auto plot_out = detail::open_output(plot_path);
    plot_out << "mix_p";
    for (const auto& sc : report.scopes)
      plot_out << "," << detail::plot_column(sc.scope) << "_theoretical"
               << "," << detail::plot_column(sc.scope) << "_experimental";
    plot_out << "\n";
    for (std::size_t i = 0; i < mixes.size(); ++i) {
      plot_out << format_double(mixes[i]);
      for (const auto& sc : report.scopes)
        plot_out << "," << format_double(sc.series.theoretical[i]) << ","
                 << format_double(sc.series.experimental[i]);
      plot_out << "\n";
    }
    artifacts.plot_csvs.push_back(plot_path);
    artifacts.reports.emplace(group, std::move(report));
  }
  return artifacts;
}

// Re-simulates recorded runs from their manifest seeds and verifies that the
// regenerated summary rows match summary.csv byte for byte. `id` may be a
// single experiment id or "all".
inline int replay_experiment(const std::filesystem::path& out_dir, const std::string& id) {
  std::ifstream manifest_in(out_dir / "manifest.json");
  if (!manifest_in)
    throw std::runtime_error("cannot open manifest '" + (out_dir / "manifest.json").string() + "'");
  nlohmann::json manifest = nlohmann::json::parse(manifest_in);
  ExperimentConfig cfg = detail::config_from_json(manifest.at("config"));
  auto groups = expand_groups(cfg);

  auto summary = read_csv((out_dir / "summary.csv").string());
  auto id_col = summary.column("experiment_id");
  std::map<std::string, std::vector<std::string>> recorded_lines;
  {
    auto rep_col = summary.column("rep");
    auto mix_col = summary.column("mix_p");
    auto scope_col = summary.column("scope");
    auto value_col = summary.column("mean_value");
    for (const auto& row : summary.rows)
      recorded_lines[row[id_col]].push_back(csv_escape(row[id_col]) + "," + row[rep_col] + "," +
                                            row[mix_col] + "," + csv_escape(row[scope_col]) +
                                            "," + row[value_col] + "\n");
  }

  int verified = 0;
  bool found = false;
  for (const auto& entry : manifest.at("runs")) {
    std::string run = entry.at("id").get<std::string>();
    if (id != "all" && run != id) continue;
    found = true;

    std::string group_id = entry.at("group").get<std::string>();
    double mix_p = entry.at("mix_p").get<double>();
    int rep = entry.at("rep").get<int>();
    std::uint64_t seed = entry.at("seed").get<std::uint64_t>();

    const SweepGroup* group = nullptr;
    for (const auto& g : groups)
      if (g.id == group_id) group = &g;
    if (!group)
      throw std::runtime_error("replay: group '" + group_id + "' not reproducible from config");

    LoadMix mix;
    mix.probabilities[group->model.request_types[0].label] = mix_p;
    mix.probabilities[group->model.request_types[1].label] = 1.0 - mix_p;
    SimConfig run_cfg = cfg.sim;
    run_cfg.seed = seed;
    RunSummary regenerated = summarize_run(simulate(group->model, mix, run_cfg));

    std::vector<std::string> fresh_lines;
    for (const auto& row : detail::summary_rows_for(group_id, mix_p, rep, regenerated))
      fresh_lines.push_back(detail::summary_line(row));

    auto it = recorded_lines.find(run);
    if (it == recorded_lines.end())
      throw std::runtime_error("experiment id '" + run + "' not found in summary.csv");
    if (it->second != fresh_lines)
      throw std::runtime_error("replay mismatch for '" + run +
                               "': regenerated summary differs from the recorded one");
    ++verified;
  }
  if (!found) throw std::runtime_error("experiment id '" + id + "' not found in manifest");
  return verified;
}

}  // namespace patternlab
