// SPDX-License-Identifier: Apache-2.0
#include "adaptctl/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "adaptctl/enactor.hpp"
#include "adaptctl/errors.hpp"
#include "adaptctl/knowledge.hpp"
#include "adaptctl/metrics.hpp"
#include "adaptctl/pipeline.hpp"
#include "adaptctl/sysmodel.hpp"
#include "adaptctl/textio.hpp"

namespace adaptctl {
namespace {

constexpr double kReportOvershootThreshold = 0.03;
constexpr double kReportSseThreshold = 0.03;

struct CliOptions {
  std::string scenario;
  std::string goals;
  std::string formula;
  std::string knowledge;
  std::string tuned;
  std::string dataset;
  std::string out;
  std::string grid_kp;
  std::string grid_ki;
  std::uint64_t seed = 1;
  std::int64_t ticks = 0;
  std::optional<double> kp;
  std::optional<double> ki;
  int iw = 0;  // 0 falls back to the goals file
  std::optional<double> gran;
  std::optional<double> offset;
};

KnowledgeRepository repo_for(const CliOptions& opts) {
  if (!opts.knowledge.empty())
    return KnowledgeRepository(std::filesystem::path(opts.knowledge));
  return KnowledgeRepository::from_environment();
}

std::filesystem::path pick(const std::string& explicit_path, const KnowledgeRepository& repo,
                           const char* name) {
  if (!explicit_path.empty()) return std::filesystem::path(explicit_path);
  return repo.resolve(name);
}

int cmd_run(const CliOptions& opts) {
  KnowledgeRepository repo = repo_for(opts);
  Scenario scenario = load_scenario(pick(opts.scenario, repo, "scenario.txt"));
  Goals goals = load_goals(pick(opts.goals, repo, "goals.txt"));
  ParametricFormula formula = load_formula(pick(opts.formula, repo, "formula.txt"));

  TunedConfig tuned;
  PIConfig pi;
  if (opts.kp && opts.ki) {
    pi.kp = *opts.kp;
    pi.ki = *opts.ki;
    pi.iw = opts.iw > 0 ? opts.iw : goals.iw;
  } else {
    tuned = load_tuned_config(pick(opts.tuned, repo, "tuned.txt"));
    pi = pi_config_from(tuned, goals);
    if (opts.iw > 0) pi.iw = opts.iw;
  }

  ClosedLoopOptions loop;
  loop.ticks = opts.ticks;
  loop.manager_enabled = true;
  if (opts.gran)
    loop.search.gran = *opts.gran;
  else if (tuned.gran)
    loop.search.gran = *tuned.gran;
  if (opts.offset)
    loop.search.offset = *opts.offset;
  else if (tuned.offset)
    loop.search.offset = *tuned.offset;

  ClosedLoopResult result = run_closed_loop(scenario, formula, goals, pi, opts.seed, loop);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";

  const std::filesystem::path out_dir =
      opts.out.empty() ? std::filesystem::path("out") : std::filesystem::path(opts.out);
  const std::string response_name =
      "response_" + format_int(static_cast<std::int64_t>(opts.seed)) + ".csv";
  const std::map<std::string, std::string> metadata{
      {"scenario", scenario.name},
      {"seed", format_int(static_cast<std::int64_t>(opts.seed))},
      {"kp", format_double(pi.kp)},
      {"ki", format_double(pi.ki)},
      {"iw", format_int(pi.iw)},
  };
  write_response_csv(out_dir / response_name, result.response, metadata);

  std::ostringstream report;
  report << artifact_header("run-report");
  report << "scenario " << scenario.name << "\n";
  report << "seed " << format_int(static_cast<std::int64_t>(opts.seed)) << "\n";
  report << "kp " << format_double(pi.kp) << "\n";
  report << "ki " << format_double(pi.ki) << "\n";
  report << "iw " << format_int(pi.iw) << "\n";
  report << "gran " << format_double(loop.search.gran) << "\n";
  report << "offset " << format_double(loop.search.offset) << "\n";
  report << "response " << response_name << "\n";
  report << "stable " << (result.metrics.stable ? "1" : "0") << "\n";
  report << "overshoot " << format_double(result.metrics.overshoot) << "\n";
  if (result.metrics.steady_state_error)
    report << "sse " << format_double(*result.metrics.steady_state_error) << "\n";
  if (result.metrics.settling_time)
    report << "settling_time " << format_int(*result.metrics.settling_time) << "\n";
  report << "adaptations " << format_int(static_cast<std::int64_t>(result.adaptations)) << "\n";
  report << "escalations " << format_int(static_cast<std::int64_t>(result.escalations)) << "\n";
  report << "manager_invocations "
         << format_int(static_cast<std::int64_t>(result.manager_invocations)) << "\n";
  const std::filesystem::path report_path =
      out_dir / ("run_" + format_int(static_cast<std::int64_t>(opts.seed)) + ".txt");
  write_text_file(report_path, report.str());

  std::cout << "run " << scenario.name << " seed=" << opts.seed
            << ": stable=" << (result.metrics.stable ? "1" : "0")
            << " overshoot=" << format_double(result.metrics.overshoot);
  if (result.metrics.steady_state_error)
    std::cout << " sse=" << format_double(*result.metrics.steady_state_error);
  if (result.metrics.settling_time)
    std::cout << " settling_time=" << format_int(*result.metrics.settling_time);
  std::cout << " adaptations=" << result.adaptations << " escalations=" << result.escalations
            << "\n";
  std::cout << "wrote " << (out_dir / response_name).string() << " and " << report_path.string()
            << "\n";
  return 0;
}

int cmd_collect(const CliOptions& opts) {
  KnowledgeRepository repo = repo_for(opts);
  Scenario scenario = load_scenario(pick(opts.scenario, repo, "scenario.txt"));
  Goals goals = load_goals(pick(opts.goals, repo, "goals.txt"));
  ParametricFormula formula = load_formula(pick(opts.formula, repo, "formula.txt"));

  EnactorCollectOptions collect;
  collect.kps = parse_grid_spec(opts.grid_kp);
  collect.kis = parse_grid_spec(opts.grid_ki);
  collect.iw = opts.iw > 0 ? opts.iw : goals.iw;
  collect.seed = opts.seed;
  collect.ticks = opts.ticks;

  std::vector<EnactorDatapoint> rows = collect_enactor_data(scenario, formula, goals, collect);
  const std::filesystem::path out =
      opts.out.empty() ? repo.resolve("dataset_enactor.txt") : std::filesystem::path(opts.out);
  save_enactor_dataset(out, rows);
  std::cout << "collected " << rows.size() << " configurations -> " << out.string() << "\n";
  return 0;
}

int cmd_tune(const CliOptions& opts) {
  KnowledgeRepository repo = repo_for(opts);
  Goals goals = load_goals(pick(opts.goals, repo, "goals.txt"));
  const std::filesystem::path dataset =
      opts.dataset.empty() ? repo.resolve("dataset_enactor.txt")
                           : std::filesystem::path(opts.dataset);
  const std::filesystem::path out_dir =
      opts.out.empty() ? repo.root() : std::filesystem::path(opts.out);
  const std::string kind = artifact_kind(dataset);
  const std::string hash = file_hash(dataset);

  if (kind == "dataset-enactor") {
    EnactorTuneResult result = run_enactor_pipeline(load_enactor_dataset(dataset), goals, opts.seed);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    result.tuned.dataset_hash = hash;
    save_tuned_config(out_dir / "tuned.txt", result.tuned);
    for (const auto& f : result.fits)
      save_model(out_dir / ("model_" + f.gain + "_" + f.metric + ".txt"), f.model);
    nsga2::write_front_csv((out_dir / "front_kp.csv").string(), result.kp_front);
    nsga2::write_front_csv((out_dir / "front_ki.csv").string(), result.ki_front);
    std::cout << "tuned kp=" << format_double(*result.tuned.kp)
              << " ki=" << format_double(*result.tuned.ki)
              << " iw=" << format_int(*result.tuned.iw) << " -> "
              << (out_dir / "tuned.txt").string() << "\n";
  } else if (kind == "dataset-manager") {
    ManagerTuneResult result = run_manager_pipeline(load_manager_dataset(dataset), goals, opts.seed);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    result.tuned.dataset_hash = hash;
    save_tuned_config(out_dir / "tuned.txt", result.tuned);
    save_model(out_dir / "model_time.txt", result.model);
    std::cout << "tuned gran=" << format_double(*result.tuned.gran)
              << " offset=" << format_double(*result.tuned.offset)
              << " predicted_time=" << format_double(result.predicted_time) << "s -> "
              << (out_dir / "tuned.txt").string() << "\n";
  } else {
    throw IoError(dataset.string() + " holds a '" + kind + "' artifact, expected a dataset");
  }
  return 0;
}

int cmd_report(const CliOptions& opts) {
  KnowledgeRepository repo = repo_for(opts);
  const std::filesystem::path dataset =
      opts.dataset.empty() ? repo.resolve("dataset_enactor.txt")
                           : std::filesystem::path(opts.dataset);
  std::vector<EnactorDatapoint> rows = load_enactor_dataset(dataset);
  if (rows.empty()) throw Error("dataset " + dataset.string() + " has no rows to rank");

  auto metrics_of = [](const EnactorDatapoint& r) {
    ControlMetrics m;
    m.stable = r.stable;
    m.overshoot = r.overshoot;
    m.steady_state_error = r.sse;
    if (r.settling_time) m.settling_time = *r.settling_time;
    return m;
  };
  auto passes = [](const EnactorDatapoint& r) {
    return r.stable && r.overshoot <= kReportOvershootThreshold && r.sse &&
           *r.sse <= kReportSseThreshold;
  };

  std::vector<EnactorDatapoint> ranked = rows;
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&](const EnactorDatapoint& a, const EnactorDatapoint& b) {
                     const bool pa = passes(a), pb = passes(b);
                     if (pa != pb) return pa;
                     return compare_metrics(metrics_of(a), metrics_of(b)) < 0;
                   });
  const std::size_t n_pass =
      static_cast<std::size_t>(std::count_if(ranked.begin(), ranked.end(), passes));

  std::ostringstream out;
  out << artifact_header("report");
  out << "# source " << file_hash(dataset) << "\n";
  out << "# thresholds: stable, overshoot <= " << format_double(kReportOvershootThreshold)
      << ", sse <= " << format_double(kReportSseThreshold) << "\n";
  out << "# " << n_pass << " of " << ranked.size() << " configurations meet the thresholds\n";
  out << "kp,ki,iw,stable,overshoot,sse,settling_time\n";
  bool divider_emitted = n_pass == ranked.size();
  for (const auto& r : ranked) {
    if (!divider_emitted && !passes(r)) {
      out << "# --- configurations below miss the thresholds ---\n";
      divider_emitted = true;
    }
    out << format_double(r.kp) << "," << format_double(r.ki) << "," << format_int(r.iw) << ","
        << (r.stable ? "1" : "0") << "," << format_double(r.overshoot) << ",";
    if (r.sse) out << format_double(*r.sse);
    out << ",";
    if (r.settling_time) out << format_int(*r.settling_time);
    out << "\n";
  }

  const std::filesystem::path out_path =
      opts.out.empty() ? repo.resolve("report.txt") : std::filesystem::path(opts.out);
  write_text_file(out_path, out.str());

  const EnactorDatapoint& best = ranked.front();
  std::cout << "report: " << n_pass << " of " << ranked.size()
            << " configurations meet the thresholds; best kp=" << format_double(best.kp)
            << " ki=" << format_double(best.ki) << " iw=" << format_int(best.iw) << "\n";
  std::cout << "wrote " << out_path.string() << "\n";
  return 0;
}

}  // namespace

std::vector<double> parse_grid_spec(const std::string& spec) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : spec) {
    if (c == ':') {
      parts.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  parts.push_back(current);

  if (parts.size() == 1) {
    auto v = try_parse_double(parts[0]);
    if (!v) throw ParseError("grid '" + spec + "' is not a number or lo:hi:step");
    return {*v};
  }
  if (parts.size() != 3) throw ParseError("grid '" + spec + "' is not lo:hi:step");

  auto lo = try_parse_double(parts[0]);
  auto hi = try_parse_double(parts[1]);
  auto step = try_parse_double(parts[2]);
  if (!lo || !hi || !step) throw ParseError("grid '" + spec + "' is not lo:hi:step");
  if (!(*step > 0.0)) throw ParseError("grid '" + spec + "' needs a positive step");
  if (*hi < *lo) throw ParseError("grid '" + spec + "' has hi below lo");

  const double span = *hi - *lo;
  const double count = span / *step;
  const long long n = std::llround(count);
  if (std::fabs(count - static_cast<double>(n)) > 1e-6 * std::max(1.0, count))
    throw ParseError("grid '" + spec + "' step does not divide the range");

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n) + 1);
  for (long long i = 0; i < n; ++i) values.push_back(*lo + static_cast<double>(i) * *step);
  values.push_back(*hi);
  return values;
}

int run_cli(int argc, const char* const* argv) {
  CliOptions opts;
  CLI::App app{"Self-adaptive control for a simulated sensor network"};
  app.require_subcommand(1);

  auto add_inputs = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", opts.scenario, "Scenario file (default <knowledge>/scenario.txt)");
    cmd->add_option("--goals", opts.goals, "Goals file (default <knowledge>/goals.txt)");
    cmd->add_option("--formula", opts.formula,
                    "Reliability formula file (default <knowledge>/formula.txt)");
  };
  auto add_knowledge = [&](CLI::App* cmd) {
    cmd->add_option("--knowledge", opts.knowledge,
                    "Knowledge directory (default $ADAPTCTL_KNOWLEDGE_DIR or ./knowledge)");
  };

  CLI::App* run_cmd = app.add_subcommand("run", "Run one closed-loop simulation");
  add_inputs(run_cmd);
  add_knowledge(run_cmd);
  run_cmd->add_option("--seed", opts.seed, "Simulation seed");
  run_cmd->add_option("--ticks", opts.ticks, "Override the scenario length");
  CLI::Option* kp_opt = run_cmd->add_option("--kp", opts.kp, "Proportional gain");
  CLI::Option* ki_opt = run_cmd->add_option("--ki", opts.ki, "Integral gain");
  kp_opt->needs(ki_opt);
  ki_opt->needs(kp_opt);
  run_cmd->add_option("--iw", opts.iw, "Integral window (default from goals)");
  run_cmd->add_option("--gran", opts.gran, "Strategy search granularity");
  run_cmd->add_option("--offset", opts.offset, "Strategy search starting offset");
  run_cmd->add_option("--tuned", opts.tuned,
                      "Tuned config to run with (default <knowledge>/tuned.txt)");
  run_cmd->add_option("--out", opts.out, "Output directory (default ./out)");

  CLI::App* collect_cmd =
      app.add_subcommand("collect", "Sweep a PI gain grid and record control metrics");
  add_inputs(collect_cmd);
  add_knowledge(collect_cmd);
  collect_cmd->add_option("--seed", opts.seed, "Simulation seed (shared by every cell)");
  collect_cmd->add_option("--ticks", opts.ticks, "Override the scenario length");
  collect_cmd->add_option("--grid-kp", opts.grid_kp, "Proportional gain grid lo:hi:step")
      ->required();
  collect_cmd->add_option("--grid-ki", opts.grid_ki, "Integral gain grid lo:hi:step")
      ->required();
  collect_cmd->add_option("--iw", opts.iw, "Integral window (default from goals)");
  collect_cmd->add_option("--out", opts.out,
                          "Dataset file (default <knowledge>/dataset_enactor.txt)");

  CLI::App* tune_cmd = app.add_subcommand("tune", "Fit models to a dataset and pick a config");
  add_knowledge(tune_cmd);
  tune_cmd->add_option("--goals", opts.goals, "Goals file (default <knowledge>/goals.txt)");
  tune_cmd->add_option("--seed", opts.seed, "Optimizer seed");
  tune_cmd->add_option("--dataset", opts.dataset,
                       "Dataset to tune from (default <knowledge>/dataset_enactor.txt)");
  tune_cmd->add_option("--out", opts.out, "Output directory (default the knowledge directory)");

  CLI::App* report_cmd = app.add_subcommand("report", "Rank a dataset's configurations");
  add_knowledge(report_cmd);
  report_cmd->add_option("--dataset", opts.dataset,
                         "Dataset to rank (default <knowledge>/dataset_enactor.txt)");
  report_cmd->add_option("--out", opts.out, "Report file (default <knowledge>/report.txt)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand("run")) return cmd_run(opts);
    if (app.got_subcommand("collect")) return cmd_collect(opts);
    if (app.got_subcommand("tune")) return cmd_tune(opts);
    if (app.got_subcommand("report")) return cmd_report(opts);
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace adaptctl
