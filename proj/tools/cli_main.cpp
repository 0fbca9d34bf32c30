// Command-line front end for the kernelized adversarial bandit simulator.
//
//   kbandit run --config FILE [--seeds N] [--out DIR] [--format csv|json] [--threads N]
//   kbandit table2 [--seeds N] [--out DIR] [--format csv|json] [--threads N]
//   kbandit verify [CHECK...] [--list]
//   kbandit plot TRAJECTORIES.csv [--out FILE]
//
// `run` executes every trial section of the config file and writes
// results.{csv|json} plus trajectories.csv; `table2` runs the built-in
// desk-scale grid; `verify` executes the named release checks (all when none
// are given); `plot` renders a trajectories file to a self-contained SVG.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "kbandit/config.hpp"
#include "kbandit/harness.hpp"
#include "kbandit/report.hpp"
#include "kbandit/verify.hpp"

namespace {

using namespace kbandit;

void print_summary(const std::string& name, const SummaryRecord& rec) {
  std::printf("  %-18s %-14s T=%-4d regret %s (+/- %s), %s ms/round, %d trials\n",
              (name + ":").c_str(), rec.learner.c_str(), rec.horizon,
              format_number(rec.mean_regret).c_str(),
              format_number(rec.two_se).c_str(),
              format_number(rec.mean_round_ms).c_str(), rec.n_trials);
}

void write_results(const std::string& out_dir, const std::string& format,
                   const std::vector<SummaryRecord>& records,
                   const std::vector<TrajectoryGroup>& groups) {
  const std::filesystem::path dir(out_dir);
  const std::string results_name = format == "json" ? "results.json" : "results.csv";
  const std::string body = format == "json" ? results_json(records) : results_csv(records);
  write_text_file((dir / results_name).string(), body);
  std::printf("wrote %s\n", (dir / results_name).string().c_str());
  if (!groups.empty()) {
    write_text_file((dir / "trajectories.csv").string(), trajectories_csv(groups));
    std::printf("wrote %s\n", (dir / "trajectories.csv").string().c_str());
  }
}

int cmd_run(const std::string& config_path, int seeds_flag, int threads_flag,
            std::string out_dir, std::string format_flag) {
  const ExperimentConfig cfg = parse_config_file(config_path);
  if (cfg.trials.empty()) {
    std::cerr << "config has no [trial ...] sections\n";
    return 1;
  }
  const int seeds = seeds_flag > 0 ? seeds_flag : cfg.defaults.seeds;
  const int threads = threads_flag > 0 ? threads_flag : cfg.defaults.threads;
  const std::string format = format_flag.empty() ? cfg.defaults.format : format_flag;

  std::vector<SummaryRecord> records;
  std::vector<TrajectoryGroup> groups;
  std::string error;
  for (const NamedTrial& trial : cfg.trials) {
    try {
      const ExperimentRun run = run_experiment(trial.config, seeds, threads);
      records.push_back(run.summary);
      groups.push_back(trajectory_group(trial.name, run.trials));
      print_summary(trial.name, run.summary);
    } catch (const std::exception& e) {
      error = "trial '" + trial.name + "' failed: " + e.what();
      break;
    }
  }
  write_results(out_dir, format, records, groups);  // partial on failure
  if (!error.empty()) {
    std::cerr << error << "\n";
    return 1;
  }
  return 0;
}

int cmd_table2(int seeds, int threads, const std::string& out_dir,
               const std::string& format) {
  std::vector<SummaryRecord> records;
  for (const TrialConfig& config : table2_grid(1)) {
    const ExperimentRun run = run_experiment(config, seeds, threads);
    records.push_back(run.summary);
    print_summary(run.summary.setting + "/" + run.summary.kernel, run.summary);
  }
  write_results(out_dir, format, records, {});
  return 0;
}

int cmd_plot(const std::string& input, std::string output) {
  const std::vector<TrajectoryGroup> groups =
      parse_trajectories_csv(read_text_file(input));
  if (output.empty())
    output = (std::filesystem::path(input).parent_path() / "plot.svg").string();
  write_text_file(output, regret_plot_svg(groups));
  std::printf("wrote %s\n", output.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kernelized adversarial bandit simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "results", format, plot_in, plot_out;
  int seeds = 0, threads = 0;
  std::vector<std::string> checks;
  bool list_checks = false;

  CLI::App* run = app.add_subcommand("run", "run the trials of a config file");
  run->add_option("--config", config_path, "config file path")->required();
  run->add_option("--seeds", seeds, "seeds per trial (overrides config)");
  run->add_option("--threads", threads, "worker threads (overrides config)");
  run->add_option("--out", out_dir, "output directory (default results)");
  run->add_option("--format", format, "results format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  CLI::App* table2 = app.add_subcommand("table2", "run the desk-scale grid");
  table2->add_option("--seeds", seeds, "seeds per cell (default 10)");
  table2->add_option("--threads", threads, "worker threads");
  table2->add_option("--out", out_dir, "output directory (default results)");
  table2->add_option("--format", format, "results format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  CLI::App* verify = app.add_subcommand("verify", "run release checks");
  verify->add_option("checks", checks, "check names (default: all)");
  verify->add_flag("--list", list_checks, "list check names and exit");

  CLI::App* plot = app.add_subcommand("plot", "render a trajectories CSV to SVG");
  plot->add_option("input", plot_in, "trajectories.csv path")->required();
  plot->add_option("--out", plot_out, "output SVG path (default plot.svg beside input)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(config_path, seeds, threads, out_dir, format);
    if (table2->parsed())
      return cmd_table2(seeds > 0 ? seeds : 10, threads, out_dir,
                        format.empty() ? "csv" : format);
    if (verify->parsed()) {
      if (list_checks) {
        for (const std::string& n : verify_names()) std::printf("%s\n", n.c_str());
        return 0;
      }
      return run_and_report(checks, std::cout) == 0 ? 0 : 1;
    }
    if (plot->parsed()) return cmd_plot(plot_in, plot_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
