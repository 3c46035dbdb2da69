#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tune/analytic.hpp"
#include "tune/experiment.hpp"
#include "tune/optimize.hpp"
#include "tune/synth.hpp"

namespace {

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            std::optional<std::size_t> subsample, const std::string& out_dir, bool quiet) {
  tune::ExperimentConfig config = tune::load_experiment_config(config_path);
  if (seed) config.seed = *seed;
  if (subsample) config.subsample = *subsample;
  tune::CampaignResult campaign = tune::run_experiment(config, out_dir, !quiet);
  tune::RenderedReport report = tune::render_report(campaign);
  std::cout << report.markdown;
  if (!quiet)
    std::cerr << "results written to " << out_dir << "/summary.json, report.md, report.json\n";
  return 0;
}

int cmd_report(const std::string& config_path, const std::string& results_dir,
               const std::string& format) {
  tune::ExperimentConfig config = tune::load_experiment_config(config_path);
  std::ifstream in(std::filesystem::path(results_dir) / "summary.json");
  if (!in) {
    std::cerr << "no summary.json under " << results_dir << "\n";
    return 1;
  }
  tune::json doc = tune::json::parse(in);
  tune::CampaignResult campaign = tune::campaign_from_json(doc, config.strategies);
  tune::RenderedReport report = tune::render_report(campaign);
  if (format == "json")
    std::cout << report.machine.dump(2) << "\n";
  else
    std::cout << report.markdown;
  return 0;
}

int cmd_bench() {
  using namespace tune;
  std::cout << "analytic benchmark suite\n\n";

  {
    SearchSpace space = sphere_space();
    PsoParams params;
    std::size_t budget = params.swarm_size * (params.generations + 1);
    int hits = 0;
    std::cout << "pso / 2-d sphere, 10 particles x 40 generations:\n";
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      StrategyResult r = pso_optimize(space, sphere_objective(), params, seed, budget);
      bool ok = r.best_score >= -1e-2;
      hits += ok;
      std::cout << "  seed " << seed << ": best " << r.best_score << (ok ? "" : "  (miss)")
                << "\n";
    }
    std::cout << "  => " << hits << "/10 seeds reached -1e-2\n\n";
  }
  {
    SearchSpace space = onemax_space();
    GAParams params;
    std::size_t budget = params.population_size * (params.generations + 1);
    int hits = 0;
    std::cout << "ga / 10-gene onemax, pop 10 x 40 generations:\n";
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      StrategyResult r = ga_optimize(space, onemax_objective(), params, seed, budget);
      bool ok = r.best_score == 10.0;
      hits += ok;
      std::cout << "  seed " << seed << ": best " << r.best_score << (ok ? "" : "  (miss)")
                << "\n";
    }
    std::cout << "  => " << hits << "/10 seeds reached the optimum\n\n";
  }
  {
    SearchSpace space = smooth1d_space();
    int bayes_wins = 0;
    std::cout << "bayes vs random / -(x-0.3)^2 on [0,1], budget 20, paired seeds:\n";
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      StrategyResult b = bayes_optimize(space, smooth1d_objective(), 20, seed);
      StrategyResult r = random_search(space, smooth1d_objective(), 20, seed);
      bayes_wins += b.best_score > r.best_score;
    }
    std::cout << "  bayes beat random on " << bayes_wins << "/20 paired seeds\n";
  }
  return 0;
}

int cmd_synth(std::size_t rows, std::uint64_t seed, const std::string& out_path) {
  tune::LabeledDataset data = tune::make_synthetic_elec2(rows, seed);
  tune::write_csv(data, out_path);
  auto counts = data.class_counts();
  std::cerr << "wrote " << rows << " rows to " << out_path << " (";
  bool first = true;
  for (const auto& [label, n] : counts) {
    if (!first) std::cerr << ", ";
    std::cerr << label << "=" << n;
    first = false;
  }
  std::cerr << ")\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"hyperparameter search strategies over a random-forest CV objective"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::string results_dir;
  std::string format = "md";
  std::string suite = "analytic";
  std::string synth_out = "elec2_synthetic.csv";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> subsample;
  std::size_t synth_rows = 45312;
  std::uint64_t synth_seed = 7;
  bool quiet = false;

  CLI::App* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("--config", config_path, "experiment config file")->required();
  run->add_option("--seed", seed, "override the config's root seed");
  run->add_option("--subsample", subsample, "override the config's subsample size");
  run->add_option("--out", out_dir, "output directory (default: out)");
  run->add_flag("--quiet", quiet, "suppress progress output");

  CLI::App* report = app.add_subcommand("report", "render reports from persisted results");
  report->add_option("--config", config_path, "experiment config file")->required();
  report->add_option("--results", results_dir, "results directory")->required();
  report->add_option("--format", format, "md or json")->check(CLI::IsMember({"md", "json"}));

  CLI::App* bench = app.add_subcommand("bench", "run the analytic benchmark suite");
  bench->add_option("--suite", suite, "suite name")->check(CLI::IsMember({"analytic"}));

  CLI::App* synth = app.add_subcommand("synth", "write a synthetic electricity-style CSV");
  synth->add_option("--rows", synth_rows, "row count (default 45312)");
  synth->add_option("--seed", synth_seed, "generator seed (default 7)");
  synth->add_option("--out", synth_out, "output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, seed, subsample, out_dir, quiet);
    if (report->parsed()) return cmd_report(config_path, results_dir, format);
    if (bench->parsed()) return cmd_bench();
    if (synth->parsed()) return cmd_synth(synth_rows, synth_seed, synth_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
