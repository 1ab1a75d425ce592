// Command-line front end: run and re-analyze experiments, run the acceptance suite.
#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "psgd/harness/config.hpp"
#include "psgd/harness/experiments.hpp"
#include "psgd/harness/manifest.hpp"
#include "psgd/objective.hpp"
#include "psgd/verify/acceptance.hpp"

namespace {

using namespace psgd;

void print_summary(const harness::Analysis& a) {
  a.summary.write_csv(std::cout);
  if (!a.notes.empty()) std::cout << "notes: " << a.notes.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisson SGD and discrete bouncy particle sampler experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment config and persist its outputs");
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  run->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", out_dir, "Output directory (overrides output_dir in the config)");
  run->add_option("--seed", seed, "Base seed (overrides seed in the config)");

  auto* analyze = app.add_subcommand("analyze", "Recompute summary tables from a run directory");
  std::string run_dir;
  analyze->add_option("dir", run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);

  auto* objectives = app.add_subcommand("list-objectives", "List built-in objectives");

  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  std::string config_dir = verify::default_config_dir().string();
  std::string work_dir = (std::filesystem::temp_directory_path() / "psgd-verify").string();
  std::vector<std::string> only;
  verify->add_option("--config-dir", config_dir, "Directory with acceptance/ and smoke/ configs");
  verify->add_option("--work-dir", work_dir, "Scratch directory for determinism reruns");
  verify->add_option("criteria", only, "Criterion ids such as P1 P4 (default: all)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto cfg = harness::ExperimentConfig::load(config_path);
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      if (seed) cfg.seed = *seed;
      if (cfg.output_dir.empty()) throw std::invalid_argument("no output directory: set output_dir or pass -o");
      const auto outcome = harness::run_experiment(cfg);
      print_summary(outcome.analysis);
      std::cerr << "wrote " << cfg.output_dir << " in " << outcome.wall_seconds << " s\n";
    } else if (*analyze) {
      print_summary(harness::analyze_run_dir(run_dir));
    } else if (*objectives) {
      for (const auto& o : list_objectives()) std::cout << o.name << "\t" << o.description << '\n';
    } else if (*verify) {
      const verify::AcceptanceOptions options{config_dir, work_dir};
      bool all = true;
      verify::run_acceptance(options, only, [&](const verify::CriterionResult& r) {
        all = all && r.pass;
        std::cout << verify::format_result(r) << std::endl;
      });
      return all ? EXIT_SUCCESS : EXIT_FAILURE;
    }
  } catch (const harness::ManifestConflict& e) {
    std::cerr << "manifest conflict: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return EXIT_SUCCESS;
}
