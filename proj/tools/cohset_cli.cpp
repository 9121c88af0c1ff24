#include <CLI11.hpp>
#include <iostream>

#include "cohset/errors.hpp"
#include "cohset/experiment.hpp"

namespace {

int fail(int code, const std::string& what) {
  std::cerr << "cohset: " << what << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coherent sets of driven maps and flows via Ulam matrices and Oseledets vectors"};
  app.require_subcommand(1);

  std::string experiment, config_path, output_dir;
  std::vector<std::string> sets;
  unsigned workers = 0;
  bool dry_run = false, quiet = false;
  auto* run = app.add_subcommand("run", "Run an experiment and write its output bundle");
  run->add_option("experiment", experiment, "single-map | periodic3 | aperiodic4 | wave2d");
  run->add_option("-c,--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  run->add_option("-s,--set", sets, "Override a config key (key=value), repeatable");
  run->add_option("-o,--output", output_dir, "Output directory");
  run->add_option("-w,--workers", workers, "Worker threads (results do not depend on this)");
  run->add_flag("--dry-run", dry_run, "Validate the configuration and exit without writing");
  run->add_flag("-q,--quiet", quiet, "No progress messages");

  std::string bundle, plot_out;
  std::vector<std::string> figures;
  auto* emit = app.add_subcommand("emit-plotdata", "Write plot-ready text files from a bundle");
  emit->add_option("bundle", bundle, "Bundle directory written by run")->required()->check(CLI::ExistingDirectory);
  emit->add_option("figure", figures, "Figure ids (default: all available)");
  emit->add_option("-o,--output", plot_out, "Output directory (default: <bundle>/plot)");

  std::string validate_path, validate_experiment;
  std::vector<std::string> validate_sets;
  auto* val = app.add_subcommand("validate-config", "Check a config file and print the resolved settings");
  val->add_option("config", validate_path, "Config file")->required()->check(CLI::ExistingFile);
  val->add_option("-e,--experiment", validate_experiment, "Experiment the file must describe");
  val->add_option("-s,--set", validate_sets, "Override a config key (key=value), repeatable");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      std::vector<std::string> overrides = sets;
      if (!output_dir.empty()) overrides.push_back("output_dir=" + output_dir);
      if (workers > 0) overrides.push_back("workers=" + std::to_string(workers));
      cohset::ExperimentConfig cfg;
      if (!config_path.empty()) {
        cfg = cohset::load_config(config_path, overrides, experiment);
      } else {
        if (experiment.empty()) return fail(2, "run: give an experiment name or --config");
        cfg = cohset::parse_config("", overrides, experiment);
      }
      cohset::RunOptions opts;
      opts.dry_run = dry_run;
      opts.log = quiet ? nullptr : &std::cerr;
      const auto result = cohset::run_experiment(cfg, opts);
      if (dry_run) {
        std::cout << cohset::render(cfg) << "# configuration valid; would write to " << result.output_dir << "\n";
        return 0;
      }
      std::cout << result.output_dir << "/summary.csv\n";
      for (const auto& f : result.failed_checks) std::cerr << "check failed: " << f << "\n";
      return result.ok() ? 0 : 1;
    }
    if (*emit) {
      const std::string out = plot_out.empty() ? bundle + "/plot" : plot_out;
      std::vector<std::string> ids = figures;
      const bool all = ids.empty();
      if (all) ids = cohset::plot_ids();
      for (const auto& id : ids) {
        try {
          for (const auto& p : cohset::emit_plotdata(bundle, id, out)) std::cout << p << "\n";
        } catch (const cohset::ConfigError& e) {
          if (!all || std::string(e.what()).rfind("bundle lacks", 0) != 0) throw;
        }
      }
      return 0;
    }
    if (*val) {
      const auto cfg = cohset::load_config(validate_path, validate_sets, validate_experiment);
      std::cout << cohset::render(cfg);
      return 0;
    }
  } catch (const cohset::ConfigError& e) {
    return fail(2, e.what());
  } catch (const cohset::ConvergenceError& e) {
    return fail(3, std::string(e.what()) + " (residual " + std::to_string(e.residual()) + ")");
  } catch (const std::exception& e) {
    return fail(3, e.what());
  }
  return 0;
}
