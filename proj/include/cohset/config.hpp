#pragma once

#include <map>
#include <string>
#include <vector>

namespace cohset {

/// Plain key = value experiment configuration. See configs/ for examples.
struct ExperimentConfig {
  std::string experiment = "aperiodic4";  // single-map | periodic3 | aperiodic4 | wave2d
  std::string preset = "default";         // wave2d: desk | full
  std::size_t nx = 100;                   // boxes (1D) or boxes in x (2D)
  std::size_t ny = 1;
  std::size_t Q = 100;
  double M = 20;
  double N = 10;
  int modes = 3;
  std::vector<double> checkpoints;  // positive offsets after the base time
  double h = 0.01;
  double anchor = 0.0;              // time at which the driver sits at (0,1,1.5)
  double pair_offset = 1;           // destination time of the coherent pair
  int sequence_steps = 6;           // K transitions in the 1D sequence
  int delta_first = 2;
  int delta_last = 19;
  bool perturbed = true;
  double eps = 1.0;
  std::string output_dir;
  unsigned workers = 1;
  std::string kernel = "auto";
  std::string solver = "matrix-free";  // matrix-free | dense
  std::string symmetry = "none";       // none | half-turn (wave2d)
  double tol = 1e-10;
  int max_iter = 5000;
  bool write_matrices = false;

  std::size_t boxes() const { return nx * ny; }
};

/// Defaults for an experiment; wave2d takes the preset into account.
ExperimentConfig default_config(const std::string& experiment, const std::string& preset = "");

/// Set one key from its text form. Throws ConfigError on unknown keys or bad values.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Parse "key = value" lines ('#' starts a comment). `experiment` and
/// `preset` select the defaults, the remaining keys override them, then
/// `overrides` (from the command line) are applied last.
ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {},
                              const std::string& experiment_hint = "");
ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {},
                             const std::string& experiment_hint = "");

/// Consistency checks beyond single values. Throws ConfigError.
void validate(const ExperimentConfig& cfg);

/// Canonical key = value rendering.
std::string render(const ExperimentConfig& cfg);

/// Output directory: cfg.output_dir, else $COHSET_OUTPUT_DIR/<experiment>,
/// else out/<experiment>.
std::string resolve_output_dir(const ExperimentConfig& cfg);

}  // namespace cohset
