#include "cohset/config.hpp"

#include <cstdio>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cohset/errors.hpp"

namespace cohset {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
  }
}

std::size_t to_count(const std::string& key, const std::string& v) {
  const long long i = to_int(key, v);
  if (i <= 0) throw ConfigError("config: '" + key + "' must be positive");
  return static_cast<std::size_t>(i);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: '" + key + "' expects true/false, got '" + v + "'");
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::pair<std::string, std::string> split_kv(const std::string& line) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) throw ConfigError("config: expected key = value, got '" + line + "'");
  return {trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
}

}  // namespace

ExperimentConfig default_config(const std::string& experiment, const std::string& preset) {
  ExperimentConfig c;
  c.experiment = experiment;
  if (experiment == "single-map" || experiment == "periodic3") {
    c.nx = 6;
    c.Q = 99;
    c.M = 20;
    c.N = 10;
    c.modes = 3;
    c.solver = "dense";
    if (experiment == "periodic3") c.checkpoints = {1, 2};
  } else if (experiment == "aperiodic4") {
    c.nx = 100;
    c.Q = 100;
    c.M = 20;
    c.N = 10;
    c.modes = 3;
    c.checkpoints = {1, 2, 3, 4, 5, 6};
  } else if (experiment == "wave2d") {
    c.preset = preset.empty() || preset == "default" ? "desk" : preset;
    if (c.preset == "desk") {
      c.nx = 120;
      c.ny = 60;
      c.Q = 100;
      c.M = 40;
      c.N = 20;
    } else if (c.preset == "full") {
      c.nx = 240;
      c.ny = 120;
      c.Q = 400;
      c.M = 80;
      c.N = 40;
    } else {
      throw ConfigError("config: unknown wave2d preset '" + c.preset + "' (expected desk or full)");
    }
    c.modes = 3;
    c.checkpoints = {2.5, 5, 7.5, 10};
    c.symmetry = "half-turn";
    c.pair_offset = 10;
    c.anchor = -c.N;
  } else {
    throw ConfigError("config: unknown experiment '" + experiment +
                      "' (expected single-map, periodic3, aperiodic4 or wave2d)");
  }
  return c;
}

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& v) {
  if (key == "experiment" || key == "preset") {
    if ((key == "experiment" && v != c.experiment) || (key == "preset" && v != c.preset)) {
      throw ConfigError("config: '" + key + "' can only be set before other keys");
    }
  } else if (key == "n" || key == "nx") {
    c.nx = to_count(key, v);
  } else if (key == "ny") {
    c.ny = to_count(key, v);
  } else if (key == "Q") {
    c.Q = to_count(key, v);
  } else if (key == "M") {
    c.M = to_double(key, v);
  } else if (key == "N") {
    c.N = to_double(key, v);
  } else if (key == "modes") {
    c.modes = static_cast<int>(to_count(key, v));
  } else if (key == "checkpoints") {
    c.checkpoints.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) c.checkpoints.push_back(to_double(key, item));
    }
  } else if (key == "h") {
    c.h = to_double(key, v);
  } else if (key == "anchor") {
    c.anchor = to_double(key, v);
  } else if (key == "pair_offset") {
    c.pair_offset = to_double(key, v);
  } else if (key == "sequence_steps") {
    c.sequence_steps = static_cast<int>(to_count(key, v));
  } else if (key == "delta_first") {
    c.delta_first = static_cast<int>(to_count(key, v));
  } else if (key == "delta_last") {
    c.delta_last = static_cast<int>(to_count(key, v));
  } else if (key == "perturbed") {
    c.perturbed = to_bool(key, v);
  } else if (key == "eps") {
    c.eps = to_double(key, v);
  } else if (key == "output_dir") {
    c.output_dir = v;
  } else if (key == "workers") {
    c.workers = static_cast<unsigned>(to_count(key, v));
  } else if (key == "kernel") {
    if (v != "auto" && v != "scalar" && v != "avx2") throw ConfigError("config: kernel must be auto, scalar or avx2");
    c.kernel = v;
  } else if (key == "solver") {
    if (v != "matrix-free" && v != "dense") throw ConfigError("config: solver must be matrix-free or dense");
    c.solver = v;
  } else if (key == "symmetry") {
    if (v != "none" && v != "half-turn") throw ConfigError("config: symmetry must be none or half-turn");
    c.symmetry = v;
  } else if (key == "tol") {
    c.tol = to_double(key, v);
  } else if (key == "max_iter") {
    c.max_iter = static_cast<int>(to_count(key, v));
  } else if (key == "write_matrices") {
    c.write_matrices = to_bool(key, v);
  } else {
    throw ConfigError("config: unknown key '" + key + "'");
  }
}

ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides,
                              const std::string& experiment_hint) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      kv.push_back(split_kv(line));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  for (const auto& o : overrides) kv.push_back(split_kv(o));

  std::string experiment = experiment_hint;
  std::string preset;
  for (const auto& [k, v] : kv) {
    if (k == "experiment") {
      if (!experiment_hint.empty() && v != experiment_hint) {
        throw ConfigError("config: file is for '" + v + "' but '" + experiment_hint + "' was requested");
      }
      experiment = v;
    } else if (k == "preset") {
      preset = v;
    }
  }
  if (experiment.empty()) throw ConfigError("config: no experiment given");
  ExperimentConfig c = default_config(experiment, preset);
  for (const auto& [k, v] : kv) {
    if (k == "experiment" || k == "preset") continue;
    apply_setting(c, k, v);
  }
  if (c.experiment == "wave2d") {
    // the driver anchor follows N unless set explicitly
    bool anchor_set = false;
    for (const auto& [k, v] : kv) anchor_set = anchor_set || k == "anchor";
    if (!anchor_set) c.anchor = -c.N;
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides,
                             const std::string& experiment_hint) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), overrides, experiment_hint);
}

void validate(const ExperimentConfig& c) {
  if (c.M <= 0 || c.N < 0 || c.N > c.M) throw ConfigError("config: need 0 <= N <= M and M > 0");
  if (c.modes < 2) throw ConfigError("config: modes must be at least 2");
  if (static_cast<std::size_t>(c.modes) > c.boxes()) throw ConfigError("config: more modes than boxes");
  if (!(c.h > 0)) throw ConfigError("config: h must be positive");
  for (double t : c.checkpoints) {
    if (!(t > 0)) throw ConfigError("config: checkpoints must be positive");
  }
  if (c.experiment == "wave2d") {
    if (c.ny < 2) throw ConfigError("config: wave2d needs a 2D grid (ny >= 2)");
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(c.Q))));
    if (side * side != c.Q) throw ConfigError("config: wave2d needs Q to be a perfect square");
    if (c.symmetry == "half-turn" && c.nx % 2 != 0) throw ConfigError("config: half-turn symmetry needs an even nx");
    if (!(c.pair_offset > 0)) throw ConfigError("config: pair_offset must be positive");
  } else {
    if (c.ny != 1) throw ConfigError("config: map experiments use a 1D grid (ny = 1)");
    if (c.symmetry != "none") throw ConfigError("config: symmetry only applies to wave2d");
    if (c.M != std::floor(c.M) || c.N != std::floor(c.N)) throw ConfigError("config: M and N must be integers for maps");
    for (double t : c.checkpoints) {
      if (t != std::floor(t)) throw ConfigError("config: map checkpoints must be integers");
    }
  }
  if (c.experiment == "single-map" || c.experiment == "periodic3") {
    if (c.nx != 6) throw ConfigError("config: " + c.experiment + " runs on the 6-box Markov partition (n = 6)");
  }
  if (c.experiment == "aperiodic4") {
    if (c.delta_first < 1 || c.delta_last < c.delta_first) throw ConfigError("config: bad delta range");
    if (c.checkpoints.size() < static_cast<std::size_t>(c.sequence_steps)) {
      throw ConfigError("config: aperiodic4 needs checkpoints 1..sequence_steps");
    }
  }
}

std::string render(const ExperimentConfig& c) {
  std::ostringstream o;
  o << "experiment = " << c.experiment << "\n";
  if (c.experiment == "wave2d") o << "preset = " << c.preset << "\n";
  o << "nx = " << c.nx << "\n";
  o << "ny = " << c.ny << "\n";
  o << "Q = " << c.Q << "\n";
  o << "M = " << fmt(c.M) << "\n";
  o << "N = " << fmt(c.N) << "\n";
  o << "modes = " << c.modes << "\n";
  o << "checkpoints = ";
  for (std::size_t i = 0; i < c.checkpoints.size(); ++i) o << (i ? "," : "") << fmt(c.checkpoints[i]);
  o << "\n";
  if (c.experiment == "wave2d") {
    o << "h = " << fmt(c.h) << "\n";
    o << "anchor = " << fmt(c.anchor) << "\n";
    o << "pair_offset = " << fmt(c.pair_offset) << "\n";
    o << "perturbed = " << (c.perturbed ? "true" : "false") << "\n";
    o << "eps = " << fmt(c.eps) << "\n";
    o << "kernel = " << c.kernel << "\n";
    o << "symmetry = " << c.symmetry << "\n";
  }
  if (c.experiment == "aperiodic4") {
    o << "sequence_steps = " << c.sequence_steps << "\n";
    o << "delta_first = " << c.delta_first << "\n";
    o << "delta_last = " << c.delta_last << "\n";
  }
  o << "solver = " << c.solver << "\n";
  o << "tol = " << fmt(c.tol) << "\n";
  o << "max_iter = " << c.max_iter << "\n";
  o << "workers = " << c.workers << "\n";
  o << "write_matrices = " << (c.write_matrices ? "true" : "false") << "\n";
  if (!c.output_dir.empty()) o << "output_dir = " << c.output_dir << "\n";
  return o.str();
}

std::string resolve_output_dir(const ExperimentConfig& c) {
  if (!c.output_dir.empty()) return c.output_dir;
  if (const char* env = std::getenv("COHSET_OUTPUT_DIR"); env && *env) return std::string(env) + "/" + c.experiment;
  return "out/" + c.experiment;
}

}  // namespace cohset
