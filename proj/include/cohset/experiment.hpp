#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cohset/config.hpp"
#include "cohset/grid.hpp"

namespace cohset {

inline constexpr int kSummarySchemaVersion = 1;

/// Ordered key/value table written as summary.csv.
class Summary {
 public:
  void add(const std::string& key, double value);
  void add(const std::string& key, long long value);
  void add(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  double number(const std::string& key) const;
  const std::vector<std::pair<std::string, std::string>>& rows() const { return rows_; }

  void write(std::ostream& os) const;
  static Summary read(std::istream& is);
  static Summary read_file(const std::string& path);

 private:
  std::vector<std::pair<std::string, std::string>> rows_;
};

struct RunOptions {
  bool dry_run = false;
  std::ostream* log = nullptr;  // progress messages
};

struct RunResult {
  Summary summary;
  std::string output_dir;
  std::vector<std::string> failed_checks;
  bool ok() const { return failed_checks.empty(); }
};

/// Run one experiment and write its bundle (summary.csv plus data files).
/// Invariant violations are collected in failed_checks rather than thrown.
RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Circle set as cyclic arcs of box edges, e.g. "0.61..0.08" or "0..0.17;0.67..1".
std::string describe_arcs(const BoxSet& set);

/// Figure ids understood by emit_plotdata.
std::vector<std::string> plot_ids();
/// Write the plot file(s) for `id` from an existing bundle into `out_dir`.
/// Returns the paths written. Throws ConfigError for unknown ids or missing data.
std::vector<std::string> emit_plotdata(const std::string& bundle_dir, const std::string& id, const std::string& out_dir);

}  // namespace cohset
