#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cohset/errors.hpp"
#include "cohset/experiment.hpp"

using namespace cohset;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cohset_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) { return std::system((std::string(COHSET_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str()); }

}  // namespace

TEST_CASE("summary round trip") {
  Summary s;
  s.add("schema_version", 1LL);
  s.add("x", 0.1);
  s.add("name", std::string("plus"));
  std::stringstream ss;
  s.write(ss);
  const Summary r = Summary::read(ss);
  CHECK(r.number("x") == 0.1);
  CHECK(r.text("name") == "plus");
  CHECK_THROWS(r.text("missing"));
  std::stringstream bad("key,value\nschema_version,7\n");
  CHECK_THROWS(Summary::read(bad));
  CHECK_THROWS(s.add("bad", std::string("a,b")));
}

TEST_CASE("describe_arcs") {
  const Grid g = Grid::circle(100);
  std::vector<std::size_t> a;
  for (std::size_t i = 11; i < 58; ++i) a.push_back(i);
  CHECK(describe_arcs(BoxSet(g, a)) == "0.11..0.58");
  CHECK(describe_arcs(BoxSet(g, {98, 99, 0, 1})) == "0.98..0.02");
  const Grid g6 = Grid::circle(6);
  CHECK(describe_arcs(BoxSet(g6, {0, 4, 5})) == "0.666667..0.166667");
}

TEST_CASE("single-map bundle") {
  const fs::path dir = scratch("single");
  ExperimentConfig c = default_config("single-map");
  c.output_dir = dir.string();
  const RunResult r = run_experiment(c);
  CHECK(r.ok());
  CHECK(r.summary.number("L_2") == doctest::Approx((1 + std::sqrt(2.0)) / 3).epsilon(1e-12));
  CHECK(fs::exists(dir / "summary.csv"));
  CHECK(fs::exists(dir / "matrix.csv"));
  const Summary back = Summary::read_file((dir / "summary.csv").string());
  CHECK(back.number("L_2") == r.summary.number("L_2"));
}

TEST_CASE("dry run writes nothing") {
  const fs::path dir = scratch("dry");
  ExperimentConfig c = default_config("aperiodic4");
  c.output_dir = dir.string();
  RunOptions o;
  o.dry_run = true;
  const RunResult r = run_experiment(c, o);
  CHECK(r.ok());
  CHECK(!fs::exists(dir));
}

TEST_CASE("aperiodic bundle, reruns and plot data") {
  const fs::path a = scratch("ap_a"), b = scratch("ap_b");
  ExperimentConfig c = default_config("aperiodic4");
  c.output_dir = a.string();
  const RunResult r = run_experiment(c);
  CHECK(r.ok());
  c.output_dir = b.string();
  c.workers = 4;
  run_experiment(c);
  for (const char* f : {"summary.csv", "vectors.csv", "sequence.csv", "delta.csv"}) CHECK(slurp(a / f) == slurp(b / f));

  CHECK(r.summary.number("pair_plus_rho") == doctest::Approx(0.890).epsilon(0.03));
  CHECK(r.summary.number("seq_level") == doctest::Approx(0.47).epsilon(0.05));

  const fs::path plots = scratch("plots");
  for (const auto& id : plot_ids()) {
    const auto files = emit_plotdata(a.string(), id, plots.string());
    CHECK(!files.empty());
    for (const auto& f : files) CHECK(slurp(f).rfind("#", 0) == 0);
  }
  const std::string delta = slurp(plots / "delta_n.dat");
  CHECK(std::count(delta.begin(), delta.end(), '\n') == 19);  // header + N = 2..19
  CHECK_THROWS_AS(emit_plotdata(a.string(), "nope", plots.string()), ConfigError);
  fs::remove(a / "delta.csv");
  CHECK_THROWS_AS(emit_plotdata(a.string(), "delta-n", plots.string()), ConfigError);
}

TEST_CASE("cli") {
  const fs::path dir = scratch("cli");
  CHECK(run_cli("run single-map -o " + dir.string()) == 0);
  CHECK(fs::exists(dir / "summary.csv"));
  CHECK(run_cli("emit-plotdata " + dir.string() + " amplitudes") == 0);
  CHECK(fs::exists(dir / "plot" / "amplitudes.dat"));

  const fs::path dry = scratch("cli_dry");
  CHECK(run_cli("run aperiodic4 --dry-run -o " + dry.string()) == 0);
  CHECK(!fs::exists(dry));

  const fs::path conf = fs::temp_directory_path() / "cohset_test_bad.conf";
  std::ofstream(conf) << "experiment = aperiodic4\nbogus = 1\n";
  CHECK(WEXITSTATUS(run_cli("validate-config " + conf.string())) == 2);
  std::ofstream(conf) << "experiment = wave2d\nQ = 64\n";
  CHECK(run_cli("validate-config " + conf.string()) == 0);
  CHECK(WEXITSTATUS(run_cli("run wave2d -s Q=50 --dry-run")) == 2);
  CHECK(WEXITSTATUS(run_cli("frobnicate")) != 0);
}
