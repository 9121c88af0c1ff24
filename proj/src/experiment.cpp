#include "cohset/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "cohset/coherent.hpp"
#include "cohset/errors.hpp"
#include "cohset/oseledets.hpp"

namespace fs = std::filesystem;

namespace cohset {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

class Csv {
 public:
  Csv(const fs::path& path, const std::string& header) : out_(path) {
    if (!out_) throw ConfigError("cannot write " + path.string());
    out_ << header << "\n";
  }
  template <typename... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << "\n";
  }

 private:
  static std::string cell(double v) { return num(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(long v) { return std::to_string(v); }
  static std::string cell(long long v) { return std::to_string(v); }
  static std::string cell(unsigned long v) { return std::to_string(v); }
  static std::string cell(unsigned long long v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }
  std::ofstream out_;
};

struct Context {
  const ExperimentConfig& cfg;
  const RunOptions& opts;
  fs::path dir;
  Summary summary;
  std::vector<std::string> failed;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  void log(const std::string& msg) const {
    if (!opts.log) return;
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char buf[32];
    std::snprintf(buf, sizeof buf, "[%7.1fs] ", s);
    *opts.log << buf << msg << std::endl;
  }
  void check(bool ok, const std::string& what) {
    if (!ok) failed.push_back(what);
  }
  void check_matrix(const TransferMatrix& m, const std::string& what) {
    check(columns_exact(m), "column sums of " + what);
  }
  void check_orthonormal(const Eigen::MatrixXd& U, const std::string& what) {
    const Eigen::MatrixXd G = U.transpose() * U - Eigen::MatrixXd::Identity(U.cols(), U.cols());
    check(G.cwiseAbs().maxCoeff() < 1e-8, "orthonormality of " + what);
  }
};

SvdOptions svd_options(const ExperimentConfig& cfg) {
  SvdOptions o;
  o.tol = cfg.tol;
  o.max_iter = cfg.max_iter;
  o.path = cfg.solver == "dense" ? SolverPath::dense : SolverPath::matrix_free;
  return o;
}

void write_amplitudes(Context& cx, const SpectralResult& s, const std::string& prefix) {
  Csv csv(cx.dir / (prefix + "amplitudes.csv"), "j,sigma,L");
  for (Eigen::Index j = 0; j < s.sigma.size(); ++j) {
    csv.row(static_cast<long long>(j + 1), s.sigma(j), s.L(j));
    cx.summary.add(prefix + "amp_" + std::to_string(j + 1), s.L(j));
  }
}

void write_vectors(Csv& csv, const OseledetsApprox& os, const std::string& label) {
  for (const auto& cp : os.checkpoints) {
    for (std::size_t j = 0; j < cp.w.size(); ++j) {
      for (Eigen::Index i = 0; i < cp.w[j].size(); ++i) {
        csv.row(label, cp.time, static_cast<long long>(j + 1), static_cast<long long>(i), cp.w[j](i));
      }
    }
  }
}

void write_eigenvalues(Context& cx, const Eigen::MatrixXd& A, const std::string& prefix) {
  const auto ev = eigenvalues(A);
  Csv csv(cx.dir / (prefix + "eigenvalues.csv"), "index,real,imag");
  int nz = 0;
  double imag = 0.0;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    csv.row(static_cast<long long>(i + 1), ev[i].real(), ev[i].imag());
    if (std::abs(ev[i]) > 1e-9) {
      ++nz;
      cx.summary.add(prefix + "L_" + std::to_string(nz), ev[i].real());
      imag = std::max(imag, std::abs(ev[i].imag()));
    }
  }
  cx.summary.add(prefix + "nonzero_eigenvalues", static_cast<long long>(nz));
  cx.summary.add(prefix + "eigen_imag_max", imag);
}

void write_matrix_csv(const fs::path& path, const SparseMatrix& P) {
  Csv csv(path, "row,col,value");
  const Eigen::MatrixXd D(P);
  for (Eigen::Index i = 0; i < D.rows(); ++i)
    for (Eigen::Index j = 0; j < D.cols(); ++j) csv.row(static_cast<long long>(i), static_cast<long long>(j), D(i, j));
}

std::string box_list(const BoxSet& s) {
  std::string out;
  for (auto b : s.indices()) out += (out.empty() ? "" : ";") + std::to_string(b);
  return out;
}

// Single-arc endpoints of a circle set as box-edge fractions (end exclusive).
std::pair<double, double> arc_ends(const BoxSet& s) {
  const BoxSet arc = components(s).size() == 1 ? s : connectify(s);
  const std::size_t n = arc.grid().size();
  const auto m = arc.mask();
  std::size_t start = 0;
  while (start < n && !(m[start] && !m[(start + n - 1) % n])) ++start;
  if (start == n) return {0.0, 1.0};  // full circle
  const std::size_t end = (start + arc.size()) % n;
  return {static_cast<double>(start) / static_cast<double>(n), end == 0 ? 1.0 : static_cast<double>(end) / static_cast<double>(n)};
}

void add_pair(Context& cx, const std::string& prefix, const PairResult& p, const SparseMatrix& P) {
  auto& S = cx.summary;
  S.add(prefix + "rho", p.rho);
  S.add(prefix + "c_star", p.c_star);
  S.add(prefix + "eta", p.eta_star);
  S.add(prefix + "measure", p.src.measure());
  S.add(prefix + "measure_dst", p.dst.measure());
  S.add(prefix + "src_components", static_cast<long long>(components(p.src).size()));
  S.add(prefix + "dst_components", static_cast<long long>(components(p.dst).size()));
  if (p.src.grid().dim() == 1) {
    S.add(prefix + "src", describe_arcs(p.src));
    S.add(prefix + "dst", describe_arcs(p.dst));
    const auto [a, b] = arc_ends(p.src);
    S.add(prefix + "src_start", a);
    S.add(prefix + "src_end", b);
  }
  cx.check(std::abs(p.rho - rho_hat(P, p.src, p.dst)) < 1e-12, prefix + "rho consistency");
}

void write_scan(Context& cx, const PairResult& p) {
  Csv csv(cx.dir / ("threshold_" + std::string(to_string(p.direction)) + ".csv"), "c,measure,eta,measure_dst,rho");
  for (const auto& e : p.scan) csv.row(e.c, e.measure, e.eta, e.measure_dst, e.rho);
}

// Global sign choice so that the pair direction is reported as "plus" for the better one.
void pair_both(Context& cx, const Grid& grid, const Eigen::VectorXd& w_src, const Eigen::VectorXd& w_dst,
               const SparseMatrix& P, std::vector<BoxSet>* sets_out) {
  const PairResult plus = optimal_pair(grid, w_src, w_dst, P, Direction::plus);
  const PairResult minus = optimal_pair(grid, w_src, w_dst, P, Direction::minus);
  add_pair(cx, "pair_plus_", plus, P);
  add_pair(cx, "pair_minus_", minus, P);
  write_scan(cx, plus);
  write_scan(cx, minus);
  const PairResult& best = plus.rho >= minus.rho ? plus : minus;
  cx.summary.add("pair_best_direction", std::string(to_string(best.direction)));
  add_pair(cx, "pair_best_", best, P);
  if (sets_out) *sets_out = {plus.src, plus.dst, minus.src, minus.dst};
}

void run_single(Context& cx) {
  const auto& cfg = cx.cfg;
  const Grid grid = Grid::circle(cfg.nx);
  const int M = static_cast<int>(cfg.M), N = static_cast<int>(cfg.N);
  int reach = 0;
  for (double t : cfg.checkpoints) reach = std::max(reach, static_cast<int>(t));
  const int period = cfg.experiment == "periodic3" ? 3 : 1;
  const MapFamily family = period == 3 ? MapFamily::periodic3() : MapFamily::single();
  MapCocycle cc(grid, family, periodic_symbols(-N - 1, std::max(M - N, reach) + 3, period), cfg.Q, cfg.workers);

  cx.log("building Ulam matrices");
  for (int k = 0; k < period; ++k) cx.check_matrix(cc.step(k), "P(" + std::to_string(k) + ")");
  write_matrix_csv(cx.dir / "matrix.csv", cc.step(0).P);
  if (cfg.write_matrices) {
    for (int k = 0; k < period; ++k) {
      std::ofstream f(cx.dir / ("P_" + std::to_string(k) + ".coo"));
      write_coo(f, cc.step(k));
    }
  }
  const TransferMatrix product = compose(cc.span(0, period));
  cx.check(column_sum_error(product.P) < 1e-12, "column sums of the period product");
  if (period > 1) write_matrix_csv(cx.dir / "product.csv", product.P);
  write_eigenvalues(cx, Eigen::MatrixXd(product.P), "");

  cx.log("Oseledets vectors");
  std::vector<int> cps;
  for (double t : cfg.checkpoints) cps.push_back(static_cast<int>(t));
  const auto os = oseledets_discrete(cc, 0, M, N, cfg.modes, cps, svd_options(cfg));
  cx.check_orthonormal(os.spectrum.U, "singular vectors");
  write_amplitudes(cx, os.spectrum, "");
  Csv vec(cx.dir / "vectors.csv", "label,time,mode,box,value");
  write_vectors(vec, os, "base");
  for (std::size_t i = 0; i < os.checkpoints.size(); ++i) {
    const auto& cp = os.checkpoints[i];
    const BoxSet pos = threshold_set(grid, cp.w[1], 0.0, Direction::plus);
    const std::string k = std::to_string(static_cast<long long>(std::lround(cp.time)));
    cx.summary.add("f2_positive_" + k, box_list(pos));
    cx.summary.add("f2_positive_arcs_" + k, describe_arcs(pos));
  }
  const auto bound = positive_part_bound(cc.step(0).P, os.w(0, 1));
  cx.summary.add("positive_part_lhs", bound.lhs);
  cx.summary.add("positive_part_rhs", bound.rhs);
  cx.check(bound.pass, "positive part bound");
}

void run_aperiodic(Context& cx) {
  const auto& cfg = cx.cfg;
  const Grid grid = Grid::circle(cfg.nx);
  const int M = static_cast<int>(cfg.M), N = static_cast<int>(cfg.N);
  const int K = cfg.sequence_steps;
  const int lo = -std::max(N, cfg.delta_last) - 2;
  const int hi = std::max({M - N + K, 2 * cfg.delta_last, K}) + 2;
  MapCocycle cc(grid, MapFamily::aperiodic4(), driving_symbols(lo, hi), cfg.Q, cfg.workers);
  cx.check(cc.track().admissible(MapFamily::aperiodic4().adjacency()), "driving sequence admissibility");

  std::string central;
  for (int k = -10; k <= 10; ++k) central += std::to_string(cc.track()[k]);
  cx.summary.add("omega_central", central);

  cx.log("building Ulam matrices");
  for (int k = lo; k <= hi; ++k) cx.check_matrix(cc.step(k), "P(" + std::to_string(k) + ")");
  if (cfg.write_matrices) {
    for (int k = 0; k < K; ++k) {
      std::ofstream f(cx.dir / ("P_" + std::to_string(k) + ".coo"));
      write_coo(f, cc.step(k));
    }
  }

  cx.log("Oseledets vectors");
  std::vector<int> cps;
  for (int k = 1; k <= K; ++k) cps.push_back(k);
  const auto os = oseledets_discrete(cc, 0, M, N, cfg.modes, cps, svd_options(cfg));
  cx.check_orthonormal(os.spectrum.U, "singular vectors");
  write_amplitudes(cx, os.spectrum, "");
  {
    Csv vec(cx.dir / "vectors.csv", "label,time,mode,box,value");
    write_vectors(vec, os, "base");
  }

  cx.log("coherent pair");
  pair_both(cx, grid, os.w(0, 1), os.w(1, 1), cc.step(0).P, nullptr);

  cx.log("coherent sequence");
  std::vector<Eigen::VectorXd> ws;
  std::vector<const SparseMatrix*> Ps;
  for (int k = 0; k <= K; ++k) ws.push_back(os.w(static_cast<std::size_t>(k), 1));
  for (int k = 0; k < K; ++k) Ps.push_back(&cc.step(k).P);
  const auto seq = optimal_sequence(grid, ws, Ps);
  auto& S = cx.summary;
  S.add("seq_direction", std::string(to_string(seq.direction)));
  S.add("seq_level", seq.level);
  S.add("seq_mean_rho", seq.mean_rho);
  S.add("seq_mean_rho_repaired", seq.mean_rho_repaired);
  {
    Csv csv(cx.dir / "sequence.csv", "k,c,measure,rho,rho_raw,components,start,end");
    Csv sets(cx.dir / "sets.csv", "k,box");
    for (int k = 0; k <= K; ++k) {
      const auto& m = seq.members[static_cast<std::size_t>(k)];
      const auto [a, b] = arc_ends(m.set);
      const std::string key = std::to_string(k);
      csv.row(static_cast<long long>(k), m.c, m.set.measure(), m.rho, m.rho_raw, static_cast<long long>(m.components), a, b);
      for (auto box : m.set.indices()) sets.row(static_cast<long long>(k), static_cast<long long>(box));
      S.add("seq_set_" + key, describe_arcs(m.set));
      S.add("seq_start_" + key, a);
      S.add("seq_end_" + key, b);
      S.add("seq_measure_" + key, m.set.measure());
      S.add("seq_components_" + key, static_cast<long long>(m.components));
      if (k < K) {
        S.add("seq_rho_" + key, m.rho);
        S.add("seq_rho_raw_" + key, m.rho_raw);
      }
    }
    cx.check(std::all_of(seq.members.begin(), seq.members.end(),
                         [&](const auto& m) {
                           return std::abs(m.raw.measure() - seq.level) <= 1.0 / static_cast<double>(grid.size()) + 1e-12;
                         }),
             "sequence measures within one box of the level");
  }
  {
    Csv csv(cx.dir / "rho_mean.csv", "level,mean_best,mean_other");
    for (std::size_t i = 0; i < seq.curve.size(); ++i) csv.row(seq.curve[i].level, seq.curve[i].mean_rho, seq.curve_other[i].mean_rho);
  }

  cx.log("convergence of Delta(N)");
  const auto delta = convergence_delta(cc, 0, cfg.delta_first, cfg.delta_last, svd_options(cfg));
  Csv csv(cx.dir / "delta.csv", "N,delta");
  for (const auto& d : delta) {
    csv.row(static_cast<long long>(d.N), d.delta);
    S.add("delta_" + std::to_string(d.N), d.delta);
  }
}

void run_wave(Context& cx) {
  const auto& cfg = cx.cfg;
  const Grid grid = Grid::cylinder(cfg.nx, cfg.ny);
  FlowSystem sys = FlowSystem::perturbed_wave();
  sys.h = cfg.h;
  sys.anchor = cfg.anchor;
  sys.wave.perturbed = cfg.perturbed;
  sys.wave.eps = cfg.eps;
  const DrivingPath path(sys);

  FlowRun run;
  run.Q = cfg.Q;
  run.kernel = select_kernel(kernel_preference_from_string(cfg.kernel));
  run.workers = cfg.workers;
  cx.log("kernel " + std::string(to_string(run.kernel)) + ", " + std::to_string(grid.size()) + " boxes x " +
         std::to_string(cfg.Q) + " points");

  SvdOptions svd = svd_options(cfg);
  if (cfg.symmetry == "half-turn") svd.symmetry = half_turn(grid);

  std::vector<double> cps = cfg.checkpoints;
  if (std::find(cps.begin(), cps.end(), cfg.pair_offset) == cps.end()) cps.push_back(cfg.pair_offset);
  std::sort(cps.begin(), cps.end());

  cx.log("Oseledets vectors at t = 0");
  const auto base = oseledets_flow(grid, path, 0.0, cfg.M, cfg.N, cfg.modes, cps, run, svd);
  cx.check_orthonormal(base.spectrum.U, "singular vectors (t = 0)");
  for (std::size_t i = 0; i < base.pushforward.size(); ++i) {
    cx.check_matrix(base.pushforward[i], "P^(" + short_num(cps[i]) + ")");
  }
  write_amplitudes(cx, base.spectrum, "");

  cx.log("Oseledets vectors at t = " + short_num(cfg.pair_offset));
  const auto later = oseledets_flow(grid, path, cfg.pair_offset, cfg.M, cfg.N, cfg.modes, {}, run, svd);
  cx.check_orthonormal(later.spectrum.U, "singular vectors (later)");
  write_amplitudes(cx, later.spectrum, "later_");

  const auto idx = static_cast<std::size_t>(std::find(cps.begin(), cps.end(), cfg.pair_offset) - cps.begin());
  const TransferMatrix& P = base.pushforward[idx];
  const Eigen::VectorXd pushed = base.w(idx + 1, 1);
  Eigen::VectorXd w_later = later.w(0, 1);
  const double cosine = pushed.dot(w_later) / (pushed.norm() * w_later.norm());
  if (cosine < 0) w_later = -w_later;  // same parity as the push-forward
  auto& S = cx.summary;
  S.add("pushforward_cosine", std::abs(cosine));
  if (!svd.symmetry.empty()) {
    S.add("symmetry_defect", base.symmetry_defect);
    S.add("later_symmetry_defect", later.symmetry_defect);
  }
  S.add("pushforward_l1_distance", aligned_l1_distance(pushed, w_later));
  double diag = 0.0;
  for (Eigen::Index j = 0; j < P.P.outerSize(); ++j) diag += P.P.coeff(j, j);
  S.add("pair_diagonal_mass_fraction", diag / static_cast<double>(grid.size()));

  {
    Csv vec(cx.dir / "vectors.csv", "label,time,mode,box,value");
    write_vectors(vec, base, "base");
    OseledetsApprox aligned = later;
    if (cosine < 0)
      for (auto& w : aligned.checkpoints[0].w) w = -w;
    write_vectors(vec, aligned, "later");
  }

  cx.log("coherent pair");
  std::vector<BoxSet> sets;
  pair_both(cx, grid, base.w(0, 1), w_later, P.P, &sets);
  Csv csv(cx.dir / "sets.csv", "label,box");
  const char* labels[] = {"plus_src", "plus_dst", "minus_src", "minus_dst"};
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (auto b : sets[i].indices()) csv.row(labels[i], static_cast<long long>(b));
}

}  // namespace

void Summary::add(const std::string& key, double value) { rows_.emplace_back(key, num(value)); }
void Summary::add(const std::string& key, long long value) { rows_.emplace_back(key, std::to_string(value)); }
void Summary::add(const std::string& key, const std::string& value) {
  if (value.find_first_of(",\n") != std::string::npos) throw DomainError("summary: value for " + key + " contains a separator");
  rows_.emplace_back(key, value);
}

bool Summary::has(const std::string& key) const {
  return std::any_of(rows_.begin(), rows_.end(), [&](const auto& r) { return r.first == key; });
}

const std::string& Summary::text(const std::string& key) const {
  for (const auto& r : rows_)
    if (r.first == key) return r.second;
  throw ConfigError("summary: no key '" + key + "'");
}

double Summary::number(const std::string& key) const {
  const std::string& t = text(key);
  try {
    return std::stod(t);
  } catch (const std::exception&) {
    throw ConfigError("summary: '" + key + "' is not a number");
  }
}

void Summary::write(std::ostream& os) const {
  os << "key,value\n";
  for (const auto& [k, v] : rows_) os << k << "," << v << "\n";
}

Summary Summary::read(std::istream& is) {
  Summary s;
  std::string line;
  std::getline(is, line);
  if (line != "key,value") throw ConfigError("summary: bad header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("summary: malformed row '" + line + "'");
    s.rows_.emplace_back(line.substr(0, comma), line.substr(comma + 1));
  }
  if (!s.has("schema_version") || s.number("schema_version") != kSummarySchemaVersion) {
    throw ConfigError("summary: unsupported schema version");
  }
  return s;
}

Summary Summary::read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open " + path);
  return read(f);
}

std::string describe_arcs(const BoxSet& set) {
  const Grid& g = set.grid();
  if (g.dim() != 1) throw DomainError("describe_arcs: circle grid required");
  if (set.empty()) return "empty";
  const std::size_t n = g.size();
  const auto m = set.mask();
  std::string out;
  if (set.size() == n) return "0..1";
  for (std::size_t b = 0; b < n; ++b) {
    if (!m[b] || m[(b + n - 1) % n]) continue;
    std::size_t e = b;
    while (m[(e + 1) % n]) e = (e + 1) % n;
    const std::size_t end = (e + 1) % n;
    out += (out.empty() ? "" : ";") + short_num(static_cast<double>(b) / static_cast<double>(n)) + ".." +
           short_num(end == 0 ? 1.0 : static_cast<double>(end) / static_cast<double>(n));
  }
  return out;
}

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  validate(cfg);
  RunResult result;
  result.output_dir = resolve_output_dir(cfg);
  if (opts.dry_run) return result;

  Context cx{cfg, opts, result.output_dir, {}, {}};
  fs::create_directories(cx.dir);
  {
    std::ofstream f(cx.dir / "config.txt");
    f << render(cfg);
  }
  auto& S = cx.summary;
  S.add("schema_version", static_cast<long long>(kSummarySchemaVersion));
  S.add("experiment", cfg.experiment);
  if (cfg.experiment == "wave2d") S.add("preset", cfg.preset);
  S.add("grid_nx", static_cast<long long>(cfg.nx));
  S.add("grid_ny", static_cast<long long>(cfg.ny));
  S.add("n", static_cast<long long>(cfg.boxes()));
  S.add("Q", static_cast<long long>(cfg.Q));
  S.add("M", cfg.M);
  S.add("N", cfg.N);

  if (cfg.experiment == "single-map" || cfg.experiment == "periodic3") {
    run_single(cx);
  } else if (cfg.experiment == "aperiodic4") {
    run_aperiodic(cx);
  } else {
    run_wave(cx);
  }

  S.add("checks_failed", static_cast<long long>(cx.failed.size()));
  {
    std::ofstream f(cx.dir / "summary.csv");
    S.write(f);
  }
  cx.log("wrote " + (cx.dir / "summary.csv").string());
  result.summary = std::move(cx.summary);
  result.failed_checks = std::move(cx.failed);
  return result;
}

std::vector<std::string> plot_ids() {
  return {"amplitudes", "delta-n", "rho-mean", "mode2-field", "threshold-curve", "sequence-sets"};
}

namespace {

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("bundle lacks " + path.filename().string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::getline(f, line);  // header
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

std::vector<std::string> emit_plotdata(const std::string& bundle_dir, const std::string& id, const std::string& out_dir) {
  const fs::path in(bundle_dir);
  const fs::path out(out_dir);
  const Summary S = Summary::read_file((in / "summary.csv").string());
  fs::create_directories(out);
  std::vector<std::string> written;
  auto open = [&](const std::string& name, const std::string& header) {
    const fs::path p = out / name;
    written.push_back(p.string());
    std::ofstream f(p);
    if (!f) throw ConfigError("cannot write " + p.string());
    f << "# " << header << "\n";
    return f;
  };

  if (id == "amplitudes") {
    auto f = open("amplitudes.dat", "j L");
    for (const auto& r : read_csv(in / "amplitudes.csv")) f << r[0] << " " << r[2] << "\n";
  } else if (id == "delta-n") {
    auto f = open("delta_n.dat", "N Delta");
    for (const auto& r : read_csv(in / "delta.csv")) f << r[0] << " " << r[1] << "\n";
  } else if (id == "rho-mean") {
    auto f = open("rho_mean.dat", "level mean_rho (" + S.text("seq_direction") + ")");
    for (const auto& r : read_csv(in / "rho_mean.csv")) f << r[0] << " " << r[1] << "\n";
  } else if (id == "mode2-field") {
    const auto nx = static_cast<std::size_t>(S.number("grid_nx"));
    const auto ny = static_cast<std::size_t>(S.number("grid_ny"));
    const Grid grid = ny > 1 ? Grid::cylinder(nx, ny) : Grid::circle(nx);
    auto f = open("mode2_field.dat", ny > 1 ? "x_center y_center w2" : "x_center w2");
    const auto rows = read_csv(in / "vectors.csv");
    const std::string t0 = rows.empty() ? "" : rows.front()[1];
    for (const auto& r : rows) {
      if (r[0] != "base" || r[1] != t0 || r[2] != "2") continue;
      const auto c = grid.center(static_cast<std::size_t>(std::stoull(r[3])));
      if (ny > 1) {
        f << num(c[0]) << " " << num(c[1]) << " " << r[4] << "\n";
      } else {
        f << num(c[0]) << " " << r[4] << "\n";
      }
    }
  } else if (id == "threshold-curve") {
    for (const std::string dir : {"plus", "minus"}) {
      auto f = open("threshold_curve_" + dir + ".dat", "c rho");
      for (const auto& r : read_csv(in / ("threshold_" + dir + ".csv"))) f << r[0] << " " << r[4] << "\n";
    }
  } else if (id == "sequence-sets") {
    auto f = open("sequence_sets.dat", "k start end rho");
    for (const auto& r : read_csv(in / "sequence.csv")) f << r[0] << " " << r[6] << " " << r[7] << " " << r[3] << "\n";
  } else {
    std::string known;
    for (const auto& k : plot_ids()) known += (known.empty() ? "" : ", ") + k;
    throw ConfigError("unknown figure id '" + id + "' (known: " + known + ")");
  }
  return written;
}

}  // namespace cohset
