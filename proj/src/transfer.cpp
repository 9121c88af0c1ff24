#include "cohset/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

#include "cohset/errors.hpp"

namespace cohset {

namespace {

constexpr double kTimeTol = 1e-9;

}  // namespace

TransferMatrix assemble_counts(std::size_t n, std::size_t Q, std::span<const std::size_t> dest, double start,
                               double duration) {
  if (Q == 0) throw ConfigError("transfer matrix: Q must be at least 1");
  if (dest.size() != n * Q) throw DomainError("transfer matrix: expected Q destinations per box");
  TransferMatrix m;
  m.start = start;
  m.duration = duration;
  m.Q = Q;
  m.P.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));

  std::vector<Eigen::Index> nnz_per_col(n, 0);
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> cols(n);
  std::vector<std::size_t> buf;
  for (std::size_t j = 0; j < n; ++j) {
    buf.assign(dest.begin() + static_cast<std::ptrdiff_t>(j * Q), dest.begin() + static_cast<std::ptrdiff_t>((j + 1) * Q));
    std::sort(buf.begin(), buf.end());
    for (std::size_t a = 0; a < buf.size();) {
      std::size_t b = a;
      while (b < buf.size() && buf[b] == buf[a]) ++b;
      if (buf[a] >= n) throw DomainError("transfer matrix: destination box out of range");
      cols[j].emplace_back(buf[a], b - a);
      a = b;
    }
    nnz_per_col[j] = static_cast<Eigen::Index>(cols[j].size());
  }
  m.P.reserve(nnz_per_col);
  const double q = static_cast<double>(Q);
  for (std::size_t j = 0; j < n; ++j) {
    for (const auto& [i, count] : cols[j]) {
      m.P.insert(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = static_cast<double>(count) / q;
    }
  }
  m.P.makeCompressed();
  return m;
}

bool columns_exact(const TransferMatrix& m) {
  if (m.Q == 0) return false;
  const double q = static_cast<double>(m.Q);
  for (Eigen::Index j = 0; j < m.P.outerSize(); ++j) {
    std::size_t total = 0;
    for (SparseMatrix::InnerIterator it(m.P, j); it; ++it) {
      const double c = std::round(it.value() * q);
      if (c < 1 || static_cast<double>(c) / q != it.value()) return false;
      total += static_cast<std::size_t>(c);
    }
    if (total != m.Q) return false;
  }
  return true;
}

double column_sum_error(const SparseMatrix& P) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < P.outerSize(); ++j) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(P, j); it; ++it) s += it.value();
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

TransferMatrix ulam_map(const Grid& grid, const std::function<double(double)>& map, std::size_t Q, double start,
                        unsigned workers) {
  if (grid.dim() != 1) throw ConfigError("ulam_map: circle grid required");
  if (Q == 0) throw ConfigError("ulam_map: Q must be at least 1");
  const std::size_t n = grid.size();
  std::vector<std::size_t> dest(n * Q);
  auto fill = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t j = lo; j < hi; ++j) {
      const auto pts = grid.test_points(j, Q);
      for (std::size_t q = 0; q < Q; ++q) dest[j * Q + q] = grid.locate(Point{map(pts[q][0]), 0.0});
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  if (workers == 1) {
    fill(0, n);
  } else {
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t lo = std::min(n, w * chunk), hi = std::min(n, lo + chunk);
      pool.emplace_back([&, w, lo, hi] {
        try {
          fill(lo, hi);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  return assemble_counts(n, Q, dest, start, 1.0);
}

TransferMatrix ulam_map(const Grid& grid, const MapFamily& family, int symbol, std::size_t Q, double start,
                        unsigned workers) {
  family(symbol, 0.0);  // validates the symbol up front
  return ulam_map(grid, [&](double x) { return family(symbol, x); }, Q, start, workers);
}

std::vector<TransferMatrix> ulam_flow(const Grid& grid, const DrivingPath& path, double start,
                                      std::span<const double> durations, std::size_t Q, KernelKind kernel,
                                      unsigned workers) {
  if (grid.dim() != 2) throw ConfigError("ulam_flow: cylinder grid required");
  if (durations.empty()) return {};
  for (std::size_t r = 0; r < durations.size(); ++r) {
    if (!(durations[r] > 0)) throw ConfigError("ulam_flow: durations must be positive");
    if (r > 0 && durations[r] < durations[r - 1]) throw ConfigError("ulam_flow: durations must be ascending");
  }
  const std::size_t n = grid.size();
  Ensemble start_pts;
  start_pts.x.reserve(n * Q);
  start_pts.y.reserve(n * Q);
  for (std::size_t j = 0; j < n; ++j) {
    for (const auto& p : grid.test_points(j, Q)) {
      start_pts.x.push_back(p[0]);
      start_pts.y.push_back(p[1]);
    }
  }
  const Vec3 z0 = path.state_at(start);
  const auto snaps = advect_ensemble(path.system(), z0, start_pts, durations, kernel, workers);

  std::vector<TransferMatrix> out;
  std::vector<std::size_t> dest(n * Q);
  for (std::size_t r = 0; r < snaps.size(); ++r) {
    for (std::size_t i = 0; i < dest.size(); ++i) dest[i] = grid.locate(Point{snaps[r].x[i], snaps[r].y[i]});
    out.push_back(assemble_counts(n, Q, dest, start, durations[r]));
  }
  return out;
}

TransferMatrix ulam_flow(const Grid& grid, const DrivingPath& path, double start, double duration, std::size_t Q,
                         KernelKind kernel, unsigned workers) {
  const double d[1] = {duration};
  return std::move(ulam_flow(grid, path, start, d, Q, kernel, workers).front());
}

Cocycle::Cocycle(std::vector<TransferMatrix> factors) {
  for (auto& f : factors) push_back(std::move(f));
}

void Cocycle::push_back(TransferMatrix m) {
  if (!factors_.empty()) {
    const auto& last = factors_.back();
    if (last.size() != m.size()) throw DomainError("cocycle: matrix sizes differ");
    if (std::abs(last.end() - m.start) > kTimeTol * std::max(1.0, std::abs(m.start))) {
      std::ostringstream msg;
      msg << "cocycle: factor starting at " << m.start << " does not follow " << last.end();
      throw DomainError(msg.str());
    }
  }
  factors_.push_back(std::move(m));
}

MapCocycle::MapCocycle(Grid grid, MapFamily family, SymbolTrack track, std::size_t Q, unsigned workers)
    : grid_(std::move(grid)), family_(std::move(family)), track_(std::move(track)), Q_(Q), workers_(workers) {
  if (grid_.dim() != 1) throw ConfigError("MapCocycle: circle grid required");
  if (Q_ == 0) throw ConfigError("MapCocycle: Q must be at least 1");
  cache_.resize(static_cast<std::size_t>(track_.k_max() - track_.k_min() + 1));
}

const TransferMatrix& MapCocycle::step(int k) const {
  const int symbol = track_[k];
  std::lock_guard lock(mutex_);
  auto& slot = cache_[static_cast<std::size_t>(k - track_.k_min())];
  if (!slot) slot = std::make_unique<TransferMatrix>(ulam_map(grid_, family_, symbol, Q_, static_cast<double>(k), workers_));
  return *slot;
}

Cocycle MapCocycle::span(int k0, int length) const {
  Cocycle c;
  for (int k = k0; k < k0 + length; ++k) c.push_back(step(k));
  return c;
}

std::vector<const SparseMatrix*> MapCocycle::factors(int k0, int length) const {
  std::vector<const SparseMatrix*> out;
  for (int k = k0; k < k0 + length; ++k) out.push_back(&step(k).P);
  return out;
}

TransferMatrix compose(std::span<const TransferMatrix> factors) {
  if (factors.empty()) throw DomainError("compose: empty cocycle");
  TransferMatrix out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) {
    const auto& f = factors[i];
    if (std::abs(out.end() - f.start) > kTimeTol * std::max(1.0, std::abs(f.start))) {
      throw DomainError("compose: factors are not contiguous in time");
    }
    if (f.size() != out.size()) throw DomainError("compose: matrix sizes differ");
    out.P = (f.P * out.P).pruned();
    out.duration += f.duration;
  }
  return out;
}

TransferMatrix compose(const Cocycle& cocycle) { return compose(std::span(cocycle.factors())); }

Eigen::VectorXd apply(const SparseMatrix& P, const Eigen::VectorXd& f) {
  if (f.size() != P.cols()) {
    throw DomainError("apply: vector length " + std::to_string(f.size()) + " does not match matrix size " +
                      std::to_string(P.cols()));
  }
  return P * f;
}

double rho_hat(const SparseMatrix& P, const BoxSet& src, const BoxSet& dst) {
  if (src.empty()) throw DomainError("rho_hat: empty source set");
  if (src.grid().size() != static_cast<std::size_t>(P.cols()) || dst.grid().size() != static_cast<std::size_t>(P.rows())) {
    throw DomainError("rho_hat: set grid does not match the matrix");
  }
  const std::vector<char> in_dst = dst.mask();
  double total = 0.0;
  for (auto j : src.indices()) {
    for (SparseMatrix::InnerIterator it(P, static_cast<Eigen::Index>(j)); it; ++it) {
      if (in_dst[static_cast<std::size_t>(it.row())]) total += it.value();
    }
  }
  return total / static_cast<double>(src.size());
}

void write_coo(std::ostream& os, const TransferMatrix& m) {
  char line[128];
  std::snprintf(line, sizeof line, "%% n=%td start=%.17g duration=%.17g Q=%zu nnz=%td\n",
                static_cast<std::ptrdiff_t>(m.P.rows()), m.start, m.duration, m.Q,
                static_cast<std::ptrdiff_t>(m.P.nonZeros()));
  os << line;
  for (Eigen::Index j = 0; j < m.P.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(m.P, j); it; ++it) {
      std::snprintf(line, sizeof line, "%td %td %.17g\n", static_cast<std::ptrdiff_t>(it.row()),
                    static_cast<std::ptrdiff_t>(it.col()), it.value());
      os << line;
    }
  }
}

TransferMatrix read_coo(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.empty() || header[0] != '%') {
    throw ConfigError("read_coo: missing metadata header");
  }
  TransferMatrix m;
  long long n = -1, nnz = -1;
  std::istringstream hs(header.substr(1));
  std::string tok;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    if (key == "n") n = std::stoll(val);
    else if (key == "start") m.start = std::stod(val);
    else if (key == "duration") m.duration = std::stod(val);
    else if (key == "Q") m.Q = std::stoull(val);
    else if (key == "nnz") nnz = std::stoll(val);
  }
  if (n <= 0) throw ConfigError("read_coo: header lacks n");
  std::vector<Eigen::Triplet<double>> trips;
  if (nnz > 0) trips.reserve(static_cast<std::size_t>(nnz));
  long long r, c;
  double v;
  while (is >> r >> c >> v) {
    if (r < 0 || c < 0 || r >= n || c >= n) throw ConfigError("read_coo: entry out of range");
    trips.emplace_back(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c), v);
  }
  m.P.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  m.P.setFromTriplets(trips.begin(), trips.end());
  m.P.makeCompressed();
  return m;
}

}  // namespace cohset
