#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "cohset/flow.hpp"
#include "cohset/grid.hpp"
#include "cohset/maps.hpp"

namespace cohset {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

/// Ulam matrix. P(i, j) is the fraction of box j's test points landing in
/// box i, so densities are pushed forward as column vectors: (Pf)_i = sum_j P_ij f_j.
struct TransferMatrix {
  SparseMatrix P;
  double start = 0.0;     // symbol index or flow start time
  double duration = 0.0;  // steps or time units
  std::size_t Q = 0;

  std::size_t size() const { return static_cast<std::size_t>(P.cols()); }
  double end() const { return start + duration; }
};

/// Build a transfer matrix from destination boxes. `dest` holds Q entries per
/// source box, source-major. Each column holds count/Q with integer counts.
TransferMatrix assemble_counts(std::size_t n, std::size_t Q, std::span<const std::size_t> dest, double start,
                               double duration);

/// True when every column holds integer multiples of 1/Q whose counts sum to
/// exactly Q. This is the exact form of column stochasticity.
bool columns_exact(const TransferMatrix& m);
/// Largest |column sum - 1|.
double column_sum_error(const SparseMatrix& P);

/// Images are computed over `workers` threads, each owning whole columns.
TransferMatrix ulam_map(const Grid& grid, const std::function<double(double)>& map, std::size_t Q,
                        double start = 0.0, unsigned workers = 1);
TransferMatrix ulam_map(const Grid& grid, const MapFamily& family, int symbol, std::size_t Q, double start = 0.0,
                        unsigned workers = 1);

/// Ulam matrices of the driven flow from `start` for each duration in
/// `durations` (ascending), all from one ensemble integration.
std::vector<TransferMatrix> ulam_flow(const Grid& grid, const DrivingPath& path, double start,
                                      std::span<const double> durations, std::size_t Q, KernelKind kernel,
                                      unsigned workers);
TransferMatrix ulam_flow(const Grid& grid, const DrivingPath& path, double start, double duration, std::size_t Q,
                         KernelKind kernel, unsigned workers);

/// Ordered list of one-step matrices, earliest first.
class Cocycle {
 public:
  Cocycle() = default;
  explicit Cocycle(std::vector<TransferMatrix> factors);

  /// Appends a factor; its start must equal the current end.
  void push_back(TransferMatrix m);

  const std::vector<TransferMatrix>& factors() const { return factors_; }
  std::size_t length() const { return factors_.size(); }
  bool empty() const { return factors_.empty(); }

 private:
  std::vector<TransferMatrix> factors_;
};

/// One-step Ulam matrices P(sigma^k omega) of a map family along a symbol
/// track, built on first use.
class MapCocycle {
 public:
  MapCocycle(Grid grid, MapFamily family, SymbolTrack track, std::size_t Q, unsigned workers = 1);
  MapCocycle(const MapCocycle&) = delete;
  MapCocycle& operator=(const MapCocycle&) = delete;

  const Grid& grid() const { return grid_; }
  const MapFamily& family() const { return family_; }
  const SymbolTrack& track() const { return track_; }
  std::size_t Q() const { return Q_; }

  /// P(sigma^k omega); throws DomainError outside the symbol window.
  const TransferMatrix& step(int k) const;
  /// Factors for k0, ..., k0 + length - 1.
  Cocycle span(int k0, int length) const;
  std::vector<const SparseMatrix*> factors(int k0, int length) const;

 private:
  Grid grid_;
  MapFamily family_;
  SymbolTrack track_;
  std::size_t Q_;
  unsigned workers_;
  mutable std::mutex mutex_;
  mutable std::vector<std::unique_ptr<TransferMatrix>> cache_;
};

/// Product with later times on the left. Throws DomainError on a gap.
TransferMatrix compose(const Cocycle& cocycle);
TransferMatrix compose(std::span<const TransferMatrix> factors);

Eigen::VectorXd apply(const SparseMatrix& P, const Eigen::VectorXd& f);
inline Eigen::VectorXd apply(const TransferMatrix& m, const Eigen::VectorXd& f) { return apply(m.P, f); }

/// Fraction of the mass on A_src that lands in A_dst.
double rho_hat(const SparseMatrix& P, const BoxSet& src, const BoxSet& dst);
inline double rho_hat(const TransferMatrix& m, const BoxSet& src, const BoxSet& dst) {
  return rho_hat(m.P, src, dst);
}

/// Coordinate-format text: a "%" metadata header, then "row col value" lines (0-based).
void write_coo(std::ostream& os, const TransferMatrix& m);
TransferMatrix read_coo(std::istream& is);

}  // namespace cohset
