#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "cohset/transfer.hpp"

namespace cohset {

/// Product F_m ... F_1 of sparse matrices applied without forming it.
/// Factors are given earliest first.
class MatrixChain {
 public:
  explicit MatrixChain(std::vector<const SparseMatrix*> factors);
  explicit MatrixChain(const SparseMatrix& single) : MatrixChain(std::vector<const SparseMatrix*>{&single}) {}

  Eigen::Index size() const { return n_; }
  Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
  Eigen::MatrixXd apply_transpose(const Eigen::MatrixXd& Y) const;
  Eigen::MatrixXd dense() const;

 private:
  std::vector<const SparseMatrix*> factors_;
  Eigen::Index n_ = 0;
};

enum class SolverPath { matrix_free, dense };

struct SvdOptions {
  double tol = 1e-10;
  int max_iter = 5000;
  std::uint64_t seed = 20100101;
  SolverPath path = SolverPath::matrix_free;
  /// Optional box permutation S with S P = P S. Singular values that agree to
  /// cluster_tol (relative) leave the basis of their subspace undetermined;
  /// it is then rotated onto S-eigenvectors, even before odd.
  std::vector<std::size_t> symmetry;
  double cluster_tol = 1e-6;
};

struct SpectralResult {
  Eigen::VectorXd sigma;  // descending
  Eigen::MatrixXd U;      // right singular vectors, n x k
  Eigen::VectorXd L;      // sigma^(1/duration)
  double duration = 1.0;
  int sweeps = 0;
  double residual = 0.0;
};

/// Top-k singular values and right singular vectors of P. The matrix-free
/// path runs block orthogonal iteration on P^T P (block k+2), stopping when
/// the leading k-subspace rotates by less than tol per sweep. The dense path
/// forms P and uses one-sided Jacobi rotations.
SpectralResult top_k_singular(const MatrixChain& P, int k, double duration, const SvdOptions& opts = {});

/// Largest-magnitude entry made positive (first one on ties).
void fix_sign(Eigen::VectorXd& v);
Eigen::VectorXd normalize_l1(const Eigen::VectorXd& v);
/// L1 distance after normalising both and aligning signs.
double aligned_l1_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct OseledetsCheckpoint {
  double time = 0.0;
  std::vector<Eigen::VectorXd> w;  // unit 1-norm, one per mode
};

struct OseledetsApprox {
  int M = 0;
  int N = 0;
  double M_time = 0.0;
  double N_time = 0.0;
  SpectralResult spectrum;
  std::vector<OseledetsCheckpoint> checkpoints;  // first entry is the base time
  /// Flow case: the push-forward matrices P^(t)(base) for each later checkpoint.
  std::vector<TransferMatrix> pushforward;
  /// Flow case with a symmetry: max column mass of P^(M) - S P^(M) S, over 2.
  double symmetry_defect = 0.0;

  const Eigen::VectorXd& w(std::size_t checkpoint, std::size_t mode) const { return checkpoints.at(checkpoint).w.at(mode); }
};

/// Discrete cocycle: vectors at symbol time k0 from P^(M)(sigma^(k0-N) omega),
/// pushed by P^(N); checkpoints are further steps t > 0 after k0.
OseledetsApprox oseledets_discrete(const MapCocycle& cocycle, int k0, int M, int N, int modes,
                                   std::span<const int> checkpoints = {}, const SvdOptions& opts = {});

struct FlowRun {
  std::size_t Q = 100;
  KernelKind kernel = KernelKind::scalar;
  unsigned workers = 1;
};

/// Flow: one long flow from t0 - N with snapshots at N and M. Checkpoint
/// offsets t > 0 push the base vectors by P^(t)(t0) from a second flow.
OseledetsApprox oseledets_flow(const Grid& grid, const DrivingPath& path, double t0, double M, double N, int modes,
                               std::span<const double> checkpoints, const FlowRun& run, const SvdOptions& opts = {});

struct DeltaPoint {
  int N = 0;
  double delta = 0.0;
};

/// Delta(N) = || w2(sigma omega) - P(omega) w2(omega) ||_1 with both vectors
/// normalised and sign-aligned, using M = 2N.
std::vector<DeltaPoint> convergence_delta(const MapCocycle& cocycle, int k0, int N_first, int N_last,
                                          const SvdOptions& opts = {});

struct PositivePartBound {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

/// lhs = ||P f+ - (P f)+||_1, rhs = (1 - ||P f||_1)/2 for zero-sum f with
/// ||f||_1 = 1. pass iff lhs <= rhs + 1e-10.
PositivePartBound positive_part_bound(const SparseMatrix& P, const Eigen::VectorXd& f2);

/// Eigenvalues of a (small) nonsymmetric matrix, sorted by descending modulus.
std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& A);

}  // namespace cohset
