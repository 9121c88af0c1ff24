#include "cohset/oseledets.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>

#include "cohset/errors.hpp"
#include "cohset/linalg.hpp"

namespace cohset {

MatrixChain::MatrixChain(std::vector<const SparseMatrix*> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw DomainError("MatrixChain: no factors");
  n_ = factors_.front()->cols();
  for (const auto* f : factors_) {
    if (f->rows() != n_ || f->cols() != n_) throw DomainError("MatrixChain: factor sizes differ");
  }
}

Eigen::MatrixXd MatrixChain::apply(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd Y = X;
  for (const auto* f : factors_) Y = (*f) * Y;
  return Y;
}

Eigen::MatrixXd MatrixChain::apply_transpose(const Eigen::MatrixXd& Y) const {
  Eigen::MatrixXd X = Y;
  for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) X = (*it)->transpose() * X;
  return X;
}

Eigen::MatrixXd MatrixChain::dense() const { return apply(Eigen::MatrixXd::Identity(n_, n_)); }

namespace {

// Rotate each cluster of (numerically) equal singular values onto
// eigenvectors of S restricted to the cluster subspace.
void resolve_clusters(const Eigen::VectorXd& sigma, Eigen::MatrixXd& U, int k, const SvdOptions& opts) {
  const auto& S = opts.symmetry;
  if (S.empty()) return;
  if (static_cast<Eigen::Index>(S.size()) != U.rows()) throw DomainError("top_k_singular: symmetry has wrong length");
  // a cluster touching mode k-1 may continue past it
  const int limit = static_cast<int>(std::min<Eigen::Index>(U.cols(), k + 1));
  auto close = [&](int a, int b) { return std::abs(sigma(a) - sigma(b)) <= opts.cluster_tol * sigma(a); };
  int a = 0;
  while (a < k) {
    int e = a + 1;
    while (e < limit && close(e - 1, e)) ++e;
    if (e - a > 1 && sigma(a) > 0) {
      const Eigen::MatrixXd C = U.middleCols(a, e - a);
      Eigen::MatrixXd SC(C.rows(), C.cols());
      for (Eigen::Index i = 0; i < C.rows(); ++i) SC.row(static_cast<Eigen::Index>(S[static_cast<std::size_t>(i)])) = C.row(i);
      Eigen::MatrixXd G = C.transpose() * SC;
      G = 0.5 * (G + G.transpose()).eval();
      const auto eig = linalg::jacobi_eigen(G);
      U.middleCols(a, e - a) = C * eig.vectors;
    }
    a = e;
  }
}

SpectralResult finish(Eigen::VectorXd sigma, Eigen::MatrixXd U, int k, double duration, const SvdOptions& opts) {
  resolve_clusters(sigma, U, k, opts);
  SpectralResult r;
  r.sigma = sigma.head(k);
  r.U = U.leftCols(k);
  r.duration = duration;
  r.L.resize(k);
  for (int j = 0; j < k; ++j) r.L(j) = r.sigma(j) > 0 ? std::pow(r.sigma(j), 1.0 / duration) : 0.0;
  return r;
}

SpectralResult dense_path(const MatrixChain& P, int k, double duration, const SvdOptions& opts) {
  const linalg::ThinSvd svd = linalg::jacobi_svd(P.dense());
  SpectralResult r = finish(svd.sigma, svd.V, k, duration, opts);
  r.sweeps = svd.sweeps;
  return r;
}

}  // namespace

SpectralResult top_k_singular(const MatrixChain& P, int k, double duration, const SvdOptions& opts) {
  const Eigen::Index n = P.size();
  if (k < 1 || k > n) throw ConfigError("top_k_singular: need 1 <= k <= n");
  if (!(duration > 0)) throw ConfigError("top_k_singular: duration must be positive");
  if (opts.path == SolverPath::dense) return dense_path(P, k, duration, opts);

  const Eigen::Index b = std::min<Eigen::Index>(k + 2, n);
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd X(n, b);
  for (Eigen::Index j = 0; j < b; ++j)
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = gauss(rng);
  X = linalg::orthonormalize(X);

  Eigen::MatrixXd prev;
  double residual = 1.0;
  for (int sweep = 1; sweep <= opts.max_iter; ++sweep) {
    const Eigen::MatrixXd B = P.apply(X);
    const linalg::ThinSvd ritz = linalg::jacobi_svd(B);
    const Eigen::MatrixXd Xr = X * ritz.V;

    if (sweep > 1) {
      // rotation of the leading k-subspace; null directions have no defined
      // orientation and count as converged
      const double floor = ritz.sigma(0) * 1e-14;
      const Eigen::MatrixXd proj = prev * (prev.transpose() * Xr.leftCols(k));
      residual = 0.0;
      for (int j = 0; j < k; ++j) {
        if (ritz.sigma(j) <= floor) continue;
        residual = std::max(residual, (Xr.col(j) - proj.col(j)).norm());
      }
      if (residual < opts.tol) {
        SpectralResult r = finish(ritz.sigma, Xr, k, duration, opts);
        r.sweeps = sweep;
        r.residual = residual;
        return r;
      }
    }
    prev = Xr.leftCols(k);
    const Eigen::MatrixXd Q1 = linalg::orthonormalize(B * ritz.V);
    X = linalg::orthonormalize(P.apply_transpose(Q1));
  }
  throw ConvergenceError("top_k_singular: orthogonal iteration did not converge after " +
                             std::to_string(opts.max_iter) + " sweeps (rotation " + std::to_string(residual) + ")",
                         residual);
}

void fix_sign(Eigen::VectorXd& v) {
  if (v.size() == 0) return;
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v(i)) > std::abs(v(best))) best = i;
  }
  if (v(best) < 0) v = -v;
}

Eigen::VectorXd normalize_l1(const Eigen::VectorXd& v) {
  const double s = v.lpNorm<1>();
  if (s == 0) throw DomainError("normalize_l1: zero vector");
  return v / s;
}

double aligned_l1_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::VectorXd na = normalize_l1(a);
  const Eigen::VectorXd nb = normalize_l1(b);
  return std::min((na - nb).lpNorm<1>(), (na + nb).lpNorm<1>());
}

OseledetsApprox oseledets_discrete(const MapCocycle& cocycle, int k0, int M, int N, int modes,
                                   std::span<const int> checkpoints, const SvdOptions& opts) {
  if (M < 1 || N < 0 || M < N) throw ConfigError("oseledets: need M >= N >= 0 and M >= 1");
  OseledetsApprox out;
  out.M = M;
  out.N = N;
  out.M_time = M;
  out.N_time = N;
  const int s = k0 - N;
  out.spectrum = top_k_singular(MatrixChain(cocycle.factors(s, M)), modes, static_cast<double>(M), opts);

  OseledetsCheckpoint base;
  base.time = k0;
  for (int j = 0; j < modes; ++j) {
    Eigen::VectorXd w = out.spectrum.U.col(j);
    if (N > 0) w = MatrixChain(cocycle.factors(s, N)).apply(w);
    w = normalize_l1(w);
    fix_sign(w);
    base.w.push_back(std::move(w));
  }
  out.checkpoints.push_back(base);

  int reached = 0;
  std::vector<Eigen::VectorXd> cur = base.w;
  std::vector<int> ts(checkpoints.begin(), checkpoints.end());
  std::sort(ts.begin(), ts.end());
  for (int t : ts) {
    if (t <= 0) throw ConfigError("oseledets: checkpoints must be positive");
    for (; reached < t; ++reached) {
      const auto& P = cocycle.step(k0 + reached).P;
      for (auto& v : cur) v = normalize_l1(P * v);
    }
    out.checkpoints.push_back({static_cast<double>(k0 + t), cur});
  }
  return out;
}

OseledetsApprox oseledets_flow(const Grid& grid, const DrivingPath& path, double t0, double M, double N, int modes,
                               std::span<const double> checkpoints, const FlowRun& run, const SvdOptions& opts) {
  if (!(M > 0) || N < 0 || M < N) throw ConfigError("oseledets: need M >= N >= 0 and M > 0");
  OseledetsApprox out;
  out.M_time = M;
  out.N_time = N;
  out.M = static_cast<int>(std::lround(M));
  out.N = static_cast<int>(std::lround(N));

  std::vector<double> spans;
  if (N > 0) spans.push_back(N);
  spans.push_back(M);
  spans.erase(std::unique(spans.begin(), spans.end()), spans.end());
  auto mats = ulam_flow(grid, path, t0 - N, spans, run.Q, run.kernel, run.workers);
  const TransferMatrix& PM = mats.back();
  out.spectrum = top_k_singular(MatrixChain(PM.P), modes, M, opts);
  if (!opts.symmetry.empty()) {
    const auto& S = opts.symmetry;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < PM.P.outerSize(); ++j) {
      // column S(j) of P against the S-image of column j
      Eigen::VectorXd diff = Eigen::VectorXd::Zero(PM.P.rows());
      for (SparseMatrix::InnerIterator it(PM.P, static_cast<Eigen::Index>(S[static_cast<std::size_t>(j)])); it; ++it)
        diff(it.row()) += it.value();
      for (SparseMatrix::InnerIterator it(PM.P, j); it; ++it)
        diff(static_cast<Eigen::Index>(S[static_cast<std::size_t>(it.row())])) -= it.value();
      worst = std::max(worst, 0.5 * diff.lpNorm<1>());
    }
    out.symmetry_defect = worst;
  }

  OseledetsCheckpoint base;
  base.time = t0;
  for (int j = 0; j < modes; ++j) {
    Eigen::VectorXd w = out.spectrum.U.col(j);
    if (N > 0) w = mats.front().P * w;
    w = normalize_l1(w);
    fix_sign(w);
    base.w.push_back(std::move(w));
  }
  out.checkpoints.push_back(base);

  if (!checkpoints.empty()) {
    std::vector<double> ts(checkpoints.begin(), checkpoints.end());
    std::sort(ts.begin(), ts.end());
    out.pushforward = ulam_flow(grid, path, t0, ts, run.Q, run.kernel, run.workers);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      OseledetsCheckpoint cp;
      cp.time = t0 + ts[i];
      for (const auto& w : base.w) cp.w.push_back(normalize_l1(out.pushforward[i].P * w));
      out.checkpoints.push_back(std::move(cp));
    }
  }
  return out;
}

std::vector<DeltaPoint> convergence_delta(const MapCocycle& cocycle, int k0, int N_first, int N_last,
                                          const SvdOptions& opts) {
  std::vector<DeltaPoint> out;
  for (int N = N_first; N <= N_last; ++N) {
    const auto here = oseledets_discrete(cocycle, k0, 2 * N, N, 2, {}, opts);
    const auto next = oseledets_discrete(cocycle, k0 + 1, 2 * N, N, 2, {}, opts);
    const Eigen::VectorXd pushed = cocycle.step(k0).P * here.w(0, 1);
    out.push_back({N, aligned_l1_distance(next.w(0, 1), pushed)});
  }
  return out;
}

PositivePartBound positive_part_bound(const SparseMatrix& P, const Eigen::VectorXd& f2) {
  if (f2.size() != P.cols()) throw DomainError("positive_part_bound: length mismatch");
  if (std::abs(f2.sum()) > 1e-10) throw DomainError("positive_part_bound: f2 must have zero sum");
  if (std::abs(f2.lpNorm<1>() - 1.0) > 1e-10) throw DomainError("positive_part_bound: f2 must have unit 1-norm");
  const Eigen::VectorXd fp = f2.cwiseMax(0.0);
  const Eigen::VectorXd Pf = P * f2;
  PositivePartBound r;
  r.lhs = (P * fp - Pf.cwiseMax(0.0)).lpNorm<1>();
  r.rhs = 0.5 * (1.0 - Pf.lpNorm<1>());
  r.pass = r.lhs <= r.rhs + 1e-10;
  return r;
}

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& A) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  if (es.info() != Eigen::Success) throw ConvergenceError("eigenvalues: EigenSolver failed", 0.0);
  std::vector<std::complex<double>> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::stable_sort(ev.begin(), ev.end(), [](auto a, auto b) { return std::abs(a) > std::abs(b); });
  return ev;
}

}  // namespace cohset
