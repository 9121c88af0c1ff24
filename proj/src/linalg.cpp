#include "cohset/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "cohset/errors.hpp"

namespace cohset::linalg {

namespace {

std::vector<Eigen::Index> descending_order(const Eigen::VectorXd& v) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(v.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v(a) > v(b); });
  return idx;
}

}  // namespace

SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& A_in, int max_sweeps) {
  const Eigen::Index n = A_in.rows();
  if (A_in.cols() != n) throw DomainError("jacobi_eigen: matrix must be square");
  Eigen::MatrixXd A = 0.5 * (A_in + A_in.transpose());
  Eigen::MatrixXd V = Eigen::MatrixXd::Identity(n, n);
  const double eps = std::numeric_limits<double>::epsilon();

  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
    if (off <= eps * eps * std::max(1e-300, A.squaredNorm())) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = A(p, q);
        if (apq == 0.0) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index r = 0; r < n; ++r) {
          const double arp = A(r, p), arq = A(r, q);
          A(r, p) = c * arp - s * arq;
          A(r, q) = s * arp + c * arq;
        }
        for (Eigen::Index r = 0; r < n; ++r) {
          const double apr = A(p, r), aqr = A(q, r);
          A(p, r) = c * apr - s * aqr;
          A(q, r) = s * apr + c * aqr;
        }
        for (Eigen::Index r = 0; r < n; ++r) {
          const double vrp = V(r, p), vrq = V(r, q);
          V(r, p) = c * vrp - s * vrq;
          V(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }
  if (sweep == max_sweeps) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
    throw ConvergenceError("jacobi_eigen: no convergence", std::sqrt(off));
  }

  const Eigen::VectorXd d = A.diagonal();
  const auto order = descending_order(d);
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = d(order[static_cast<std::size_t>(i)]);
    out.vectors.col(i) = V.col(order[static_cast<std::size_t>(i)]);
  }
  out.sweeps = sweep;
  return out;
}

ThinSvd jacobi_svd(const Eigen::MatrixXd& A_in, int max_sweeps) {
  Eigen::MatrixXd A = A_in;
  const Eigen::Index b = A.cols();
  Eigen::MatrixXd V = Eigen::MatrixXd::Identity(b, b);
  const double eps = std::numeric_limits<double>::epsilon();

  // columns below this are numerically zero and are left alone
  double scale = 0.0;
  for (Eigen::Index j = 0; j < b; ++j) scale = std::max(scale, A.col(j).squaredNorm());
  const double negligible = scale * eps * eps;
  // dot products of m-long columns carry ~sqrt(m) eps rounding
  const double orth_tol = eps * std::sqrt(static_cast<double>(std::max<Eigen::Index>(A.rows(), 1)));
  double worst = 0.0;

  int sweep = 0;
  bool rotated = true;
  for (; sweep < max_sweeps && rotated; ++sweep) {
    rotated = false;
    worst = 0.0;
    for (Eigen::Index p = 0; p < b; ++p) {
      for (Eigen::Index q = p + 1; q < b; ++q) {
        const double alpha = A.col(p).squaredNorm();
        const double beta = A.col(q).squaredNorm();
        const double gamma = A.col(p).dot(A.col(q));
        if (alpha <= negligible || beta <= negligible) continue;
        const double off = std::abs(gamma) / std::sqrt(alpha * beta);
        worst = std::max(worst, off);
        if (off <= orth_tol) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Eigen::Index r = 0; r < A.rows(); ++r) {
          const double ap = A(r, p), aq = A(r, q);
          A(r, p) = c * ap - s * aq;
          A(r, q) = s * ap + c * aq;
        }
        for (Eigen::Index r = 0; r < b; ++r) {
          const double vp = V(r, p), vq = V(r, q);
          V(r, p) = c * vp - s * vq;
          V(r, q) = s * vp + c * vq;
        }
      }
    }
  }
  if (rotated) throw ConvergenceError("jacobi_svd: no convergence", worst);

  Eigen::VectorXd norms(b);
  for (Eigen::Index j = 0; j < b; ++j) norms(j) = A.col(j).norm();
  const auto order = descending_order(norms);
  ThinSvd out;
  out.sigma.resize(b);
  out.U = Eigen::MatrixXd::Zero(A.rows(), b);
  out.V.resize(b, b);
  for (Eigen::Index i = 0; i < b; ++i) {
    const Eigen::Index j = order[static_cast<std::size_t>(i)];
    out.sigma(i) = norms(j);
    out.V.col(i) = V.col(j);
    if (norms(j) > 0) out.U.col(i) = A.col(j) / norms(j);
  }
  out.sweeps = sweep;
  return out;
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& A) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  return qr.householderQ() * Eigen::MatrixXd::Identity(A.rows(), A.cols());
}

}  // namespace cohset::linalg
