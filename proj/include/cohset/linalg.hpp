#pragma once

#include <Eigen/Dense>

namespace cohset::linalg {

struct SymmetricEigen {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // columns, orthonormal
  int sweeps = 0;
};

/// Cyclic Jacobi rotations on a dense symmetric matrix.
SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& A, int max_sweeps = 100);

struct ThinSvd {
  Eigen::VectorXd sigma;  // descending
  Eigen::MatrixXd U;      // left vectors (zero column where sigma == 0)
  Eigen::MatrixXd V;      // right vectors
  int sweeps = 0;
};

/// One-sided (Hestenes) Jacobi SVD of an m x b matrix. Small singular values
/// keep full relative accuracy, unlike going through A^T A.
ThinSvd jacobi_svd(const Eigen::MatrixXd& A, int max_sweeps = 100);

/// Thin Q factor (m x b) of a Householder QR.
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& A);

}  // namespace cohset::linalg
