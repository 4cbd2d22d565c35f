#pragma once

#include <vector>

#include <Eigen/Dense>

namespace hports {

/// Moore-Penrose inverse of a symmetric matrix; eigenvalues below
/// rel_tol * max|eigenvalue| are treated as zero.
Eigen::MatrixXd pseudo_inverse_symmetric(const Eigen::MatrixXd& a, double rel_tol = 1e-10);

struct KernelResult {
  Eigen::MatrixXd basis;        // columns, orthonormal in the M inner product
  Eigen::VectorXd eigenvalues;  // full generalized spectrum, ascending
  double cutoff = 0.0;
};

/// Null space of the symmetric PSD pencil L x = lambda M x. Eigenvalues below
/// rel_cutoff * lambda_max count as zero. Throws AmbiguousKernel when an
/// eigenvalue lies within a factor 10 of the cutoff.
KernelResult generalized_kernel(const Eigen::MatrixXd& l, const Eigen::MatrixXd& m, double rel_cutoff = 1e-9);

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& a, const std::vector<int>& rows, const std::vector<int>& cols);
Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<int>& idx);
/// Writes `part` into a zero vector of length n at positions idx.
Eigen::VectorXd scatter(const Eigen::VectorXd& part, const std::vector<int>& idx, Eigen::Index n);

/// M-orthogonal projection onto span(basis) for an M-orthonormal basis.
Eigen::VectorXd project_onto(const Eigen::MatrixXd& basis, const Eigen::MatrixXd& m, const Eigen::VectorXd& v);

}  // namespace hports
