#include "hports/linalg.hpp"

#include "hports/errors.hpp"

namespace hports {

Eigen::MatrixXd pseudo_inverse_symmetric(const Eigen::MatrixXd& a, double rel_tol) {
  if (a.size() == 0) return a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::FactorizationFailure, "eigendecomposition failed");
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double tol = rel_tol * ev.cwiseAbs().maxCoeff();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i)) > tol) inv(i) = 1.0 / ev(i);
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

KernelResult generalized_kernel(const Eigen::MatrixXd& l, const Eigen::MatrixXd& m, double rel_cutoff) {
  KernelResult out;
  const Eigen::Index n = l.rows();
  if (n == 0) {
    out.basis.resize(0, 0);
    return out;
  }
  if (l.cwiseAbs().maxCoeff() == 0.0) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::FactorizationFailure, "mass matrix not SPD");
    // columns of L^{-T} are M-orthonormal
    out.basis = llt.matrixU().solve(Eigen::MatrixXd::Identity(n, n));
    out.eigenvalues = Eigen::VectorXd::Zero(n);
    return out;
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(l, m, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::FactorizationFailure, "generalized eigensolver failed");
  out.eigenvalues = es.eigenvalues();
  out.cutoff = rel_cutoff * out.eigenvalues.maxCoeff();
  int dim = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = out.eigenvalues(i);
    if (e >= out.cutoff / 10.0 && e <= out.cutoff * 10.0)
      throw Error(ErrorCode::AmbiguousKernel, "eigenvalue " + std::to_string(e) + " too close to kernel cutoff");
    if (e < out.cutoff) ++dim;
  }
  out.basis = es.eigenvectors().leftCols(dim);
  return out;
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& a, const std::vector<int>& rows, const std::vector<int>& cols) {
  return a(rows, cols);
}

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<int>& idx) { return v(idx); }

Eigen::VectorXd scatter(const Eigen::VectorXd& part, const std::vector<int>& idx, Eigen::Index n) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  out(idx) = part;
  return out;
}

Eigen::VectorXd project_onto(const Eigen::MatrixXd& basis, const Eigen::MatrixXd& m, const Eigen::VectorXd& v) {
  if (basis.cols() == 0) return Eigen::VectorXd::Zero(v.size());
  return basis * (basis.transpose() * (m * v));
}

}  // namespace hports
