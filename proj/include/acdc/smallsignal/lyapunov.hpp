#pragma once

#include <Eigen/Dense>

namespace acdc::smallsignal {

// Real Schur form A = U T U^T, computed once and shared between eigenvalue
// extraction and Lyapunov solves.
class SchurForm {
 public:
  explicit SchurForm(const Eigen::MatrixXd& A);
  const Eigen::MatrixXd& T() const noexcept { return T_; }
  const Eigen::MatrixXd& U() const noexcept { return U_; }
  Eigen::VectorXcd eigenvalues() const;

 private:
  Eigen::MatrixXd T_, U_;
};

// Solves A^T X + X A + W = 0 (W symmetric) by Bartels-Stewart on the real
// Schur form, block by block over the 1x1 / 2x2 diagonal blocks of T.
Eigen::MatrixXd solve_lyapunov(const SchurForm& schur, const Eigen::MatrixXd& W);
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& W);

// Dense Kronecker-product solve, O(n^6); reference for small n.
Eigen::MatrixXd solve_lyapunov_kronecker(const Eigen::MatrixXd& A, const Eigen::MatrixXd& W);

double lyapunov_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& X, const Eigen::MatrixXd& W);

}  // namespace acdc::smallsignal
