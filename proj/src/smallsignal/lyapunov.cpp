#include "acdc/smallsignal/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "acdc/common/error.hpp"

namespace acdc::smallsignal {

using Eigen::Index;
using Eigen::MatrixXd;

SchurForm::SchurForm(const MatrixXd& A) {
  if (A.rows() != A.cols()) throw InvalidInput("Schur form needs a square matrix");
  if (A.rows() == 0) return;
  Eigen::RealSchur<MatrixXd> rs(A, true);
  if (rs.info() != Eigen::Success) throw NumericError("real Schur decomposition did not converge");
  T_ = rs.matrixT();
  U_ = rs.matrixU();
}

Eigen::VectorXcd SchurForm::eigenvalues() const {
  const Index n = T_.rows();
  Eigen::VectorXcd ev(n);
  for (Index i = 0; i < n;) {
    if (i + 1 < n && T_(i + 1, i) != 0.0) {
      // 2x2 block [a b; c d] with complex pair
      const double a = T_(i, i), b = T_(i, i + 1), c = T_(i + 1, i), d = T_(i + 1, i + 1);
      const double tr = 0.5 * (a + d);
      const double disc = 0.25 * (a - d) * (a - d) + b * c;
      const double im = std::sqrt(std::max(-disc, 0.0));
      ev(i) = {tr, im};
      ev(i + 1) = {tr, -im};
      i += 2;
    } else {
      ev(i) = {T_(i, i), 0.0};
      ++i;
    }
  }
  return ev;
}

namespace {

struct Block {
  Index start, size;
};

std::vector<Block> diagonal_blocks(const MatrixXd& T) {
  std::vector<Block> blocks;
  const Index n = T.rows();
  for (Index i = 0; i < n;) {
    const Index s = (i + 1 < n && T(i + 1, i) != 0.0) ? 2 : 1;
    blocks.push_back({i, s});
    i += s;
  }
  return blocks;
}

// Solves P^T X + X Q = R for blocks of size <= 2 through the Kronecker form.
MatrixXd small_sylvester(const MatrixXd& P, const MatrixXd& Q, const MatrixXd& R) {
  const Index p = P.rows(), q = Q.rows();
  MatrixXd K = MatrixXd::Zero(p * q, p * q);
  for (Index c = 0; c < q; ++c)
    for (Index r = 0; r < p; ++r) {
      const Index row = c * p + r;
      for (Index k = 0; k < p; ++k) K(row, c * p + k) += P(k, r);
      for (Index k = 0; k < q; ++k) K(row, k * p + r) += Q(k, c);
    }
  Eigen::FullPivLU<MatrixXd> lu(K);
  if (!lu.isInvertible()) throw NumericError("Lyapunov equation is singular (eigenvalues sum to zero)");
  const Eigen::VectorXd x = lu.solve(Eigen::Map<const Eigen::VectorXd>(R.data(), p * q));
  return Eigen::Map<const MatrixXd>(x.data(), p, q);
}

}  // namespace

MatrixXd solve_lyapunov(const SchurForm& schur, const MatrixXd& W) {
  const MatrixXd& T = schur.T();
  const MatrixXd& U = schur.U();
  const Index n = T.rows();
  if (W.rows() != n || W.cols() != n) throw InvalidInput("Lyapunov right-hand side has the wrong size");
  // T^T Y + Y T = M with M = -U^T W U, then X = U Y U^T.
  const MatrixXd M = -(U.transpose() * W * U);
  MatrixXd Y = MatrixXd::Zero(n, n);
  const auto blocks = diagonal_blocks(T);
  for (std::size_t bj = 0; bj < blocks.size(); ++bj) {
    const auto [j0, nj] = blocks[bj];
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
      const auto [i0, ni] = blocks[bi];
      MatrixXd R = M.block(i0, j0, ni, nj);
      if (i0 > 0) R.noalias() -= T.block(0, i0, i0, ni).transpose() * Y.block(0, j0, i0, nj);
      if (j0 > 0) R.noalias() -= Y.block(i0, 0, ni, j0) * T.block(0, j0, j0, nj);
      Y.block(i0, j0, ni, nj) = small_sylvester(T.block(i0, i0, ni, ni), T.block(j0, j0, nj, nj), R);
    }
  }
  MatrixXd X = U * Y * U.transpose();
  return 0.5 * (X + X.transpose());
}

MatrixXd solve_lyapunov(const MatrixXd& A, const MatrixXd& W) { return solve_lyapunov(SchurForm(A), W); }

MatrixXd solve_lyapunov_kronecker(const MatrixXd& A, const MatrixXd& W) {
  const Index n = A.rows();
  // vec(A^T X + X A) = (I kron A^T + A^T kron I) vec(X)
  const MatrixXd I = MatrixXd::Identity(n, n);
  MatrixXd K = MatrixXd::Zero(n * n, n * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      K.block(i * n, j * n, n, n) += I(i, j) * A.transpose();
      K.block(i * n, j * n, n, n) += A(j, i) * I;
    }
  const MatrixXd rhs = -W;
  const Eigen::VectorXd x = K.fullPivLu().solve(Eigen::Map<const Eigen::VectorXd>(rhs.data(), n * n));
  return Eigen::Map<const MatrixXd>(x.data(), n, n);
}

double lyapunov_residual(const MatrixXd& A, const MatrixXd& X, const MatrixXd& W) {
  return (A.transpose() * X + X * A + W).cwiseAbs().maxCoeff();
}

}  // namespace acdc::smallsignal
