#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "acdc/common/error.hpp"
#include "binary_io.hpp"
#include "learners.hpp"

namespace acdc::surrogate::detail {

namespace {

class Constant final : public Estimator {
 public:
  explicit Constant(double v) : v_(v) {}
  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const override { return Eigen::VectorXd::Constant(X.rows(), v_); }
  void save(BinaryWriter& out) const override { out.f64(v_); }

 private:
  double v_;
};

class Linear final : public Estimator {
 public:
  Linear(double b, Eigen::VectorXd w, bool logistic) : b_(b), w_(std::move(w)), logistic_(logistic) {}
  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const override {
    if (X.cols() != w_.size()) throw InvalidInput("linear model: column count mismatch");
    Eigen::VectorXd z = (X * w_).array() + b_;
    if (logistic_)
      for (auto& v : z) v = sigmoid(v);
    return z;
  }
  void save(BinaryWriter& out) const override {
    out.u8(logistic_);
    out.f64(b_);
    out.vec(w_);
  }

 private:
  double b_;
  Eigen::VectorXd w_;
  bool logistic_;
};

// Penalized logistic regression by Newton steps; the intercept is unpenalized.
std::unique_ptr<Estimator> fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double l2) {
  const Eigen::Index n = X.rows(), d = X.cols();
  Eigen::MatrixXd A(n, d + 1);
  A.col(0).setOnes();
  A.rightCols(d) = X;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d + 1);
  const double ybar = std::clamp(y.mean(), 1e-6, 1 - 1e-6);
  beta(0) = std::log(ybar / (1 - ybar));
  const double lam = std::max(l2, 1e-8) * static_cast<double>(n);
  Eigen::VectorXd pen = Eigen::VectorXd::Constant(d + 1, lam);
  pen(0) = 0.0;
  auto loss = [&](const Eigen::VectorXd& b) {
    const Eigen::VectorXd z = A * b;
    double l = 0;
    for (Eigen::Index i = 0; i < n; ++i) l += std::log1p(std::exp(-std::abs(z(i)))) + std::max(z(i), 0.0) - y(i) * z(i);
    return l + 0.5 * (pen.array() * b.array().square()).sum();
  };
  double cur = loss(beta);
  for (int it = 0; it < 100; ++it) {
    const Eigen::VectorXd z = A * beta;
    Eigen::VectorXd p(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      p(i) = sigmoid(z(i));
      w(i) = std::max(p(i) * (1 - p(i)), 1e-10);
    }
    const Eigen::VectorXd g = A.transpose() * (p - y) + pen.cwiseProduct(beta);
    Eigen::MatrixXd H = A.transpose() * w.asDiagonal() * A;
    H.diagonal() += pen.array().max(1e-10).matrix();
    const Eigen::VectorXd step = H.ldlt().solve(g);
    double t = 1.0, next = cur;
    Eigen::VectorXd cand;
    for (int h = 0; h < 30; ++h, t *= 0.5) {
      cand = beta - t * step;
      next = loss(cand);
      if (next <= cur) break;
    }
    if (!(next <= cur)) break;
    beta = cand;
    const bool converged = cur - next < 1e-12 * std::max(1.0, cur);
    cur = next;
    if (converged) break;
  }
  return std::make_unique<Linear>(beta(0), beta.tail(d), true);
}

}  // namespace

std::unique_ptr<Estimator> fit_dummy(const ModelSpec& spec, const Eigen::VectorXd& y) {
  // the classification baseline always answers "stable"
  return std::make_unique<Constant>(spec.task == Task::classification ? 1.0 : y.mean());
}

std::unique_ptr<Estimator> load_dummy(BinaryReader& in) { return std::make_unique<Constant>(in.f64()); }

std::unique_ptr<Estimator> fit_linear(const ModelSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (spec.task == Task::classification) return fit_logistic(X, y, spec.hp.l2);
  const Eigen::RowVectorXd mx = X.colwise().mean();
  const double my = y.mean();
  const Eigen::MatrixXd Xc = X.rowwise() - mx;
  Eigen::MatrixXd G = Xc.transpose() * Xc;
  G.diagonal().array() += std::max(spec.hp.l2, 1e-10);
  const Eigen::VectorXd w = G.ldlt().solve(Xc.transpose() * (y.array() - my).matrix());
  if (!w.allFinite()) throw NumericError("linear regression: singular normal equations");
  return std::make_unique<Linear>(my - mx.dot(w), w, false);
}

std::unique_ptr<Estimator> load_linear(BinaryReader& in) {
  const bool logistic = in.u8() != 0;
  const double b = in.f64();
  return std::make_unique<Linear>(b, in.vec(), logistic);
}

}  // namespace acdc::surrogate::detail
