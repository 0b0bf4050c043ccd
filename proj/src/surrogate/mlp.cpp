#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <set>

#include <spdlog/spdlog.h>

#include "acdc/common/error.hpp"
#include "acdc/common/rng.hpp"
#include "acdc/simd/kernels.hpp"
#include "acdc/surrogate/training.hpp"
#include "binary_io.hpp"
#include "learners.hpp"

namespace acdc::surrogate::detail {

namespace {

// Dense feed-forward net with a single linear output unit. Parameters live in
// one flat vector: per layer the row-major weight block, then the biases.
struct Net {
  std::vector<int> sizes;
  Activation act = Activation::relu;
  bool logistic = false;
  std::vector<double> theta;
  std::vector<std::size_t> w_off, b_off;

  void layout() {
    w_off.clear();
    b_off.clear();
    std::size_t at = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
      w_off.push_back(at);
      at += static_cast<std::size_t>(sizes[l]) * static_cast<std::size_t>(sizes[l + 1]);
      b_off.push_back(at);
      at += static_cast<std::size_t>(sizes[l + 1]);
    }
    theta.assign(at, 0.0);
  }
  std::size_t layers() const { return sizes.size() - 1; }
};

double activate(Activation a, double u) {
  switch (a) {
    case Activation::relu: return u > 0 ? u : 0.0;
    case Activation::logistic: return sigmoid(u);
    case Activation::tanh: return std::tanh(u);
  }
  return u;
}

// derivative from the pre-activation u and the activation v
double activate_grad(Activation a, double u, double v) {
  switch (a) {
    case Activation::relu: return u > 0 ? 1.0 : 0.0;
    case Activation::logistic: return v * (1 - v);
    case Activation::tanh: return 1 - v * v;
  }
  return 1.0;
}

struct Workspace {
  std::vector<std::vector<double>> pre, act, delta;
  explicit Workspace(const Net& net) {
    for (int s : net.sizes) {
      pre.emplace_back(static_cast<std::size_t>(s));
      act.emplace_back(static_cast<std::size_t>(s));
      delta.emplace_back(static_cast<std::size_t>(s));
    }
  }
};

double forward(const Net& net, const double* x, Workspace& ws) {
  std::copy(x, x + net.sizes[0], ws.act[0].begin());
  const std::size_t L = net.layers();
  for (std::size_t l = 0; l < L; ++l) {
    const auto in = static_cast<std::size_t>(net.sizes[l]), out = static_cast<std::size_t>(net.sizes[l + 1]);
    const double* W = net.theta.data() + net.w_off[l];
    const double* b = net.theta.data() + net.b_off[l];
    for (std::size_t o = 0; o < out; ++o) {
      const double u = b[o] + simd::dot({W + o * in, in}, ws.act[l]);
      ws.pre[l + 1][o] = u;
      ws.act[l + 1][o] = l + 1 == L ? u : activate(net.act, u);
    }
  }
  return ws.act[L][0];
}

// Adds d(loss)/d(theta) for one sample to grad, given d(loss)/dz.
void backward(const Net& net, Workspace& ws, double dz, double* grad) {
  const std::size_t L = net.layers();
  ws.delta[L][0] = dz;
  for (std::size_t l = L; l-- > 0;) {
    const auto in = static_cast<std::size_t>(net.sizes[l]), out = static_cast<std::size_t>(net.sizes[l + 1]);
    const double* W = net.theta.data() + net.w_off[l];
    double* gW = grad + net.w_off[l];
    double* gb = grad + net.b_off[l];
    auto& prev = ws.delta[l];
    std::fill(prev.begin(), prev.end(), 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      const double d = ws.delta[l + 1][o];
      if (d == 0.0) continue;
      simd::axpy(d, ws.act[l], {gW + o * in, in});
      gb[o] += d;
      if (l > 0) simd::axpy(d, {W + o * in, in}, prev);
    }
    if (l > 0)
      for (std::size_t i = 0; i < in; ++i) prev[i] *= activate_grad(net.act, ws.pre[l][i], ws.act[l][i]);
  }
}

double sample_loss(bool logistic, double z, double y, double* dz) {
  if (logistic) {
    *dz = sigmoid(z) - y;
    return std::log1p(std::exp(-std::abs(z))) + std::max(z, 0.0) - y * z;
  }
  *dz = z - y;
  return 0.5 * (z - y) * (z - y);
}

double weight_penalty(const Net& net, double l2, double* grad) {
  double pen = 0;
  for (std::size_t l = 0; l < net.layers(); ++l) {
    for (std::size_t k = net.w_off[l]; k < net.b_off[l]; ++k) {
      pen += net.theta[k] * net.theta[k];
      if (grad) grad[k] += l2 * net.theta[k];
    }
  }
  return 0.5 * l2 * pen;
}

// Mean sample loss over `rows` of the row-major matrix X plus the L2 weight
// penalty; writes the gradient when grad is non-null.
double objective(const Net& net, const std::vector<double>& X, const std::vector<double>& y,
                 const std::size_t* rows, std::size_t n, double l2, Workspace& ws, std::vector<double>* grad) {
  const auto d = static_cast<std::size_t>(net.sizes[0]);
  if (grad) grad->assign(net.theta.size(), 0.0);
  double loss = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t r = rows[k];
    double dz = 0;
    loss += sample_loss(net.logistic, forward(net, X.data() + r * d, ws), y[r], &dz);
    if (grad) backward(net, ws, dz, grad->data());
  }
  const double inv = 1.0 / static_cast<double>(n);
  loss *= inv;
  if (grad)
    for (auto& v : *grad) v *= inv;
  return loss + weight_penalty(net, l2, grad ? grad->data() : nullptr);
}

void init_weights(Net& net, Rng& rng) {
  net.layout();
  for (std::size_t l = 0; l < net.layers(); ++l) {
    const double fan = net.sizes[l] + net.sizes[l + 1];
    const double limit = std::sqrt((net.act == Activation::logistic ? 12.0 : 6.0) / fan);
    std::uniform_real_distribution<double> u(-limit, limit);
    for (std::size_t k = net.w_off[l]; k < net.b_off[l]; ++k) net.theta[k] = u(rng);
    const auto end = l + 1 < net.layers() ? net.w_off[l + 1] : net.theta.size();
    for (std::size_t k = net.b_off[l]; k < end; ++k) net.theta[k] = u(rng);
  }
}

std::vector<double> row_major(const Eigen::MatrixXd& X) {
  std::vector<double> out(static_cast<std::size_t>(X.size()));
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(out.data(), X.rows(), X.cols()) = X;
  return out;
}

class Mlp final : public Estimator {
 public:
  Mlp(Net net, double y_mean, double y_scale) : net_(std::move(net)), y_mean_(y_mean), y_scale_(y_scale) {}

  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const override {
    if (X.cols() != net_.sizes[0]) throw InvalidInput("mlp: column count mismatch");
    const auto rm = row_major(X);
    Workspace ws(net_);
    Eigen::VectorXd out(X.rows());
    const auto d = static_cast<std::size_t>(X.cols());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const double z = forward(net_, rm.data() + static_cast<std::size_t>(i) * d, ws);
      out(i) = net_.logistic ? sigmoid(z) : y_mean_ + y_scale_ * z;
    }
    return out;
  }

  void save(BinaryWriter& out) const override {
    out.u32(static_cast<std::uint32_t>(net_.act));
    out.u8(net_.logistic);
    out.f64(y_mean_);
    out.f64(y_scale_);
    out.u64(net_.sizes.size());
    for (int s : net_.sizes) out.u64(static_cast<std::uint64_t>(s));
    out.vec(net_.theta);
  }

 private:
  Net net_;
  double y_mean_, y_scale_;
};

void require_gradient_check(Activation act, Task task, std::size_t inputs) {
  static std::mutex mu;
  static std::set<std::pair<int, int>> passed;
  const std::pair<int, int> key{static_cast<int>(act), static_cast<int>(task)};
  {
    std::lock_guard lock(mu);
    if (passed.count(key)) return;
  }
  const double err = mlp_gradient_check({5, 3}, act, task, derive_seed(inputs, "gradient-check"));
  if (!(err < kGradientTolerance))
    throw NumericError("mlp: backpropagation gradient check failed (relative error " + std::to_string(err) + ")");
  std::lock_guard lock(mu);
  passed.insert(key);
}

}  // namespace

std::unique_ptr<Estimator> fit_mlp(const ModelSpec& spec, const Eigen::MatrixXd& Xin, const Eigen::VectorXd& yin,
                                   std::uint64_t seed) {
  const auto& hp = spec.hp;
  require_gradient_check(hp.activation, spec.task, static_cast<std::size_t>(Xin.cols()));
  Rng rng(seed);
  Net net;
  net.sizes.push_back(static_cast<int>(Xin.cols()));
  for (int w : hp.hidden_layers) net.sizes.push_back(w);
  net.sizes.push_back(1);
  net.act = hp.activation;
  net.logistic = spec.task == Task::classification;
  init_weights(net, rng);

  const auto n = static_cast<std::size_t>(Xin.rows());
  const auto X = row_major(Xin);
  double y_mean = 0.0, y_scale = 1.0;
  if (!net.logistic) {
    y_mean = yin.mean();
    const double sd = std::sqrt((yin.array() - y_mean).square().mean());
    if (sd > 0) y_scale = sd;
  }
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = (yin(static_cast<Eigen::Index>(i)) - y_mean) / y_scale;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t n_val = n >= 20 ? std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(hp.validation_fraction * static_cast<double>(n)))) : 0;
  std::vector<std::size_t> val(order.begin(), order.begin() + static_cast<long>(n_val));
  std::vector<std::size_t> train(order.begin() + static_cast<long>(n_val), order.end());

  Workspace ws(net);
  const std::size_t P = net.theta.size();
  std::vector<double> m(P, 0.0), v(P, 0.0), grad;
  std::vector<double> best = net.theta;
  double best_val = std::numeric_limits<double>::infinity();
  int stale = 0;
  long step = 0;
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  const auto batch = static_cast<std::size_t>(hp.batch_size);
  for (int epoch = 0; epoch < hp.max_epochs; ++epoch) {
    std::shuffle(train.begin(), train.end(), rng);
    for (std::size_t s = 0; s < train.size(); s += batch) {
      const std::size_t len = std::min(batch, train.size() - s);
      objective(net, X, y, train.data() + s, len, hp.l2, ws, &grad);
      ++step;
      const double c1 = 1 - std::pow(b1, static_cast<double>(step)), c2 = 1 - std::pow(b2, static_cast<double>(step));
      for (std::size_t k = 0; k < P; ++k) {
        m[k] = b1 * m[k] + (1 - b1) * grad[k];
        v[k] = b2 * v[k] + (1 - b2) * grad[k] * grad[k];
        net.theta[k] -= hp.learning_rate * (m[k] / c1) / (std::sqrt(v[k] / c2) + eps);
      }
    }
    if (n_val == 0) continue;
    const double vl = objective(net, X, y, val.data(), val.size(), 0.0, ws, nullptr);
    if (!std::isfinite(vl)) throw NumericError("mlp: training diverged");
    if (!std::isfinite(best_val) || vl < best_val - 1e-7 * std::abs(best_val)) {
      best_val = vl;
      best = net.theta;
      stale = 0;
    } else if (++stale >= hp.patience) {
      spdlog::debug("mlp: early stop at epoch {}", epoch + 1);
      break;
    }
  }
  if (n_val > 0) net.theta = best;
  return std::make_unique<Mlp>(std::move(net), y_mean, y_scale);
}

std::unique_ptr<Estimator> load_mlp(BinaryReader& in) {
  Net net;
  const auto act = in.u32();
  if (act > 2) throw IoError("params.bin: bad activation");
  net.act = static_cast<Activation>(act);
  net.logistic = in.u8() != 0;
  const double ym = in.f64(), ys = in.f64();
  const auto layers = in.count(64);
  if (layers < 2) throw IoError("params.bin: mlp needs at least two layers");
  for (std::size_t l = 0; l < layers; ++l) net.sizes.push_back(static_cast<int>(in.count(1u << 20)));
  net.layout();
  const auto theta = in.stdvec();
  if (theta.size() != net.theta.size()) throw IoError("params.bin: mlp parameter count mismatch");
  net.theta = theta;
  return std::make_unique<Mlp>(std::move(net), ym, ys);
}

}  // namespace acdc::surrogate::detail

namespace acdc::surrogate {

double mlp_gradient_check(const std::vector<int>& hidden, Activation activation, Task task, std::uint64_t seed) {
  using namespace detail;
  Rng rng(seed);
  Net net;
  net.sizes.push_back(4);
  for (int w : hidden) net.sizes.push_back(w);
  net.sizes.push_back(1);
  net.act = activation;
  net.logistic = task == Task::classification;
  init_weights(net, rng);
  std::normal_distribution<double> g(0.0, 1.0);
  for (auto& t : net.theta) t += 0.3 * g(rng);

  const std::size_t n = 7;
  std::vector<double> X(n * 4), y(n);
  for (auto& x : X) x = g(rng);
  for (auto& t : y) t = net.logistic ? static_cast<double>(rng() % 2) : g(rng);
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  const double l2 = 0.01;
  Workspace ws(net);
  std::vector<double> grad;
  objective(net, X, y, rows.data(), n, l2, ws, &grad);

  double worst = 0;
  const double h = 1e-6;
  for (std::size_t k = 0; k < net.theta.size(); ++k) {
    const double keep = net.theta[k];
    net.theta[k] = keep + h;
    const double up = objective(net, X, y, rows.data(), n, l2, ws, nullptr);
    net.theta[k] = keep - h;
    const double down = objective(net, X, y, rows.data(), n, l2, ws, nullptr);
    net.theta[k] = keep;
    const double fd = (up - down) / (2 * h);
    worst = std::max(worst, std::abs(fd - grad[k]) / std::max({std::abs(fd), std::abs(grad[k]), 1e-5}));
  }
  return worst;
}

}  // namespace acdc::surrogate
