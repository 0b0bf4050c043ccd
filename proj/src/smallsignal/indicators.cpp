#include "acdc/smallsignal/indicators.hpp"

#include <cmath>

#include "acdc/common/error.hpp"

namespace acdc::smallsignal {

using Eigen::MatrixXd;

namespace {

void require_stable(const StabilityLabel& label, const char* what) {
  if (!label.stable)
    throw IndicatorUndefined(std::string(what) + " is undefined for an unstable model (abscissa " +
                             std::to_string(label.abscissa) + ")");
}

double h2_from_schur(const SchurForm& schur, const StateSpaceModel& ss, OutputSet set) {
  if (ss.D_sel(set).cwiseAbs().maxCoeff() > 0.0)
    throw IndicatorUndefined("H2 norm is infinite with a direct feedthrough term");
  const MatrixXd Cs = ss.C_sel(set);
  const MatrixXd Q = solve_lyapunov(schur, Cs.transpose() * Cs);
  const double tr = (ss.B.transpose() * Q * ss.B).trace();
  return std::sqrt(std::max(tr, 0.0));
}

double max_abs_or_zero(const MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

double h2_norm(const StateSpaceModel& ss, OutputSet set) {
  const SchurForm schur(ss.A);
  require_stable(label_from_eigenvalues(schur.eigenvalues()), "H2 norm");
  return h2_from_schur(schur, ss, set);
}

MatrixXd dc_gain_matrix(const StateSpaceModel& ss, OutputSet set) {
  require_stable(assess_stability(ss.A), "DC gain");
  Eigen::PartialPivLU<MatrixXd> lu(ss.A);
  return ss.D_sel(set) - ss.C_sel(set) * lu.solve(ss.B);
}

double dc_gain(const StateSpaceModel& ss, OutputSet set) { return max_abs_or_zero(dc_gain_matrix(ss, set)); }

IndicatorSet indicators(const StateSpaceModel& ss) {
  IndicatorSet out;
  if (!ss.A.allFinite()) throw NumericError("state matrix has non-finite entries");
  const SchurForm schur(ss.A);
  out.label = label_from_eigenvalues(schur.eigenvalues());
  if (!out.label.stable) return out;
  out.h2_f = h2_from_schur(schur, ss, OutputSet::frequency);
  out.h2_vdc = h2_from_schur(schur, ss, OutputSet::dc_voltage);
  Eigen::PartialPivLU<MatrixXd> lu(ss.A);
  const MatrixXd AinvB = lu.solve(ss.B);
  out.k_f = max_abs_or_zero(ss.D_sel(OutputSet::frequency) - ss.C_sel(OutputSet::frequency) * AinvB);
  out.k_vdc = max_abs_or_zero(ss.D_sel(OutputSet::dc_voltage) - ss.C_sel(OutputSet::dc_voltage) * AinvB);
  return out;
}

StepResponse step_response(const StateSpaceModel& ss, Eigen::Index input, double horizon, double dt) {
  if (!(dt > 0.0)) throw InvalidInput("step response needs dt > 0");
  if (!(horizon > 0.0)) throw InvalidInput("step response needs a positive horizon");
  if (input < 0 || input >= ss.B.cols()) throw InvalidInput("step response input channel out of range");
  const auto steps = static_cast<Eigen::Index>(std::ceil(horizon / dt - 1e-9));
  const Eigen::VectorXd b = ss.B.col(input);
  const Eigen::VectorXd d = ss.D.col(input);
  StepResponse r;
  r.time.reserve(static_cast<std::size_t>(steps + 1));
  r.outputs.resize(steps + 1, ss.C.rows());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(ss.A.rows());
  auto rhs = [&](const Eigen::VectorXd& s) -> Eigen::VectorXd { return ss.A * s + b; };
  for (Eigen::Index k = 0; k <= steps; ++k) {
    r.time.push_back(static_cast<double>(k) * dt);
    r.outputs.row(k) = (ss.C * x + d).transpose();
    if (k == steps) break;
    const Eigen::VectorXd k1 = rhs(x);
    const Eigen::VectorXd k2 = rhs(x + 0.5 * dt * k1);
    const Eigen::VectorXd k3 = rhs(x + 0.5 * dt * k2);
    const Eigen::VectorXd k4 = rhs(x + dt * k3);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return r;
}

}  // namespace acdc::smallsignal
