#include "acdc/smallsignal/state_space.hpp"

#include <algorithm>
#include <cmath>

#include "acdc/common/error.hpp"
#include "dynamic_model.hpp"

namespace acdc::smallsignal {

std::string_view output_set_name(OutputSet set) noexcept {
  return set == OutputSet::frequency ? "frequency" : "dc_voltage";
}

namespace {

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

double fd_step(double v) { return 1e-6 * std::max(1.0, std::abs(v)); }

struct Jacobians {
  Eigen::MatrixXd fx, fz, fu, gx, gz, gu;
};

// Central differences of the DAE right-hand side around (x0, z0, 0).
Jacobians linearize(const detail::DynamicModel& m) {
  const Eigen::Index nx = m.n_states(), nz = m.n_algebraic(), nu = m.n_inputs();
  Jacobians j;
  j.fx.resize(nx, nx);
  j.gx.resize(nz, nx);
  j.fz.resize(nx, nz);
  j.gz.resize(nz, nz);
  j.fu.resize(nx, nu);
  j.gu.resize(nz, nu);
  Eigen::VectorXd x = m.x0(), z = m.z0(), u = Eigen::VectorXd::Zero(nu);
  Eigen::VectorXd fp, gp, fm, gm;

  auto column = [&](Eigen::VectorXd& var, Eigen::Index k, Eigen::MatrixXd& df, Eigen::MatrixXd& dg) {
    const double base = var(k), h = fd_step(base);
    var(k) = base + h;
    m.eval(x, z, u, fp, gp);
    var(k) = base - h;
    m.eval(x, z, u, fm, gm);
    var(k) = base;
    df.col(k) = (fp - fm) / (2.0 * h);
    dg.col(k) = (gp - gm) / (2.0 * h);
  };
  for (Eigen::Index k = 0; k < nx; ++k) column(x, k, j.fx, j.gx);
  for (Eigen::Index k = 0; k < nz; ++k) column(z, k, j.fz, j.gz);
  for (Eigen::Index k = 0; k < nu; ++k) column(u, k, j.fu, j.gu);
  return j;
}

}  // namespace

Eigen::MatrixXd StateSpaceModel::C_sel(OutputSet set) const {
  return select_rows(C, set == OutputSet::frequency ? frequency_outputs : dc_voltage_outputs);
}

Eigen::MatrixXd StateSpaceModel::D_sel(OutputSet set) const {
  return select_rows(D, set == OutputSet::frequency ? frequency_outputs : dc_voltage_outputs);
}

void StateSpaceModel::check_consistency() const {
  const Eigen::Index n = A.rows();
  if (A.cols() != n) throw InvalidInput("state matrix is not square");
  if (B.rows() != n || C.cols() != n) throw InvalidInput("B/C dimensions do not match A");
  if (D.rows() != C.rows() || D.cols() != B.cols()) throw InvalidInput("D dimensions do not match B/C");
  if (static_cast<Eigen::Index>(state_names.size()) != n ||
      static_cast<Eigen::Index>(input_names.size()) != B.cols() ||
      static_cast<Eigen::Index>(output_names.size()) != C.rows())
    throw InvalidInput("name registries do not match matrix dimensions");
  for (auto r : frequency_outputs)
    if (r < 0 || r >= C.rows()) throw InvalidInput("frequency output index out of range");
  for (auto r : dc_voltage_outputs)
    if (r < 0 || r >= C.rows()) throw InvalidInput("DC voltage output index out of range");
}

StateSpaceModel assemble_state_space(const grid::GridTopology& topology, const grid::Ccrc& ccrc,
                                     const powerflow::PowerFlowSolution& pf) {
  const detail::DynamicModel model(topology, ccrc, pf);
  const Jacobians j = linearize(model);
  const Eigen::Index nx = model.n_states(), nu = model.n_inputs();

  // The network only couples buses of one subgrid, so g_z is block diagonal.
  Eigen::MatrixXd gz_inv_gx = Eigen::MatrixXd::Zero(j.gz.rows(), nx);
  Eigen::MatrixXd gz_inv_gu = Eigen::MatrixXd::Zero(j.gz.rows(), nu);
  for (std::size_t s = 0; s < topology.ac_subgrids().size(); ++s) {
    const auto idx = model.algebraic_block(s);
    const auto nb = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd blk(nb, nb), rx(nb, nx), ru(nb, nu);
    for (Eigen::Index a = 0; a < nb; ++a) {
      rx.row(a) = j.gx.row(idx[static_cast<std::size_t>(a)]);
      ru.row(a) = j.gu.row(idx[static_cast<std::size_t>(a)]);
      for (Eigen::Index b = 0; b < nb; ++b)
        blk(a, b) = j.gz(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(blk);
    lu.setThreshold(1e-12);
    const double rcond = lu.rcond();
    if (!lu.isInvertible() || !(rcond > 1e-14) || !std::isfinite(rcond))
      throw AssemblyError("singular network Jacobian in AC subgrid " + topology.ac_subgrids()[s].id,
                          topology.ac_subgrids()[s].id);
    const Eigen::MatrixXd sx = lu.solve(rx), su = lu.solve(ru);
    for (Eigen::Index a = 0; a < nb; ++a) {
      gz_inv_gx.row(idx[static_cast<std::size_t>(a)]) = sx.row(a);
      gz_inv_gu.row(idx[static_cast<std::size_t>(a)]) = su.row(a);
    }
  }

  StateSpaceModel ss;
  ss.A = j.fx - j.fz * gz_inv_gx;
  ss.B = j.fu - j.fz * gz_inv_gu;
  if (!ss.A.allFinite() || !ss.B.allFinite()) throw NumericError("non-finite entries in linearized model");

  const Eigen::Index ny = model.n_outputs();
  ss.C.resize(ny, nx);
  Eigen::VectorXd x = model.x0();
  for (Eigen::Index k = 0; k < nx; ++k) {
    const double base = x(k), h = fd_step(base);
    x(k) = base + h;
    const Eigen::VectorXd yp = model.outputs(x);
    x(k) = base - h;
    const Eigen::VectorXd ym = model.outputs(x);
    x(k) = base;
    ss.C.col(k) = (yp - ym) / (2.0 * h);
  }
  ss.D = Eigen::MatrixXd::Zero(ny, nu);
  ss.state_names = model.state_names();
  ss.input_names = model.input_names();
  ss.output_names = model.output_names();
  const auto nf = static_cast<Eigen::Index>(model.n_frequency_outputs());
  for (Eigen::Index r = 0; r < ny; ++r) (r < nf ? ss.frequency_outputs : ss.dc_voltage_outputs).push_back(r);
  ss.check_consistency();
  return ss;
}

EquilibriumResidual equilibrium_residual(const grid::GridTopology& topology, const grid::Ccrc& ccrc,
                                         const powerflow::PowerFlowSolution& pf) {
  const detail::DynamicModel model(topology, ccrc, pf);
  Eigen::VectorXd f, g;
  model.eval(model.x0(), model.z0(), Eigen::VectorXd::Zero(model.n_inputs()), f, g);
  return {f.size() ? f.cwiseAbs().maxCoeff() : 0.0, g.size() ? g.cwiseAbs().maxCoeff() : 0.0};
}

StateSpaceModel make_state_space(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C, Eigen::MatrixXd D,
                                 Eigen::Index n_frequency) {
  StateSpaceModel ss;
  ss.A = std::move(A);
  ss.B = std::move(B);
  ss.C = std::move(C);
  ss.D = std::move(D);
  for (Eigen::Index i = 0; i < ss.A.rows(); ++i) ss.state_names.push_back("x" + std::to_string(i));
  for (Eigen::Index i = 0; i < ss.B.cols(); ++i) ss.input_names.push_back("u" + std::to_string(i));
  for (Eigen::Index i = 0; i < ss.C.rows(); ++i) ss.output_names.push_back("y" + std::to_string(i));
  if (n_frequency < 0 || n_frequency > ss.C.rows()) throw InvalidInput("frequency output count out of range");
  for (Eigen::Index r = 0; r < ss.C.rows(); ++r)
    (r < n_frequency ? ss.frequency_outputs : ss.dc_voltage_outputs).push_back(r);
  ss.check_consistency();
  return ss;
}

}  // namespace acdc::smallsignal
