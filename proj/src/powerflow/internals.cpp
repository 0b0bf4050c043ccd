#include "acdc/powerflow/internals.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "acdc/common/error.hpp"

namespace acdc::powerflow {

using cd = std::complex<double>;

double wrap_angle(double a) noexcept {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

namespace {

// Magnitude/angle of a real signed quantity: negative values sit at pi.
void signed_polar(double x, double& mag, double& ang) {
  mag = std::abs(x);
  ang = x < 0.0 ? std::numbers::pi : 0.0;
}

}  // namespace

std::vector<IpcInternals> compute_ipc_internals(const grid::GridTopology& topology, const PowerFlowSolution& pf) {
  const auto& par = topology.parameters();
  const cd z_eq(0.5 * par.r_arm, 0.5 * par.l_arm);
  std::vector<IpcInternals> out;
  out.reserve(topology.ipc_count());
  for (std::size_t k = 0; k < topology.ipc_count(); ++k) {
    const auto& ipc = topology.ipcs()[k];
    const auto& f = pf.ipcs.at(k);
    const double vm = pf.v_ac.at(ipc.ac_bus);
    if (!(vm > 0.0)) throw DegenerateCircuit("IPC " + ipc.id + " has zero AC terminal voltage");
    const double vdc = pf.v_dc.at(ipc.dc_bus);
    if (!(vdc > 0.0)) throw DegenerateCircuit("IPC " + ipc.id + " has zero DC terminal voltage");
    const cd v = std::polar(vm, pf.theta_ac.at(ipc.ac_bus));
    const cd s(pf.to_pu(f.p_ac_mw), pf.to_pu(f.q_ac_mvar));
    const cd i_diff = std::conj(s / v);
    const cd v_diff = v + z_eq * i_diff;
    const double i_sum = -pf.to_pu(f.p_dc_mw) / vdc;
    const double v_sum = vdc - par.r_arm * i_sum;

    IpcInternals q;
    q.v_ac = vm;
    q.theta_v_ac = wrap_angle(std::arg(v));
    q.v_diff = std::abs(v_diff);
    q.theta_v_diff = wrap_angle(std::arg(v_diff));
    q.i_diff = std::abs(i_diff);
    q.theta_i_diff = q.i_diff > 0.0 ? wrap_angle(std::arg(i_diff)) : 0.0;
    signed_polar(i_sum, q.i_sum, q.theta_i_sum);
    signed_polar(v_sum, q.v_sum, q.theta_v_sum);
    out.push_back(q);
  }
  return out;
}

}  // namespace acdc::powerflow
