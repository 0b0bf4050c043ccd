#include "acdc/powerflow/solver.hpp"

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>
#include <spdlog/spdlog.h>

#include "acdc/common/error.hpp"
#include "acdc/grid/feasibility.hpp"
#include "acdc/powerflow/dispatch.hpp"

namespace acdc::powerflow {

using grid::ControlRole;
using cd = std::complex<double>;

double converter_dc_injection(double p_ac, double q_ac, double v_ac, double v_dc, double r_arm) {
  const double i2 = (p_ac * p_ac + q_ac * q_ac) / (v_ac * v_ac);
  const double p_int = p_ac + 0.5 * r_arm * i2;
  if (r_arm <= 0.0) return -p_int;
  // r I^2 - v_dc I + p_int = 0, small root
  const double disc = std::max(v_dc * v_dc - 4.0 * r_arm * p_int, 0.0);
  const double i_sum = (v_dc - std::sqrt(disc)) / (2.0 * r_arm);
  return -v_dc * i_sum;
}

namespace {

double reactive_from_pf(double p, double cos_phi) {
  if (cos_phi >= 1.0) return 0.0;
  return p * std::sqrt(1.0 - cos_phi * cos_phi) / cos_phi;
}

// Fixed injections and network matrices shared by the residual evaluations.
struct Network {
  Eigen::MatrixXcd ybus;
  Eigen::MatrixXd gdc;
  std::vector<cd> fixed_injection;  // generators - loads, p.u.
  std::vector<double> schedule;     // p.u.
  std::vector<double> gen_p, gen_q, load_p, load_q;
  double scale = 1.0;  // continuation factor on every fixed injection and schedule

  Network(const grid::GridTopology& t, const grid::OperatingPoint& op) {
    const auto nac = static_cast<Eigen::Index>(t.ac_buses().size());
    const auto ndc = static_cast<Eigen::Index>(t.dc_buses().size());
    const double base = t.parameters().base_mva;
    ybus = Eigen::MatrixXcd::Zero(nac, nac);
    for (const auto& br : t.ac_branches()) {
      const cd y = 1.0 / cd(br.r, br.x);
      const auto i = static_cast<Eigen::Index>(br.from), j = static_cast<Eigen::Index>(br.to);
      ybus(i, i) += y;
      ybus(j, j) += y;
      ybus(i, j) -= y;
      ybus(j, i) -= y;
    }
    gdc = Eigen::MatrixXd::Zero(ndc, ndc);
    for (const auto& br : t.dc_branches()) {
      const double g = 1.0 / br.r;
      const auto i = static_cast<Eigen::Index>(br.from), j = static_cast<Eigen::Index>(br.to);
      gdc(i, i) += g;
      gdc(j, j) += g;
      gdc(i, j) -= g;
      gdc(j, i) -= g;
    }
    fixed_injection.assign(t.ac_buses().size(), cd{});
    for (std::size_t i = 0; i < t.generators().size(); ++i) {
      const double p = op.generators[i].p_mw / base;
      const double q = reactive_from_pf(p, op.generators[i].cos_phi);
      gen_p.push_back(p);
      gen_q.push_back(q);
      fixed_injection[t.generators()[i].bus] += cd(p, q);
    }
    for (std::size_t i = 0; i < t.loads().size(); ++i) {
      const double p = op.load_mw(i) / base;
      const double q = reactive_from_pf(p, t.loads()[i].power_factor);
      load_p.push_back(p);
      load_q.push_back(q);
      fixed_injection[t.loads()[i].bus] -= cd(p, q);
    }
    for (double s : dispatch_ipcs(t, op)) schedule.push_back(s / base);
  }
};

cd thevenin_injection(const grid::Thevenin& th, cd v) {
  return v * std::conj((cd(th.emf, 0.0) - v) / cd(th.r, th.x));
}

// Unknown layout for one (topology, CCRC) pair.
struct Layout {
  std::vector<int> theta, vmag, vdc, p_ipc, q_ipc;  // -1 = fixed
  std::vector<bool> slack_gfm;
  int size = 0;

  Layout(const grid::GridTopology& t, const grid::Ccrc& c) {
    const std::size_t nac = t.ac_buses().size();
    theta.assign(nac, 0);
    vmag.assign(nac, 0);
    p_ipc.assign(t.ipc_count(), -1);
    q_ipc.assign(t.ipc_count(), -1);
    slack_gfm.assign(t.ipc_count(), false);
    for (const auto& sg : t.ac_subgrids()) {
      bool have_ref = !sg.thevenins.empty();
      for (auto k : sg.ipcs) {
        if (c.role(k) != ControlRole::ac_gfm) continue;
        const auto bus = t.ipcs()[k].ac_bus;
        vmag[bus] = -1;
        q_ipc[k] = 0;
        if (!have_ref) {
          theta[bus] = -1;
          p_ipc[k] = 0;
          slack_gfm[k] = true;
          have_ref = true;
        }
      }
    }
    for (std::size_t k = 0; k < t.ipc_count(); ++k)
      if (c.role(k) == ControlRole::dc_gfm) p_ipc[k] = 0;
    vdc.assign(t.dc_buses().size(), 0);
    auto number = [&](std::vector<int>& v) {
      for (auto& x : v)
        if (x == 0) x = size++;
    };
    number(theta);
    number(vmag);
    number(vdc);
    number(p_ipc);
    number(q_ipc);
  }
};

struct State {
  std::vector<cd> v;
  std::vector<double> vdc, p, q, pdc;
};

class FlowEquations {
 public:
  FlowEquations(const grid::GridTopology& t, const grid::Ccrc& c, const Network& net)
      : t_(t), c_(c), net_(net), layout_(t, c) {}

  int size() const { return layout_.size; }
  const Layout& layout() const { return layout_; }

  Eigen::VectorXd initial_guess() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(layout_.size);
    for (int i : layout_.vmag)
      if (i >= 0) x(i) = 1.0;
    for (int i : layout_.vdc) x(i) = t_.parameters().v_dc0;
    for (std::size_t k = 0; k < t_.ipc_count(); ++k)
      if (layout_.p_ipc[k] >= 0) x(layout_.p_ipc[k]) = -net_.schedule[k];
    return x;
  }

  State unpack(const Eigen::VectorXd& x) const {
    State s;
    const std::size_t nac = t_.ac_buses().size();
    s.v.resize(nac);
    for (std::size_t i = 0; i < nac; ++i) {
      const double vm = layout_.vmag[i] >= 0 ? x(layout_.vmag[i]) : 1.0;
      const double th = layout_.theta[i] >= 0 ? x(layout_.theta[i]) : 0.0;
      s.v[i] = std::polar(vm, th);
    }
    for (int i : layout_.vdc) s.vdc.push_back(x(i));
    const double r_arm = t_.parameters().r_arm;
    for (std::size_t k = 0; k < t_.ipc_count(); ++k) {
      const double p = layout_.p_ipc[k] >= 0 ? x(layout_.p_ipc[k]) : -net_.scale * net_.schedule[k];
      const double q = layout_.q_ipc[k] >= 0 ? x(layout_.q_ipc[k]) : 0.0;
      s.p.push_back(p);
      s.q.push_back(q);
      const auto& ipc = t_.ipcs()[k];
      s.pdc.push_back(converter_dc_injection(p, q, std::abs(s.v[ipc.ac_bus]), s.vdc[ipc.dc_bus], r_arm));
    }
    return s;
  }

  Eigen::VectorXd residual(const State& s) const {
    const std::size_t nac = t_.ac_buses().size(), ndc = t_.dc_buses().size();
    std::vector<cd> inj = net_.fixed_injection;
    for (auto& z : inj) z *= net_.scale;
    for (const auto& th : t_.thevenins()) inj[th.bus] += thevenin_injection(th, s.v[th.bus]);
    std::vector<double> dc_inj(ndc, 0.0);
    for (std::size_t k = 0; k < t_.ipc_count(); ++k) {
      inj[t_.ipcs()[k].ac_bus] += cd(s.p[k], s.q[k]);
      dc_inj[t_.ipcs()[k].dc_bus] += s.pdc[k];
    }
    Eigen::VectorXcd v(static_cast<Eigen::Index>(nac));
    for (std::size_t i = 0; i < nac; ++i) v(static_cast<Eigen::Index>(i)) = s.v[i];
    const Eigen::VectorXcd i_net = net_.ybus * v;
    Eigen::VectorXd vd(static_cast<Eigen::Index>(ndc));
    for (std::size_t i = 0; i < ndc; ++i) vd(static_cast<Eigen::Index>(i)) = s.vdc[i];
    const Eigen::VectorXd id_net = net_.gdc * vd;

    Eigen::VectorXd f(layout_.size);
    int row = 0;
    for (std::size_t i = 0; i < nac; ++i) {
      const cd mis = inj[i] - s.v[i] * std::conj(i_net(static_cast<Eigen::Index>(i)));
      f(row++) = mis.real();
      f(row++) = mis.imag();
    }
    for (std::size_t i = 0; i < ndc; ++i) f(row++) = dc_inj[i] - s.vdc[i] * id_net(static_cast<Eigen::Index>(i));
    const auto& par = t_.parameters();
    for (std::size_t k = 0; k < t_.ipc_count(); ++k)
      if (c_.role(k) == ControlRole::dc_gfm)
        f(row++) = s.vdc[t_.ipcs()[k].dc_bus] - (par.v_dc0 - par.dc_droop * (s.pdc[k] - net_.scale * net_.schedule[k]));
    if (row != layout_.size) throw NumericError("power-flow equation count does not match unknowns");
    return f;
  }

  Eigen::VectorXd residual(const Eigen::VectorXd& x) const { return residual(unpack(x)); }

 private:
  const grid::GridTopology& t_;
  const grid::Ccrc& c_;
  const Network& net_;
  Layout layout_;
};

Eigen::MatrixXd fd_jacobian(const FlowEquations& eq, const Eigen::VectorXd& x) {
  const int n = eq.size();
  Eigen::MatrixXd J(n, n);
  Eigen::VectorXd xp = x;
  for (int j = 0; j < n; ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(x(j)));
    xp(j) = x(j) + h;
    const Eigen::VectorXd fp = eq.residual(xp);
    xp(j) = x(j) - h;
    const Eigen::VectorXd fm = eq.residual(xp);
    xp(j) = x(j);
    J.col(j) = (fp - fm) / (2.0 * h);
  }
  return J;
}

constexpr int kContinuationStages = 8;

struct NewtonResult {
  bool converged = false;
  double residual = 0.0;
  int iterations = 0;
};

// Damped Newton from x (updated in place).
NewtonResult newton(const FlowEquations& eq, Eigen::VectorXd& x, const SolverOptions& options) {
  Eigen::VectorXd f = eq.residual(x);
  NewtonResult r;
  r.residual = f.lpNorm<Eigen::Infinity>();
  while (!(r.residual < options.tolerance)) {
    if (r.iterations >= options.max_iterations || !std::isfinite(r.residual)) return r;
    const Eigen::MatrixXd J = fd_jacobian(eq, x);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
    const Eigen::VectorXd dx = lu.solve(-f);
    double alpha = 1.0;
    Eigen::VectorXd xn = x + dx;
    Eigen::VectorXd fn = eq.residual(xn);
    for (int h = 0; h < options.max_halvings && !(fn.lpNorm<Eigen::Infinity>() < r.residual); ++h) {
      alpha *= 0.5;
      xn = x + alpha * dx;
      fn = eq.residual(xn);
    }
    x = xn;
    f = fn;
    r.residual = f.lpNorm<Eigen::Infinity>();
    ++r.iterations;
  }
  r.converged = true;
  return r;
}

PowerFlowSolution package(const grid::GridTopology& t, const grid::Ccrc& c, const Network& net, const State& s) {
  const double base = t.parameters().base_mva;
  PowerFlowSolution pf;
  pf.ccrc = c;
  pf.base_mva = base;
  for (const auto& v : s.v) {
    pf.v_ac.push_back(std::abs(v));
    pf.theta_ac.push_back(std::arg(v));
  }
  pf.v_dc = s.vdc;
  for (std::size_t i = 0; i < net.gen_p.size(); ++i) pf.generators.push_back({net.gen_p[i] * base, net.gen_q[i] * base});
  for (std::size_t i = 0; i < net.load_p.size(); ++i) pf.loads.push_back({net.load_p[i] * base, net.load_q[i] * base});
  for (const auto& th : t.thevenins()) {
    const cd sth = thevenin_injection(th, s.v[th.bus]);
    pf.thevenins.push_back({sth.real() * base, sth.imag() * base});
  }
  for (std::size_t k = 0; k < t.ipc_count(); ++k)
    pf.ipcs.push_back({s.p[k] * base, s.q[k] * base, s.pdc[k] * base, net.schedule[k] * base});
  return pf;
}

}  // namespace

PowerFlowSolution solve_power_flow(const grid::GridTopology& topology, const grid::OperatingPoint& op,
                                   const grid::Ccrc& ccrc, const SolverOptions& options) {
  if (!grid::is_feasible(topology, ccrc))
    throw InvalidInput("CCRC " + std::to_string(ccrc.id()) + " is not feasible for this topology");
  grid::validate_operating_point(topology.ranges(), op);
  Network net(topology, op);
  const FlowEquations eq(topology, ccrc, net);

  Eigen::VectorXd x = eq.initial_guess();
  NewtonResult res = newton(eq, x, options);
  if (!res.converged) {
    // Flat start failed: walk the injections up from no load, warm-starting
    // each stage from the previous one.
    x = eq.initial_guess();
    int total = 0;
    for (int stage = 1; stage <= kContinuationStages; ++stage) {
      net.scale = static_cast<double>(stage) / kContinuationStages;
      res = newton(eq, x, options);
      total += res.iterations;
      if (!res.converged) break;
    }
    res.iterations = total;
    if (!res.converged)
      throw DivergedFlow("power flow did not converge for CCRC " + std::to_string(ccrc.id()) +
                             " (residual " + std::to_string(res.residual) + ")",
                         res.residual, res.iterations);
  }
  const double norm = res.residual;
  const int it = res.iterations;
  for (int i : eq.layout().vmag)
    if (i >= 0 && x(i) <= 0.0) throw DivergedFlow("power flow reached a non-physical voltage", norm, it);
  for (int i : eq.layout().vdc)
    if (x(i) <= 0.0) throw DivergedFlow("power flow reached a non-physical DC voltage", norm, it);

  auto pf = package(topology, ccrc, net, eq.unpack(x));
  pf.iterations = it;
  pf.max_mismatch = norm;
  spdlog::debug("power flow CCRC {} converged in {} iterations, mismatch {:.3e}", ccrc.id(), it, norm);
  return pf;
}

double max_mismatch(const grid::GridTopology& topology, const grid::OperatingPoint& op,
                    const PowerFlowSolution& pf) {
  const Network net(topology, op);
  const FlowEquations eq(topology, pf.ccrc, net);
  State s;
  for (std::size_t i = 0; i < pf.v_ac.size(); ++i) s.v.push_back(std::polar(pf.v_ac[i], pf.theta_ac[i]));
  s.vdc = pf.v_dc;
  for (const auto& f : pf.ipcs) {
    s.p.push_back(pf.to_pu(f.p_ac_mw));
    s.q.push_back(pf.to_pu(f.q_ac_mvar));
    s.pdc.push_back(pf.to_pu(f.p_dc_mw));
  }
  return eq.residual(s).lpNorm<Eigen::Infinity>();
}

LossReport compute_losses(const grid::GridTopology& topology, const PowerFlowSolution& pf) {
  LossReport r;
  const double base = pf.base_mva;
  for (const auto& br : topology.ac_branches()) {
    const cd vi = std::polar(pf.v_ac[br.from], pf.theta_ac[br.from]);
    const cd vj = std::polar(pf.v_ac[br.to], pf.theta_ac[br.to]);
    const double i = std::abs((vi - vj) / cd(br.r, br.x));
    r.ac_lines_mw += br.r * i * i * base;
  }
  for (const auto& br : topology.dc_branches()) {
    const double i = (pf.v_dc[br.from] - pf.v_dc[br.to]) / br.r;
    r.dc_lines_mw += br.r * i * i * base;
  }
  for (const auto& f : pf.ipcs) r.converters_mw += -(f.p_ac_mw + f.p_dc_mw);
  return r;
}

}  // namespace acdc::powerflow
