#include "dynamic_model.hpp"

#include <cmath>

#include "acdc/common/error.hpp"
#include "acdc/powerflow/solver.hpp"

namespace acdc::smallsignal::detail {

using grid::ControlRole;

DynamicModel::DynamicModel(const grid::GridTopology& t, const grid::Ccrc& ccrc,
                           const powerflow::PowerFlowSolution& pf)
    : topology_(t), nac_(t.ac_buses().size()), ndc_(t.dc_buses().size()) {
  if (ccrc.size() != t.ipc_count()) throw InvalidInput("CCRC length does not match topology");
  if (pf.v_ac.size() != nac_ || pf.v_dc.size() != ndc_ || pf.ipcs.size() != t.ipc_count() ||
      pf.generators.size() != t.generators().size() || pf.loads.size() != t.loads().size() ||
      pf.thevenins.size() != t.thevenins().size())
    throw InvalidInput("power-flow solution does not match topology");
  if (!(pf.ccrc == ccrc)) throw InvalidInput("power-flow solution was computed for a different CCRC");

  const auto& par = t.parameters();
  const double base = pf.base_mva;
  const cd z_conv(0.5 * par.r_arm, 0.5 * par.l_arm);
  const cd z_gen(par.generator_r, par.generator_x);
  const std::size_t nsub = t.ac_subgrids().size();

  ybus_ = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(nac_), static_cast<Eigen::Index>(nac_));
  for (const auto& br : t.ac_branches()) {
    const cd y = 1.0 / cd(br.r, br.x);
    const auto i = static_cast<Eigen::Index>(br.from), j = static_cast<Eigen::Index>(br.to);
    ybus_(i, i) += y;
    ybus_(j, j) += y;
    ybus_(i, j) -= y;
    ybus_(j, i) -= y;
  }

  auto ipc_s = [&](std::size_t k) { return cd(pf.ipcs[k].p_ac_mw, pf.ipcs[k].q_ac_mvar) / base; };
  auto pf_voltage = [&](std::size_t bus) { return std::polar(pf.v_ac[bus], pf.theta_ac[bus]); };

  // Frame of each subgrid: Thevenin EMF, else the EMF of its first AC-GFM IPC.
  thevenin_of_subgrid_.assign(nsub, -1);
  reference_of_subgrid_.assign(nsub, -1);
  forming_of_subgrid_.assign(nsub, {});
  std::vector<double> rotation(nsub, 0.0);
  for (std::size_t g = 0; g < nsub; ++g) {
    const auto& sg = t.ac_subgrids()[g];
    if (!sg.thevenins.empty()) continue;
    bool found = false;
    for (auto k : sg.ipcs)
      if (ccrc.role(k) == ControlRole::ac_gfm) {
        const std::size_t bus = t.ipcs()[k].ac_bus;
        const cd v = pf_voltage(bus);
        const cd e = v + z_conv * std::conj(ipc_s(k) / v);
        rotation[g] = -std::arg(e);
        found = true;
        break;
      }
    if (!found) throw AssemblyError("AC subgrid " + sg.id + " has no forming unit", sg.id);
  }
  auto frame_voltage = [&](std::size_t bus) {
    return std::polar(pf.v_ac[bus], pf.theta_ac[bus] + rotation[t.ac_buses()[bus].subgrid]);
  };

  // States: Thevenin governors, plants, IPC controller blocks, DC network.
  for (std::size_t h = 0; h < t.thevenins().size(); ++h) {
    const auto& th = t.thevenins()[h];
    TheveninUnit u;
    u.index = h;
    u.bus = th.bus;
    u.subgrid = t.ac_buses()[th.bus].subgrid;
    u.p0 = pf.thevenins[h].p_mw / base;
    u.s_omega = add_state("omega_" + th.id, 1.0);
    thevenin_of_subgrid_[u.subgrid] = static_cast<int>(thevenins_.size());
    thevenins_.push_back(u);
  }

  auto add_sync = [&](SyncUnit u, cd s, double pdc0) {
    const cd v = frame_voltage(u.bus);
    const cd i = std::conj(s / v);
    const cd e = v + u.z * i;
    const double theta = std::arg(v);
    const cd e_dq = e * std::polar(1.0, -theta);
    u.s_theta = add_state("theta_pll_" + u.name, theta);
    u.s_xi = add_state("xi_pll_" + u.name, 0.0);
    u.s_ed = add_state("ed_" + u.name, e_dq.real());
    u.s_eq = add_state("eq_" + u.name, e_dq.imag());
    if (u.ipc >= 0) u.s_pdc = add_state("pdc_" + u.name, pdc0);
    sync_.push_back(u);
  };

  for (std::size_t i = 0; i < t.generators().size(); ++i) {
    const auto& gen = t.generators()[i];
    SyncUnit u;
    u.name = gen.id;
    u.bus = gen.bus;
    u.subgrid = t.ac_buses()[gen.bus].subgrid;
    u.z = z_gen;
    u.s_set = cd(pf.generators[i].p_mw, pf.generators[i].q_mvar) / base;
    add_sync(u, u.s_set, 0.0);
  }

  for (std::size_t k = 0; k < t.ipc_count(); ++k) {
    const auto& ipc = t.ipcs()[k];
    const std::size_t g = t.ac_buses()[ipc.ac_bus].subgrid;
    const cd s = ipc_s(k);
    const double pdc0 = pf.ipcs[k].p_dc_mw / base;
    switch (ccrc.role(k)) {
      case ControlRole::gfl:
      case ControlRole::dc_gfm: {
        SyncUnit u;
        u.name = ipc.id;
        u.bus = ipc.ac_bus;
        u.subgrid = g;
        u.z = z_conv;
        u.s_set = s;
        u.ipc = static_cast<int>(k);
        u.dc_forming = ccrc.role(k) == ControlRole::dc_gfm;
        u.loss0 = -(s.real() + pdc0);
        u.p_star = pf.ipcs[k].schedule_mw / base;
        add_sync(u, s, pdc0);
        break;
      }
      case ControlRole::ac_gfm: {
        FormingUnit u;
        u.name = ipc.id;
        u.bus = ipc.ac_bus;
        u.subgrid = g;
        u.ipc = static_cast<int>(k);
        u.z = z_conv;
        const cd v = frame_voltage(ipc.ac_bus);
        const cd e = v + u.z * std::conj(s / v);
        u.p_star = s.real();
        u.e0 = std::abs(e);
        u.v_ref = std::abs(v);
        u.reference = thevenin_of_subgrid_[g] < 0 && reference_of_subgrid_[g] < 0;
        if (u.reference)
          reference_of_subgrid_[g] = static_cast<int>(forming_.size());
        else
          u.s_delta = add_state("delta_" + u.name, std::arg(e));
        u.s_pf = add_state("pf_" + u.name, s.real());
        u.s_e = add_state("e_" + u.name, std::abs(e));
        u.s_pdc = add_state("pdc_" + u.name, pdc0);
        forming_of_subgrid_[g].push_back(static_cast<int>(forming_.size()));
        forming_.push_back(u);
        break;
      }
    }
  }

  for (std::size_t b = 0; b < ndc_; ++b) s_vdc_.push_back(add_state("vdc_" + t.dc_buses()[b].id, pf.v_dc[b]));
  for (const auto& br : t.dc_branches()) {
    if (!(br.l > 0.0)) throw InvalidInput("DC branch inductance must be positive for dynamic studies");
    s_idc_.push_back(add_state("idc_" + t.dc_buses()[br.from].id + "_" + t.dc_buses()[br.to].id,
                               (pf.v_dc[br.from] - pf.v_dc[br.to]) / br.r));
  }

  for (std::size_t i = 0; i < nac_; ++i) {
    input_names_.push_back("dP_" + t.ac_buses()[i].id);
    input_names_.push_back("dQ_" + t.ac_buses()[i].id);
  }
  for (std::size_t b = 0; b < ndc_; ++b) input_names_.push_back("dP_" + t.dc_buses()[b].id);
  for (const auto& sg : t.ac_subgrids()) output_names_.push_back("f_" + sg.id);
  for (const auto& b : t.dc_buses()) output_names_.push_back("Vdc_" + b.id);

  for (const auto& l : pf.loads) load_s_.push_back(cd(l.p_mw, l.q_mvar) / base);

  x0_ = Eigen::Map<const Eigen::VectorXd>(x_init_.data(), static_cast<Eigen::Index>(x_init_.size()));
  z0_.resize(n_algebraic());
  for (std::size_t i = 0; i < nac_; ++i) {
    const cd v = frame_voltage(i);
    z0_(2 * static_cast<Eigen::Index>(i)) = v.real();
    z0_(2 * static_cast<Eigen::Index>(i) + 1) = v.imag();
  }
}

int DynamicModel::add_state(const std::string& name, double value) {
  state_names_.push_back(name);
  x_init_.push_back(value);
  return static_cast<int>(state_names_.size() - 1);
}

double DynamicModel::frame_frequency(std::size_t subgrid, const Eigen::VectorXd& x) const {
  const int th = thevenin_of_subgrid_[subgrid];
  if (th >= 0) return x(thevenins_[static_cast<std::size_t>(th)].s_omega);
  const auto& ref = forming_[static_cast<std::size_t>(reference_of_subgrid_[subgrid])];
  return 1.0 - topology_.parameters().gfm_freq_droop * (x(ref.s_pf) - ref.p_star);
}

std::vector<Eigen::Index> DynamicModel::algebraic_block(std::size_t subgrid) const {
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < nac_; ++i)
    if (topology_.ac_buses()[i].subgrid == subgrid) {
      idx.push_back(2 * static_cast<Eigen::Index>(i));
      idx.push_back(2 * static_cast<Eigen::Index>(i) + 1);
    }
  return idx;
}

void DynamicModel::eval(const Eigen::VectorXd& x, const Eigen::VectorXd& z, const Eigen::VectorXd& u,
                        Eigen::VectorXd& f, Eigen::VectorXd& g) const {
  const auto& par = topology_.parameters();
  const double wb = par.omega_base();
  const double kp = 2.0 * par.pll_zeta * par.pll_wn / wb;
  const double ki = par.pll_wn * par.pll_wn / wb;
  f.setZero(n_states());
  g.setZero(n_algebraic());

  std::vector<cd> v(nac_), inj(nac_, cd{});
  for (std::size_t i = 0; i < nac_; ++i)
    v[i] = cd(z(2 * static_cast<Eigen::Index>(i)), z(2 * static_cast<Eigen::Index>(i) + 1));
  const std::size_t nsub = topology_.ac_subgrids().size();
  std::vector<double> w_frame(nsub);
  for (std::size_t s = 0; s < nsub; ++s) w_frame[s] = frame_frequency(s, x);

  for (const auto& th : thevenins_) {
    const auto& p = topology_.thevenins()[th.index];
    const cd i = (cd(p.emf, 0.0) - v[th.bus]) / cd(p.r, p.x);
    inj[th.bus] += i;
    const double pth = (v[th.bus] * std::conj(i)).real();
    f(th.s_omega) = (-(x(th.s_omega) - 1.0) - par.thevenin_droop * (pth - th.p0)) / par.thevenin_governor_tau;
  }
  for (std::size_t l = 0; l < load_s_.size(); ++l) {
    const std::size_t bus = topology_.loads()[l].bus;
    inj[bus] -= std::conj(load_s_[l] / v[bus]);
  }
  for (std::size_t i = 0; i < nac_; ++i) {
    const cd ds(u(2 * static_cast<Eigen::Index>(i)), u(2 * static_cast<Eigen::Index>(i) + 1));
    inj[i] += std::conj(ds / v[i]);
  }

  auto vdc_of = [&](int ipc) {
    return x(s_vdc_[topology_.ipcs()[static_cast<std::size_t>(ipc)].dc_bus]);
  };

  for (const auto& su : sync_) {
    const cd rot = std::polar(1.0, x(su.s_theta));
    const cd e = cd(x(su.s_ed), x(su.s_eq)) * rot;
    const cd vb = v[su.bus];
    const cd i = (e - vb) / su.z;
    inj[su.bus] += i;
    const cd v_dq = vb * std::conj(rot);
    const double vq = v_dq.imag();
    f(su.s_theta) = wb * (kp * vq + x(su.s_xi) + 1.0 - w_frame[su.subgrid]);
    f(su.s_xi) = ki * vq;
    const cd s_ref = su.dc_forming ? cd(-x(su.s_pdc) - su.loss0, su.s_set.imag()) : su.s_set;
    const cd i_ref = std::conj(s_ref / v_dq);
    const cd de = su.z * (i_ref - i * std::conj(rot)) / par.current_tau;
    f(su.s_ed) = de.real();
    f(su.s_eq) = de.imag();
    if (su.ipc >= 0) {
      const double vdc = vdc_of(su.ipc);
      if (su.dc_forming) {
        f(su.s_pdc) = (su.p_star + (par.v_dc0 - vdc) / par.dc_droop - x(su.s_pdc)) / par.dc_power_tau;
      } else {
        const cd s = vb * std::conj(i);
        const double target = powerflow::converter_dc_injection(s.real(), s.imag(), std::abs(vb), vdc, par.r_arm);
        f(su.s_pdc) = (target - x(su.s_pdc)) / par.dc_energy_tau;
      }
    }
  }

  for (const auto& fu : forming_) {
    const double delta = fu.reference ? 0.0 : x(fu.s_delta);
    const cd e = std::polar(x(fu.s_e), delta);
    const cd vb = v[fu.bus];
    const cd i = (e - vb) / fu.z;
    inj[fu.bus] += i;
    const cd s = vb * std::conj(i);
    const double w = 1.0 - par.gfm_freq_droop * (x(fu.s_pf) - fu.p_star);
    if (!fu.reference) f(fu.s_delta) = wb * (w - w_frame[fu.subgrid]);
    f(fu.s_pf) = (s.real() - x(fu.s_pf)) / par.gfm_filter_tau;
    f(fu.s_e) = (fu.e0 - x(fu.s_e) + par.gfm_voltage_gain * (fu.v_ref - std::abs(vb))) / par.gfm_voltage_tau;
    const double target =
        powerflow::converter_dc_injection(s.real(), s.imag(), std::abs(vb), vdc_of(fu.ipc), par.r_arm);
    f(fu.s_pdc) = (target - x(fu.s_pdc)) / par.dc_energy_tau;
  }

  Eigen::VectorXcd vv(static_cast<Eigen::Index>(nac_));
  for (std::size_t i = 0; i < nac_; ++i) vv(static_cast<Eigen::Index>(i)) = v[i];
  const Eigen::VectorXcd inet = ybus_ * vv;
  for (std::size_t i = 0; i < nac_; ++i) {
    const cd mis = inj[i] - inet(static_cast<Eigen::Index>(i));
    g(2 * static_cast<Eigen::Index>(i)) = mis.real();
    g(2 * static_cast<Eigen::Index>(i) + 1) = mis.imag();
  }

  // DC network: capacitor voltages and RL branch currents.
  std::vector<double> idc(ndc_, 0.0);
  const Eigen::Index u_dc0 = 2 * static_cast<Eigen::Index>(nac_);
  for (std::size_t b = 0; b < ndc_; ++b) idc[b] = u(u_dc0 + static_cast<Eigen::Index>(b)) / x(s_vdc_[b]);
  for (const auto& su : sync_)
    if (su.ipc >= 0) {
      const auto b = topology_.ipcs()[static_cast<std::size_t>(su.ipc)].dc_bus;
      idc[b] += x(su.s_pdc) / x(s_vdc_[b]);
    }
  for (const auto& fu : forming_) {
    const auto b = topology_.ipcs()[static_cast<std::size_t>(fu.ipc)].dc_bus;
    idc[b] += x(fu.s_pdc) / x(s_vdc_[b]);
  }
  for (std::size_t l = 0; l < topology_.dc_branches().size(); ++l) {
    const auto& br = topology_.dc_branches()[l];
    const double il = x(s_idc_[l]);
    idc[br.from] -= il;
    idc[br.to] += il;
    f(s_idc_[l]) = (x(s_vdc_[br.from]) - x(s_vdc_[br.to]) - br.r * il) * wb / br.l;
  }
  for (std::size_t b = 0; b < ndc_; ++b)
    f(s_vdc_[b]) = idc[b] / (2.0 * topology_.dc_buses()[b].energy_constant_s);
}

Eigen::VectorXd DynamicModel::outputs(const Eigen::VectorXd& x) const {
  const auto& par = topology_.parameters();
  const std::size_t nsub = topology_.ac_subgrids().size();
  Eigen::VectorXd y(n_outputs());
  for (std::size_t s = 0; s < nsub; ++s) {
    const auto& units = forming_of_subgrid_[s];
    if (units.empty()) {
      y(static_cast<Eigen::Index>(s)) = frame_frequency(s, x);
      continue;
    }
    double w = 0.0;
    for (int k : units) {
      const auto& fu = forming_[static_cast<std::size_t>(k)];
      w += 1.0 - par.gfm_freq_droop * (x(fu.s_pf) - fu.p_star);
    }
    y(static_cast<Eigen::Index>(s)) = w / static_cast<double>(units.size());
  }
  for (std::size_t b = 0; b < ndc_; ++b) y(static_cast<Eigen::Index>(nsub + b)) = x(s_vdc_[b]);
  return y;
}

}  // namespace acdc::smallsignal::detail
