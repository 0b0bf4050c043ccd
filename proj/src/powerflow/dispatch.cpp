#include "acdc/powerflow/dispatch.hpp"

#include <algorithm>

#include <Eigen/Dense>

#include "acdc/common/error.hpp"

namespace acdc::powerflow {

namespace {

constexpr double kRatingWeight = 1e-3;

}  // namespace

std::vector<double> dispatch_ipcs(const grid::GridTopology& topology, const grid::OperatingPoint& op) {
  const std::size_t n = topology.ipc_count();
  if (!op.ipc_schedule_mw.empty()) {
    if (op.ipc_schedule_mw.size() != n) throw InvalidInput("IPC schedule length does not match IPC count");
    return op.ipc_schedule_mw;
  }
  if (op.generators.size() != topology.generators().size() || op.load_shares.size() != topology.loads().size())
    throw InvalidInput("operating point does not match topology");

  const auto& acs = topology.ac_subgrids();
  const auto& dcs = topology.dc_subgrids();
  std::vector<double> surplus(acs.size(), 0.0);  // MW
  for (std::size_t g = 0; g < acs.size(); ++g) {
    for (auto i : acs[g].generators) surplus[g] += op.generators[i].p_mw;
    for (auto i : acs[g].loads) surplus[g] -= op.load_mw(i);
  }

  // Least squares on the Thevenin imports (import_g = -surplus_g + sum t_k)
  // subject to islanded-subgrid and DC balance, solved through its KKT system.
  std::vector<std::size_t> backed, islanded;
  for (std::size_t g = 0; g < acs.size(); ++g) (acs[g].thevenins.empty() ? islanded : backed).push_back(g);

  using Eigen::Index;
  const auto nn = static_cast<Index>(n);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Index>(backed.size()), nn);
  Eigen::VectorXd b(static_cast<Index>(backed.size()));
  for (std::size_t r = 0; r < backed.size(); ++r) {
    for (auto k : acs[backed[r]].ipcs) M(static_cast<Index>(r), static_cast<Index>(k)) = 1.0;
    b(static_cast<Index>(r)) = surplus[backed[r]];
  }
  const auto m = static_cast<Index>(islanded.size() + dcs.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, nn);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(m);
  Index row = 0;
  for (auto g : islanded) {
    for (auto k : acs[g].ipcs) A(row, static_cast<Index>(k)) = 1.0;
    c(row++) = surplus[g];
  }
  for (const auto& d : dcs) {
    for (auto k : d.ipcs) A(row, static_cast<Index>(k)) = 1.0;
    ++row;
  }

  const double base = topology.parameters().base_mva;
  Eigen::MatrixXd H = M.transpose() * M;
  for (std::size_t k = 0; k < n; ++k)
    H(static_cast<Index>(k), static_cast<Index>(k)) += kRatingWeight * base / topology.ipcs()[k].rating_mw;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nn + m, nn + m);
  K.topLeftCorner(nn, nn) = H;
  K.topRightCorner(nn, m) = A.transpose();
  K.bottomLeftCorner(m, nn) = A;
  Eigen::VectorXd rhs(nn + m);
  rhs.head(nn) = M.transpose() * b;
  rhs.tail(m) = c;
  const Eigen::VectorXd sol = K.completeOrthogonalDecomposition().solve(rhs);

  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double r = topology.ipcs()[k].rating_mw;
    out[k] = std::clamp(sol(static_cast<Index>(k)), -r, r);
  }
  return out;
}

}  // namespace acdc::powerflow
