#include "acdc/dataforge/exact.hpp"

#include "acdc/common/error.hpp"
#include "acdc/powerflow/features.hpp"
#include "acdc/powerflow/internals.hpp"
#include "acdc/powerflow/solver.hpp"
#include "acdc/smallsignal/stability.hpp"
#include "acdc/smallsignal/state_space.hpp"

namespace acdc::dataforge {

ExactEvaluation evaluate_exact(const grid::GridTopology& topology, const grid::OperatingPoint& op,
                               const grid::Ccrc& ccrc) {
  ExactEvaluation r;
  try {
    const auto pf = powerflow::solve_power_flow(topology, op, ccrc);
    const auto internals = powerflow::compute_ipc_internals(topology, pf);
    r.features = powerflow::extract_feature_vector(topology, pf, internals).values;
    r.indicators = smallsignal::indicators(smallsignal::assemble_state_space(topology, ccrc, pf));
  } catch (const InvalidInput&) {
    throw;
  } catch (const NumericError& e) {
    r = ExactEvaluation{};
    r.diverged = true;
    r.failure = std::string(e.kind()) + ": " + e.what();
  }
  return r;
}

std::optional<bool> exact_label(const grid::GridTopology& topology, const grid::OperatingPoint& op,
                                const grid::Ccrc& ccrc) {
  try {
    const auto pf = powerflow::solve_power_flow(topology, op, ccrc);
    return smallsignal::assess_stability(smallsignal::assemble_state_space(topology, ccrc, pf)).stable;
  } catch (const InvalidInput&) {
    throw;
  } catch (const NumericError&) {
    return std::nullopt;
  }
}

}  // namespace acdc::dataforge
