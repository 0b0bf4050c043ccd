#include "acdc/smallsignal/stability.hpp"

#include <algorithm>
#include <limits>

#include "acdc/common/error.hpp"

namespace acdc::smallsignal {

StabilityLabel label_from_eigenvalues(const Eigen::VectorXcd& eigenvalues) {
  StabilityLabel label;
  label.eigenvalues.assign(eigenvalues.data(), eigenvalues.data() + eigenvalues.size());
  std::stable_sort(label.eigenvalues.begin(), label.eigenvalues.end(),
                   [](const auto& a, const auto& b) { return a.real() > b.real(); });
  for (const auto& ev : label.eigenvalues)
    if (!std::isfinite(ev.real()) || !std::isfinite(ev.imag())) throw NumericError("non-finite eigenvalue");
  label.abscissa =
      label.eigenvalues.empty() ? -std::numeric_limits<double>::infinity() : label.eigenvalues.front().real();
  label.stable = label.abscissa < -kAbscissaTolerance;
  return label;
}

StabilityLabel assess_stability(const Eigen::MatrixXd& A) {
  if (!A.allFinite()) throw NumericError("state matrix has non-finite entries");
  return label_from_eigenvalues(SchurForm(A).eigenvalues());
}

StabilityLabel assess_stability(const StateSpaceModel& ss) { return assess_stability(ss.A); }

}  // namespace acdc::smallsignal
