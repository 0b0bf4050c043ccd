#include "acdc/grid/ccrc.hpp"

#include <limits>

#include "acdc/common/error.hpp"

namespace acdc::grid {

std::uint64_t ccrc_count(std::size_t ipc_count) {
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < ipc_count; ++i) {
    if (n > std::numeric_limits<CcrcId>::max() / kRoleCount)
      throw InvalidInput("too many IPCs for a 32-bit CCRC id");
    n *= kRoleCount;
  }
  return n;
}

Ccrc::Ccrc(std::vector<ControlRole> roles) : roles_(std::move(roles)) {
  if (roles_.empty()) throw InvalidInput("a CCRC needs at least one IPC role");
  ccrc_count(roles_.size());  // range check
  CcrcId id = 0;
  for (ControlRole r : roles_) {
    if (static_cast<std::size_t>(r) >= kRoleCount) throw InvalidInput("invalid control role value");
    id = id * kRoleCount + static_cast<CcrcId>(r);
  }
  id_ = id;
}

Ccrc Ccrc::from_id(CcrcId id, std::size_t ipc_count) {
  const std::uint64_t total = ccrc_count(ipc_count);
  if (ipc_count == 0) throw InvalidInput("a CCRC needs at least one IPC role");
  if (id >= total)
    throw InvalidInput("CCRC id " + std::to_string(id) + " out of range for " +
                       std::to_string(ipc_count) + " IPCs");
  std::vector<ControlRole> roles(ipc_count);
  for (std::size_t i = ipc_count; i-- > 0;) {
    roles[i] = static_cast<ControlRole>(id % kRoleCount);
    id /= kRoleCount;
  }
  return Ccrc(std::move(roles));
}

Ccrc Ccrc::with_role(std::size_t ipc, ControlRole role) const {
  if (ipc >= roles_.size()) throw InvalidInput("IPC index out of range");
  auto roles = roles_;
  roles[ipc] = role;
  return Ccrc(std::move(roles));
}

std::string Ccrc::label() const {
  std::string out;
  for (std::size_t i = 0; i < roles_.size(); ++i) {
    if (i) out += '|';
    out += role_name(roles_[i]);
  }
  return out;
}

int ccr_distance(const Ccrc& a, const Ccrc& b) {
  if (a.size() != b.size())
    throw InvalidInput("CCRC length mismatch: " + std::to_string(a.size()) + " vs " +
                       std::to_string(b.size()));
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a.role(i) != b.role(i);
  return d;
}

}  // namespace acdc::grid
