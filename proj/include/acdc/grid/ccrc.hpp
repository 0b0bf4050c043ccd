#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "acdc/grid/control_role.hpp"

namespace acdc::grid {

using CcrcId = std::uint32_t;

// Converter control-role configuration: one role per IPC in topology order.
// The id is the base-3 number whose most significant digit is the first IPC.
class Ccrc {
 public:
  Ccrc() = default;
  explicit Ccrc(std::vector<ControlRole> roles);

  static Ccrc from_id(CcrcId id, std::size_t ipc_count);

  CcrcId id() const noexcept { return id_; }
  std::size_t size() const noexcept { return roles_.size(); }
  ControlRole role(std::size_t ipc) const { return roles_.at(ipc); }
  std::span<const ControlRole> roles() const noexcept { return roles_; }

  Ccrc with_role(std::size_t ipc, ControlRole role) const;

  // e.g. "GFL|AC-GFM|DC-GFM"
  std::string label() const;

  friend bool operator==(const Ccrc& a, const Ccrc& b) noexcept { return a.roles_ == b.roles_; }

 private:
  std::vector<ControlRole> roles_;
  CcrcId id_ = 0;
};

// Number of simultaneous role switches between two configurations.
int ccr_distance(const Ccrc& a, const Ccrc& b);

std::uint64_t ccrc_count(std::size_t ipc_count);

}  // namespace acdc::grid
