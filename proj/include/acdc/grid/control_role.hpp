#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace acdc::grid {

// Control role an interconnecting converter can take. The numeric value is
// the base-3 digit used in CCRC ids.
enum class ControlRole : std::uint8_t {
  gfl = 0,     // follows the AC grid through a PLL, holds P/Q setpoints
  ac_gfm = 1,  // forms AC voltage and frequency (P-f droop)
  dc_gfm = 2,  // forms DC voltage (V_dc-P droop)
};

inline constexpr std::size_t kRoleCount = 3;
inline constexpr std::array<ControlRole, kRoleCount> kAllRoles = {
    ControlRole::gfl, ControlRole::ac_gfm, ControlRole::dc_gfm};

std::string_view role_name(ControlRole role) noexcept;
// Accepts "GFL", "AC-GFM", "DC-GFM" (also with underscores, any case).
ControlRole parse_role(std::string_view text);

}  // namespace acdc::grid
