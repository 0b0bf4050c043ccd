#include "acdc/grid/control_role.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "acdc/common/error.hpp"

namespace acdc::grid {

std::string_view role_name(ControlRole role) noexcept {
  switch (role) {
    case ControlRole::gfl: return "GFL";
    case ControlRole::ac_gfm: return "AC-GFM";
    case ControlRole::dc_gfm: return "DC-GFM";
  }
  return "?";
}

ControlRole parse_role(std::string_view text) {
  std::string norm(text);
  std::transform(norm.begin(), norm.end(), norm.begin(), [](unsigned char c) {
    return c == '_' ? '-' : static_cast<char>(std::toupper(c));
  });
  if (norm == "GFL") return ControlRole::gfl;
  if (norm == "AC-GFM") return ControlRole::ac_gfm;
  if (norm == "DC-GFM") return ControlRole::dc_gfm;
  throw InvalidInput("unknown control role '" + std::string(text) + "'");
}

}  // namespace acdc::grid
