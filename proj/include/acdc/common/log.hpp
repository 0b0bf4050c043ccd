#pragma once

#include <spdlog/spdlog.h>

namespace acdc {

// Reads CCRC_SCHED_LOG (error|warn|info|debug) and configures the default
// logger to write to stderr. Unset or unknown values leave the level at warn.
void init_logging_from_env();

}  // namespace acdc
