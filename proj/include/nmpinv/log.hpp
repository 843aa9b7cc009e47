#pragma once

#include <spdlog/spdlog.h>

namespace nmpinv {

// Routes spdlog to stderr and takes the level from NMPINV_LOG
// (trace, debug, info, warn, error, off). Safe to call more than once.
void init_logging();

}  // namespace nmpinv
