#include "nmpinv/log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>

#include <cstdlib>
#include <mutex>

namespace nmpinv {

void init_logging()
{
    static std::once_flag once;
    std::call_once(once, [] {
        auto logger = spdlog::stderr_color_mt("nmpinv");
        spdlog::set_default_logger(logger);
        spdlog::set_level(spdlog::level::info);
        if (const char* env = std::getenv("NMPINV_LOG")) {
            spdlog::set_level(spdlog::level::from_str(env));
        }
    });
}

}  // namespace nmpinv
