#include "nmpinv/random.hpp"

#include <cmath>
#include <numbers>

namespace nmpinv {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r  = std::sqrt(-2.0 * std::log(u1));
    spare_          = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_      = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::index(std::size_t n)
{
    // rejection sampling keeps the draw unbiased
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % n);
}

int Rng::integer(int lo, int hi) { return lo + static_cast<int>(index(static_cast<std::size_t>(hi - lo + 1))); }

}  // namespace nmpinv
