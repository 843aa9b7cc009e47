#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace nmpinv {

// mt19937_64 is specified bit-exactly by the standard; the std distributions are not,
// so the mappings to uniform/normal/index are done here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform();  // [0, 1) with 53 bits
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();  // Box-Muller, standard normal
    std::size_t index(std::size_t n);  // uniform in [0, n)
    int integer(int lo, int hi);  // inclusive
    std::uint64_t next() { return engine_(); }

    template <typename T>
    void shuffle(std::vector<T>& v)
    {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[index(i)]);
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_   = 0.0;
};

}  // namespace nmpinv
