#include "nmpinv/invlearn/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace nmpinv::invlearn {

double taylor_correlation_bound(double amplitude, double period, double dt, int p)
{
    if (!(period > 0.0) || !(dt > 0.0)) throw std::invalid_argument("period and dt must be positive");
    return std::abs(amplitude) * std::expm1(2.0 * std::numbers::pi * std::abs(p) * dt / period);
}

double max_label_spread(const TrainingDataset& ds, double tol)
{
    const Eigen::Index n = ds.features.rows();
    if (n < 2) return 0.0;
    // sort on the first feature, then only rows within tol along it can be near-duplicates
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return ds.features(a, 0) < ds.features(b, 0); });
    double spread = 0.0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto a = order[i];
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            const auto b = order[j];
            if (ds.features(b, 0) - ds.features(a, 0) > tol) break;
            if ((ds.features.row(a) - ds.features.row(b)).cwiseAbs().maxCoeff() <= tol)
                spread = std::max(spread, (ds.labels.row(a) - ds.labels.row(b)).cwiseAbs().maxCoeff());
        }
    }
    return spread;
}

}  // namespace nmpinv::invlearn
