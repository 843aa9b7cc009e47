#pragma once

#include <Eigen/Dense>

#include <optional>

namespace nmpinv::plantsim {

// actuation = K (r - y), where the reference vector r carries the position reference in
// position_slot, the velocity reference in velocity_slot and zeros elsewhere.
struct StateFeedbackController {
    Eigen::RowVectorXd gain;
    int position_slot = 0;
    std::optional<int> velocity_slot = 1;

    double actuation(const Eigen::VectorXd& y, double ref_pos, double ref_vel) const;
    Eigen::VectorXd reference_vector(double ref_pos, double ref_vel) const;
    void validate(int output_dim) const;
};

}  // namespace nmpinv::plantsim
