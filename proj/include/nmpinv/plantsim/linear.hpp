#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "nmpinv/plantsim/controller.hpp"
#include "nmpinv/plantsim/plant.hpp"
#include "nmpinv/polylti/transfer_function.hpp"

namespace nmpinv::plantsim {

struct LinearModel {
    Mat A;
    Mat B;  // n x 1
    Mat C;
    Mat D;  // p x 1
    std::optional<double> sample_time;  // set for discrete models

    void validate() const;
};

// Central differences with step 1e-6 * max(1, |component|). Throws NonFiniteJacobian.
LinearModel linearize(const Plant& plant, const Vec& x0, double u0);

// Scaling and squaring with a truncated Taylor series.
Mat expm(const Mat& A);

LinearModel discretize_zoh(const LinearModel& model, double dt);

Mat controllability_matrix(const Mat& A, const Mat& B);

// Ackermann's formula: eig(A - B K) = desired. Throws Uncontrollable.
Eigen::RowVectorXd pole_place_siso(const Mat& A, const Mat& B, const std::vector<std::complex<double>>& desired);

// Discrete closed loop from the scalar position reference to the plant outputs:
// x+ = (Ad - Bd K C) x + Bd K e_pos r, y = C x. Requires D = 0.
LinearModel closed_loop_model(const LinearModel& discrete_plant, const StateFeedbackController& controller);

// The same system observed every `factor` steps with the input held in between.
LinearModel lift(const LinearModel& discrete, int factor);

// Transfer function from the single input to output row `output_index` (Leverrier-Faddeev).
polylti::DiscreteTransferFunction state_space_tf(const LinearModel& discrete, int output_index);

polylti::DiscreteTransferFunction closed_loop_tf(const LinearModel& discrete_plant,
                                                 const StateFeedbackController& controller, int output_index);

// g (z - zero) / (z^delay (z - p1)(z - p2)), with g chosen for unit dc gain.
polylti::DiscreteTransferFunction nmp_surrogate_axis(double zero, int delay_steps,
                                                     const std::array<std::complex<double>, 2>& poles, double dt);
polylti::DiscreteTransferFunction nmp_surrogate_axis(double zero, int delay_steps, double dt);

// (z - zero) / ((1 - zero) z): unit dc gain, proper, places a zero at `zero`.
polylti::DiscreteTransferFunction zero_injection_filter(double zero, double dt);

}  // namespace nmpinv::plantsim
