#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "nmpinv/experiment/config.hpp"
#include "nmpinv/plantsim/closed_loop.hpp"
#include "nmpinv/polylti/transfer_function.hpp"

namespace nmpinv::experiment {

// Everything a scenario needs about the baseline: the nonlinear closed loop and the
// linear model the ZOS inverse is designed from.
struct SystemSetup {
    std::shared_ptr<const plantsim::ClosedLoopSystem> baseline;
    polylti::DiscreteTransferFunction design_model{polylti::Polynomial({1.0}), polylti::Polynomial({1.0}), 1.0};
    double dt = 0.0;  // reference (learning-module) sample time
};

plantsim::Plant make_plant(const RunConfig& cfg);

// Checks that the gain stabilizes the linearization at rest (throws ConfigError otherwise).
void check_stabilizing(const RunConfig& cfg);

SystemSetup build_system(const RunConfig& cfg);

// Trajectories the baseline is driven with to collect training data.
std::vector<plantsim::Trajectory> training_trajectories(const RunConfig& cfg);

}  // namespace nmpinv::experiment
