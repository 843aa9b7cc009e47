#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nmpinv/experiment/artifacts.hpp"
#include "nmpinv/experiment/config.hpp"
#include "nmpinv/experiment/result.hpp"
#include "nmpinv/experiment/setup.hpp"

namespace nmpinv::experiment {

inline constexpr double kOnsetSeconds = 2.0;

// Sum of sinusoids sampled every dt. With start_at_rest the sum is faded in by a raised
// cosine over the first kOnsetSeconds so position and velocity start at zero.
plantsim::Trajectory sine_sum(const std::vector<SineTerm>& terms, double duration, double dt, bool start_at_rest);

// Hand-drawn-style test trajectories: random-phase sinusoid sums that start at rest.
std::vector<plantsim::Trajectory> synthesize_drawings(const DrawingSpec& spec, std::uint64_t seed, double dt);

struct ScenarioContext {
    const RunConfig& cfg;
    const SystemSetup& setup;
    const ArtifactBundle& artifacts;
};

using MethodList = std::vector<std::pair<std::string, const plantsim::ReferenceSource*>>;

// Runs the baseline once, then every method, on one desired trajectory.
std::vector<ExperimentResult> evaluate_methods(const std::string& scenario, const plantsim::Trajectory& desired,
                                               const plantsim::BaselineSystem& baseline, const MethodList& methods,
                                               double eval_from, std::uint64_t seed);

// Baseline and M3 on a*sin(2 pi t / T) for each period; scenario ids "<prefix>_T<period>".
std::vector<ExperimentResult> run_pendulum_sweep(const ScenarioContext& ctx, const SweepSpec& sweep);
// Baseline, M3 and the past-reference ablation, scored from t = 0.
std::vector<ExperimentResult> run_ablation(const ScenarioContext& ctx, const SweepSpec& sweep);
// Baseline, M2 and M3 on the synthesized drawings.
std::vector<ExperimentResult> run_drawings(const ScenarioContext& ctx);
// Baseline, M1, M2 and M3 on the synthesized drawings.
std::vector<ExperimentResult> run_three_way(const ScenarioContext& ctx);
// Baseline, M2 and M3 on the configured custom trajectories.
std::vector<ExperimentResult> run_custom(const ScenarioContext& ctx);

// Dispatches by name (fig3 | fig4 | fig5 | threeway | custom). Throws ConfigError for unknown
// names or missing artifacts.
std::vector<ExperimentResult> run_scenario(const ScenarioContext& ctx, const std::string& name);
// Runs every named scenario and attaches reductions.
std::vector<ExperimentResult> run_scenarios(const ScenarioContext& ctx, const std::vector<std::string>& names);

}  // namespace nmpinv::experiment
