#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nmpinv/invlearn/dataset.hpp"
#include "nmpinv/invlearn/generator.hpp"
#include "nmpinv/invlearn/selection.hpp"
#include "nmpinv/mlp/train.hpp"
#include "nmpinv/plantsim/closed_loop.hpp"
#include "nmpinv/plantsim/plant.hpp"

namespace nmpinv::experiment {

enum class SystemKind { Pendulum, QuadSurrogate };
enum class PlantModel { PendulumCart, PendulumCartVoltage, QuadAxis };

std::string to_string(SystemKind s);

// A sum of sinusoids, used for named test trajectories.
struct SineTerm {
    double amplitude = 0.0;
    double period    = 1.0;
    double phase     = 0.0;
};

struct CustomTrajectory {
    std::string name;
    double duration = 30.0;
    std::vector<SineTerm> terms;
};

struct SweepSpec {
    std::vector<double> periods;
    double amplitude = 0.0;
    double duration  = 60.0;
};

// Hand-drawn-style test trajectories: a few random-phase sinusoids.
struct DrawingSpec {
    int count            = 10;
    double duration      = 30.0;
    int min_components   = 3;
    int max_components   = 6;
    double min_period    = 4.0;
    double max_period    = 20.0;
    double min_amplitude = 0.05;
    double max_amplitude = 0.25;
};

struct TrainingDataSpec {
    enum class Kind { Sinusoids, Multisine } kind = Kind::Sinusoids;
    std::vector<double> amplitudes;
    std::vector<double> periods;
    double duration = 60.0;  // per sinusoid, or the whole multisine run
    int components  = 20;
    double component_amplitude = 0.07;
    double min_period = 4.0;
    double max_period = 20.0;
};

struct ServiceSpec {
    std::string host = "127.0.0.1";
    int port         = 8080;
    double workspace = 3.0;  // drawings are clamped to [-workspace, workspace]
    double max_duration = 120.0;
    int smoothing_window = 5;
    std::string cors_origin = "*";
};

struct RunConfig {
    std::string preset;
    SystemKind system = SystemKind::Pendulum;
    PlantModel plant  = PlantModel::PendulumCart;
    plantsim::PendulumCartParams pendulum;
    plantsim::VoltageModel voltage;
    plantsim::QuadAxisParams quad;

    Eigen::RowVectorXd gain;
    int position_slot = 0;
    std::optional<int> velocity_slot = 1;
    plantsim::SimRates rates;
    double divergence_bound = 1e3;

    // quad surrogate: zero injected through the reference filter and the linear model used by ZOS
    double nmp_zero        = 1.2;
    int surrogate_delay    = 0;
    std::optional<double> surrogate_pole;  // double pole; default exp(-3 dt)

    TrainingDataSpec training_data;
    invlearn::InputSelection selection;                      // approximate inverse (M3)
    std::optional<invlearn::InputSelection> exact_selection;  // M1
    int ablation_past = 1;
    invlearn::NetworkSpec network;
    mlp::TrainingConfig training;
    invlearn::BuildOptions build;

    SweepSpec fig3;
    SweepSpec fig4;
    DrawingSpec drawings;
    std::vector<CustomTrajectory> custom;
    double eval_skip = 5.0;
    std::vector<std::string> run;

    std::string output_dir = "out";
    std::uint64_t seed     = 0;
    ServiceSpec service;

    // Sub-seeds derived from the run seed.
    std::uint64_t data_seed() const { return seed * 0x9e3779b97f4a7c15ULL + 1; }
    std::uint64_t drawing_seed() const { return seed * 0x9e3779b97f4a7c15ULL + 2; }
};

std::vector<std::string> preset_names();
nlohmann::json preset(const std::string& name);

// Follows `extends` (a preset name) and applies the document on top as a merge patch.
nlohmann::json resolve_config(const nlohmann::json& doc);
// Throws ConfigError naming the offending key path.
RunConfig parse_config(const nlohmann::json& resolved);
// Reads a config file and resolves its `extends` chain. Throws ConfigError.
nlohmann::json load_config_document(const std::string& path);
RunConfig load_config(const std::string& path);

}  // namespace nmpinv::experiment
