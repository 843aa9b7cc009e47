#include "nmpinv/experiment/setup.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

#include "nmpinv/errors.hpp"
#include "nmpinv/experiment/scenarios.hpp"
#include "nmpinv/plantsim/linear.hpp"
#include "nmpinv/random.hpp"

namespace nmpinv::experiment {

plantsim::Plant make_plant(const RunConfig& cfg)
{
    switch (cfg.plant) {
        case PlantModel::PendulumCart: return plantsim::make_pendulum_cart(cfg.pendulum);
        case PlantModel::PendulumCartVoltage: return plantsim::make_pendulum_cart_voltage(cfg.pendulum, cfg.voltage);
        case PlantModel::QuadAxis: return plantsim::make_quad_axis(cfg.quad);
    }
    throw std::logic_error("unknown plant model");
}

namespace {

plantsim::StateFeedbackController make_controller(const RunConfig& cfg)
{
    return {cfg.gain, cfg.position_slot, cfg.velocity_slot};
}

plantsim::LinearModel linear_loop(const RunConfig& cfg)
{
    const plantsim::Plant plant = make_plant(cfg);
    return plantsim::linearize(plant, plantsim::Vec::Zero(plant.state_dim()), 0.0);
}

}  // namespace

void check_stabilizing(const RunConfig& cfg)
{
    const plantsim::LinearModel lin = linear_loop(cfg);
    const plantsim::Mat closed     = lin.A - lin.B * cfg.gain * lin.C;
    const Eigen::EigenSolver<plantsim::Mat> es(closed);
    double worst = -INFINITY;
    for (Eigen::Index i = 0; i < closed.rows(); ++i) worst = std::max(worst, es.eigenvalues()[i].real());
    if (!(worst < 0.0))
        throw ConfigError("config error at /controller: the gain does not stabilize the linearized loop (largest real part " +
                          std::to_string(worst) + ")");
}

SystemSetup build_system(const RunConfig& cfg)
{
    check_stabilizing(cfg);
    auto sys = std::make_shared<plantsim::ClosedLoopSystem>(make_plant(cfg), make_controller(cfg), cfg.rates);
    sys->divergence_bound = cfg.divergence_bound;
    const double dt       = cfg.rates.reference_dt();

    SystemSetup s{nullptr, polylti::DiscreteTransferFunction({1.0}, {1.0}, dt), dt};
    if (cfg.system == SystemKind::QuadSurrogate) {
        sys->reference_filter = plantsim::zero_injection_filter(cfg.nmp_zero, dt);
        const double pole     = cfg.surrogate_pole.value_or(std::exp(-3.0 * dt));
        s.design_model        = plantsim::nmp_surrogate_axis(cfg.nmp_zero, cfg.surrogate_delay,
                                                             {polylti::Complex(pole), polylti::Complex(pole)}, dt);
    } else {
        // position reference -> cart position, held over each reference interval
        const plantsim::LinearModel disc = plantsim::discretize_zoh(linear_loop(cfg), cfg.rates.control_dt());
        const plantsim::LinearModel loop = plantsim::closed_loop_model(disc, make_controller(cfg));
        const plantsim::LinearModel lifted = plantsim::lift(loop, cfg.rates.reference_every / cfg.rates.control_every);
        s.design_model = plantsim::state_space_tf(lifted, cfg.position_slot);
    }
    s.baseline = std::move(sys);
    return s;
}

std::vector<plantsim::Trajectory> training_trajectories(const RunConfig& cfg)
{
    const double dt = cfg.rates.reference_dt();
    const TrainingDataSpec& t = cfg.training_data;
    if (t.kind == TrainingDataSpec::Kind::Sinusoids)
        return invlearn::generate_training_trajectories(t.amplitudes, t.periods, t.duration, dt);
    Rng rng(cfg.data_seed());
    std::vector<SineTerm> terms;
    for (int i = 0; i < t.components; ++i)
        terms.push_back({t.component_amplitude, rng.uniform(t.min_period, t.max_period),
                         rng.uniform(0.0, 2.0 * std::numbers::pi)});
    return {sine_sum(terms, t.duration, dt, true)};
}

}  // namespace nmpinv::experiment
