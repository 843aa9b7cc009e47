#include "nmpinv/plantsim/closed_loop.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "nmpinv/errors.hpp"

namespace nmpinv::plantsim {

double StateFeedbackController::actuation(const Vec& y, double ref_pos, double ref_vel) const
{
    return gain.dot(reference_vector(ref_pos, ref_vel) - y);
}

Vec StateFeedbackController::reference_vector(double ref_pos, double ref_vel) const
{
    Vec r = Vec::Zero(gain.size());
    r[position_slot] = ref_pos;
    if (velocity_slot) r[*velocity_slot] = ref_vel;
    return r;
}

void StateFeedbackController::validate(int output_dim) const
{
    if (gain.size() != output_dim) throw DimensionMismatch("controller gain does not match the output dimension");
    if (position_slot < 0 || position_slot >= output_dim) throw DimensionMismatch("position slot out of range");
    if (velocity_slot && (*velocity_slot < 0 || *velocity_slot >= output_dim || *velocity_slot == position_slot))
        throw DimensionMismatch("velocity slot out of range");
}

void SimRates::validate() const
{
    if (!(sim_dt > 0.0)) throw std::invalid_argument("sim_dt must be positive");
    if (control_every < 1 || reference_every < 1) throw std::invalid_argument("rate multiples must be >= 1");
    if (reference_every % control_every != 0)
        throw std::invalid_argument("reference_every must be a multiple of control_every");
}

std::vector<double> central_difference(const std::vector<double>& v, double dt)
{
    const std::size_t n = v.size();
    std::vector<double> d(n, 0.0);
    if (n < 2) return d;
    d[0]     = (v[1] - v[0]) / dt;
    d[n - 1] = (v[n - 1] - v[n - 2]) / dt;
    for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (v[k + 1] - v[k - 1]) / (2.0 * dt);
    return d;
}

Trajectory Trajectory::from_positions(double dt, std::vector<double> pos)
{
    if (!(dt > 0.0)) throw std::invalid_argument("trajectory dt must be positive");
    Trajectory t;
    t.dt  = dt;
    t.vel = central_difference(pos, dt);
    t.pos = std::move(pos);
    return t;
}

ReferenceTrack ReferenceTrack::from_positions(double dt, std::vector<double> pos)
{
    ReferenceTrack r;
    r.vel = central_difference(pos, dt);
    r.pos = std::move(pos);
    return r;
}

TransferFunctionReference::TransferFunctionReference(polylti::DiscreteTransferFunction tf, std::string name)
    : tf_(std::move(tf)), name_(std::move(name))
{
}

ReferenceTrack TransferFunctionReference::generate(const Trajectory& desired) const
{
    std::vector<double> ext = desired.pos;
    const int p             = tf_.preview();
    if (!ext.empty()) ext.insert(ext.end(), p, ext.back());
    std::vector<double> out = polylti::simulate(tf_, ext);
    out.resize(desired.size());
    return ReferenceTrack::from_positions(desired.dt, std::move(out));
}

void write_trace_csv(std::ostream& os, const Trace& trace)
{
    const std::size_t n = trace.x.empty() ? 0 : static_cast<std::size_t>(trace.x.front().size());
    os << "t";
    for (std::size_t i = 1; i <= n; ++i) os << ",x" << i;
    os << ",u_ref_pos,u_ref_vel,actuation,y\n";
    const auto old = os.precision(12);
    for (std::size_t k = 0; k < trace.size(); ++k) {
        os << trace.t[k];
        for (std::size_t i = 0; i < n; ++i) os << ',' << trace.x[k][static_cast<Eigen::Index>(i)];
        os << ',' << trace.ref_pos[k] << ',' << trace.ref_vel[k] << ',' << trace.actuation[k] << ',' << trace.y[k]
           << '\n';
    }
    os.precision(old);
}

ClosedLoopSystem::ClosedLoopSystem(Plant p, StateFeedbackController c, SimRates r)
    : plant(std::move(p)), controller(std::move(c)), rates(r)
{
    rates.validate();
    controller.validate(plant.output_dim());
}

Trace ClosedLoopSystem::run(const ReferenceTrack& track) const
{
    if (track.vel.size() != track.pos.size()) throw DimensionMismatch("reference track position/velocity lengths differ");
    const std::size_t N = track.size();
    Vec x = initial_state.size() ? initial_state : Vec::Zero(plant.state_dim());
    if (x.size() != plant.state_dim()) throw DimensionMismatch("initial state has wrong dimension");

    std::optional<polylti::OnlineFilter> fpos, fvel;
    if (reference_filter) {
        fpos.emplace(*reference_filter);
        fvel.emplace(*reference_filter);
    }

    Trace tr;
    tr.t.reserve(N);
    tr.x.reserve(N);
    const double ref_dt = rates.reference_dt();
    for (std::size_t k = 0; k < N; ++k) {
        const Vec y = plant.output(x);
        const double rp = fpos ? fpos->step(track.pos[k]) : track.pos[k];
        const double rv = fvel ? fvel->step(track.vel[k]) : track.vel[k];

        tr.t.push_back(ref_dt * static_cast<double>(k));
        tr.x.push_back(x);
        tr.ref_pos.push_back(track.pos[k]);
        tr.ref_vel.push_back(track.vel[k]);
        tr.y.push_back(y[tracked_output]);
        tr.y_vel.push_back(velocity_output ? y[*velocity_output] : 0.0);

        double q = 0.0;
        for (int s = 0; s < rates.reference_every; ++s) {
            if (s % rates.control_every == 0) q = controller.actuation(plant.output(x), rp, rv);
            if (s == 0) tr.actuation.push_back(q);
            bool blown = false;
            try {
                x = rk4_step(plant, x, q, rates.sim_dt);
                blown = !(x.norm() <= divergence_bound);
            } catch (const NonFiniteState&) {
                blown = true;
            }
            if (blown) {
                tr.diverged        = true;
                tr.divergence_time = ref_dt * static_cast<double>(k) + rates.sim_dt * (s + 1);
                if (!velocity_output) tr.y_vel = central_difference(tr.y, ref_dt);
                return tr;
            }
        }
    }
    if (!velocity_output) tr.y_vel = central_difference(tr.y, ref_dt);
    return tr;
}

TransferFunctionBaseline::TransferFunctionBaseline(polylti::DiscreteTransferFunction tf, double divergence_bound)
    : tf_(std::move(tf)), bound_(divergence_bound)
{
    if (!tf_.is_proper()) throw ImproperSystem("a baseline system must be proper");
}

Trace TransferFunctionBaseline::run(const ReferenceTrack& track) const
{
    const std::vector<double> y = polylti::simulate(tf_, track.pos);
    const double dt             = tf_.sample_time();
    Trace tr;
    for (std::size_t k = 0; k < y.size(); ++k) {
        if (!(std::abs(y[k]) <= bound_)) {
            tr.diverged        = true;
            tr.divergence_time = dt * static_cast<double>(k);
            break;
        }
        tr.t.push_back(dt * static_cast<double>(k));
        tr.x.push_back(Vec::Constant(1, y[k]));
        tr.ref_pos.push_back(track.pos[k]);
        tr.ref_vel.push_back(track.vel[k]);
        tr.actuation.push_back(track.pos[k]);
        tr.y.push_back(y[k]);
    }
    tr.y_vel = central_difference(tr.y, dt);
    return tr;
}

Trace simulate_closed_loop(const BaselineSystem& system, const ReferenceTrack& track) { return system.run(track); }

Trace simulate_closed_loop(const BaselineSystem& system, const ReferenceSource& source, const Trajectory& desired)
{
    if (std::abs(desired.dt - system.reference_dt()) > 1e-9 * system.reference_dt())
        throw std::invalid_argument("trajectory sample time does not match the system reference rate");
    return system.run(source.generate(desired));
}

}  // namespace nmpinv::plantsim
