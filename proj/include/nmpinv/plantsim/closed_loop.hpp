#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nmpinv/plantsim/controller.hpp"
#include "nmpinv/plantsim/plant.hpp"
#include "nmpinv/polylti/transfer_function.hpp"

namespace nmpinv::plantsim {

// Integration every sim_dt; the controller updates every control_every integration steps;
// the reference (learning module / inverse) updates every reference_every steps.
struct SimRates {
    double sim_dt       = 0.001;
    int control_every   = 1;
    int reference_every = 15;

    double control_dt() const { return sim_dt * control_every; }
    double reference_dt() const { return sim_dt * reference_every; }
    void validate() const;
};

// Central differences inside, one-sided at the ends.
std::vector<double> central_difference(const std::vector<double>& v, double dt);

// Desired output sampled at the reference rate.
struct Trajectory {
    double dt = 0.0;
    std::vector<double> pos;
    std::vector<double> vel;

    static Trajectory from_positions(double dt, std::vector<double> pos);
    std::size_t size() const { return pos.size(); }
    double time(std::size_t k) const { return dt * static_cast<double>(k); }
};

// Reference actually sent to the baseline: position and velocity slots.
struct ReferenceTrack {
    std::vector<double> pos;
    std::vector<double> vel;

    static ReferenceTrack from_positions(double dt, std::vector<double> pos);
    std::size_t size() const { return pos.size(); }
};

// Maps a desired trajectory (known in full, consumed with bounded preview) to a reference track.
class ReferenceSource {
public:
    virtual ~ReferenceSource() = default;
    virtual ReferenceTrack generate(const Trajectory& desired) const = 0;
    virtual std::string name() const = 0;
};

// Baseline: the desired trajectory itself.
class DesiredReference final : public ReferenceSource {
public:
    ReferenceTrack generate(const Trajectory& desired) const override { return {desired.pos, desired.vel}; }
    std::string name() const override { return "baseline"; }
};

// A linear (possibly improper) inverse applied to the desired positions. The trajectory is
// extended by holding its last sample so the preview never reads past the end.
class TransferFunctionReference final : public ReferenceSource {
public:
    TransferFunctionReference(polylti::DiscreteTransferFunction tf, std::string name);
    ReferenceTrack generate(const Trajectory& desired) const override;
    std::string name() const override { return name_; }
    const polylti::DiscreteTransferFunction& tf() const { return tf_; }

private:
    polylti::DiscreteTransferFunction tf_;
    std::string name_;
};

// Time-aligned log at the reference rate. Row k holds the state sampled at t_k and the
// reference applied over [t_k, t_k+1).
struct Trace {
    std::vector<double> t;
    std::vector<Vec> x;
    std::vector<double> ref_pos;
    std::vector<double> ref_vel;
    std::vector<double> actuation;
    std::vector<double> y;
    std::vector<double> y_vel;
    bool diverged          = false;
    double divergence_time = 0.0;

    std::size_t size() const { return t.size(); }
};

void write_trace_csv(std::ostream& os, const Trace& trace);

class BaselineSystem {
public:
    virtual ~BaselineSystem() = default;
    virtual Trace run(const ReferenceTrack& track) const = 0;
    virtual double reference_dt() const = 0;
};

// Nonlinear plant under state feedback, optionally with a linear filter
// acting on the incoming references at the reference rate.
class ClosedLoopSystem final : public BaselineSystem {
public:
    ClosedLoopSystem(Plant plant, StateFeedbackController controller, SimRates rates);

    Plant plant;
    StateFeedbackController controller;
    SimRates rates;
    double divergence_bound = 1e3;
    int tracked_output      = 0;
    std::optional<int> velocity_output = 1;
    std::optional<polylti::DiscreteTransferFunction> reference_filter;
    Vec initial_state;  // empty means zero

    Trace run(const ReferenceTrack& track) const override;
    double reference_dt() const override { return rates.reference_dt(); }
};

// A discrete transfer function driven at its own sample time.
class TransferFunctionBaseline final : public BaselineSystem {
public:
    explicit TransferFunctionBaseline(polylti::DiscreteTransferFunction tf, double divergence_bound = 1e3);
    Trace run(const ReferenceTrack& track) const override;
    double reference_dt() const override { return tf_.sample_time(); }
    const polylti::DiscreteTransferFunction& tf() const { return tf_; }

private:
    polylti::DiscreteTransferFunction tf_;
    double bound_;
};

Trace simulate_closed_loop(const BaselineSystem& system, const ReferenceTrack& track);
Trace simulate_closed_loop(const BaselineSystem& system, const ReferenceSource& source, const Trajectory& desired);

}  // namespace nmpinv::plantsim
