#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>

namespace nmpinv::plantsim {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct PendulumCartParams {
    double cart_mass      = 1.0;
    double pendulum_mass  = 0.2;
    double length         = 0.5;
    double gravity        = 9.81;

    void validate() const;
};

// Force produced by the motor: q = -back_emf * cart_velocity + gain * voltage.
struct VoltageModel {
    double back_emf = 7.74;
    double gain     = 1.73;
};

// One translational axis of the quadrotor surrogate: position, velocity and a
// first-order lagged acceleration with quadratic drag. The input is the commanded
// acceleration.
struct QuadAxisParams {
    double thrust_lag = 0.25;
    double drag       = 1.0;

    void validate() const;
};

// state [eta, eta_dot, theta, theta_dot]
Vec pendulum_cart_derivative(const Vec& x, double force, const PendulumCartParams& p);
Vec pendulum_cart_voltage_derivative(const Vec& x, double voltage, const PendulumCartParams& p,
                                     const VoltageModel& vm = {});
// state [position, velocity, acceleration]
Vec quad_axis_derivative(const Vec& x, double accel_cmd, const QuadAxisParams& p);

// Continuous-time single-input plant: x' = f(x, u), y = h(x).
class Plant {
public:
    using Derivative = std::function<Vec(const Vec&, double)>;
    using OutputMap  = std::function<Vec(const Vec&)>;

    Plant(std::string name, int state_dim, int output_dim, Derivative f, OutputMap h);

    Vec derivative(const Vec& x, double u) const { return f_(x, u); }
    Vec output(const Vec& x) const { return h_(x); }
    int state_dim() const { return n_; }
    int output_dim() const { return p_; }
    const std::string& name() const { return name_; }

private:
    std::string name_;
    int n_;
    int p_;
    Derivative f_;
    OutputMap h_;
};

struct LinearModel;

// Outputs are the full state for all three nonlinear plants.
Plant make_pendulum_cart(const PendulumCartParams& p);
Plant make_pendulum_cart_voltage(const PendulumCartParams& p, const VoltageModel& vm = {});
Plant make_quad_axis(const QuadAxisParams& p);
Plant make_linear_plant(const LinearModel& model);

// Classical RK4 with the input held over the step. Throws NonFiniteState.
Vec rk4_step(const Plant& plant, const Vec& x, double u, double dt);

}  // namespace nmpinv::plantsim
