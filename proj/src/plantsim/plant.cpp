#include "nmpinv/plantsim/plant.hpp"

#include <cmath>
#include <stdexcept>

#include "nmpinv/errors.hpp"
#include "nmpinv/plantsim/linear.hpp"

namespace nmpinv::plantsim {

void PendulumCartParams::validate() const
{
    if (!(cart_mass > 0 && pendulum_mass > 0 && length > 0 && gravity > 0))
        throw std::invalid_argument("pendulum-cart parameters must be strictly positive");
}

void QuadAxisParams::validate() const
{
    if (!(thrust_lag > 0)) throw std::invalid_argument("thrust lag must be positive");
    if (!(drag >= 0)) throw std::invalid_argument("drag must be non-negative");
}

Vec pendulum_cart_derivative(const Vec& x, double q, const PendulumCartParams& p)
{
    const double M = p.cart_mass, m = p.pendulum_mass, l = p.length, g = p.gravity;
    const double s = std::sin(x[2]), c = std::cos(x[2]);
    const double w2  = x[3] * x[3];
    const double den = M + m * s * s;
    Vec dx(4);
    dx << x[1], (q + m * g * s * c - m * l * w2 * s) / den, x[3],
        (q * c + (M + m) * g * s - m * l * w2 * s * c) / (l * den);
    return dx;
}

Vec pendulum_cart_voltage_derivative(const Vec& x, double v, const PendulumCartParams& p, const VoltageModel& vm)
{
    return pendulum_cart_derivative(x, -vm.back_emf * x[1] + vm.gain * v, p);
}

Vec quad_axis_derivative(const Vec& x, double a_cmd, const QuadAxisParams& p)
{
    Vec dx(3);
    dx << x[1], x[2] - p.drag * x[1] * std::abs(x[1]), (a_cmd - x[2]) / p.thrust_lag;
    return dx;
}

Plant::Plant(std::string name, int state_dim, int output_dim, Derivative f, OutputMap h)
    : name_(std::move(name)), n_(state_dim), p_(output_dim), f_(std::move(f)), h_(std::move(h))
{
    if (n_ < 1 || p_ < 1) throw std::invalid_argument("plant dimensions must be positive");
}

namespace {
Plant::OutputMap full_state()
{
    return [](const Vec& x) { return x; };
}
}  // namespace

Plant make_pendulum_cart(const PendulumCartParams& p)
{
    p.validate();
    return Plant("pendulum", 4, 4, [p](const Vec& x, double u) { return pendulum_cart_derivative(x, u, p); },
                 full_state());
}

Plant make_pendulum_cart_voltage(const PendulumCartParams& p, const VoltageModel& vm)
{
    p.validate();
    return Plant("pendulum_voltage", 4, 4,
                 [p, vm](const Vec& x, double u) { return pendulum_cart_voltage_derivative(x, u, p, vm); },
                 full_state());
}

Plant make_quad_axis(const QuadAxisParams& p)
{
    p.validate();
    return Plant("quad_axis", 3, 3, [p](const Vec& x, double u) { return quad_axis_derivative(x, u, p); },
                 full_state());
}

Plant make_linear_plant(const LinearModel& model)
{
    model.validate();
    if (model.sample_time) throw std::invalid_argument("make_linear_plant needs a continuous-time model");
    if (model.D.size() > 0 && model.D.cwiseAbs().maxCoeff() > 0.0)
        throw std::invalid_argument("make_linear_plant supports strictly proper models only");
    const Mat A = model.A, B = model.B, C = model.C;
    return Plant(
        "linear", static_cast<int>(A.rows()), static_cast<int>(C.rows()),
        [A, B](const Vec& x, double u) -> Vec { return A * x + B.col(0) * u; },
        [C](const Vec& x) -> Vec { return C * x; });
}

Vec rk4_step(const Plant& plant, const Vec& x, double u, double dt)
{
    if (!(dt > 0.0)) throw std::invalid_argument("rk4 step size must be positive");
    const Vec k1 = plant.derivative(x, u);
    const Vec k2 = plant.derivative(x + 0.5 * dt * k1, u);
    const Vec k3 = plant.derivative(x + 0.5 * dt * k2, u);
    const Vec k4 = plant.derivative(x + dt * k3, u);
    Vec next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!next.allFinite()) throw NonFiniteState("non-finite state after RK4 step");
    return next;
}

}  // namespace nmpinv::plantsim
