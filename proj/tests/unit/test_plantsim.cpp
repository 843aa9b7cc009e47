#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nmpinv/errors.hpp"
#include "nmpinv/random.hpp"
#include "nmpinv/plantsim/closed_loop.hpp"
#include "nmpinv/plantsim/linear.hpp"
#include "nmpinv/polylti/transfer_function.hpp"

using namespace nmpinv;
using namespace nmpinv::plantsim;

namespace {

Eigen::RowVectorXd k1()
{
    Eigen::RowVectorXd k(4);
    k << -0.8678, -1.808, 25.46, 4.140;
    return k;
}

Vec vec(std::initializer_list<double> v)
{
    Vec x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double d : v) x[i++] = d;
    return x;
}

// Solves the cart/pendulum equations written with their mass matrix.
Vec pendulum_oracle(const Vec& x, double q, const PendulumCartParams& p)
{
    const double M = p.cart_mass, m = p.pendulum_mass, l = p.length, g = p.gravity;
    const double s = std::sin(x[2]), c = std::cos(x[2]);
    Eigen::Matrix2d mass;
    mass << M + m, -m * l * c, -c, l;
    const Eigen::Vector2d rhs(q - m * l * x[3] * x[3] * s, g * s);
    const Eigen::Vector2d acc = mass.partialPivLu().solve(rhs);
    return vec({x[1], acc[0], x[3], acc[1]});
}

Vec rk4_fine(const Plant& plant, Vec x, double u, double dt, int sub)
{
    for (int i = 0; i < sub; ++i) x = rk4_step(plant, x, u, dt / sub);
    return x;
}

std::vector<std::complex<double>> eigenvalues(const Mat& A)
{
    Eigen::EigenSolver<Mat> es(A);
    std::vector<std::complex<double>> ev;
    for (Eigen::Index i = 0; i < A.rows(); ++i) ev.push_back(es.eigenvalues()[i]);
    return ev;
}

// every value in `a` has a partner in `b` within tol (greedy matching)
bool same_spectrum(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b, double tol)
{
    if (a.size() != b.size()) return false;
    for (const auto& z : a) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < b.size(); ++j)
            if (std::abs(b[j] - z) < std::abs(b[best] - z)) best = j;
        if (std::abs(b[best] - z) > tol) return false;
        b.erase(b.begin() + static_cast<long>(best));
    }
    return true;
}

LinearModel double_integrator()
{
    LinearModel m;
    m.A = Mat::Zero(2, 2);
    m.A(0, 1) = 1.0;
    m.B = Mat::Zero(2, 1);
    m.B(1, 0) = 1.0;
    m.C = Mat::Identity(2, 2);
    m.D = Mat::Zero(2, 1);
    return m;
}

}  // namespace

TEST_CASE("pendulum derivative")
{
    const PendulumCartParams p;
    CHECK(pendulum_cart_derivative(Vec::Zero(4), 0.0, p).norm() == 0.0);

    const Vec d = pendulum_cart_derivative(Vec::Zero(4), 1.0, p);
    CHECK(d[0] == doctest::Approx(0.0));
    CHECK(d[1] == doctest::Approx(1.0 / p.cart_mass).epsilon(1e-14));
    CHECK(d[2] == doctest::Approx(0.0));
    CHECK(d[3] == doctest::Approx(1.0 / (p.length * p.cart_mass)).epsilon(1e-14));

    const Vec x = vec({0.0, 0.1, 0.2, -0.1});
    CHECK((pendulum_cart_derivative(x, 0.5, p) - pendulum_oracle(x, 0.5, p)).norm() < 1e-12);

    Rng rng(5);
    for (int t = 0; t < 200; ++t) {
        const Vec xr = vec({rng.uniform(-1, 1), rng.uniform(-2, 2), rng.uniform(-3, 3), rng.uniform(-4, 4)});
        const double q = rng.uniform(-10, 10);
        CHECK((pendulum_cart_derivative(xr, q, p) - pendulum_oracle(xr, q, p)).norm() < 1e-10);
    }
}

TEST_CASE("voltage model substitutes the motor force")
{
    const PendulumCartParams p;
    const VoltageModel vm;
    CHECK(pendulum_cart_voltage_derivative(Vec::Zero(4), 0.0, p).norm() == 0.0);

    const Vec d = pendulum_cart_voltage_derivative(Vec::Zero(4), 1.0, p);
    CHECK(d[1] == doctest::Approx(1.73 / p.cart_mass).epsilon(1e-14));
    CHECK(d[3] == doctest::Approx(1.73 / (p.length * p.cart_mass)).epsilon(1e-14));

    const Vec x = vec({0.0, 1.0, 0.0, 0.0});
    CHECK((pendulum_cart_voltage_derivative(x, 0.0, p, vm) - pendulum_oracle(x, -7.74, p)).norm() < 1e-12);
}

TEST_CASE("parameter validation")
{
    PendulumCartParams p;
    p.length = 0.0;
    CHECK_THROWS(p.validate());
    QuadAxisParams q;
    q.thrust_lag = -1.0;
    CHECK_THROWS(q.validate());
}

TEST_CASE("quad axis rests at the origin and integrates its state chain")
{
    const QuadAxisParams p;
    CHECK(quad_axis_derivative(Vec::Zero(3), 0.0, p).norm() == 0.0);
    const Vec d = quad_axis_derivative(vec({0.0, 2.0, 1.0}), 3.0, p);
    CHECK(d[0] == doctest::Approx(2.0));
    CHECK(d[1] == doctest::Approx(1.0 - p.drag * 4.0));
    CHECK(d[2] == doctest::Approx((3.0 - 1.0) / p.thrust_lag));
}

TEST_CASE("rk4 step")
{
    const Plant still("still", 2, 2, [](const Vec& x, double) { return Vec::Zero(x.size()); },
                      [](const Vec& x) { return x; });
    const Vec x0 = vec({1.5, -2.0});
    CHECK(rk4_step(still, x0, 3.0, 0.1) == x0);

    const Plant decay("decay", 1, 1, [](const Vec& x, double) { return Vec(-x); }, [](const Vec& x) { return x; });
    CHECK(std::abs(rk4_step(decay, vec({1.0}), 0.0, 0.01)[0] - std::exp(-0.01)) < 1e-10);

    const Plant pend = make_pendulum_cart({});
    CHECK(rk4_step(pend, Vec::Zero(4), 0.0, 0.01).norm() == 0.0);

    const Plant blow("blow", 1, 1, [](const Vec&, double) { return vec({std::nan("")}); },
                     [](const Vec& x) { return x; });
    CHECK_THROWS_AS(rk4_step(blow, vec({0.0}), 0.0, 0.1), NonFiniteState);
}

TEST_CASE("property: rk4 local error shrinks by >= 14 per halving")
{
    const Plant pend = make_pendulum_cart({});
    Rng rng(11);
    for (int t = 0; t < 20; ++t) {
        const Vec x = vec({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-0.5, 0.5), rng.uniform(-1, 1)});
        const double q = rng.uniform(-2, 2);
        const double h = 0.05;
        const double e1 = (rk4_step(pend, x, q, h) - rk4_fine(pend, x, q, h, 400)).norm();
        const double e2 = (rk4_step(pend, x, q, h / 2) - rk4_fine(pend, x, q, h / 2, 400)).norm();
        CHECK(e1 / e2 >= 14.0);
    }
}

TEST_CASE("linearize")
{
    LinearModel lin = double_integrator();
    const LinearModel rec = linearize(make_linear_plant(lin), Vec::Zero(2), 0.0);
    CHECK((rec.A - lin.A).norm() < 1e-6);
    CHECK((rec.B - lin.B).norm() < 1e-6);
    CHECK((rec.C - lin.C).norm() < 1e-6);

    Rng rng(2);
    LinearModel rnd;
    rnd.A = Mat::NullaryExpr(3, 3, [&] { return rng.uniform(-2, 2); });
    rnd.B = Mat::NullaryExpr(3, 1, [&] { return rng.uniform(-2, 2); });
    rnd.C = Mat::NullaryExpr(2, 3, [&] { return rng.uniform(-2, 2); });
    rnd.D = Mat::Zero(2, 1);
    const LinearModel back = linearize(make_linear_plant(rnd), vec({0.3, -1.0, 2.0}), 0.7);
    CHECK((back.A - rnd.A).norm() < 1e-6);
    CHECK((back.B - rnd.B).norm() < 1e-6);

    const PendulumCartParams p;
    const LinearModel pl = linearize(make_pendulum_cart(p), Vec::Zero(4), 0.0);
    const double M = p.cart_mass, m = p.pendulum_mass, l = p.length, g = p.gravity;
    CHECK(pl.A(3, 2) == doctest::Approx((M + m) * g / (l * M)).epsilon(1e-6));
    CHECK(pl.A(1, 2) == doctest::Approx(m * g / M).epsilon(1e-6));
    CHECK(pl.A(0, 1) == doctest::Approx(1.0));
    CHECK(pl.A(2, 3) == doctest::Approx(1.0));
    CHECK(pl.B(1, 0) == doctest::Approx(1.0 / M).epsilon(1e-6));
    CHECK(pl.B(3, 0) == doctest::Approx(1.0 / (l * M)).epsilon(1e-6));
    CHECK(std::abs(pl.B(0, 0)) < 1e-9);
    CHECK(std::abs(pl.B(2, 0)) < 1e-9);

    const Plant bad("bad", 1, 1, [](const Vec& x, double) { return Vec::Constant(x.size(), std::nan("")); },
                    [](const Vec& x) { return x; });
    CHECK_THROWS_AS(linearize(bad, vec({1.0}), 0.0), NonFiniteJacobian);
}

TEST_CASE("zoh discretization")
{
    LinearModel zero;
    zero.A = Mat::Zero(2, 2);
    zero.B = vec({1.0, 2.0});
    zero.C = Mat::Identity(2, 2);
    zero.D = Mat::Zero(2, 1);
    const LinearModel dz = discretize_zoh(zero, 0.3);
    CHECK((dz.A - Mat::Identity(2, 2)).norm() < 1e-15);
    CHECK((dz.B - zero.B * 0.3).norm() < 1e-15);
    CHECK(dz.sample_time.value() == 0.3);

    LinearModel sc;
    sc.A = Mat::Constant(1, 1, -1.7);
    sc.B = Mat::Constant(1, 1, 2.0);
    sc.C = Mat::Identity(1, 1);
    sc.D = Mat::Zero(1, 1);
    const LinearModel ds = discretize_zoh(sc, 0.2);
    CHECK(ds.A(0, 0) == doctest::Approx(std::exp(-1.7 * 0.2)).epsilon(1e-14));
    CHECK(ds.B(0, 0) == doctest::Approx((std::exp(-1.7 * 0.2) - 1.0) / -1.7 * 2.0).epsilon(1e-14));

    const LinearModel di = discretize_zoh(double_integrator(), 0.1);
    Mat ad(2, 2);
    ad << 1.0, 0.1, 0.0, 1.0;
    CHECK((di.A - ad).norm() < 1e-14);
    CHECK((di.B - vec({0.005, 0.1})).norm() < 1e-14);

    // large-norm matrix exercises the squaring phase; oracle via the eigendecomposition
    Mat big(2, 2);
    big << -20.0, 3.0, 1.0, -8.0;
    Eigen::EigenSolver<Mat> es(big * 0.5);
    const Eigen::MatrixXcd V = es.eigenvectors();
    const Eigen::MatrixXcd E = es.eigenvalues().array().exp().matrix().asDiagonal();
    const Mat ref = (V * E * V.inverse()).real();
    CHECK((expm(big * 0.5) - ref).norm() < 1e-12 * ref.norm() + 1e-15);
}

TEST_CASE("pole placement")
{
    const LinearModel di = double_integrator();
    const Eigen::RowVectorXd k = pole_place_siso(di.A, di.B, {-1.0, -1.0});
    CHECK(k[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(k[1] == doctest::Approx(2.0).epsilon(1e-12));

    Mat a(2, 2);
    a << -1.0, 0.0, 0.0, -2.0;
    const Mat b = vec({1.0, 1.0});
    CHECK(pole_place_siso(a, b, {-1.0, -2.0}).norm() < 1e-8);

    const LinearModel pl = linearize(make_pendulum_cart({}), Vec::Zero(4), 0.0);
    const auto target = eigenvalues(pl.A - pl.B * k1());
    for (const auto& z : target) CHECK(z.real() < 0.0);
    const Eigen::RowVectorXd kp = pole_place_siso(pl.A, pl.B, target);
    CHECK(same_spectrum(eigenvalues(pl.A - pl.B * kp), target, 1e-6));
    CHECK((kp - k1()).norm() < 1e-6 * k1().norm());

    Mat un(2, 2);
    un << 1.0, 0.0, 0.0, 2.0;
    CHECK_THROWS_AS(pole_place_siso(un, vec({1.0, 0.0}), {-1.0, -1.0}), Uncontrollable);
}

TEST_CASE("closed-loop transfer functions")
{
    LinearModel unity;
    unity.A = Mat::Constant(1, 1, 1.0);
    unity.B = Mat::Constant(1, 1, 1.0);
    unity.C = Mat::Constant(1, 1, 1.0);
    unity.D = Mat::Zero(1, 1);
    unity.sample_time = 1.0;
    StateFeedbackController one{Eigen::RowVectorXd::Constant(1, 1.0), 0, std::nullopt};
    const auto h = closed_loop_tf(unity, one, 0);
    CHECK(h.num() == polylti::Polynomial({1.0}));
    CHECK(h.den().degree() == 1);
    CHECK(std::abs(h.den()[0]) < 1e-14);
    CHECK(h.den()[1] == doctest::Approx(1.0));

    StateFeedbackController di_ctrl{pole_place_siso(double_integrator().A, double_integrator().B, {-1.0, -1.0}), 0, 1};
    const LinearModel dd = discretize_zoh(double_integrator(), 0.1);
    const LinearModel pd = discretize_zoh(linearize(make_pendulum_cart({}), Vec::Zero(4), 0.0), 0.015);
    StateFeedbackController k1c{k1(), 0, 1};

    for (auto [model, ctrl] : {std::pair{dd, di_ctrl}, std::pair{pd, k1c}}) {
        const LinearModel cl = closed_loop_model(model, ctrl);
        for (int out = 0; out < cl.C.rows(); ++out) {
            const auto tf = closed_loop_tf(model, ctrl, out);
            const auto ir = polylti::impulse_response(tf, 200);
            Vec x = Vec::Zero(cl.A.rows());
            double err = 0.0;
            for (int k = 0; k < 200; ++k) {
                err = std::max(err, std::abs((cl.C.row(out) * x)(0) - ir[k]));
                x = cl.A * x + cl.B.col(0) * (k == 0 ? 1.0 : 0.0);
            }
            CHECK(err < 1e-8);
        }
    }

    const auto hp = closed_loop_tf(pd, k1c, 0);
    CHECK(polylti::dc_gain(hp) == doctest::Approx(1.0).epsilon(1e-6));
    for (const auto& p : polylti::poles(hp)) CHECK(std::abs(p) < 1.0);

    // lifting by a factor equals observing the fine-rate system every factor steps
    const LinearModel fine = discretize_zoh(linearize(make_pendulum_cart({}), Vec::Zero(4), 0.0), 0.001);
    const LinearModel coarse = discretize_zoh(linearize(make_pendulum_cart({}), Vec::Zero(4), 0.0), 0.015);
    const LinearModel lifted = lift(fine, 15);
    CHECK((lifted.A - coarse.A).norm() < 1e-10);
    CHECK((lifted.B - coarse.B).norm() < 1e-10);
    CHECK(lifted.sample_time.value() == doctest::Approx(0.015));
}

TEST_CASE("surrogate axis")
{
    const double dt = 1.0 / 7.0;
    const auto h = nmp_surrogate_axis(1.2, 0, dt);
    CHECK(polylti::dc_gain(h) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(polylti::is_minimum_phase(h));
    const auto zc = polylti::classify_zeros(h);
    REQUIRE(zc.unstable_zeros.size() == 1);
    CHECK(zc.unstable_factor()(1.0) == doctest::Approx(-0.2).epsilon(1e-12));
    for (const auto& p : polylti::poles(h)) CHECK(std::abs(p - std::exp(-3.0 * dt)) < 1e-6);
    CHECK(polylti::relative_degree(h) == 1);
    CHECK(polylti::relative_degree(nmp_surrogate_axis(1.2, 2, dt)) == 3);

    CHECK_THROWS(nmp_surrogate_axis(0.8, 0, dt));

    const auto f = zero_injection_filter(1.2, dt);
    CHECK(polylti::dc_gain(f) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.is_proper());
    CHECK(f.num()(1.2) == doctest::Approx(0.0));
}

TEST_CASE("closed-loop simulation")
{
    const Plant pend = make_pendulum_cart({});
    StateFeedbackController ctrl{k1(), 0, 1};
    ClosedLoopSystem sys(pend, ctrl, SimRates{});

    SUBCASE("zero reference keeps the equilibrium")
    {
        const Trace tr = sys.run(ReferenceTrack{std::vector<double>(200, 0.0), std::vector<double>(200, 0.0)});
        CHECK_FALSE(tr.diverged);
        CHECK(tr.size() == 200);
        for (const Vec& x : tr.x) CHECK(x.norm() == 0.0);
    }

    SUBCASE("property: the K1 loop settles from a perturbation within 20 s")
    {
        ClosedLoopSystem s = sys;
        s.initial_state = vec({0.05, -0.02, 0.03, 0.01});
        const int N = static_cast<int>(20.0 / s.reference_dt()) + 1;
        const Trace tr = s.run(ReferenceTrack{std::vector<double>(N, 0.0), std::vector<double>(N, 0.0)});
        CHECK_FALSE(tr.diverged);
        CHECK(tr.x.back().norm() < 1e-3);
    }

    SUBCASE("property: linear and nonlinear loops agree near the equilibrium")
    {
        SimRates r{0.001, 1, 1};
        ClosedLoopSystem s(pend, ctrl, r);
        s.initial_state = vec({4e-4, -3e-4, 6e-4, 5e-4});
        const Trace tr = s.run(ReferenceTrack{std::vector<double>(1001, 0.0), std::vector<double>(1001, 0.0)});
        const LinearModel cl =
            closed_loop_model(discretize_zoh(linearize(pend, Vec::Zero(4), 0.0), 0.001), ctrl);
        Vec x = s.initial_state;
        double err = 0.0;
        for (std::size_t k = 0; k < tr.size(); ++k) {
            err = std::max(err, (tr.x[k] - x).norm());
            x = cl.A * x;
        }
        CHECK(err < 1e-4);
    }

    SUBCASE("sinusoid tracking worsens for shorter periods")
    {
        double prev = 0.0;
        for (double T : {20.0, 10.0, 5.0}) {
            std::vector<double> pos;
            for (int k = 0; k < 2000; ++k) pos.push_back(2.5 * std::sin(2 * M_PI * k * sys.reference_dt() / T));
            const Trajectory traj = Trajectory::from_positions(sys.reference_dt(), pos);
            const Trace tr = simulate_closed_loop(sys, DesiredReference{}, traj);
            CHECK_FALSE(tr.diverged);
            double se = 0.0;
            for (std::size_t k = 333; k < tr.size(); ++k) se += std::pow(tr.y[k] - traj.pos[k], 2);
            const double rms = std::sqrt(se / static_cast<double>(tr.size() - 333));
            CHECK(rms > prev);
            prev = rms;
        }
    }

    SUBCASE("divergence is captured with a truncated trace")
    {
        LinearModel grow;
        grow.A = Mat::Constant(1, 1, 1.0);
        grow.B = Mat::Constant(1, 1, 1.0);
        grow.C = Mat::Constant(1, 1, 1.0);
        grow.D = Mat::Zero(1, 1);
        ClosedLoopSystem s(make_linear_plant(grow), {Eigen::RowVectorXd::Zero(1), 0, std::nullopt}, SimRates{});
        s.initial_state = vec({1.0});
        s.velocity_output.reset();
        const Trace tr = s.run(ReferenceTrack{std::vector<double>(1000, 0.0), std::vector<double>(1000, 0.0)});
        CHECK(tr.diverged);
        CHECK(tr.divergence_time == doctest::Approx(std::log(1e3)).epsilon(1e-3));
        CHECK(tr.size() < 1000);
        CHECK(tr.actuation.size() == tr.size());
    }

    SUBCASE("trace csv")
    {
        const Trace tr = sys.run(ReferenceTrack{{0.0, 0.1}, {0.0, 0.0}});
        std::ostringstream os;
        write_trace_csv(os, tr);
        const std::string s = os.str();
        CHECK(s.substr(0, s.find('\n')) == "t,x1,x2,x3,x4,u_ref_pos,u_ref_vel,actuation,y");
        CHECK(std::count(s.begin(), s.end(), '\n') == 3);
    }
}

TEST_CASE("reference filter injects the zero into the loop")
{
    // filter then loop equals the product transfer function
    const double dt = 1.0 / 7.0;
    const auto h = nmp_surrogate_axis(1.2, 0, dt);
    const auto f = zero_injection_filter(1.2, dt);
    std::vector<double> r(60, 0.0);
    for (std::size_t k = 5; k < r.size(); ++k) r[k] = std::sin(0.3 * k);
    const auto through = polylti::simulate(h, polylti::simulate(f, r));
    polylti::OnlineFilter of(f);
    std::vector<double> online;
    for (double v : r) online.push_back(of.step(v));
    const auto chained = polylti::simulate(h, online);
    for (std::size_t k = 0; k < r.size(); ++k) CHECK(std::abs(through[k] - chained[k]) < 1e-12);
}

TEST_CASE("transfer-function reference and baseline")
{
    const double dt = 0.1;
    const polylti::DiscreteTransferFunction h({0.5}, {-0.5, 1.0}, dt);
    const TransferFunctionBaseline base(h);
    std::vector<double> pos(80, 0.0);
    for (std::size_t k = 3; k < pos.size(); ++k) pos[k] = 1.0 - std::cos(0.1 * (k - 3.0));
    const Trajectory traj = Trajectory::from_positions(dt, pos);

    const TransferFunctionReference inv(polylti::exact_inverse(h), "exact");
    const Trace tr = simulate_closed_loop(base, inv, traj);
    for (std::size_t k = 0; k + 1 < tr.size(); ++k) CHECK(std::abs(tr.y[k] - pos[k]) < 1e-12);

    CHECK_THROWS_AS(TransferFunctionBaseline(polylti::exact_inverse(h)), ImproperSystem);
    CHECK_THROWS(simulate_closed_loop(base, DesiredReference{}, Trajectory::from_positions(0.2, pos)));
}
