#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "../common/random_systems.hpp"
#include "../common/signals.hpp"
#include "nmpinv/errors.hpp"
#include "nmpinv/invlearn/dataset.hpp"
#include "nmpinv/invlearn/generator.hpp"
#include "nmpinv/invlearn/diagnostics.hpp"
#include "nmpinv/invlearn/selection.hpp"
#include "nmpinv/plantsim/closed_loop.hpp"

using namespace nmpinv;
using namespace nmpinv::invlearn;
using plantsim::Trajectory;
using polylti::DiscreteTransferFunction;
using polylti::Polynomial;

namespace {

constexpr double kDt = 0.1;

TrajectoryLog ramp_log(int len)
{
    TrajectoryLog log;
    log.dt = kDt;
    for (int k = 0; k < len; ++k) {
        log.y_pos.push_back(k);
        log.y_vel.push_back(1000.0 + k);
        log.u_pos.push_back(-k);
        log.u_vel.push_back(-1000.0 - k);
    }
    return log;
}

std::vector<Trajectory> multisine_set(Rng& rng, int count, double seconds, double amp)
{
    std::vector<Trajectory> out;
    const auto n = static_cast<std::size_t>(seconds / kDt);
    for (int i = 0; i < count; ++i) out.push_back(Trajectory::from_positions(kDt, testing::multisine(rng, n, kDt, 8, 0.5, 8.0, amp)));
    return out;
}

InverseTrainingOptions linear_options(std::uint64_t seed)
{
    InverseTrainingOptions o;
    o.network.hidden.clear();
    o.build.target_rows  = 0;
    o.training.seed      = seed;
    o.training.epochs    = 300;
    o.training.learning_rate = 1e-2;
    o.training.patience  = 300;
    return o;
}

double relative_error(const Eigen::VectorXd& got, const Eigen::VectorXd& want) { return (got - want).norm() / want.norm(); }

}  // namespace

TEST_CASE("training trajectory sets")
{
    const auto a = generate_training_trajectories({0.5, 1.0, 1.5, 2.0, 2.5, 3.0}, {5, 10, 15, 20, 25}, 50.0, 0.015);
    CHECK(a.size() == 30);
    const auto b = generate_training_trajectories({0.04, 0.06, 0.08}, {5, 6, 7, 8, 9, 10}, 20.0, 1.0 / 70.0);
    CHECK(b.size() == 18);
    const auto c = generate_training_trajectories({1.0}, {10.0}, 10.0, 0.015);
    REQUIRE(c.size() == 1);
    double peak = 0.0;
    for (double v : c[0].pos) peak = std::max(peak, std::abs(v));
    CHECK(peak == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(peak <= 1.0);
    CHECK(c[0].size() == 667);
    CHECK_THROWS(generate_training_trajectories({}, {1.0}, 1.0, 0.1));
}

TEST_CASE("baseline data collection")
{
    const DiscreteTransferFunction h({0.3}, {-0.7, 1.0}, 1.0 / 7.0);
    const plantsim::TransferFunctionBaseline base(h);

    const auto zero = collect_baseline_data(base, {Trajectory::from_positions(h.sample_time(), std::vector<double>(50, 0.0))});
    REQUIRE(zero.size() == 1);
    for (std::size_t k = 0; k < zero[0].size(); ++k) {
        CHECK(zero[0].u_pos[k] == 0.0);
        CHECK(zero[0].y_pos[k] == 0.0);
    }

    const auto run = generate_training_trajectories({1.0}, {20.0}, 400.0, 1.0 / 7.0);
    const auto logs = collect_baseline_data(base, run);
    CHECK(logs[0].size() == 2800);
    double peak = 0.0;
    for (double y : logs[0].y_pos) peak = std::max(peak, std::abs(y));
    CHECK(peak <= 1.0 + 1e-9);

    const DiscreteTransferFunction unstable({1.0}, {-1.5, 1.0}, 1.0 / 7.0);
    CHECK_THROWS_AS(collect_baseline_data(plantsim::TransferFunctionBaseline(unstable), run), BaselineDiverged);
}

TEST_CASE("input selections")
{
    const auto approx = InputSelection::approx_inverse(2);
    CHECK(approx.feature_names() == std::vector<std::string>{"y(k)", "y(k+1)", "y(k+2)"});
    const auto exact = InputSelection::exact_inverse(2, 1);
    CHECK(exact.feature_names() == std::vector<std::string>{"y(k-1)", "y(k)", "y(k+1)", "u(k-1)"});
    CHECK(exact.label_names() == std::vector<std::string>{"u(k)"});
    CHECK(exact.recurrent());
    const auto aug = InputSelection::augmented_past(2, 1);
    CHECK(aug.feature_names() == std::vector<std::string>{"y(k)", "y(k+1)", "y(k+2)", "u(k-1)"});
    CHECK(InputSelection::naive(3).feature_names() == std::vector<std::string>{"y(k+3)"});

    auto rel = InputSelection::approx_inverse(3);
    rel.encoding         = Encoding::Relative;
    rel.velocity_channel = true;
    CHECK(rel.feature_names() ==
          std::vector<std::string>{"y(k+1)-y(k)", "y(k+2)-y(k)", "y(k+3)-y(k)", "v(k+1)-v(k)", "v(k+2)-v(k)"});
    CHECK(rel.label_names() == std::vector<std::string>{"u(k)-y(k)", "u_vel(k)-v(k)"});

    for (const auto& s : {approx, exact, aug, rel}) {
        const InputSelection back = selection_from_json(to_json(s));
        CHECK(back.feature_names() == s.feature_names());
        CHECK(back.label_names() == s.label_names());
    }
    CHECK_THROWS(InputSelection::exact_inverse(1, 2).validate());
}

TEST_CASE("feature construction")
{
    BuildOptions all;
    all.skip_seconds = 0.0;
    all.target_rows  = 0;

    const TrainingDataset a = build_features(InputSelection::approx_inverse(2), {ramp_log(100)}, all);
    CHECK(a.rows() == 98);
    CHECK(a.features.row(0) == Eigen::RowVector3d(0, 1, 2));
    CHECK(a.labels(5, 0) == -5.0);
    CHECK(a.sample_time == kDt);

    const TrainingDataset e = build_features(InputSelection::exact_inverse(2, 1), {ramp_log(100)}, all);
    CHECK(e.rows() == 98);
    CHECK(e.anchors.front() == 1);
    CHECK(e.features.row(0) == Eigen::RowVector4d(0, 1, 2, -0.0));
    CHECK(e.labels(0, 0) == -1.0);

    const TrainingDataset p = build_features(InputSelection::augmented_past(2, 1), {ramp_log(100)}, all);
    CHECK(p.features.row(0) == Eigen::RowVector4d(1, 2, 3, 0));
    CHECK(p.labels(0, 0) == -1.0);

    auto rs = InputSelection::approx_inverse(2);
    rs.encoding         = Encoding::Relative;
    rs.velocity_channel = true;
    const TrainingDataset r = build_features(rs, {ramp_log(100)}, all);
    // y(k+i)-y(k) = i, v(k+1)-v(k) = 1; labels u-y = -2k, u_vel-v = -2000-2k
    CHECK(r.features.row(7) == Eigen::RowVector3d(1, 2, 1));
    CHECK(r.labels(7, 0) == -14.0);
    CHECK(r.labels(7, 1) == -2014.0);

    BuildOptions skip = all;
    skip.skip_seconds = 2.0;
    CHECK(build_features(InputSelection::approx_inverse(2), {ramp_log(100)}, skip).rows() == 78);

    BuildOptions sub = all;
    sub.target_rows = 60;
    sub.seed        = 4;
    TrajectoryLog second = ramp_log(100);
    second.id = 1;
    const TrainingDataset s = build_features(InputSelection::approx_inverse(2), {ramp_log(100), second}, sub);
    CHECK(s.rows() == 60);
    CHECK(std::count(s.source_ids.begin(), s.source_ids.end(), 0) == 30);
    CHECK(std::is_sorted(s.anchors.begin(), s.anchors.begin() + 30));
    const TrainingDataset s2 = build_features(InputSelection::approx_inverse(2), {ramp_log(100), second}, sub);
    CHECK(s.anchors == s2.anchors);

    CHECK_THROWS_AS(build_features(InputSelection::approx_inverse(5), {ramp_log(4)}, all), LogTooShort);
    CHECK_THROWS_AS(build_features(InputSelection::approx_inverse(2), {ramp_log(10)}, skip), LogTooShort);

    std::ostringstream os;
    write_dataset_csv(os, e);
    CHECK(os.str().substr(0, os.str().find('\n')) == "source,k,y(k-1),y(k),y(k+1),u(k-1),u(k)");
}

TEST_CASE("property: approximate-inverse features never contain references")
{
    for (int n = 0; n <= 8; ++n) {
        for (Encoding enc : {Encoding::Absolute, Encoding::Relative}) {
            auto s     = InputSelection::approx_inverse(n);
            s.encoding = enc;
            if (s.feature_count() == 0) continue;
            for (const auto& name : s.feature_names()) CHECK(name.find("u(") == std::string::npos);
            CHECK_FALSE(s.recurrent());
        }
    }
    for (int n = 1; n <= 6; ++n)
        for (int r = 0; r < n; ++r) {
            const auto names = InputSelection::exact_inverse(n, r).feature_names();
            CHECK(std::count_if(names.begin(), names.end(), [](const auto& x) { return x[0] == 'u'; }) == n - r);
        }
}

TEST_CASE("exact-inverse learning recovers the analytic coefficients")
{
    // 0.8 (z - 0.4) / ((z - 0.5)(z - 0.7)): n = 2, r = 1
    const Polynomial num = Polynomial::from_roots({0.4}, 0.8);
    const Polynomial den = Polynomial::from_roots({0.5, 0.7});
    const DiscreteTransferFunction h(num, den, kDt);
    const plantsim::TransferFunctionBaseline base(h);
    Rng rng(8);
    // broadband excitation keeps the lagged features from being nearly collinear
    std::vector<Trajectory> stairs;
    for (int i = 0; i < 10; ++i)
        stairs.push_back(Trajectory::from_positions(kDt, testing::staircase(rng, 600, 1, 4, 0.5)));
    const auto logs = collect_baseline_data(base, stairs);

    const auto sel = InputSelection::exact_inverse(2, 1);
    const TrainedInverse t = train_inverse(sel, logs, linear_options(3), "m1");
    const auto [coeffs, intercept] = t.generator.affine_form();
    Eigen::VectorXd want(4);
    const double lead = num.leading();
    want << den[0] / lead, den[1] / lead, den[2] / lead, -num[0] / lead;
    CHECK((coeffs - want).cwiseAbs().maxCoeff() < 1e-3);
    CHECK(std::abs(intercept) < 1e-3);

    // run recurrently in front of the baseline, it tracks
    std::vector<double> pos(300, 0.0);
    for (std::size_t k = 10; k < pos.size(); ++k) pos[k] = 0.4 * (1 - std::cos(0.05 * (k - 10.0)));
    const Trajectory traj = Trajectory::from_positions(kDt, pos);
    const plantsim::Trace tr = plantsim::simulate_closed_loop(base, t.generator, traj);
    double err = 0.0;
    for (std::size_t k = 20; k + 1 < tr.size(); ++k) err = std::max(err, std::abs(tr.y[k] - pos[k]));
    CHECK(err < 1e-2);

    const TrainedInverse again = train_inverse(sel, logs, linear_options(3), "m1");
    CHECK(again.generator.to_json().dump() == t.generator.to_json().dump());
}

TEST_CASE("approximate-inverse learning on an NMP system matches D(z)/N(1)")
{
    // 0.5 (z - 1.4) / ((z - 0.6)(z - 0.2)(z + 0.3)): n = 3, r = 2
    const Polynomial num = Polynomial::from_roots({1.4}, 0.5);
    const Polynomial den = Polynomial::from_roots({0.6, 0.2, -0.3});
    const DiscreteTransferFunction h(num, den, kDt);
    const plantsim::TransferFunctionBaseline base(h);
    Rng rng(12);
    std::vector<Trajectory> stairs;
    for (int i = 0; i < 10; ++i)
        stairs.push_back(Trajectory::from_positions(kDt, testing::staircase(rng, 600, 2, 8, 1.0)));
    const auto logs = collect_baseline_data(base, stairs);

    const auto sel = InputSelection::approx_inverse(3);
    InverseTrainingOptions opt = linear_options(5);
    opt.build.held_reference_span = 1;
    const TrainedInverse t = train_inverse(sel, logs, opt, "m3");
    const auto [coeffs, intercept] = t.generator.affine_form();

    const DiscreteTransferFunction naive = polylti::naive_approx_inverse(h);
    Eigen::VectorXd want(4);
    for (int i = 0; i <= 3; ++i) want[i] = naive.num()[i] / naive.den()[0];
    CHECK(relative_error(coeffs, want) < 0.05);
    CHECK(std::abs(intercept) < 0.05 * want.norm());
}

TEST_CASE("reference generator")
{
    const DiscreteTransferFunction h(Polynomial::from_roots({1.3}, -0.4), Polynomial::from_roots({0.5, 0.3}), kDt);
    const plantsim::TransferFunctionBaseline base(h);
    Rng rng(21);
    const auto logs = collect_baseline_data(base, multisine_set(rng, 6, 60.0, 0.5));
    InverseTrainingOptions opt;
    opt.training.epochs = 40;
    opt.training.seed   = 2;
    const auto sel = InputSelection::approx_inverse(2);
    const TrainedInverse t = train_inverse(sel, logs, opt, "m3");
    const ReferenceGenerator& g = t.generator;

    SUBCASE("window length is enforced")
    {
        CHECK_THROWS_AS(g.generate_reference(std::vector<double>{0.0, 0.0}), WindowLength);
        CHECK_NOTHROW(g.generate_reference(std::vector<double>{0.0, 0.0, 0.0}));
    }

    SUBCASE("zero window on zero-mean data gives nearly zero")
    {
        double range = 0.0;
        for (const auto& log : logs)
            for (double u : log.u_pos) range = std::max(range, std::abs(u));
        CHECK(std::abs(g.generate_reference(std::vector<double>{0.0, 0.0, 0.0})) < 0.05 * range);
    }

    SUBCASE("windows from training data stay inside the label range")
    {
        double lo = INFINITY, hi = -INFINITY;
        for (const auto& log : logs)
            for (double u : log.u_pos) lo = std::min(lo, u), hi = std::max(hi, u);
        const double pad = 0.1 * (hi - lo);
        const auto& y = logs[0].y_pos;
        for (std::size_t k = 20; k + 2 < y.size(); k += 7) {
            const double u = g.generate_reference(std::vector<double>{y[k], y[k + 1], y[k + 2]});
            CHECK(u >= lo - pad);
            CHECK(u <= hi + pad);
        }
    }

    SUBCASE("json round trip reproduces outputs")
    {
        const ReferenceGenerator back = ReferenceGenerator::from_json(nlohmann::json::parse(g.to_json().dump()));
        const Trajectory traj = Trajectory::from_positions(kDt, testing::multisine(rng, 200, kDt, 3, 2.0, 6.0, 0.3));
        CHECK(back.generate(traj).pos == g.generate(traj).pos);
        CHECK(g.to_json().at("feature_names") == nlohmann::json(sel.feature_names()));
    }

    SUBCASE("property: bounded desired trajectories give bounded references and outputs")
    {
        // |y| <= ||h||_1 sup|u| for a stable LTI system at rest
        const auto ir = polylti::impulse_response(h, 400);
        double l1 = 0.0;
        for (double v : ir) l1 += std::abs(v);
        for (int trial = 0; trial < 20; ++trial) {
            const double B = rng.uniform(0.1, 3.0);
            std::vector<double> yd(200);
            for (double& v : yd) v = rng.uniform(-B, B);
            const Trajectory traj = Trajectory::from_positions(kDt, yd);
            const double ub = g.output_bound(B);
            const plantsim::ReferenceTrack ref = g.generate(traj);
            for (double u : ref.pos) CHECK(std::abs(u) <= ub);
            const plantsim::Trace tr = base.run(ref);
            CHECK_FALSE(tr.diverged);
            for (double y : tr.y) CHECK(std::abs(y) <= l1 * ub);
        }
    }
}

TEST_CASE("relative velocity-channel generator")
{
    const DiscreteTransferFunction h(Polynomial::from_roots({1.2}, -1.0), Polynomial::from_roots({0.6, 0.6}), kDt);
    const plantsim::TransferFunctionBaseline base(h);
    Rng rng(5);
    const auto logs = collect_baseline_data(base, multisine_set(rng, 4, 40.0, 0.2));
    auto sel             = InputSelection::approx_inverse(3);
    sel.encoding         = Encoding::Relative;
    sel.velocity_channel = true;
    InverseTrainingOptions opt;
    opt.training.epochs = 5;
    const TrainedInverse t = train_inverse(sel, logs, opt, "rel");
    DesiredWindow w{{0.1, 0.1, 0.1, 0.1}, {0.0, 0.0, 0.0}, {}};
    const Eigen::VectorXd ref = t.generator.generate_reference(w);
    CHECK(ref.size() == 2);
    // shifting the whole window shifts the position reference by the same amount
    DesiredWindow up{{1.1, 1.1, 1.1, 1.1}, {0.0, 0.0, 0.0}, {}};
    CHECK(t.generator.generate_reference(up)[0] - ref[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(t.generator.generate_reference(DesiredWindow{{0.1, 0.1, 0.1, 0.1}, {0.0}, {}}), WindowLength);
    const Trajectory traj = Trajectory::from_positions(kDt, testing::multisine(rng, 100, kDt, 3, 2.0, 6.0, 0.2));
    const auto track = t.generator.generate(traj);
    CHECK(track.vel.size() == traj.size());
}

TEST_CASE("Taylor correlation bound")
{
    CHECK(taylor_correlation_bound(2.0, 10.0, 0.015, 0) == 0.0);
    CHECK(taylor_correlation_bound(1.0, 10.0, 0.015, 1) == doctest::Approx(std::exp(2 * std::numbers::pi * 0.015 / 10) - 1));
    CHECK(taylor_correlation_bound(1.0, 10.0, 0.015, 1) == doctest::Approx(0.009469).epsilon(1e-4));

    for (double A : {0.5, 1.0, 3.0})
        for (double T : {5.0, 10.0, 25.0})
            for (int p : {1, 2, 3}) {
                double gap = 0.0;
                for (int k = 0; k < static_cast<int>(T / 0.015) + 10; ++k)
                    gap = std::max(gap, std::abs(A * std::sin(2 * std::numbers::pi * (k + p) * 0.015 / T) -
                                                 A * std::sin(2 * std::numbers::pi * k * 0.015 / T)));
                CHECK(gap <= taylor_correlation_bound(A, T, 0.015, p));
            }
}

TEST_CASE("property: the one-step gap shrinks linearly with the sample time")
{
    auto gap = [](double dt) {
        const double T = 10.0;
        double g = 0.0;
        for (int k = 0; k < static_cast<int>(T / dt) + 2; ++k)
            g = std::max(g, std::abs(std::sin(2 * std::numbers::pi * (k + 1) * dt / T) - std::sin(2 * std::numbers::pi * k * dt / T)));
        return g;
    };
    const double g1 = gap(0.06), g2 = gap(0.03), g3 = gap(0.015);
    CHECK(g1 / g2 == doctest::Approx(2.0).epsilon(0.01));
    CHECK(g2 / g3 == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("property: single-sinusoid approximate-inverse data admit a function fit")
{
    const DiscreteTransferFunction h(Polynomial::from_roots({1.5}, 0.5), Polynomial::from_roots({0.3, 0.4}), kDt);
    const plantsim::TransferFunctionBaseline base(h);
    for (double A : {0.5, 2.0}) {
        const auto logs = collect_baseline_data(base, generate_training_trajectories({A}, {10.0}, 60.0, kDt));
        BuildOptions opt;
        opt.target_rows = 0;
        const TrainingDataset ds = build_features(InputSelection::approx_inverse(2), logs, opt);
        CHECK(ds.rows() > 500);
        CHECK(max_label_spread(ds, 1e-6) < 1e-3 * A);
    }

    TrainingDataset clash;
    clash.features = Eigen::MatrixXd::Zero(2, 1);
    clash.labels.resize(2, 1);
    clash.labels << 1.0, 3.0;
    CHECK(max_label_spread(clash) == 2.0);
}
