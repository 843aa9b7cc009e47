#include "nmpinv/invlearn/dataset.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "nmpinv/errors.hpp"
#include "nmpinv/log.hpp"
#include "nmpinv/random.hpp"

namespace nmpinv::invlearn {

std::vector<Trajectory> generate_training_trajectories(const std::vector<double>& amplitudes,
                                                       const std::vector<double>& periods, double duration, double dt)
{
    if (amplitudes.empty() || periods.empty()) throw std::invalid_argument("amplitude and period sets must be non-empty");
    if (!(duration > 0.0) || !(dt > 0.0)) throw std::invalid_argument("duration and dt must be positive");
    const auto steps = static_cast<std::size_t>(std::llround(duration / dt));
    std::vector<Trajectory> out;
    for (double A : amplitudes) {
        for (double T : periods) {
            if (!(T > 0.0)) throw std::invalid_argument("periods must be positive");
            std::vector<double> p(steps);
            const double w = 2.0 * std::numbers::pi / T;
            for (std::size_t k = 0; k < steps; ++k) p[k] = A * std::sin(w * dt * static_cast<double>(k));
            out.push_back(Trajectory::from_positions(dt, std::move(p)));
        }
    }
    return out;
}

std::vector<TrajectoryLog> collect_baseline_data(const plantsim::BaselineSystem& baseline,
                                                 const std::vector<Trajectory>& trajectories)
{
    std::vector<TrajectoryLog> logs;
    plantsim::DesiredReference direct;
    int id = 0;
    for (const Trajectory& traj : trajectories) {
        const plantsim::Trace tr = plantsim::simulate_closed_loop(baseline, direct, traj);
        if (tr.diverged)
            throw BaselineDiverged("baseline diverged on training trajectory " + std::to_string(id) + " at t = " +
                                   std::to_string(tr.divergence_time) + " s");
        logs.push_back({id, traj.dt, tr.ref_pos, tr.ref_vel, tr.y, tr.y_vel});
        ++id;
    }
    return logs;
}

namespace {

bool held(const TrajectoryLog& log, int k, int span)
{
    const double u0 = log.u_pos[k];
    for (int i = 1; i <= span; ++i)
        if (std::abs(log.u_pos[k + i] - u0) > 1e-12 * (1.0 + std::abs(u0))) return false;
    return true;
}

}  // namespace

TrainingDataset build_features(const InputSelection& sel, const std::vector<TrajectoryLog>& logs,
                               const BuildOptions& opt)
{
    sel.validate();
    if (logs.empty()) throw LogTooShort("no logs to build features from");

    const int back  = sel.lookback();
    const int ahead = std::max(sel.lookahead(), opt.held_reference_span);

    // admissible anchors per log
    std::vector<std::vector<int>> anchors(logs.size());
    for (std::size_t li = 0; li < logs.size(); ++li) {
        const TrajectoryLog& log = logs[li];
        const int len            = static_cast<int>(log.size());
        if (log.u_pos.size() != log.size() || log.u_vel.size() != log.size() || log.y_vel.size() != log.size())
            throw DimensionMismatch("log " + std::to_string(log.id) + " has inconsistent channel lengths");
        if (len < back + ahead + 1)
            throw LogTooShort("log " + std::to_string(log.id) + " has " + std::to_string(len) +
                              " samples; the selection needs " + std::to_string(back + ahead + 1));
        const int skip  = static_cast<int>(std::ceil(opt.skip_seconds / log.dt - 1e-9));
        const int first = std::max(back, skip);
        for (int k = first; k + ahead < len; ++k)
            if (opt.held_reference_span <= 0 || held(log, k, opt.held_reference_span)) anchors[li].push_back(k);
    }

    std::size_t total = 0;
    for (const auto& a : anchors) total += a.size();
    if (total == 0) throw LogTooShort("no admissible rows after dropping the first " + std::to_string(opt.skip_seconds) + " s");

    if (opt.target_rows > 0 && total > opt.target_rows) {
        const std::size_t quota = opt.target_rows / logs.size();
        Rng rng(opt.seed);
        for (auto& a : anchors) {
            if (a.size() <= quota) continue;
            rng.shuffle(a);
            a.resize(quota);
            std::sort(a.begin(), a.end());
        }
        total = 0;
        for (const auto& a : anchors) total += a.size();
    }

    TrainingDataset ds;
    ds.features.resize(static_cast<Eigen::Index>(total), sel.feature_count());
    ds.labels.resize(static_cast<Eigen::Index>(total), sel.label_count());
    ds.feature_names = sel.feature_names();
    ds.label_names   = sel.label_names();
    ds.sample_time   = logs.front().dt;
    Eigen::Index row = 0;
    for (std::size_t li = 0; li < logs.size(); ++li) {
        const TrajectoryLog& log = logs[li];
        auto y = [&](int i) { return log.y_pos[i]; };
        auto v = [&](int i) { return log.y_vel[i]; };
        auto u = [&](int i) { return log.u_pos[i]; };
        for (int k : anchors[li]) {
            ds.features.row(row) = sel.features(k, y, v, u).transpose();
            ds.labels.row(row)   = sel.labels(log.u_pos[k], log.u_vel[k], log.y_pos[k], log.y_vel[k]).transpose();
            ds.source_ids.push_back(log.id);
            ds.anchors.push_back(k);
            ++row;
        }
    }
    if (!ds.features.allFinite() || !ds.labels.allFinite()) throw std::runtime_error("non-finite entries in training data");
    spdlog::debug("built {} rows with {} features from {} logs", total, sel.feature_count(), logs.size());
    return ds;
}

void write_dataset_csv(std::ostream& os, const TrainingDataset& ds)
{
    os << "source,k";
    for (const auto& n : ds.feature_names) os << ',' << n;
    for (const auto& n : ds.label_names) os << ',' << n;
    os << '\n';
    const auto old = os.precision(12);
    for (Eigen::Index i = 0; i < ds.features.rows(); ++i) {
        os << ds.source_ids[i] << ',' << ds.anchors[i];
        for (Eigen::Index j = 0; j < ds.features.cols(); ++j) os << ',' << ds.features(i, j);
        for (Eigen::Index j = 0; j < ds.labels.cols(); ++j) os << ',' << ds.labels(i, j);
        os << '\n';
    }
    os.precision(old);
}

}  // namespace nmpinv::invlearn
