#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nmpinv/invlearn/selection.hpp"
#include "nmpinv/plantsim/closed_loop.hpp"

namespace nmpinv::invlearn {

using plantsim::Trajectory;

// A sin(2 pi t / T) for every (A, T) pair, sampled every dt for `duration` seconds.
std::vector<Trajectory> generate_training_trajectories(const std::vector<double>& amplitudes,
                                                       const std::vector<double>& periods, double duration, double dt);

// Logged reference (what was sent to the baseline) and measured output at the reference rate.
struct TrajectoryLog {
    int id    = 0;
    double dt = 0.0;
    std::vector<double> u_pos;
    std::vector<double> u_vel;
    std::vector<double> y_pos;
    std::vector<double> y_vel;

    std::size_t size() const { return y_pos.size(); }
};

// Drives the baseline with each trajectory as its reference. Throws BaselineDiverged.
std::vector<TrajectoryLog> collect_baseline_data(const plantsim::BaselineSystem& baseline,
                                                 const std::vector<Trajectory>& trajectories);

struct BuildOptions {
    double skip_seconds     = 2.0;
    std::size_t target_rows = 20000;  // 0 keeps every admissible row
    std::uint64_t seed      = 0;
    // When > 0, only anchors whose logged reference stays constant over k..k+span are kept.
    int held_reference_span = 0;
};

struct TrainingDataset {
    Eigen::MatrixXd features;  // rows are samples
    Eigen::MatrixXd labels;
    std::vector<std::string> feature_names;
    std::vector<std::string> label_names;
    std::vector<int> source_ids;
    std::vector<int> anchors;  // k of each row within its log
    double sample_time = 0.0;

    std::size_t rows() const { return static_cast<std::size_t>(features.rows()); }
};

// One row per admissible anchor; subsampled with equal counts per log when the total
// exceeds target_rows. Throws LogTooShort.
TrainingDataset build_features(const InputSelection& selection, const std::vector<TrajectoryLog>& logs,
                               const BuildOptions& options = {});

void write_dataset_csv(std::ostream& os, const TrainingDataset& ds);

}  // namespace nmpinv::invlearn
