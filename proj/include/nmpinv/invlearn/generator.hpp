#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <utility>
#include <vector>

#include "nmpinv/invlearn/dataset.hpp"
#include "nmpinv/invlearn/selection.hpp"
#include "nmpinv/mlp/network.hpp"
#include "nmpinv/mlp/normalize.hpp"
#include "nmpinv/mlp/train.hpp"
#include "nmpinv/plantsim/closed_loop.hpp"

namespace nmpinv::invlearn {

struct NetworkSpec {
    std::vector<int> hidden{5, 5};
    mlp::Activation activation = mlp::Activation::Tanh;
};

struct InverseTrainingOptions {
    BuildOptions build;
    mlp::TrainingConfig training;
    NetworkSpec network;
};

// Desired samples around the anchor. pos covers [k + window_begin, k + window_end];
// vel covers the velocity offsets; past_u holds u(k-1), u(k-2), ...
struct DesiredWindow {
    std::vector<double> pos;
    std::vector<double> vel;
    std::vector<double> past_u;
};

// Learned reference generator: selection + network + normalization, run at the
// reference rate in front of the baseline.
class ReferenceGenerator final : public plantsim::ReferenceSource {
public:
    ReferenceGenerator(InputSelection selection, mlp::FeedforwardNetwork net, mlp::NormStats input_stats,
                       mlp::NormStats output_stats, double sample_time, std::string name);

    // Position and (with a velocity channel) velocity reference at the anchor. Throws WindowLength.
    Eigen::VectorXd generate_reference(const DesiredWindow& window) const;
    // Static selections without a velocity channel: window is y_d(k + window_begin .. k + window_end).
    double generate_reference(const std::vector<double>& window) const;

    plantsim::ReferenceTrack generate(const plantsim::Trajectory& desired) const override;
    std::string name() const override { return name_; }

    // Network output in label units for raw (unnormalized) features.
    Eigen::VectorXd evaluate(const Eigen::VectorXd& raw_features) const;
    // Network output for all-zero features. Generated references subtract it so a desired
    // trajectory at rest maps to a reference at rest.
    const Eigen::VectorXd& rest_offset() const { return rest_; }

    // Bound on |u| when |y_d| <= box everywhere (static selections without velocity channel).
    double output_bound(double box) const;

    // For networks without hidden layers: label = coeffs . raw_features + intercept.
    std::pair<Eigen::VectorXd, double> affine_form() const;

    const InputSelection& selection() const { return sel_; }
    const mlp::FeedforwardNetwork& network() const { return net_; }
    const mlp::NormStats& input_stats() const { return in_; }
    const mlp::NormStats& output_stats() const { return out_; }
    double sample_time() const { return dt_; }

    nlohmann::json to_json() const;
    static ReferenceGenerator from_json(const nlohmann::json& j);

private:
    InputSelection sel_;
    mlp::FeedforwardNetwork net_;
    mlp::NormStats in_;
    mlp::NormStats out_;
    double dt_;
    std::string name_;
    Eigen::VectorXd rest_;
};

struct TrainedInverse {
    ReferenceGenerator generator;
    mlp::TrainingHistory history;
    std::size_t rows = 0;
};

TrainedInverse train_inverse(const InputSelection& selection, const std::vector<TrajectoryLog>& logs,
                             const InverseTrainingOptions& options, const std::string& name);

}  // namespace nmpinv::invlearn
