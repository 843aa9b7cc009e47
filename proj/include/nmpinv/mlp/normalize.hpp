#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <vector>

namespace nmpinv::mlp {

// Per-feature standardization with the population standard deviation. Features whose
// spread is below 1e-12 are passed through unchanged (mean 0, scale 1).
struct NormStats {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;
    std::vector<bool> passthrough;

    // rows are samples
    static NormStats fit(const Eigen::MatrixXd& data);
    static NormStats identity(int dim);

    int dim() const { return static_cast<int>(mean.size()); }
    Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
    Eigen::VectorXd invert(const Eigen::VectorXd& v) const;
    Eigen::MatrixXd apply_rows(const Eigen::MatrixXd& data) const;
    Eigen::MatrixXd invert_rows(const Eigen::MatrixXd& data) const;
};

nlohmann::json to_json(const NormStats& s);
NormStats norm_stats_from_json(const nlohmann::json& j);

}  // namespace nmpinv::mlp
