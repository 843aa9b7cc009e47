#include "nmpinv/mlp/normalize.hpp"

#include <cmath>

#include "nmpinv/errors.hpp"
#include "nmpinv/log.hpp"

namespace nmpinv::mlp {

NormStats NormStats::fit(const Eigen::MatrixXd& data)
{
    if (data.rows() == 0) throw std::invalid_argument("cannot fit normalization on an empty dataset");
    const auto d = data.cols();
    NormStats s;
    s.mean  = data.colwise().mean().transpose();
    s.scale = Eigen::VectorXd::Ones(d);
    s.passthrough.assign(d, false);
    for (Eigen::Index j = 0; j < d; ++j) {
        const double sd = std::sqrt((data.col(j).array() - s.mean[j]).square().mean());
        if (sd < 1e-12) {
            spdlog::warn("feature {} has spread {:.3g}; passing it through unnormalized", j, sd);
            s.mean[j]        = 0.0;
            s.passthrough[j] = true;
        } else {
            s.scale[j] = sd;
        }
    }
    return s;
}

NormStats NormStats::identity(int dim)
{
    NormStats s;
    s.mean  = Eigen::VectorXd::Zero(dim);
    s.scale = Eigen::VectorXd::Ones(dim);
    s.passthrough.assign(dim, true);
    return s;
}

Eigen::VectorXd NormStats::apply(const Eigen::VectorXd& v) const
{
    if (v.size() != mean.size()) throw DimensionMismatch("normalization dimension mismatch");
    return (v - mean).cwiseQuotient(scale);
}

Eigen::VectorXd NormStats::invert(const Eigen::VectorXd& v) const
{
    if (v.size() != mean.size()) throw DimensionMismatch("normalization dimension mismatch");
    return v.cwiseProduct(scale) + mean;
}

Eigen::MatrixXd NormStats::apply_rows(const Eigen::MatrixXd& data) const
{
    if (data.cols() != mean.size()) throw DimensionMismatch("normalization dimension mismatch");
    return (data.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

Eigen::MatrixXd NormStats::invert_rows(const Eigen::MatrixXd& data) const
{
    if (data.cols() != mean.size()) throw DimensionMismatch("normalization dimension mismatch");
    Eigen::MatrixXd out = data.array().rowwise() * scale.transpose().array();
    return out.rowwise() + mean.transpose();
}

nlohmann::json to_json(const NormStats& s)
{
    return {{"mean", std::vector<double>(s.mean.data(), s.mean.data() + s.mean.size())},
            {"std", std::vector<double>(s.scale.data(), s.scale.data() + s.scale.size())},
            {"passthrough", s.passthrough}};
}

NormStats norm_stats_from_json(const nlohmann::json& j)
{
    const auto mean = j.at("mean").get<std::vector<double>>();
    const auto sd   = j.at("std").get<std::vector<double>>();
    if (mean.size() != sd.size()) throw DimensionMismatch("norm stats mean/std lengths differ");
    NormStats s;
    s.mean  = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    s.scale = Eigen::Map<const Eigen::VectorXd>(sd.data(), static_cast<Eigen::Index>(sd.size()));
    s.passthrough = j.value("passthrough", std::vector<bool>(mean.size(), false));
    return s;
}

}  // namespace nmpinv::mlp
