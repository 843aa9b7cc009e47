#include "nmpinv/invlearn/generator.hpp"

#include <cmath>
#include <stdexcept>

#include "nmpinv/errors.hpp"
#include "nmpinv/log.hpp"

namespace nmpinv::invlearn {

ReferenceGenerator::ReferenceGenerator(InputSelection selection, mlp::FeedforwardNetwork net, mlp::NormStats input_stats,
                                       mlp::NormStats output_stats, double sample_time, std::string name)
    : sel_(selection), net_(std::move(net)), in_(std::move(input_stats)), out_(std::move(output_stats)),
      dt_(sample_time), name_(std::move(name))
{
    sel_.validate();
    if (net_.input_dim() != sel_.feature_count() || in_.dim() != sel_.feature_count())
        throw DimensionMismatch("network input does not match the selection's feature count");
    if (net_.output_dim() != sel_.label_count() || out_.dim() != sel_.label_count())
        throw DimensionMismatch("network output does not match the selection's label count");
    if (!(dt_ > 0.0)) throw std::invalid_argument("generator sample time must be positive");
    rest_ = evaluate(Eigen::VectorXd::Zero(sel_.feature_count()));
}

Eigen::VectorXd ReferenceGenerator::evaluate(const Eigen::VectorXd& raw) const
{
    return out_.invert(net_.forward(in_.apply(raw)));
}

Eigen::VectorXd ReferenceGenerator::generate_reference(const DesiredWindow& w) const
{
    const int b = sel_.window_begin();
    const int e = sel_.window_end();
    if (static_cast<int>(w.pos.size()) != e - b + 1)
        throw WindowLength("expected a desired window of " + std::to_string(e - b + 1) + " samples, got " +
                           std::to_string(w.pos.size()));
    const int vlen = sel_.velocity_channel ? sel_.n : 0;
    if (static_cast<int>(w.vel.size()) != vlen)
        throw WindowLength("expected " + std::to_string(vlen) + " desired velocity samples, got " +
                           std::to_string(w.vel.size()));
    const int past = static_cast<int>(sel_.reference_offsets().size());
    if (static_cast<int>(w.past_u.size()) < past)
        throw WindowLength("expected " + std::to_string(past) + " past references, got " + std::to_string(w.past_u.size()));

    // the anchor k sits at index -b of the position window and index 0 of the velocity window
    auto y = [&](int i) { return w.pos[static_cast<std::size_t>(i - b)]; };
    auto v = [&](int i) { return w.vel[static_cast<std::size_t>(i)]; };
    auto u = [&](int i) { return w.past_u[static_cast<std::size_t>(-i - 1)]; };
    const Eigen::VectorXd out = evaluate(sel_.features(0, y, v, u)) - rest_;
    Eigen::VectorXd ref(sel_.label_count());
    const double yd = (0 >= b && 0 <= e) ? y(0) : 0.0;
    ref[0] = sel_.reference_position(out, yd);
    if (sel_.velocity_channel) ref[1] = sel_.reference_velocity(out, w.vel.front());
    return ref;
}

double ReferenceGenerator::generate_reference(const std::vector<double>& window) const
{
    if (sel_.recurrent() || sel_.velocity_channel)
        throw std::logic_error("this selection needs past references or velocities; use the DesiredWindow overload");
    return generate_reference(DesiredWindow{window, {}, {}})[0];
}

plantsim::ReferenceTrack ReferenceGenerator::generate(const plantsim::Trajectory& desired) const
{
    if (std::abs(desired.dt - dt_) > 1e-9 * dt_) throw std::invalid_argument("trajectory sample time differs from the generator's");
    const int N = static_cast<int>(desired.size());
    plantsim::ReferenceTrack track;
    if (N == 0) return track;
    // outside the trajectory the desired signal is held at its first/last sample
    auto clampi = [N](int i) { return std::clamp(i, 0, N - 1); };
    auto yd     = [&](int i) { return desired.pos[clampi(i)]; };
    auto vd     = [&](int i) { return desired.vel[clampi(i)]; };
    track.pos.resize(N);
    if (sel_.velocity_channel) track.vel.resize(N);
    auto u = [&](int i) { return i < 0 ? yd(i) : track.pos[i]; };

    for (int k = 0; k < N; ++k) {
        const Eigen::VectorXd out = evaluate(sel_.features(k, yd, vd, u)) - rest_;
        track.pos[k]              = sel_.reference_position(out, yd(k));
        if (sel_.velocity_channel) track.vel[k] = sel_.reference_velocity(out, vd(k));
    }
    if (!sel_.velocity_channel) track.vel = plantsim::central_difference(track.pos, dt_);
    return track;
}

double ReferenceGenerator::output_bound(double box) const
{
    if (sel_.recurrent() || sel_.velocity_channel)
        throw std::logic_error("output bound is defined for static position-only selections");
    const bool rel     = sel_.encoding == Encoding::Relative;
    const double fbox  = rel ? 2.0 * box : box;
    double r2 = 0.0;
    for (int i = 0; i < in_.dim(); ++i) {
        const double c = (fbox + std::abs(in_.mean[i])) / in_.scale[i];
        r2 += c * c;
    }
    const double beta = mlp::output_bound_l2(net_, std::sqrt(r2));
    return std::abs(out_.mean[0]) + out_.scale[0] * beta + std::abs(rest_[0]) + (rel ? box : 0.0);
}

std::pair<Eigen::VectorXd, double> ReferenceGenerator::affine_form() const
{
    if (net_.layer_count() != 1 || net_.output_dim() != 1) throw std::logic_error("affine form needs a single-layer scalar network");
    const Eigen::RowVectorXd w = net_.weights()[0].row(0);
    Eigen::VectorXd coeffs     = out_.scale[0] * w.transpose().cwiseQuotient(in_.scale);
    const double intercept     = out_.mean[0] + out_.scale[0] * net_.biases()[0][0] - coeffs.dot(in_.mean);
    return {coeffs, intercept};
}

nlohmann::json ReferenceGenerator::to_json() const
{
    nlohmann::json net = mlp::to_json(net_);
    net["norm_stats"]  = {{"input", mlp::to_json(in_)}, {"output", mlp::to_json(out_)}};
    return {{"name", name_}, {"selection", invlearn::to_json(sel_)}, {"sample_time", dt_}, {"network", net},
            {"feature_names", sel_.feature_names()}, {"label_names", sel_.label_names()}};
}

ReferenceGenerator ReferenceGenerator::from_json(const nlohmann::json& j)
{
    const auto& net = j.at("network");
    return ReferenceGenerator(selection_from_json(j.at("selection")), mlp::network_from_json(net),
                              mlp::norm_stats_from_json(net.at("norm_stats").at("input")),
                              mlp::norm_stats_from_json(net.at("norm_stats").at("output")), j.at("sample_time").get<double>(),
                              j.value("name", "generator"));
}

TrainedInverse train_inverse(const InputSelection& selection, const std::vector<TrajectoryLog>& logs,
                             const InverseTrainingOptions& options, const std::string& name)
{
    const TrainingDataset ds = build_features(selection, logs, options.build);
    mlp::NormStats in        = mlp::NormStats::fit(ds.features);
    mlp::NormStats out       = mlp::NormStats::fit(ds.labels);

    std::vector<int> sizes{selection.feature_count()};
    sizes.insert(sizes.end(), options.network.hidden.begin(), options.network.hidden.end());
    sizes.push_back(selection.label_count());
    mlp::FeedforwardNetwork net =
        mlp::init_network(sizes, options.network.activation, options.training.seed ^ 0x9e3779b97f4a7c15ULL);

    mlp::TrainingHistory hist = mlp::train(net, in.apply_rows(ds.features), out.apply_rows(ds.labels), options.training);
    spdlog::info("trained {} on {} rows: validation loss {:.4g} -> {:.4g} (best epoch {} of {})", name, ds.rows(),
                 hist.initial_validation_loss, hist.best_validation_loss, hist.best_epoch, hist.epochs_run);
    return {ReferenceGenerator(selection, std::move(net), std::move(in), std::move(out), ds.sample_time, name),
            std::move(hist), ds.rows()};
}

}  // namespace nmpinv::invlearn
