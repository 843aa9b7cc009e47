#include "nmpinv/mlp/network.hpp"

#include <cmath>
#include <stdexcept>

#include "nmpinv/errors.hpp"
#include "nmpinv/random.hpp"

namespace nmpinv::mlp {

std::string to_string(Activation a) { return a == Activation::Tanh ? "tanh" : "relu"; }

Activation activation_from_string(const std::string& s)
{
    if (s == "tanh") return Activation::Tanh;
    if (s == "relu") return Activation::Relu;
    throw std::invalid_argument("unknown activation '" + s + "'");
}

FeedforwardNetwork::FeedforwardNetwork(std::vector<int> sizes, Activation activation)
    : sizes_(std::move(sizes)), act_(activation)
{
    if (sizes_.size() < 2) throw std::invalid_argument("a network needs at least input and output sizes");
    for (int s : sizes_)
        if (s < 1) throw std::invalid_argument("layer sizes must be >= 1");
    for (std::size_t l = 1; l < sizes_.size(); ++l) {
        weights_.push_back(Mat::Zero(sizes_[l], sizes_[l - 1]));
        biases_.push_back(Vec::Zero(sizes_[l]));
    }
}

namespace {

void activate(Mat& z, Activation a)
{
    if (a == Activation::Tanh)
        z = z.array().tanh();
    else
        z = z.cwiseMax(0.0);
}

}  // namespace

Vec FeedforwardNetwork::forward(const Vec& input) const
{
    if (input.size() != input_dim())
        throw DimensionMismatch("network expects " + std::to_string(input_dim()) + " inputs, got " +
                                std::to_string(input.size()));
    Mat a = input;
    for (int l = 0; l < layer_count(); ++l) {
        Mat z = weights_[l] * a;
        z.colwise() += biases_[l];
        if (l + 1 < layer_count()) activate(z, act_);
        a = std::move(z);
    }
    return a.col(0);
}

Mat FeedforwardNetwork::forward_batch(const Mat& inputs) const
{
    if (inputs.rows() != input_dim()) throw DimensionMismatch("batch has wrong input dimension");
    Mat a = inputs;
    for (int l = 0; l < layer_count(); ++l) {
        Mat z = weights_[l] * a;
        z.colwise() += biases_[l];
        if (l + 1 < layer_count()) activate(z, act_);
        a = std::move(z);
    }
    return a;
}

bool FeedforwardNetwork::all_finite() const
{
    for (int l = 0; l < layer_count(); ++l)
        if (!weights_[l].allFinite() || !biases_[l].allFinite()) return false;
    return true;
}

FeedforwardNetwork init_network(const std::vector<int>& sizes, Activation activation, std::uint64_t seed)
{
    FeedforwardNetwork net(sizes, activation);
    Rng rng(seed);
    for (int l = 0; l < net.layer_count(); ++l) {
        Mat& w              = net.weights()[l];
        const double fan_in  = static_cast<double>(w.cols());
        const double fan_out = static_cast<double>(w.rows());
        if (activation == Activation::Tanh) {
            const double lim = std::sqrt(6.0 / (fan_in + fan_out));
            for (Eigen::Index j = 0; j < w.cols(); ++j)
                for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = rng.uniform(-lim, lim);
        } else {
            const double sd = std::sqrt(2.0 / fan_in);
            for (Eigen::Index j = 0; j < w.cols(); ++j)
                for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = sd * rng.normal();
        }
    }
    return net;
}

Gradients backprop(const FeedforwardNetwork& net, const Mat& inputs, const Mat& targets)
{
    if (inputs.rows() != net.input_dim() || targets.rows() != net.output_dim() || inputs.cols() != targets.cols())
        throw DimensionMismatch("backprop batch shapes are inconsistent with the network");
    const int L        = net.layer_count();
    const double batch = static_cast<double>(inputs.cols());

    std::vector<Mat> acts;  // acts[0] = input, acts[l] = output of layer l
    acts.reserve(L + 1);
    acts.push_back(inputs);
    for (int l = 0; l < L; ++l) {
        Mat z = net.weights()[l] * acts.back();
        z.colwise() += net.biases()[l];
        if (l + 1 < L) activate(z, net.activation());
        acts.push_back(std::move(z));
    }

    Gradients g;
    g.weights.resize(L);
    g.biases.resize(L);
    Mat delta = acts[L] - targets;
    g.loss    = 0.5 * delta.squaredNorm() / batch;
    delta /= batch;
    for (int l = L - 1; l >= 0; --l) {
        g.weights[l] = delta * acts[l].transpose();
        g.biases[l]  = delta.rowwise().sum();
        if (l == 0) break;
        Mat back = net.weights()[l].transpose() * delta;
        if (net.activation() == Activation::Tanh)
            back.array() *= 1.0 - acts[l].array().square();
        else
            back.array() *= (acts[l].array() > 0.0).cast<double>();
        delta = std::move(back);
    }
    return g;
}

double loss(const FeedforwardNetwork& net, const Mat& inputs, const Mat& targets)
{
    if (inputs.cols() == 0) return 0.0;
    return 0.5 * (net.forward_batch(inputs) - targets).squaredNorm() / static_cast<double>(inputs.cols());
}

namespace {
double spectral_norm(const Mat& w)
{
    if (w.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(w);
    return svd.singularValues()(0);
}
}  // namespace

double output_bound_l2(const FeedforwardNetwork& net, double radius)
{
    double beta = radius;
    for (int l = 0; l < net.layer_count(); ++l) beta = spectral_norm(net.weights()[l]) * beta + net.biases()[l].norm();
    return beta;
}

double output_bound(const FeedforwardNetwork& net, double box)
{
    return output_bound_l2(net, box * std::sqrt(static_cast<double>(net.input_dim())));
}

double lipschitz_bound(const FeedforwardNetwork& net)
{
    double lip = 1.0;
    for (const Mat& w : net.weights()) lip *= spectral_norm(w);
    return lip;
}

nlohmann::json to_json(const FeedforwardNetwork& net)
{
    nlohmann::json weights = nlohmann::json::array();
    nlohmann::json biases  = nlohmann::json::array();
    for (int l = 0; l < net.layer_count(); ++l) {
        const Mat& w = net.weights()[l];
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            std::vector<double> row(w.cols());
            for (Eigen::Index j = 0; j < w.cols(); ++j) row[j] = w(i, j);
            rows.push_back(row);
        }
        weights.push_back(rows);
        const Vec& b = net.biases()[l];
        biases.push_back(std::vector<double>(b.data(), b.data() + b.size()));
    }
    return {{"sizes", net.sizes()}, {"activation", to_string(net.activation())}, {"weights", weights}, {"biases", biases}};
}

FeedforwardNetwork network_from_json(const nlohmann::json& j)
{
    FeedforwardNetwork net(j.at("sizes").get<std::vector<int>>(),
                           activation_from_string(j.at("activation").get<std::string>()));
    const auto& W = j.at("weights");
    const auto& B = j.at("biases");
    if (static_cast<int>(W.size()) != net.layer_count() || static_cast<int>(B.size()) != net.layer_count())
        throw DimensionMismatch("network JSON layer count does not match sizes");
    for (int l = 0; l < net.layer_count(); ++l) {
        Mat& w = net.weights()[l];
        if (static_cast<Eigen::Index>(W[l].size()) != w.rows()) throw DimensionMismatch("weight rows mismatch");
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            const auto row = W[l][i].get<std::vector<double>>();
            if (static_cast<Eigen::Index>(row.size()) != w.cols()) throw DimensionMismatch("weight cols mismatch");
            for (Eigen::Index c = 0; c < w.cols(); ++c) w(i, c) = row[c];
        }
        const auto b = B[l].get<std::vector<double>>();
        if (static_cast<Eigen::Index>(b.size()) != net.biases()[l].size()) throw DimensionMismatch("bias size mismatch");
        for (std::size_t i = 0; i < b.size(); ++i) net.biases()[l][static_cast<Eigen::Index>(i)] = b[i];
    }
    if (!net.all_finite()) throw std::invalid_argument("network JSON contains non-finite parameters");
    return net;
}

}  // namespace nmpinv::mlp
