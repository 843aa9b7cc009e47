#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace nmpinv::mlp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class Activation { Tanh, Relu };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

// Hidden layers use the activation, the output layer is linear. sizes = [N0, ..., NL];
// two entries give a purely affine map.
class FeedforwardNetwork {
public:
    FeedforwardNetwork(std::vector<int> sizes, Activation activation);  // zero parameters

    const std::vector<int>& sizes() const { return sizes_; }
    Activation activation() const { return act_; }
    int input_dim() const { return sizes_.front(); }
    int output_dim() const { return sizes_.back(); }
    int layer_count() const { return static_cast<int>(weights_.size()); }

    std::vector<Mat>& weights() { return weights_; }
    const std::vector<Mat>& weights() const { return weights_; }
    std::vector<Vec>& biases() { return biases_; }
    const std::vector<Vec>& biases() const { return biases_; }

    Vec forward(const Vec& input) const;
    // columns are samples
    Mat forward_batch(const Mat& inputs) const;

    bool all_finite() const;

private:
    std::vector<int> sizes_;
    Activation act_;
    std::vector<Mat> weights_;
    std::vector<Vec> biases_;
};

// Xavier-uniform for tanh, He-normal for relu; biases start at zero.
FeedforwardNetwork init_network(const std::vector<int>& sizes, Activation activation, std::uint64_t seed);

struct Gradients {
    std::vector<Mat> weights;
    std::vector<Vec> biases;
    double loss = 0.0;  // (1 / 2N) sum ||pred - target||^2
};

// inputs: N0 x batch, targets: NL x batch
Gradients backprop(const FeedforwardNetwork& net, const Mat& inputs, const Mat& targets);
double loss(const FeedforwardNetwork& net, const Mat& inputs, const Mat& targets);

// Bound on ||output||_2 for inputs with ||x||_2 <= radius: the recursion
// beta_l = ||W_l||_2 beta_{l-1} + ||b_l||_2, valid because |tanh(s)| and |relu(s)| are <= |s|.
double output_bound_l2(const FeedforwardNetwork& net, double radius);
// Same for inputs in the box [-B, B]^N0, i.e. radius B sqrt(N0).
double output_bound(const FeedforwardNetwork& net, double box);
// Product of layer operator norms (both activations are 1-Lipschitz).
double lipschitz_bound(const FeedforwardNetwork& net);

nlohmann::json to_json(const FeedforwardNetwork& net);
FeedforwardNetwork network_from_json(const nlohmann::json& j);

}  // namespace nmpinv::mlp
