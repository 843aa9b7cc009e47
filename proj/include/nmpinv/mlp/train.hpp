#pragma once

#include <cstdint>
#include <vector>

#include "nmpinv/mlp/network.hpp"

namespace nmpinv::mlp {

enum class Optimizer { Sgd, Adam };

struct TrainingConfig {
    Optimizer optimizer        = Optimizer::Adam;
    double learning_rate       = 1e-3;
    double beta1               = 0.9;
    double beta2               = 0.999;
    double epsilon             = 1e-8;
    int batch_size             = 64;
    int epochs                 = 300;
    std::uint64_t seed         = 0;
    double validation_fraction = 0.3;
    int patience               = 50;
    double weight_decay        = 0.0;  // L2 on weights, not biases

    void validate() const;
};

struct TrainingHistory {
    std::vector<double> train_loss;
    std::vector<double> validation_loss;
    double initial_validation_loss = 0.0;
    double best_validation_loss    = 0.0;
    int best_epoch                 = 0;  // 0 means the initial parameters were never beaten
    int epochs_run                 = 0;
};

// Rows of inputs/targets are samples (already normalized). Keeps the parameters of the
// epoch with the lowest validation loss. Throws NonFiniteLoss.
TrainingHistory train(FeedforwardNetwork& net, const Mat& inputs, const Mat& targets, const TrainingConfig& config);

}  // namespace nmpinv::mlp
