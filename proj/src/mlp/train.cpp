#include "nmpinv/mlp/train.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "nmpinv/errors.hpp"
#include "nmpinv/log.hpp"
#include "nmpinv/random.hpp"

namespace nmpinv::mlp {

void TrainingConfig::validate() const
{
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
    if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) throw std::invalid_argument("Adam betas must lie in [0, 1)");
    if (batch_size < 1 || epochs < 0 || patience < 1) throw std::invalid_argument("batch size, epochs and patience must be positive");
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
        throw std::invalid_argument("validation fraction must lie in (0, 1)");
    if (!(weight_decay >= 0.0)) throw std::invalid_argument("weight decay must be non-negative");
}

namespace {

Mat gather(const Mat& cols, const std::vector<std::size_t>& idx, std::size_t from, std::size_t to)
{
    Mat out(cols.rows(), static_cast<Eigen::Index>(to - from));
    for (std::size_t i = from; i < to; ++i) out.col(static_cast<Eigen::Index>(i - from)) = cols.col(static_cast<Eigen::Index>(idx[i]));
    return out;
}

struct AdamState {
    std::vector<Mat> mw, vw;
    std::vector<Vec> mb, vb;
    long step = 0;
};

}  // namespace

TrainingHistory train(FeedforwardNetwork& net, const Mat& inputs, const Mat& targets, const TrainingConfig& cfg)
{
    cfg.validate();
    if (inputs.rows() == 0) throw std::invalid_argument("training set is empty");
    if (inputs.rows() != targets.rows() || inputs.cols() != net.input_dim() || targets.cols() != net.output_dim())
        throw DimensionMismatch("training data shapes do not match the network");

    const std::size_t n = static_cast<std::size_t>(inputs.rows());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(cfg.seed);
    rng.shuffle(order);
    std::size_t n_val = static_cast<std::size_t>(std::llround(cfg.validation_fraction * static_cast<double>(n)));
    n_val             = std::clamp<std::size_t>(n_val, 1, n > 1 ? n - 1 : 1);
    if (n == 1) n_val = 0;
    std::vector<std::size_t> train_idx(order.begin(), order.end() - static_cast<long>(n_val));
    std::vector<std::size_t> val_idx(order.end() - static_cast<long>(n_val), order.end());

    const Mat X = inputs.transpose();
    const Mat Y = targets.transpose();
    const Mat Xv = val_idx.empty() ? gather(X, train_idx, 0, train_idx.size()) : gather(X, val_idx, 0, val_idx.size());
    const Mat Yv = val_idx.empty() ? gather(Y, train_idx, 0, train_idx.size()) : gather(Y, val_idx, 0, val_idx.size());

    TrainingHistory hist;
    hist.initial_validation_loss = loss(net, Xv, Yv);
    hist.best_validation_loss    = hist.initial_validation_loss;
    if (!std::isfinite(hist.initial_validation_loss)) throw NonFiniteLoss("initial validation loss is not finite");
    FeedforwardNetwork best = net;

    const int L = net.layer_count();
    AdamState adam;
    for (int l = 0; l < L; ++l) {
        adam.mw.push_back(Mat::Zero(net.weights()[l].rows(), net.weights()[l].cols()));
        adam.vw.push_back(adam.mw.back());
        adam.mb.push_back(Vec::Zero(net.biases()[l].size()));
        adam.vb.push_back(adam.mb.back());
    }

    const std::size_t bs = static_cast<std::size_t>(cfg.batch_size);
    int since_best       = 0;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        rng.shuffle(train_idx);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < train_idx.size(); start += bs) {
            const std::size_t stop = std::min(train_idx.size(), start + bs);
            Gradients g = backprop(net, gather(X, train_idx, start, stop), gather(Y, train_idx, start, stop));
            if (!std::isfinite(g.loss))
                throw NonFiniteLoss("non-finite training loss at epoch " + std::to_string(epoch) + ", batch starting " +
                                    std::to_string(start));
            epoch_loss += g.loss * static_cast<double>(stop - start);
            if (cfg.weight_decay > 0.0)
                for (int l = 0; l < L; ++l) g.weights[l] += cfg.weight_decay * net.weights()[l];

            if (cfg.optimizer == Optimizer::Sgd) {
                for (int l = 0; l < L; ++l) {
                    net.weights()[l] -= cfg.learning_rate * g.weights[l];
                    net.biases()[l] -= cfg.learning_rate * g.biases[l];
                }
                continue;
            }
            ++adam.step;
            const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(adam.step));
            const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(adam.step));
            const double lr = cfg.learning_rate * std::sqrt(c2) / c1;
            for (int l = 0; l < L; ++l) {
                adam.mw[l] = cfg.beta1 * adam.mw[l] + (1.0 - cfg.beta1) * g.weights[l];
                adam.vw[l] = cfg.beta2 * adam.vw[l] + (1.0 - cfg.beta2) * g.weights[l].cwiseAbs2();
                adam.mb[l] = cfg.beta1 * adam.mb[l] + (1.0 - cfg.beta1) * g.biases[l];
                adam.vb[l] = cfg.beta2 * adam.vb[l] + (1.0 - cfg.beta2) * g.biases[l].cwiseAbs2();
                net.weights()[l].array() -= lr * adam.mw[l].array() / (adam.vw[l].array().sqrt() + cfg.epsilon);
                net.biases()[l].array() -= lr * adam.mb[l].array() / (adam.vb[l].array().sqrt() + cfg.epsilon);
            }
        }
        hist.train_loss.push_back(epoch_loss / static_cast<double>(train_idx.size()));
        const double vl = loss(net, Xv, Yv);
        if (!std::isfinite(vl)) throw NonFiniteLoss("non-finite validation loss at epoch " + std::to_string(epoch));
        hist.validation_loss.push_back(vl);
        hist.epochs_run = epoch;
        if (vl < hist.best_validation_loss) {
            hist.best_validation_loss = vl;
            hist.best_epoch           = epoch;
            best                      = net;
            since_best                = 0;
        } else if (++since_best >= cfg.patience) {
            spdlog::debug("early stop at epoch {} (best {})", epoch, hist.best_epoch);
            break;
        }
    }
    net = std::move(best);
    return hist;
}

}  // namespace nmpinv::mlp
