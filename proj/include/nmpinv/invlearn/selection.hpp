#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace nmpinv::invlearn {

enum class SelectionKind { ExactInverse, ApproxInverse, Naive, AugmentedPast };

// Absolute: features are the raw samples, the label is u(k).
// Relative: features are offsets from the anchor y(k) (the anchor itself is dropped), the
// label is u(k) - y(k); past references become u(k-i) - y(k).
enum class Encoding { Absolute, Relative };

std::string to_string(SelectionKind k);
std::string to_string(Encoding e);

// Which samples feed the network and what it predicts, as offsets from the anchor k.
// During training y is the logged output; at runtime the desired trajectory takes its place.
struct InputSelection {
    SelectionKind kind    = SelectionKind::ApproxInverse;
    int n                 = 2;  // system order
    int r                 = 1;  // relative degree
    int past              = 1;  // past references (AugmentedPast)
    Encoding encoding     = Encoding::Absolute;
    bool velocity_channel = false;  // add velocity offsets and a velocity-reference label

    static InputSelection exact_inverse(int n, int r);
    static InputSelection approx_inverse(int n);
    static InputSelection naive(int r);
    static InputSelection augmented_past(int n, int past);

    void validate() const;

    std::vector<int> output_offsets() const;     // y offsets that become features
    std::vector<int> reference_offsets() const;  // past u offsets (negative)
    std::vector<int> velocity_offsets() const;
    // contiguous y window [k + window_begin(), k + window_end()] that feeds the features
    int window_begin() const;
    int window_end() const;
    int lookback() const;   // how far into the past any feature reaches (>= 0)
    int lookahead() const;  // how far into the future any feature reaches (>= 0)
    bool recurrent() const { return !reference_offsets().empty(); }

    int feature_count() const;
    int label_count() const { return velocity_channel ? 2 : 1; }
    std::vector<std::string> feature_names() const;
    std::vector<std::string> label_names() const;

    // Features at anchor k; y, v, u map an absolute index to a sample.
    template <typename Y, typename V, typename U>
    Eigen::VectorXd features(int k, Y&& y, V&& v, U&& u) const
    {
        Eigen::VectorXd f(feature_count());
        int i                = 0;
        const bool rel       = encoding == Encoding::Relative;
        const double anchor  = rel ? y(k) : 0.0;
        const double vanchor = rel ? v(k) : 0.0;
        for (int o : output_offsets()) f[i++] = y(k + o) - anchor;
        for (int o : reference_offsets()) f[i++] = u(k + o) - anchor;
        for (int o : velocity_offsets()) f[i++] = v(k + o) - vanchor;
        return f;
    }

    // Labels from the logged reference (u_pos, u_vel) and output (y, v) at anchor k.
    Eigen::VectorXd labels(double u_pos, double u_vel, double y, double v) const;
    // Inverse of labels(): reference from network output and the desired sample at k.
    double reference_position(const Eigen::VectorXd& out, double yd) const;
    double reference_velocity(const Eigen::VectorXd& out, double vd) const;
};

nlohmann::json to_json(const InputSelection& s);
InputSelection selection_from_json(const nlohmann::json& j);

}  // namespace nmpinv::invlearn
