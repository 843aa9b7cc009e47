#pragma once

#include <nlohmann/json.hpp>

#include <vector>

#include "nmpinv/polylti/polynomial.hpp"

namespace nmpinv::polylti {

// H(z) = num(z) / den(z) sampled every sample_time seconds. Improper functions are
// allowed and carry a preview count: the number of future input samples they need.
class DiscreteTransferFunction {
public:
    DiscreteTransferFunction(Polynomial num, Polynomial den, double sample_time);

    const Polynomial& num() const { return num_; }
    const Polynomial& den() const { return den_; }
    double sample_time() const { return dt_; }

    int preview() const { return std::max(0, num_.degree() - den_.degree()); }
    bool is_proper() const { return num_.degree() <= den_.degree(); }

private:
    Polynomial num_;
    Polynomial den_;
    double dt_;
};

struct ZeroClassification {
    std::vector<Complex> stable_zeros;
    std::vector<Complex> unstable_zeros;
    double gain = 0.0;

    // gain * prod(z - stable)
    Polynomial stable_factor() const;
    // prod(z - unstable), monic
    Polynomial unstable_factor() const;
};

inline constexpr double kUnitCircleMargin = 1e-9;
inline constexpr double kDegenerateTol    = 1e-12;

int relative_degree(const DiscreteTransferFunction& tf);
ZeroClassification classify_zeros(const DiscreteTransferFunction& tf);
bool is_minimum_phase(const DiscreteTransferFunction& tf);
std::vector<Complex> poles(const DiscreteTransferFunction& tf);

DiscreteTransferFunction exact_inverse(const DiscreteTransferFunction& tf);
DiscreteTransferFunction zos_inverse(const DiscreteTransferFunction& tf);
DiscreteTransferFunction naive_approx_inverse(const DiscreteTransferFunction& tf);

double dc_gain(const DiscreteTransferFunction& tf);
Complex frequency_response(const DiscreteTransferFunction& tf, double omega);

// Difference-equation realization with zero initial conditions; future inputs past the
// end of the sequence are taken as zero.
std::vector<double> simulate(const DiscreteTransferFunction& tf, const std::vector<double>& input, int preview);
std::vector<double> simulate(const DiscreteTransferFunction& tf, const std::vector<double>& input);
std::vector<double> impulse_response(const DiscreteTransferFunction& tf, std::size_t length);

// Causal, proper filter with internal state, for use inside a running loop.
class OnlineFilter {
public:
    explicit OnlineFilter(const DiscreteTransferFunction& tf);
    double step(double input);
    void reset();

private:
    std::vector<double> a_;  // den, ascending
    std::vector<double> b_;  // num padded to deg(den)
    std::vector<double> u_hist_;
    std::vector<double> y_hist_;
};

nlohmann::json to_json(const DiscreteTransferFunction& tf);
DiscreteTransferFunction tf_from_json(const nlohmann::json& j);

}  // namespace nmpinv::polylti
