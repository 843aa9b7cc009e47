#include "nmpinv/polylti/transfer_function.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nmpinv/errors.hpp"

namespace nmpinv::polylti {

DiscreteTransferFunction::DiscreteTransferFunction(Polynomial num, Polynomial den, double sample_time)
    : num_(std::move(num)), den_(std::move(den)), dt_(sample_time)
{
    if (den_.is_zero()) throw std::invalid_argument("transfer function denominator is zero");
    if (!(dt_ > 0.0)) throw std::invalid_argument("sample time must be positive");
}

Polynomial ZeroClassification::stable_factor() const { return Polynomial::from_roots(stable_zeros, gain); }

Polynomial ZeroClassification::unstable_factor() const { return Polynomial::from_roots(unstable_zeros, 1.0); }

int relative_degree(const DiscreteTransferFunction& tf)
{
    if (!tf.is_proper())
        throw ImproperSystem("numerator degree " + std::to_string(tf.num().degree()) + " exceeds denominator degree " +
                             std::to_string(tf.den().degree()));
    return tf.den().degree() - tf.num().degree();
}

ZeroClassification classify_zeros(const DiscreteTransferFunction& tf)
{
    if (tf.num().is_zero()) throw std::invalid_argument("classify_zeros needs a nonzero numerator");
    ZeroClassification zc;
    zc.gain = tf.num().leading();
    if (tf.num().degree() == 0) return zc;
    for (const Complex& z : poly_roots(tf.num())) {
        if (std::abs(z) >= 1.0 - kUnitCircleMargin)
            zc.unstable_zeros.push_back(z);
        else
            zc.stable_zeros.push_back(z);
    }
    return zc;
}

bool is_minimum_phase(const DiscreteTransferFunction& tf) { return classify_zeros(tf).unstable_zeros.empty(); }

std::vector<Complex> poles(const DiscreteTransferFunction& tf)
{
    if (tf.den().degree() == 0) return {};
    return poly_roots(tf.den());
}

DiscreteTransferFunction exact_inverse(const DiscreteTransferFunction& tf)
{
    if (tf.num().is_zero()) throw std::invalid_argument("exact_inverse needs a nonzero numerator");
    return {tf.den(), tf.num(), tf.sample_time()};
}

DiscreteTransferFunction zos_inverse(const DiscreteTransferFunction& tf)
{
    const ZeroClassification zc = classify_zeros(tf);
    if (zc.unstable_zeros.empty()) return exact_inverse(tf);
    const double nu1 = zc.unstable_factor()(1.0);
    if (std::abs(nu1) < kDegenerateTol)
        throw DegenerateApproximation("unstable numerator factor vanishes at z = 1");
    return {tf.den(), nu1 * zc.stable_factor(), tf.sample_time()};
}

DiscreteTransferFunction naive_approx_inverse(const DiscreteTransferFunction& tf)
{
    const double n1 = tf.num()(1.0);
    if (std::abs(n1) < kDegenerateTol) throw DegenerateApproximation("numerator vanishes at z = 1");
    return {tf.den(), Polynomial::constant(n1), tf.sample_time()};
}

double dc_gain(const DiscreteTransferFunction& tf)
{
    const double d1 = tf.den()(1.0);
    if (std::abs(d1) <= kDegenerateTol) throw PoleAtOne("denominator vanishes at z = 1");
    return tf.num()(1.0) / d1;
}

Complex frequency_response(const DiscreteTransferFunction& tf, double omega)
{
    const Complex z = std::polar(1.0, omega);
    const Complex d = tf.den()(z);
    if (std::abs(d) < kDegenerateTol) throw PoleOnUnitCircle("pole on the unit circle at omega = " + std::to_string(omega));
    return tf.num()(z) / d;
}

std::vector<double> simulate(const DiscreteTransferFunction& tf, const std::vector<double>& input, int preview)
{
    if (preview < tf.preview())
        throw InsufficientPreview("transfer function needs preview " + std::to_string(tf.preview()) + ", got " +
                                  std::to_string(preview));
    const auto& a = tf.den().coeffs();
    const auto& b = tf.num().coeffs();
    const int d   = tf.den().degree();
    const long n  = static_cast<long>(input.size());
    auto u = [&](long i) { return (i >= 0 && i < n) ? input[i] : 0.0; };

    // a_d y(k) = sum_j b_j u(k - d + j) - sum_{i<d} a_i y(k - d + i)
    std::vector<double> y(input.size(), 0.0);
    for (long k = 0; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < b.size(); ++j) acc += b[j] * u(k - d + static_cast<long>(j));
        for (int i = 0; i < d; ++i) {
            const long idx = k - d + i;
            if (idx >= 0) acc -= a[i] * y[idx];
        }
        y[k] = acc / a[d];
    }
    return y;
}

std::vector<double> simulate(const DiscreteTransferFunction& tf, const std::vector<double>& input)
{
    return simulate(tf, input, tf.preview());
}

std::vector<double> impulse_response(const DiscreteTransferFunction& tf, std::size_t length)
{
    std::vector<double> u(length, 0.0);
    if (length > 0) u[0] = 1.0;
    return simulate(tf, u);
}

OnlineFilter::OnlineFilter(const DiscreteTransferFunction& tf)
{
    if (!tf.is_proper()) throw ImproperSystem("online filter must be proper");
    a_ = tf.den().coeffs();
    b_.assign(a_.size(), 0.0);
    // y(k) depends on u(k - d + j), so num aligns index-for-index with den
    for (std::size_t j = 0; j < tf.num().coeffs().size(); ++j) b_[j] = tf.num().coeffs()[j];
    reset();
}

void OnlineFilter::reset()
{
    u_hist_.assign(a_.size(), 0.0);
    y_hist_.assign(a_.size(), 0.0);
}

double OnlineFilter::step(double input)
{
    const std::size_t d = a_.size() - 1;
    // histories hold the last d values, oldest first
    std::rotate(u_hist_.begin(), u_hist_.begin() + 1, u_hist_.end());
    u_hist_[d] = input;
    double acc = 0.0;
    for (std::size_t j = 0; j <= d; ++j) acc += b_[j] * u_hist_[j];
    for (std::size_t i = 0; i < d; ++i) acc -= a_[i] * y_hist_[i + 1];
    const double y = acc / a_[d];
    std::rotate(y_hist_.begin(), y_hist_.begin() + 1, y_hist_.end());
    y_hist_[d] = y;
    return y;
}

nlohmann::json to_json(const DiscreteTransferFunction& tf)
{
    return {{"num", tf.num().coeffs()}, {"den", tf.den().coeffs()}, {"dt", tf.sample_time()}};
}

DiscreteTransferFunction tf_from_json(const nlohmann::json& j)
{
    if (!j.is_object() || !j.contains("num") || !j.contains("den") || !j.contains("dt"))
        throw std::invalid_argument("transfer function JSON needs num, den and dt");
    return {Polynomial(j.at("num").get<std::vector<double>>()), Polynomial(j.at("den").get<std::vector<double>>()),
            j.at("dt").get<double>()};
}

}  // namespace nmpinv::polylti
