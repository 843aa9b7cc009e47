#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "nmpinv/polylti/transfer_function.hpp"
#include "nmpinv/random.hpp"

namespace nmpinv::testing {

using polylti::Complex;
using polylti::DiscreteTransferFunction;
using polylti::Polynomial;

// Roots with modulus in [rmin, rmax]: real ones, or conjugate pairs.
inline std::vector<Complex> random_roots(Rng& rng, int count, double rmin, double rmax)
{
    std::vector<Complex> roots;
    while (static_cast<int>(roots.size()) < count) {
        const double r = rng.uniform(rmin, rmax);
        if (count - static_cast<int>(roots.size()) >= 2 && rng.uniform() < 0.5) {
            const double th = rng.uniform(0.1, 2.5);
            roots.push_back(std::polar(r, th));
            roots.push_back(std::polar(r, -th));
        } else {
            roots.push_back(rng.uniform() < 0.5 ? r : -r);
        }
    }
    return roots;
}

// Stable, minimum-phase, strictly proper system of order n with m < n zeros.
inline DiscreteTransferFunction random_minimum_phase(Rng& rng, double dt = 0.1)
{
    const int n = rng.integer(1, 5);
    const int m = rng.integer(0, n - 1);
    const Polynomial den = Polynomial::from_roots(random_roots(rng, n, 0.05, 0.95));
    const Polynomial num = Polynomial::from_roots(random_roots(rng, m, 0.05, 0.95), rng.uniform(0.5, 2.0));
    return {num, den, dt};
}

// Stable system whose numerator has one real zero in (1.05, 2) and possibly more stable zeros.
inline DiscreteTransferFunction random_nmp(Rng& rng, double dt = 0.1, int max_order = 5)
{
    const int n = rng.integer(2, max_order);
    const int m = rng.integer(1, n - 1);
    std::vector<Complex> zeros = random_roots(rng, m - 1, 0.05, 0.9);
    zeros.push_back(rng.uniform(1.05, 2.0));
    const Polynomial den = Polynomial::from_roots(random_roots(rng, n, 0.05, 0.95));
    const Polynomial num = Polynomial::from_roots(zeros, rng.uniform(0.5, 2.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0));
    return {num, den, dt};
}

// Smallest distance between two poles or between a pole and a zero. Near coincidences make the
// coefficients of a realization practically unidentifiable from input/output data.
inline double min_root_separation(const DiscreteTransferFunction& tf)
{
    const auto p = polylti::poly_roots(tf.den());
    const auto z = polylti::poly_roots(tf.num());
    double gap   = INFINITY;
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = i + 1; j < p.size(); ++j) gap = std::min(gap, std::abs(p[i] - p[j]));
        for (const Complex& q : z) gap = std::min(gap, std::abs(p[i] - q));
    }
    return gap;
}

// random_nmp redrawn until poles are separated from each other and from the zeros by min_gap.
inline DiscreteTransferFunction random_identifiable_nmp(Rng& rng, double dt, int max_order, double min_gap)
{
    DiscreteTransferFunction h = random_nmp(rng, dt, max_order);
    while (min_root_separation(h) < min_gap) h = random_nmp(rng, dt, max_order);
    return h;
}

// Impulse response from a controllable-canonical state-space realization; independent
// of the difference-equation code in polylti::simulate. Requires a proper tf.
inline std::vector<double> markov_parameters(const DiscreteTransferFunction& tf, std::size_t len)
{
    const int n = tf.den().degree();
    const double an = tf.den().leading();
    std::vector<double> a(n), b(n + 1, 0.0);
    for (int i = 0; i < n; ++i) a[i] = tf.den()[i] / an;
    for (int i = 0; i <= n; ++i) b[i] = tf.num()[i] / an;
    // H = b_n + sum_i (b_i - b_n a_i) z^i / den
    std::vector<double> x(n, 0.0), h(len, 0.0);
    for (std::size_t k = 0; k < len; ++k) {
        const double u = k == 0 ? 1.0 : 0.0;
        double y       = b[n] * u;
        for (int i = 0; i < n; ++i) y += (b[i] - b[n] * a[i]) * x[i];
        h[k] = y;
        // companion update: x_i+ = x_{i+1}, x_{n-1}+ = -sum a_i x_i + u
        double last = u;
        for (int i = 0; i < n; ++i) last -= a[i] * x[i];
        for (int i = 0; i + 1 < n; ++i) x[i] = x[i + 1];
        if (n > 0) x[n - 1] = last;
    }
    return h;
}

}  // namespace nmpinv::testing
