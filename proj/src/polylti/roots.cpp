#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

#include "nmpinv/errors.hpp"
#include "nmpinv/polylti/polynomial.hpp"

namespace nmpinv::polylti {

namespace {

constexpr int kMaxIterations     = 500;
constexpr double kStepTolerance  = 1e-12;
constexpr double kBackwardTarget = 1e-10;

// |p(z)| relative to the size of the terms that were summed; this is what
// floating point can actually deliver for roots of large modulus.
double backward_error(const Polynomial& p, Complex z)
{
    double scale = 0.0;
    double az    = std::abs(z);
    for (auto it = p.coeffs().rbegin(); it != p.coeffs().rend(); ++it) scale = scale * az + std::abs(*it);
    return scale > 0.0 ? std::abs(p(z)) / scale : 0.0;
}

Complex newton_polish(const Polynomial& p, const Polynomial& dp, Complex z)
{
    double best = std::abs(p(z));
    for (int i = 0; i < 3 && best > 0.0; ++i) {
        const Complex d = dp(z);
        if (d == Complex(0.0)) break;
        const Complex cand = z - p(z) / d;
        const double r     = std::abs(p(cand));
        if (!(r < best)) break;
        z    = cand;
        best = r;
    }
    return z;
}

bool aberth(const Polynomial& p, std::vector<Complex>& z)
{
    const int n = p.degree();
    const Polynomial dp = p.derivative();
    const double radius = std::pow(std::abs(p[0] / p.leading()), 1.0 / n);
    z.resize(n);
    for (int k = 0; k < n; ++k) z[k] = std::polar(radius, 2.0 * std::numbers::pi * k / n + 0.4);

    for (int it = 0; it < kMaxIterations; ++it) {
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            const Complex pz = p(z[i]);
            if (pz == Complex(0.0)) continue;
            const Complex ratio = pz / dp(z[i]);
            Complex repulse(0.0);
            for (int j = 0; j < n; ++j)
                if (j != i) repulse += 1.0 / (z[i] - z[j]);
            const Complex w = ratio / (1.0 - ratio * repulse);
            if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return false;
            z[i] -= w;
            worst = std::max(worst, std::abs(w) / std::max(1.0, std::abs(z[i])));
        }
        if (worst < kStepTolerance) return true;
    }
    // Multiple roots converge linearly; accept them if they already sit at rounding level.
    for (const Complex& r : z)
        if (backward_error(p, r) > kBackwardTarget) return false;
    return true;
}

bool companion(const Polynomial& p, std::vector<Complex>& z)
{
    const int n = p.degree();
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) C(i, n - 1) = -p[i] / p.leading();
    Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
    if (es.info() != Eigen::Success) return false;
    z.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
    return true;
}

bool acceptable(const Polynomial& p, const std::vector<Complex>& z)
{
    for (const Complex& r : z)
        if (!(backward_error(p, r) <= kBackwardTarget)) return false;
    return true;
}

}  // namespace

std::vector<Complex> poly_roots(const Polynomial& p)
{
    if (p.degree() < 1) throw std::invalid_argument("poly_roots needs degree >= 1");

    std::vector<Complex> roots;
    std::size_t zeros = 0;
    while (p.coeffs()[zeros] == 0.0) ++zeros;
    roots.assign(zeros, Complex(0.0));
    const Polynomial q(std::vector<double>(p.coeffs().begin() + zeros, p.coeffs().end()));
    if (q.degree() == 0) return roots;

    std::vector<Complex> z;
    bool ok = aberth(q, z);
    const Polynomial dq = q.derivative();
    if (ok) {
        for (Complex& r : z) r = newton_polish(q, dq, r);
        ok = acceptable(q, z);
    }
    if (!ok) {
        ok = companion(q, z);
        if (ok) {
            for (Complex& r : z) r = newton_polish(q, dq, r);
            ok = acceptable(q, z);
        }
    }
    if (!ok) throw NonConvergence("root finding failed for polynomial of degree " + std::to_string(q.degree()));

    // real input: snap numerically real roots onto the axis
    for (Complex& r : z)
        if (std::abs(r.imag()) <= 1e-12 * std::max(1.0, std::abs(r))) r = Complex(r.real(), 0.0);
    roots.insert(roots.end(), z.begin(), z.end());
    return roots;
}

}  // namespace nmpinv::polylti
