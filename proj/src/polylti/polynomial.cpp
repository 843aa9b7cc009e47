#include "nmpinv/polylti/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nmpinv::polylti {

Polynomial::Polynomial(std::initializer_list<double> ascending) : c_(ascending) { trim(); }

Polynomial::Polynomial(std::vector<double> ascending) : c_(std::move(ascending)) { trim(); }

Polynomial Polynomial::constant(double c) { return Polynomial({c}); }

Polynomial Polynomial::monomial(int power, double c)
{
    if (power < 0) throw std::invalid_argument("monomial power must be non-negative");
    std::vector<double> v(power + 1, 0.0);
    v[power] = c;
    return Polynomial(std::move(v));
}

Polynomial Polynomial::from_roots(const std::vector<Complex>& roots, double gain)
{
    std::vector<Complex> acc{Complex(gain)};
    for (const Complex& r : roots) {
        std::vector<Complex> next(acc.size() + 1, Complex(0.0));
        for (std::size_t i = 0; i < acc.size(); ++i) {
            next[i + 1] += acc[i];
            next[i] -= r * acc[i];
        }
        acc = std::move(next);
    }
    std::vector<double> re(acc.size());
    std::transform(acc.begin(), acc.end(), re.begin(), [](Complex c) { return c.real(); });
    return Polynomial(std::move(re));
}

void Polynomial::trim()
{
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

Complex Polynomial::operator()(Complex z) const
{
    Complex acc(0.0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
    return acc;
}

double Polynomial::operator()(double z) const
{
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
    return acc;
}

Polynomial Polynomial::trimmed(double rel_tol) const
{
    double mx = 0.0;
    for (double v : c_) mx = std::max(mx, std::abs(v));
    std::vector<double> v = c_;
    while (!v.empty() && std::abs(v.back()) <= rel_tol * mx) v.pop_back();
    return Polynomial(std::move(v));
}

Polynomial Polynomial::derivative() const
{
    if (c_.size() <= 1) return {};
    std::vector<double> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = static_cast<double>(i) * c_[i];
    return Polynomial(std::move(d));
}

Polynomial Polynomial::shifted(int power) const
{
    if (power < 0) throw std::invalid_argument("shift must be non-negative");
    if (is_zero()) return {};
    std::vector<double> v(power, 0.0);
    v.insert(v.end(), c_.begin(), c_.end());
    return Polynomial(std::move(v));
}

double Polynomial::norm() const
{
    double s = 0.0;
    for (double v : c_) s += v * v;
    return std::sqrt(s);
}

Polynomial operator+(const Polynomial& a, const Polynomial& b)
{
    std::vector<double> v(std::max(a.c_.size(), b.c_.size()), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + b[i];
    return Polynomial(std::move(v));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-1.0) * b; }

Polynomial operator*(const Polynomial& a, const Polynomial& b)
{
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<double> v(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(v));
}

Polynomial operator*(double s, const Polynomial& p)
{
    std::vector<double> v = p.c_;
    for (double& x : v) x *= s;
    return Polynomial(std::move(v));
}

Polynomial operator/(const Polynomial& p, double s) { return (1.0 / s) * p; }

Complex poly_eval(const Polynomial& p, Complex z) { return p(z); }

double root_residual(const Polynomial& p, Complex root)
{
    const double n = p.norm();
    return n > 0.0 ? std::abs(p(root)) / n : 0.0;
}

}  // namespace nmpinv::polylti
