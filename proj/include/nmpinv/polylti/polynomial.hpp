#pragma once

#include <complex>
#include <vector>

namespace nmpinv::polylti {

using Complex = std::complex<double>;

// Real polynomial in z with coefficients in ascending powers: coeffs()[i] multiplies z^i.
// Exact trailing zeros are trimmed; the zero polynomial has no coefficients.
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(std::initializer_list<double> ascending);
    explicit Polynomial(std::vector<double> ascending);

    static Polynomial constant(double c);
    static Polynomial monomial(int power, double c = 1.0);
    // gain * prod(z - root). Complex roots must come in conjugate pairs.
    static Polynomial from_roots(const std::vector<Complex>& roots, double gain = 1.0);

    const std::vector<double>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    double leading() const { return c_.empty() ? 0.0 : c_.back(); }
    double operator[](std::size_t i) const { return i < c_.size() ? c_[i] : 0.0; }

    Complex operator()(Complex z) const;
    double operator()(double z) const;

    // Drops leading coefficients with magnitude below rel_tol * max|coeff|.
    Polynomial trimmed(double rel_tol) const;
    Polynomial derivative() const;
    Polynomial shifted(int power) const;  // multiply by z^power (power >= 0)
    double norm() const;  // Euclidean norm of the coefficients

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(double s, const Polynomial& p);
    friend Polynomial operator/(const Polynomial& p, double s);
    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

private:
    void trim();
    std::vector<double> c_;
};

Complex poly_eval(const Polynomial& p, Complex z);

// All deg(p) roots. Aberth-Ehrlich first, companion-matrix eigenvalues as fallback;
// throws NonConvergence when neither meets the residual target.
std::vector<Complex> poly_roots(const Polynomial& p);

// |p(root)| / ||coeffs||
double root_residual(const Polynomial& p, Complex root);

}  // namespace nmpinv::polylti
