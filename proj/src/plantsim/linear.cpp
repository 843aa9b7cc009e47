#include "nmpinv/plantsim/linear.hpp"

#include <cmath>
#include <stdexcept>

#include "nmpinv/errors.hpp"

namespace nmpinv::plantsim {

using polylti::Complex;
using polylti::DiscreteTransferFunction;
using polylti::Polynomial;

void LinearModel::validate() const
{
    const auto n = A.rows();
    if (A.cols() != n || n == 0) throw DimensionMismatch("A must be square and non-empty");
    if (B.rows() != n || B.cols() != 1) throw DimensionMismatch("B must be n x 1");
    if (C.cols() != n || C.rows() == 0) throw DimensionMismatch("C must be p x n");
    if (D.rows() != C.rows() || D.cols() != 1) throw DimensionMismatch("D must be p x 1");
    if (sample_time && !(*sample_time > 0.0)) throw std::invalid_argument("sample time must be positive");
}

LinearModel linearize(const Plant& plant, const Vec& x0, double u0)
{
    const int n = plant.state_dim();
    const int p = plant.output_dim();
    if (x0.size() != n) throw DimensionMismatch("operating state has wrong dimension");

    LinearModel m{Mat(n, n), Mat(n, 1), Mat(p, n), Mat::Zero(p, 1), std::nullopt};
    for (int j = 0; j < n; ++j) {
        const double h = 1e-6 * std::max(1.0, std::abs(x0[j]));
        Vec xp = x0, xm = x0;
        xp[j] += h;
        xm[j] -= h;
        m.A.col(j) = (plant.derivative(xp, u0) - plant.derivative(xm, u0)) / (2.0 * h);
        m.C.col(j) = (plant.output(xp) - plant.output(xm)) / (2.0 * h);
    }
    const double hu = 1e-6 * std::max(1.0, std::abs(u0));
    m.B.col(0) = (plant.derivative(x0, u0 + hu) - plant.derivative(x0, u0 - hu)) / (2.0 * hu);
    if (!m.A.allFinite() || !m.B.allFinite() || !m.C.allFinite())
        throw NonFiniteJacobian("finite-difference Jacobian is not finite");
    return m;
}

Mat expm(const Mat& A)
{
    const double norm = A.cwiseAbs().colwise().sum().maxCoeff();
    int squarings     = 0;
    if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    const Mat S = A / std::ldexp(1.0, squarings);

    Mat result = Mat::Identity(A.rows(), A.cols());
    Mat term   = result;
    for (int k = 1; k <= 60; ++k) {
        term   = term * S / static_cast<double>(k);
        result += term;
        if (term.cwiseAbs().maxCoeff() <= 1e-16 * result.cwiseAbs().maxCoeff()) break;
    }
    for (int i = 0; i < squarings; ++i) result = result * result;
    return result;
}

LinearModel discretize_zoh(const LinearModel& model, double dt)
{
    model.validate();
    if (model.sample_time) throw std::invalid_argument("model is already discrete");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    const auto n = model.A.rows();
    Mat aug      = Mat::Zero(n + 1, n + 1);
    aug.topLeftCorner(n, n)  = model.A * dt;
    aug.topRightCorner(n, 1) = model.B * dt;
    const Mat E = expm(aug);
    return {E.topLeftCorner(n, n), E.topRightCorner(n, 1), model.C, model.D, dt};
}

Mat controllability_matrix(const Mat& A, const Mat& B)
{
    const auto n = A.rows();
    Mat W(n, n);
    Mat col = B;
    for (Eigen::Index i = 0; i < n; ++i) {
        W.col(i) = col;
        col      = A * col;
    }
    return W;
}

Eigen::RowVectorXd pole_place_siso(const Mat& A, const Mat& B, const std::vector<Complex>& desired)
{
    const auto n = A.rows();
    if (A.cols() != n || B.rows() != n || B.cols() != 1) throw DimensionMismatch("pole placement needs n x n A, n x 1 B");
    if (static_cast<Eigen::Index>(desired.size()) != n) throw DimensionMismatch("need one desired pole per state");

    const Mat W = controllability_matrix(A, B);
    Eigen::JacobiSVD<Mat> svd(W);
    const auto& sv = svd.singularValues();
    if (!(sv(n - 1) > 0.0) || sv(0) / sv(n - 1) > 1e12) throw Uncontrollable("controllability matrix is ill-conditioned");

    const Polynomial phi = Polynomial::from_roots(desired);
    Mat phiA             = Mat::Zero(n, n);
    for (int i = phi.degree(); i >= 0; --i) phiA = phiA * A + phi[i] * Mat::Identity(n, n);

    Vec en = Vec::Zero(n);
    en[n - 1] = 1.0;
    const Vec row = W.transpose().fullPivLu().solve(en);
    return row.transpose() * phiA;
}

LinearModel closed_loop_model(const LinearModel& plant, const StateFeedbackController& controller)
{
    plant.validate();
    if (!plant.sample_time) throw std::invalid_argument("closed_loop_model needs a discrete plant model");
    if (plant.D.cwiseAbs().maxCoeff() > 0.0) throw std::invalid_argument("feedback through D is not supported");
    controller.validate(static_cast<int>(plant.C.rows()));

    const Mat KC      = controller.gain * plant.C;
    const double kref = controller.gain[controller.position_slot];
    return {plant.A - plant.B * KC, plant.B * kref, plant.C, Mat::Zero(plant.C.rows(), 1), plant.sample_time};
}

LinearModel lift(const LinearModel& m, int factor)
{
    m.validate();
    if (!m.sample_time) throw std::invalid_argument("lift needs a discrete model");
    if (factor < 1) throw std::invalid_argument("lift factor must be >= 1");
    Mat Ap = Mat::Identity(m.A.rows(), m.A.cols());
    Mat Bs = Mat::Zero(m.B.rows(), 1);
    for (int i = 0; i < factor; ++i) {
        Bs += Ap * m.B;
        Ap = Ap * m.A;
    }
    return {Ap, Bs, m.C, m.D, *m.sample_time * factor};
}

DiscreteTransferFunction state_space_tf(const LinearModel& m, int output_index)
{
    m.validate();
    if (!m.sample_time) throw std::invalid_argument("state_space_tf needs a discrete model");
    if (output_index < 0 || output_index >= m.C.rows()) throw DimensionMismatch("output index out of range");
    const int n = static_cast<int>(m.A.rows());

    // det(zI - A) = sum c_i z^i with c_n = 1; adj(zI - A) = sum_k M_k z^(n-k)
    std::vector<double> c(n + 1, 0.0);
    std::vector<double> num(n + 1, 0.0);
    c[n]        = 1.0;
    Mat Mk      = Mat::Zero(n, n);
    const Mat I = Mat::Identity(n, n);
    const Eigen::RowVectorXd crow = m.C.row(output_index);
    for (int k = 1; k <= n; ++k) {
        Mk           = m.A * Mk + c[n - k + 1] * I;
        c[n - k]     = -(m.A * Mk).trace() / k;
        num[n - k]   = (crow * Mk * m.B.col(0))(0);
    }
    const double d = m.D(output_index, 0);
    for (int i = 0; i <= n; ++i) num[i] += d * c[i];
    return {Polynomial(num).trimmed(1e-12), Polynomial(c), *m.sample_time};
}

DiscreteTransferFunction closed_loop_tf(const LinearModel& plant, const StateFeedbackController& controller,
                                        int output_index)
{
    return state_space_tf(closed_loop_model(plant, controller), output_index);
}

DiscreteTransferFunction nmp_surrogate_axis(double zero, int delay_steps, const std::array<Complex, 2>& poles,
                                            double dt)
{
    if (!(zero > 1.0)) throw std::invalid_argument("surrogate zero must lie outside the unit circle");
    if (delay_steps < 0) throw std::invalid_argument("delay must be non-negative");
    for (const Complex& p : poles)
        if (!(std::abs(p) < 1.0)) throw std::invalid_argument("surrogate poles must be stable");
    const Polynomial den = Polynomial::from_roots({poles[0], poles[1]}).shifted(delay_steps);
    const double g       = den(1.0) / (1.0 - zero);
    return {Polynomial({-g * zero, g}), den, dt};
}

DiscreteTransferFunction nmp_surrogate_axis(double zero, int delay_steps, double dt)
{
    const double p = std::exp(-3.0 * dt);
    return nmp_surrogate_axis(zero, delay_steps, {Complex(p), Complex(p)}, dt);
}

DiscreteTransferFunction zero_injection_filter(double zero, double dt)
{
    if (std::abs(1.0 - zero) < polylti::kDegenerateTol) throw std::invalid_argument("zero at z = 1 has no dc gain");
    return {Polynomial({-zero, 1.0}), Polynomial({0.0, 1.0 - zero}), dt};
}

}  // namespace nmpinv::plantsim
