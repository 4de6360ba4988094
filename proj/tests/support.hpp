#pragma once

// Independent reference values for the tests. Nothing here calls into the
// library's quadrature or integrators.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

#include "pbgq/dynamics.hpp"
#include "pbgq/scenarios.hpp"

namespace testing_support {

constexpr double pi = std::numbers::pi;

/// (1/v) int_{-b}^{b} omega0 * alignment * exp(-|x|/R) cos(pi x / a + phi) dx
/// from the antiderivative of exp(kx) with complex k.
inline double closed_form_area(double omega0, double alignment, double R, double a, double phi, double v, double b)
{
    const std::complex<double> kp(-1 / R, pi / a);  // x > 0 branch
    const std::complex<double> km(-1 / R, -pi / a); // x < 0 branch, after x -> -x
    const auto e = std::polar(1.0, phi);
    const double right = std::real(e * (std::exp(kp * b) - 1.0) / kp);
    const double left = std::real(e * (std::exp(km * b) - 1.0) / km);
    return omega0 * alignment * (right + left) / v;
}

/// Special case phi = 0, R = a written out by hand.
inline double closed_form_area_symmetric(double omega0, double R, double v, double b)
{
    return 2 * (omega0 * R / v) / (1 + pi * pi) *
           (1 + std::exp(-b / R) * (pi * std::sin(pi * b / R) - std::cos(pi * b / R)));
}

/// Wootters concurrence of a two-qubit density matrix in the basis |00>, |01>, |10>, |11>.
inline double concurrence(const Eigen::Matrix4cd& rho)
{
    Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
    yy(0, 3) = -1;
    yy(1, 2) = 1;
    yy(2, 1) = 1;
    yy(3, 0) = -1;
    const Eigen::Matrix4cd tilde = yy * rho.conjugate() * yy;
    const Eigen::Matrix4cd R = rho * tilde;
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(R);
    std::array<double, 4> l{};
    for (int i = 0; i < 4; ++i)
        l[i] = std::sqrt(std::max(0.0, es.eigenvalues()[i].real()));
    std::sort(l.begin(), l.end(), std::greater<>());
    return std::max(0.0, l[0] - l[1] - l[2] - l[3]);
}

inline pbgq::DefectMode ref_mode(std::string name = "p")
{
    return pbgq::scenarios::optical_defect(std::move(name));
}

/// Reference optical pass: Omega_0 = 1.1e10 rad/s, a = R_def = 0.8 lambda, b = 10 R_def.
inline pbgq::PassConfig ref_pass(double v, double delta = 0, int mode_index = 0, pbgq::IntegratorConfig ic = {})
{
    return pbgq::make_pass<double>(ref_mode(), pbgq::scenarios::optical_omega_0, v, delta, mode_index, ic);
}

} // namespace testing_support
