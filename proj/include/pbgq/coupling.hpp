#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pbgq/errors.hpp"
#include "pbgq/state.hpp"

namespace pbgq {

/// One-dimensional cut of a defect mode along the atom's straight path:
/// an exponential envelope of decay length R_def centered on r0, modulated
/// at the lattice period.
template <class Real>
struct BasicModeProfile
{
    Real R_def = 0;
    Real lattice_a = 0;
    Real phi = 0;
    Real r0 = 0;

    void validate() const
    {
        if (!(R_def > 0))
            throw ConfigError("R_def", "must be > 0");
        if (!(lattice_a > 0))
            throw ConfigError("lattice_a", "must be > 0");
    }
    bool operator==(const BasicModeProfile&) const = default;
};

template <class Real>
struct BasicCoupling
{
    Real omega_0 = 0;   ///< peak Rabi frequency (rad/s)
    Real alignment = 1; ///< dipole/field orientation factor
    BasicModeProfile<Real> profile;

    void validate() const
    {
        if (!(omega_0 >= 0))
            throw ConfigError("omega0", "must be >= 0");
        if (!(std::abs(alignment) <= 1))
            throw ConfigError("alignment", "|alignment| must be <= 1");
        profile.validate();
    }
    bool operator==(const BasicCoupling&) const = default;
};

using ModeProfile = BasicModeProfile<double>;
using Coupling = BasicCoupling<double>;

template <class Real>
BasicModeProfile<Real> profile_of(const DefectMode& m, Real r0 = 0)
{
    return {Real(m.R_def), Real(m.lattice_a), Real(m.phi), r0};
}

template <class Real>
Real envelope_at(const BasicModeProfile<Real>& p, Real r)
{
    using std::abs, std::cos, std::exp;
    const Real x = r - p.r0;
    return exp(-abs(x) / p.R_def) * cos(std::numbers::pi_v<Real> * x / p.lattice_a + p.phi);
}

template <class Real>
Real coupling_at(const BasicCoupling<Real>& c, Real r)
{
    return c.omega_0 * c.alignment * envelope_at(c.profile, r);
}

namespace detail {

/// Integral of f(x) over [-b, b]. The window is cut at the envelope cusp
/// x = 0 and into pieces no longer than `piece`, so the integrand is smooth
/// and at most half an oscillation long on each.
template <class Real, class F>
Real integrate_window(F f, Real b, Real piece, Real rel_tol)
{
    using Quad = boost::math::quadrature::gauss_kronrod<Real, 61>;
    constexpr unsigned max_depth = 10;
    const long n = std::max<long>(1, static_cast<long>(std::ceil(b / piece)));
    const Real h = b / n;
    Real sum = 0;
    for (long i = 0; i < n; ++i) {
        sum += Quad::integrate(f, -(i + 1) * h, -i * h, max_depth, rel_tol);
        sum += Quad::integrate(f, i * h, (i + 1) * h, max_depth, rel_tol);
    }
    return sum;
}

template <class Real>
Real quadrature_piece(const BasicModeProfile<Real>& p)
{
    return std::min(p.lattice_a / 2, p.R_def);
}

template <class Real>
void check_transit(Real v, Real b)
{
    if (!(v > 0))
        throw ConfigError("v", "speed must be > 0");
    if (!(b > 0))
        throw ConfigError("b", "half-window must be > 0");
}

} // namespace detail

/**
 * Resonant pulse area of one transit, A = int_0^{2b/v} G(r0 + v t - b) dt.
 *
 * The substitution x = v t - b turns this into (1/v) int_{-b}^{b} G(r0 + x) dx,
 * evaluated by adaptive Gauss-Kronrod quadrature on each side of r0.
 */
template <class Real>
Real pulse_area(const BasicCoupling<Real>& c, Real v, Real b, Real rel_tol = Real(1e-10))
{
    detail::check_transit(v, b);
    if (c.omega_0 == 0 || c.alignment == 0)
        return 0;
    const auto g = [&](Real x) { return coupling_at(c, c.profile.r0 + x); };
    return detail::integrate_window<Real>(g, b, detail::quadrature_piece(c.profile), rel_tol) / v;
}

/// int_0^{2b/v} G^2 dt, the numerator of the dispersive phase.
template <class Real>
Real squared_coupling_integral(const BasicCoupling<Real>& c, Real v, Real b,
                               Real rel_tol = Real(1e-10))
{
    detail::check_transit(v, b);
    if (c.omega_0 == 0 || c.alignment == 0)
        return 0;
    const auto g2 = [&](Real x) {
        const Real g = coupling_at(c, c.profile.r0 + x);
        return g * g;
    };
    return detail::integrate_window<Real>(g2, b, detail::quadrature_piece(c.profile), rel_tol) / v;
}

} // namespace pbgq
