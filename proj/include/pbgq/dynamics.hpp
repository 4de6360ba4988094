#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "pbgq/coupling.hpp"
#include "pbgq/errors.hpp"
#include "pbgq/state.hpp"

namespace pbgq {

enum class IntegratorMethod { rk4, adaptive };

struct IntegratorConfig
{
    IntegratorMethod method = IntegratorMethod::rk4;
    /// Upper bound on the step (s). 0 selects the automatic bound, the
    /// fastest time scale of the pass divided by `steps_per_period`.
    double max_step = 0;
    double steps_per_period = 400;
    double rel_tol = 1e-11; ///< adaptive method only
    double abs_tol = 1e-13; ///< adaptive method only
    /// A pass whose propagator deviates from unitarity by more than this
    /// raises ConvergenceError.
    double unitarity_tol = 1e-6;

    void validate() const
    {
        if (!(max_step >= 0))
            throw ConfigError("max_step", "must be >= 0 (0 = automatic)");
        if (!(steps_per_period > 0))
            throw ConfigError("steps_per_period", "must be > 0");
        if (!(rel_tol > 0) || !(abs_tol > 0))
            throw ConfigError("tolerance", "rel_tol and abs_tol must be > 0");
        if (!(unitarity_tol > 0))
            throw ConfigError("unitarity_tol", "must be > 0");
    }
    bool operator==(const IntegratorConfig&) const = default;
};

/// One straight transit of the atom through a defect: r - r0 = v t - b for
/// t in [0, 2b/v], at detuning delta = omega_a - omega_d.
template <class Real>
struct BasicPassConfig
{
    BasicCoupling<Real> coupling;
    Real v = 0;
    Real delta = 0;
    Real b = 0;
    int mode_index = 0;
    IntegratorConfig integrator;

    void validate() const
    {
        coupling.validate();
        if (!(v > 0))
            throw ConfigError("v", "speed must be > 0");
        if (!(b > 0))
            throw ConfigError("b", "half-window must be > 0");
        if (!std::isfinite(delta))
            throw ConfigError("delta", "must be finite");
        if (mode_index < 0)
            throw ConfigError("mode", "must be >= 0");
        integrator.validate();
    }
    Real transit_time() const { return 2 * b / v; }
    bool operator==(const BasicPassConfig&) const = default;
};

using PassConfig = BasicPassConfig<double>;

/// Pass through `mode` with the default window b = 10 R_def.
template <class Real = double>
BasicPassConfig<Real> make_pass(const DefectMode& mode, Real omega_0, Real v, Real delta,
                                int mode_index = 0, IntegratorConfig integrator = {})
{
    BasicPassConfig<Real> cfg;
    cfg.coupling.omega_0 = omega_0;
    cfg.coupling.profile = profile_of<Real>(mode);
    cfg.v = v;
    cfg.delta = delta;
    cfg.b = 10 * Real(mode.R_def);
    cfg.mode_index = mode_index;
    cfg.integrator = integrator;
    return cfg;
}

template <class Real>
struct BasicPassResult
{
    std::complex<Real> u; ///< amplitude left on |e,0>
    std::complex<Real> w; ///< amplitude transferred to |g,1>
    Real norm_error = 0;
    long steps_taken = 0;
};

using PassResult = BasicPassResult<double>;

/// Propagator of one (|e,n>, |g,n+1>) block over a full pass.
template <class Real>
struct BlockPropagator
{
    Eigen::Matrix<std::complex<Real>, 2, 2> U;
    long steps = 0;
    Real unitarity_defect = 0;
};

namespace detail {

template <class Real>
using Mat2 = Eigen::Matrix<std::complex<Real>, 2, 2>;

/// -i H_I(t) U for the interaction-picture block Hamiltonian
/// H_I = [[0, c], [conj(c), 0]], c = G(t) exp(i delta t).
template <class Real>
Mat2<Real> block_rhs(std::complex<Real> c, const Mat2<Real>& U)
{
    const std::complex<Real> mi(0, -1);
    Mat2<Real> d;
    d.row(0) = mi * c * U.row(1);
    d.row(1) = mi * std::conj(c) * U.row(0);
    return d;
}

/// Exact free evolution exp(-i (delta/2) sigma_z T) that takes the
/// interaction-picture propagator back to the rotating frame.
template <class Real>
Mat2<Real> to_rotating_frame(const Mat2<Real>& UI, Real delta, Real T)
{
    Mat2<Real> U = UI;
    U.row(0) *= std::polar(Real(1), -delta * T / 2);
    U.row(1) *= std::polar(Real(1), delta * T / 2);
    return U;
}

template <class Real>
Real auto_step(const BasicPassConfig<Real>& cfg, Real scale)
{
    const Real two_pi = 2 * std::numbers::pi_v<Real>;
    const Real rabi = scale * std::abs(cfg.coupling.omega_0 * cfg.coupling.alignment);
    Real period = cfg.transit_time();
    if (rabi > 0)
        period = std::min(period, two_pi / rabi);
    if (cfg.delta != 0)
        period = std::min(period, two_pi / std::abs(cfg.delta));
    // Spatial period of the mode profile as seen by the moving atom.
    period = std::min(period, 2 * cfg.coupling.profile.lattice_a / cfg.v);
    return period / Real(cfg.integrator.steps_per_period);
}

template <class Real>
BlockPropagator<Real> rk4_block(const BasicPassConfig<Real>& cfg, Real scale, Real h_max)
{
    const Real T = cfg.transit_time();
    // Even step count so the envelope cusp at t = T/2 falls on a node.
    long n = static_cast<long>(std::ceil(T / h_max));
    n = std::max<long>(2, n + (n % 2));
    const Real h = T / n;
    const auto gs = [&](Real t) { return scale * coupling_at(cfg.coupling, cfg.coupling.profile.r0 + cfg.v * t - cfg.b); };
    const auto c = [&](Real t) { return gs(t) * std::polar(Real(1), cfg.delta * t); };

    Mat2<Real> U = Mat2<Real>::Identity();
    for (long i = 0; i < n; ++i) {
        const Real t = i * h;
        const auto c0 = c(t), c1 = c(t + h / 2), c2 = c(t + h);
        const Mat2<Real> k1 = block_rhs(c0, U);
        const Mat2<Real> k2 = block_rhs(c1, Mat2<Real>(U + h / 2 * k1));
        const Mat2<Real> k3 = block_rhs(c1, Mat2<Real>(U + h / 2 * k2));
        const Mat2<Real> k4 = block_rhs(c2, Mat2<Real>(U + h * k3));
        U += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return {to_rotating_frame(U, cfg.delta, T), n, 0};
}

template <class Real>
BlockPropagator<Real> adaptive_block(const BasicPassConfig<Real>& cfg, Real scale, Real h_max)
{
    namespace odeint = boost::numeric::odeint;
    // Re/Im split of the 2x2 propagator, column-major.
    using State = std::array<Real, 8>;
    const auto gs = [&](Real t) { return scale * coupling_at(cfg.coupling, cfg.coupling.profile.r0 + cfg.v * t - cfg.b); };
    const auto rhs = [&](const State& x, State& dxdt, Real t) {
        const Real g = gs(t);
        const Real cr = g * std::cos(cfg.delta * t), ci = g * std::sin(cfg.delta * t);
        for (int col = 0; col < 2; ++col) {
            const Real er = x[4 * col + 0], ei = x[4 * col + 1];
            const Real gr = x[4 * col + 2], gi = x[4 * col + 3];
            // de/dt = -i c g,  dg/dt = -i conj(c) e
            const Real ar = cr * gr - ci * gi, ai = cr * gi + ci * gr;
            const Real br = cr * er + ci * ei, bi = cr * ei - ci * er;
            dxdt[4 * col + 0] = ai;
            dxdt[4 * col + 1] = -ar;
            dxdt[4 * col + 2] = bi;
            dxdt[4 * col + 3] = -br;
        }
    };
    State x{1, 0, 0, 0, 0, 0, 1, 0};
    auto stepper = odeint::make_controlled(Real(cfg.integrator.abs_tol), Real(cfg.integrator.rel_tol), h_max,
                                           odeint::runge_kutta_dopri5<State, Real, State, Real>());
    const Real T = cfg.transit_time();
    long steps = 0;
    try {
        // Two legs so the cusp at T/2 is a step boundary.
        steps += static_cast<long>(odeint::integrate_adaptive(stepper, rhs, x, Real(0), T / 2, h_max / 10));
        steps += static_cast<long>(odeint::integrate_adaptive(stepper, rhs, x, T / 2, T, h_max / 10));
    } catch (const std::exception& ex) {
        throw ConvergenceError(std::string("adaptive integrator failed: ") + ex.what());
    }
    Mat2<Real> U;
    U << std::complex<Real>(x[0], x[1]), std::complex<Real>(x[4], x[5]), std::complex<Real>(x[2], x[3]),
        std::complex<Real>(x[6], x[7]);
    return {to_rotating_frame(U, cfg.delta, T), steps, 0};
}

} // namespace detail

/// Integrates one block with coupling scaled by `scale` (sqrt(n+1) for the
/// |e,n> <-> |g,n+1> block). Throws ConvergenceError if the result is not
/// unitary to the configured tolerance.
template <class Real>
BlockPropagator<Real> propagate_block(const BasicPassConfig<Real>& cfg, Real scale = 1)
{
    cfg.validate();
    Real h_max = cfg.integrator.max_step > 0 ? Real(cfg.integrator.max_step) : detail::auto_step(cfg, scale);
    h_max = std::min(h_max, cfg.transit_time() / 2);
    auto out = cfg.integrator.method == IntegratorMethod::rk4 ? detail::rk4_block(cfg, scale, h_max)
                                                              : detail::adaptive_block(cfg, scale, h_max);
    out.unitarity_defect = (out.U.adjoint() * out.U - detail::Mat2<Real>::Identity()).cwiseAbs().maxCoeff();
    if (!(out.unitarity_defect <= cfg.integrator.unitarity_tol)) {
        std::ostringstream msg;
        msg << "pass propagator not unitary: defect " << out.unitarity_defect << " > tolerance "
            << cfg.integrator.unitarity_tol << " after " << out.steps << " steps (h_max " << h_max
            << " s, transit " << cfg.transit_time() << " s); reduce max_step or tighten tolerances";
        throw ConvergenceError(msg.str());
    }
    return out;
}

/// Amplitudes (u, w) after an initially excited atom crosses an empty mode.
/// At resonance with pulse area A this gives u = cos A, w = -i sin A.
template <class Real>
BasicPassResult<Real> single_pass_amplitudes(const BasicPassConfig<Real>& cfg)
{
    const auto blk = propagate_block(cfg, Real(1));
    BasicPassResult<Real> r;
    r.u = blk.U(0, 0);
    r.w = blk.U(1, 0);
    r.norm_error = std::abs(std::norm(r.u) + std::norm(r.w) - 1);
    r.steps_taken = blk.steps;
    return r;
}

namespace detail {

inline void check_mode(int mode, int count)
{
    if (mode < 0 || mode >= count)
        throw ConfigError("mode", "index " + std::to_string(mode) + " out of range [0, " + std::to_string(count) + ")");
}

/// Applies the block matrices `blocks[n]` to every (|e,n>, |g,n+1>) pair of
/// `mode`, and `phase_g0` / `phase_e_top` to the unpaired |g,0> and
/// |e,n_max> states.
template <class Real>
BasicJointState<Real> apply_blocks(const BasicJointState<Real>& s, int mode, const std::vector<Mat2<Real>>& blocks,
                                   std::complex<Real> phase_g0, std::complex<Real> phase_e_top)
{
    using Vector = typename BasicJointState<Real>::Vector;
    const auto& a = s.amplitudes();
    Vector out = a;
    const auto fd = s.field_dim();
    const auto st = s.stride(mode);
    for (Eigen::Index i = 0; i < fd; ++i) {
        const int n = s.occupation(i, mode);
        if (n < s.n_max()) {
            const Eigen::Index k = fd + i + st;
            const auto& U = blocks[n];
            out[i] = U(0, 0) * a[i] + U(0, 1) * a[k];
            out[k] = U(1, 0) * a[i] + U(1, 1) * a[k];
        } else {
            out[i] = phase_e_top * a[i];
        }
        if (n == 0)
            out[fd + i] = phase_g0 * a[fd + i];
    }
    return s.with_amplitudes(std::move(out));
}

} // namespace detail

/**
 * Evolves the joint state through one pass over mode `cfg.mode_index`,
 * H(t) = (delta/2) sigma_z + G(v t - b) (a sigma_+ + a^dag sigma_-).
 * Other modes are spectators. Each excitation block is integrated once
 * as a 2x2 propagator and applied to all matching amplitudes.
 */
template <class Real>
BasicJointState<Real> propagate_pass(const BasicJointState<Real>& s, const BasicPassConfig<Real>& cfg)
{
    detail::check_mode(cfg.mode_index, s.mode_count());
    std::vector<detail::Mat2<Real>> blocks;
    for (int n = 0; n < s.n_max(); ++n)
        blocks.push_back(propagate_block(cfg, std::sqrt(Real(n + 1))).U);
    const Real half = cfg.delta * cfg.transit_time() / 2;
    return detail::apply_blocks(s, cfg.mode_index, blocks, std::polar(Real(1), half), std::polar(Real(1), -half));
}

/// Resonant pass through a spatially uniform mode, G -> Omega_0, with
/// area A = Omega_0 t: |e,n> -> cos(A sqrt(n+1)) |e,n> - i sin(A sqrt(n+1)) |g,n+1>.
template <class Real>
BasicJointState<Real> ideal_pulse(const BasicJointState<Real>& s, int mode, Real area)
{
    detail::check_mode(mode, s.mode_count());
    if (!std::isfinite(area))
        throw ConfigError("area", "must be finite");
    std::vector<detail::Mat2<Real>> blocks;
    for (int n = 0; n < s.n_max(); ++n) {
        const Real x = area * std::sqrt(Real(n + 1));
        detail::Mat2<Real> U;
        U << std::cos(x), std::complex<Real>(0, -std::sin(x)), std::complex<Real>(0, -std::sin(x)), std::cos(x);
        blocks.push_back(U);
    }
    return detail::apply_blocks(s, mode, blocks, std::complex<Real>(1), std::complex<Real>(1));
}

/// Dressed-state phase angle Theta = int G^2 / delta dt of a far-detuned pass.
/// Requires |delta| >= guard * Omega_0.
template <class Real>
Real dispersive_theta(const BasicPassConfig<Real>& cfg, Real guard = 10)
{
    cfg.validate();
    const Real peak = std::abs(cfg.coupling.omega_0 * cfg.coupling.alignment);
    if (!(std::abs(cfg.delta) >= guard * peak) || cfg.delta == 0) {
        std::ostringstream msg;
        msg << "|delta| = " << std::abs(cfg.delta) << " rad/s is below " << guard << " x Omega_0 = " << guard * peak
            << " rad/s";
        throw DispersiveRegimeError(msg.str());
    }
    return squared_coupling_integral(cfg.coupling, cfg.v, cfg.b) / cfg.delta;
}

/// Predicted phase factor (relative to free evolution) picked up by
/// |level, n> in a dispersive pass: exp(-i(n+1)Theta) for e, exp(+i n Theta) for g.
template <class Real>
std::complex<Real> dispersive_phase(const BasicPassConfig<Real>& cfg, int n, AtomLevel level, Real guard = 10)
{
    const Real theta = dispersive_theta(cfg, guard);
    return level == AtomLevel::e ? std::polar(Real(1), -(n + 1) * theta) : std::polar(Real(1), n * theta);
}

/// Applies the ideal dispersive phases with a given Theta to one mode.
template <class Real>
BasicJointState<Real> ideal_dispersive(const BasicJointState<Real>& s, int mode, Real theta)
{
    detail::check_mode(mode, s.mode_count());
    auto out = s.amplitudes();
    const auto fd = s.field_dim();
    for (Eigen::Index i = 0; i < fd; ++i) {
        const int n = s.occupation(i, mode);
        out[i] *= std::polar(Real(1), -(n + 1) * theta);
        out[fd + i] *= std::polar(Real(1), n * theta);
    }
    return s.with_amplitudes(std::move(out));
}

} // namespace pbgq
