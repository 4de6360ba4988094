#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pbgq/dynamics.hpp"
#include "pbgq/flightplan.hpp"

namespace pbgq {

// ---------------------------------------------------------------------------
// Two-defect entanglement

/// alpha |g,1,0> + beta |g,0,1> + gamma |e,0,0> after an excited atom
/// crosses two empty defects.
struct EntangleResult
{
    std::complex<double> alpha, beta, gamma;
    bool is_maximal = false;
    double tolerance = 0.02;
};

/**
 * Composes two single passes: alpha = w1, beta = u1 w2, gamma = u1 u2.
 *
 * alpha additionally carries the phase exp(i delta2 T2 / 2) that |g,1,0>
 * accrues as a spectator during the second pass, so the triple equals the
 * sequential joint-state simulation amplitude by amplitude. Magnitudes are
 * unaffected.
 */
EntangleResult entangle_two_defects(const PassConfig& first, const PassConfig& second, double tolerance = 0.02);

EntangleResult compose_entanglement(const PassResult& first, const PassResult& second, double second_free_phase,
                                    double tolerance = 0.02);

/// Concurrence of the two-mode state left after tracing out the atom,
/// 2 |alpha| |beta| for this family.
double two_mode_tangle(const EntangleResult& r);

struct DetuningRoot
{
    double delta2;          ///< rad/s
    double abs_gamma;       ///< |gamma| re-simulated at delta2
    double alpha_deviation; ///< ||alpha| - 1/sqrt(2)|
    bool certified;         ///< both below tolerance
};

struct RootScanOptions
{
    int grid = 201;
    double tolerance = 0.02;
    /// Refinement stops when the bracket is narrower than this times Omega_0
    /// of the second pass (or times the scan width if Omega_0 = 0).
    double step_factor = 1e-4;
    int jobs = 1;
};

/// Grid-scans |gamma(delta2)|^2 over [lo, hi], refines every local minimum by
/// golden-section search and re-simulates each from scratch. Returns all
/// refined minima in ascending delta2, certified or not.
std::vector<DetuningRoot> scan_entanglement_minima(const PassConfig& first, const PassConfig& second_template,
                                                   double lo, double hi, const RootScanOptions& opts = {});

/// The certified subset of scan_entanglement_minima.
std::vector<DetuningRoot> find_max_entanglement_detunings(const PassConfig& first, const PassConfig& second_template,
                                                          double lo, double hi, const RootScanOptions& opts = {});

// ---------------------------------------------------------------------------
// CNOT

/// Angles of the CNOT sequence. Any unset field is a configuration error.
struct CnotCalibration
{
    std::optional<double> transfer_area;      ///< p -> atom, pi/2
    std::optional<double> rotation;           ///< line defect R1, pi/4 (R2 applies the inverse)
    std::optional<double> dispersive_theta;   ///< pass through q, pi/2
    std::optional<double> compensation_angle; ///< z-rotation, -Theta
    std::optional<double> write_area;         ///< atom -> p', 3pi/2
    double field_phase = 0;

    static CnotCalibration standard();
};

/// Registry and kinematics used to lay out a CNOT plan.
struct CnotLayout
{
    AtomSpecies atom;
    std::vector<DefectMode> modes; ///< p, q, p'
    int p = 0, q = 1, p_out = 2;
    double v = 278;                ///< m/s, physical variant only
    IntegratorConfig integrator;

    static CnotLayout optical();
};

enum class CnotVariant { ideal, physical };

/// [IdealPulse(p), ClassicalRotation, IdealDispersive(q), ZRotation,
///  ClassicalRotation^-1, IdealPulse(p')]. The physical variant replaces
/// both ideal pulses by resonant DefectPasses whose Omega_0 is set so the
/// pulse area equals the calibrated value.
FlightPlan build_cnot_plan(const CnotCalibration& calib, CnotVariant variant = CnotVariant::ideal,
                           const CnotLayout& layout = CnotLayout::optical());

/// Omega_0 giving a resonant pass of area `area` through `mode` at speed v.
double calibrate_omega0(const DefectMode& mode, double v, double area);

struct CnotRoles
{
    int p = 0, q = 1, p_out = 2;
};

/**
 * Truth table of a CNOT plan over the four (p, q) occupation inputs, index
 * 2p + q. Row i is the distribution of the output occupations (p', q), index
 * 2p' + q, with every other degree of freedom traced out.
 */
struct GateReport
{
    Eigen::Matrix4d truth;
    /// Amplitudes <g, p'=j, q=k, others 0 | U | g, p, q>, the gate restricted
    /// to the atom returning to |g>.
    Eigen::Matrix4cd occupation_map;
    std::array<double, 4> output_phase{}; ///< arg of the expected-output amplitude
    std::array<double, 4> atom_excited{}; ///< residual P(e) per input
    double classical_fidelity = 0;        ///< min over inputs of P(correct output)
    double min_atom_ground = 0;
    double unitarity_defect = 0; ///< max |M^dag M - I| of occupation_map
};

GateReport cnot_truth_table(const FlightPlan& plan, const CnotRoles& roles = {});

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepParameter { velocity, detuning };

struct SweepSpec
{
    SweepParameter parameter = SweepParameter::velocity;
    double from = 0, to = 0;
    int count = 2;
    PassConfig base;

    void validate() const;
    double value(int i) const { return count == 1 ? from : from + (to - from) * i / (count - 1); }
};

struct SweepRow
{
    double value;
    std::optional<PassResult> result;
    std::string error;
};

struct SweepTable
{
    SweepParameter parameter;
    std::vector<SweepRow> rows;
};

/// Evaluates single_pass_amplitudes at every grid point. Failing points are
/// recorded in their row rather than aborting the sweep.
SweepTable sweep(const SweepSpec& spec, int jobs = 1);

std::string sweep_column_name(SweepParameter p);

/// Header "<parameter>,u2" and one row per grid point.
void write_sweep_csv(std::ostream& os, const SweepTable& table);

} // namespace pbgq
