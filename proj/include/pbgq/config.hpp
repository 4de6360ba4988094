#pragma once

// JSON configuration documents. Every physical quantity carries its SI unit
// in the key name (v_m_per_s, omega0_rad_per_s, ...). Unknown keys are an
// error unless the context is lenient, in which case they are collected as
// warnings.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "pbgq/budget.hpp"
#include "pbgq/flightplan.hpp"
#include "pbgq/gates.hpp"

namespace pbgq::config {

using Json = nlohmann::json;

struct Context
{
    bool lenient = false;
    std::vector<std::string> warnings;
};

/// Parses JSON text. Syntax errors become ConfigError with field "document"
/// and the line/column in the message.
Json parse_text(std::string_view text);
Json load_file(const std::string& path);

struct OutputSection
{
    std::optional<std::string> format; ///< "csv", "text" or "json"
    std::optional<std::string> path;
};

// ---------------------------------------------------------------------------
// Flight plans
//
// {
//   "atom": {"label": "...", "omega_a_rad_per_s": ..., "d21_C_m": ...},
//   "modes": [{"name": "p", "omega_d_rad_per_s": ..., "R_def_m": ...,
//              "lattice_a_m": ..., "phi_rad": 0, "Q": 1e10}],
//   "initial_state": "e,0",
//   "n_max": 1, "seed": 0,
//   "integrator": {"method": "rk4", "max_step_s": 0, "steps_per_period": 400,
//                  "rel_tol": ..., "abs_tol": ..., "unitarity_tol": ...},
//   "segments": [{"type": "DefectPass", "mode": 0, "omega0_rad_per_s": ...,
//                 "v_m_per_s": ..., "delta_rad_per_s": 0}, ...],
//   "output": {"format": "text", "path": "out.json"}
// }
//
// Pass segments take their profile (R_def_m, lattice_a_m, phi_rad) from the
// referenced mode unless overridden, b_m defaults to 10 R_def and the
// integrator to the document-level section. Q may be omitted (lossless).

struct PlanDocument
{
    FlightPlan plan;
    OutputSection output;
};

PlanDocument parse_plan_document(const Json& doc, Context& ctx);

/// Parses and validates a plan; a document with no segments is rejected.
FlightPlan parse_plan(const Json& doc, Context& ctx);
FlightPlan parse_plan(const Json& doc);

/// Serializes a plan so that parse_plan reproduces it exactly.
Json plan_to_json(const FlightPlan& plan);

// ---------------------------------------------------------------------------
// States and results

/// {"n_max": 1, "modes": [...], "amplitudes": [{"label": "e,0", "re": ..., "im": ...}]}
/// Labels absent from "amplitudes" have zero amplitude.
Json state_to_json(const JointState& s);
JointState state_from_json(const Json& doc, Context& ctx);
JointState state_from_json(const Json& doc);

Json trajectory_to_json(const TrajectoryRecord& rec);
Json gate_report_to_json(const GateReport& rep);

// ---------------------------------------------------------------------------
// Subcommand documents

/// {"modes": [...], "integrator": {...}, "pass": {pass keys},
///  "sweep": {"parameter": "v_m_per_s" | "delta_rad_per_s", "from": ..., "to": ..., "count": ...}}
/// The swept key may be omitted from "pass".
struct SweepDocument
{
    SweepSpec spec;
    OutputSection output;
};
SweepDocument parse_sweep(const Json& doc, Context& ctx);

/// {"modes": [...], "integrator": {...}, "first": {pass}, "second": {pass},
///  "scan": {"delta2_over_omega0_from": 0, "delta2_over_omega0_to": 0.35,
///           "grid": 201, "tolerance": 0.02, "step_factor": 1e-4}}
/// The second pass may omit delta_rad_per_s.
struct CalibrateDocument
{
    PassConfig first;
    PassConfig second;
    double delta2_lo = 0, delta2_hi = 0; ///< rad/s
    RootScanOptions options;
    OutputSection output;
};
CalibrateDocument parse_calibrate(const Json& doc, Context& ctx);

/// {"atom": {...}, "modes": [p, q, p'], "integrator": {...},
///  "calibration": {"transfer_area_rad": ..., "rotation_rad": ..., "dispersive_theta_rad": ...,
///                  "compensation_angle_rad": ..., "write_area_rad": ..., "field_phase_rad": 0},
///  "variant": "ideal" | "physical", "v_m_per_s": 278, "roles": {"p": 0, "q": 1, "p_out": 2}}
struct GateDocument
{
    CnotCalibration calibration;
    CnotVariant variant = CnotVariant::ideal;
    CnotLayout layout;
    CnotRoles roles;
    OutputSection output;
};
GateDocument parse_gate(const Json& doc, Context& ctx);

/// Every key is optional and overrides BudgetScenario::standard():
/// {"optical": {inputs}, "microwave": {inputs}, "optical_atom": {...}, "microwave_atom": {...},
///  "field_speed_m_per_s": 100, "free_fall_speed_m_per_s": 0.3, "theta_target_rad": 6.28...}
/// inputs: epsilon2, eta, omega_d_rad_per_s, separation_lattice_constants,
///         v_m_per_s, lattice_a_m, R_def_m, waveguide_width_m.
struct BudgetDocument
{
    BudgetScenario scenario;
    OutputSection output;
};
BudgetDocument parse_budget(const Json& doc, Context& ctx);

} // namespace pbgq::config
