#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pbgq/dynamics.hpp"
#include "pbgq/state.hpp"

namespace pbgq {

/// Transit through a point defect, integrated in full.
struct DefectPass
{
    PassConfig pass;
    bool operator==(const DefectPass&) const = default;
};

/// Resonant exchange with a spatially uniform mode of given area.
struct IdealPulse
{
    int mode = 0;
    double area = 0;
    bool operator==(const IdealPulse&) const = default;
};

/// Bloch rotation by a resonant classical field in a line defect,
/// U = cos(theta) I + i sin(theta) (cos(phase) sigma_x + sin(phase) sigma_y).
struct ClassicalRotation
{
    double theta = 0;
    double field_phase = 0;
    bool operator==(const ClassicalRotation&) const = default;
};

/// Far-detuned transit, integrated in full. The detuning must satisfy
/// |delta| >= guard * Omega_0.
struct DispersivePass
{
    PassConfig pass;
    double guard = 10;
    bool operator==(const DispersivePass&) const = default;
};

/// Dressed-shift phases with a prescribed Theta, no integration.
struct IdealDispersive
{
    int mode = 0;
    double theta = 0;
    bool operator==(const IdealDispersive&) const = default;
};

/// exp(-i angle/2) on |e>, exp(+i angle/2) on |g>.
struct ZRotation
{
    double angle = 0;
    bool operator==(const ZRotation&) const = default;
};

/// Free flight between defects, during which photons may leak.
struct LossInterval
{
    double duration = 0;
    bool operator==(const LossInterval&) const = default;
};

/// Projective atomic measurement. Without a seed, one is derived from the
/// plan seed and the segment index.
struct MeasureAtom
{
    std::optional<std::uint64_t> seed;
    bool operator==(const MeasureAtom&) const = default;
};

using Segment = std::variant<DefectPass, IdealPulse, ClassicalRotation, DispersivePass, IdealDispersive, ZRotation,
                             LossInterval, MeasureAtom>;

/// Variant name as used in configuration documents ("DefectPass", ...).
std::string segment_kind(const Segment& s);

/// Physical duration of a segment (s). Rotations and ideal operations are
/// instantaneous.
double segment_duration(const Segment& s);

struct FlightPlan
{
    AtomSpecies atom;
    std::vector<DefectMode> modes;
    BasisLabel initial;
    int n_max = 1;
    std::vector<Segment> segments;
    std::uint64_t seed = 0;

    /// Checks the atom, the modes, the initial label and every segment.
    /// Throws ConfigError (or SegmentError wrapping it).
    void validate() const;
    bool operator==(const FlightPlan&) const = default;
};

/// Per-mode energy decay rates kappa = omega_d / Q.
struct LossModel
{
    std::vector<double> kappa;

    static LossModel from_modes(const std::vector<DefectMode>& modes);
};

struct Snapshot
{
    std::size_t segment_index;
    std::string kind;
    JointState state;
    std::optional<MeasurementRecord<double>> measurement;
    double leak_probability; ///< cumulative
    double elapsed;          ///< s, at the end of the segment
};

struct TrajectoryRecord
{
    JointState initial;
    std::vector<Snapshot> snapshots;

    const JointState& final_state() const { return snapshots.empty() ? initial : snapshots.back().state; }
    double total_leak() const { return snapshots.empty() ? 0.0 : snapshots.back().leak_probability; }
};

JointState apply_classical_rotation(const JointState& s, double theta, double field_phase = 0);
JointState apply_z_rotation(const JointState& s, double angle);

struct LossOutcome
{
    JointState state;        ///< renormalized no-jump state
    double leak_probability; ///< 1 - survival^2 over this interval
};

/// No-jump evolution: amplitudes with occupations {n_k} decay as
/// prod_k exp(-n_k kappa_k t / 2); the lost weight is the leak probability.
LossOutcome apply_loss(const JointState& s, double duration, const LossModel& loss);

TrajectoryRecord execute_plan(const FlightPlan& plan);
TrajectoryRecord execute_plan(const FlightPlan& plan, const JointState& initial);

} // namespace pbgq
