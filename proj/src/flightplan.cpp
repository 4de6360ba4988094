#include "pbgq/flightplan.hpp"

#include <cmath>

namespace pbgq {

namespace {

template <class... Ts>
struct overloaded : Ts...
{
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index)
{
    // splitmix64 finalizer
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

void check_pass(const PassConfig& p, std::size_t mode_count)
{
    p.validate();
    if (p.mode_index >= static_cast<int>(mode_count))
        throw ConfigError("mode", "index " + std::to_string(p.mode_index) + " out of range");
}

void check_mode(int mode, std::size_t mode_count)
{
    if (mode < 0 || mode >= static_cast<int>(mode_count))
        throw ConfigError("mode", "index " + std::to_string(mode) + " out of range");
}

} // namespace

std::string segment_kind(const Segment& s)
{
    return std::visit(overloaded{
                          [](const DefectPass&) { return "DefectPass"; },
                          [](const IdealPulse&) { return "IdealPulse"; },
                          [](const ClassicalRotation&) { return "ClassicalRotation"; },
                          [](const DispersivePass&) { return "DispersivePass"; },
                          [](const IdealDispersive&) { return "IdealDispersive"; },
                          [](const ZRotation&) { return "ZRotation"; },
                          [](const LossInterval&) { return "LossInterval"; },
                          [](const MeasureAtom&) { return "MeasureAtom"; },
                      },
                      s);
}

double segment_duration(const Segment& s)
{
    return std::visit(overloaded{
                          [](const DefectPass& d) { return d.pass.transit_time(); },
                          [](const DispersivePass& d) { return d.pass.transit_time(); },
                          [](const LossInterval& l) { return l.duration; },
                          [](const auto&) { return 0.0; },
                      },
                      s);
}

void FlightPlan::validate() const
{
    atom.validate();
    if (modes.empty())
        throw ConfigError("modes", "at least one mode is required");
    for (std::size_t k = 0; k < modes.size(); ++k) {
        try {
            modes[k].validate();
        } catch (const ConfigError& e) {
            throw e.nested("modes[" + std::to_string(k) + "]");
        }
    }
    if (n_max < 1)
        throw ConfigError("n_max", "must be >= 1");
    if (initial.occupations.size() != modes.size())
        throw ConfigError("initial_state.occupations", "length must equal the mode count");
    for (int n : initial.occupations)
        if (n < 0 || n > n_max)
            throw TruncationError("initial occupation " + std::to_string(n) + " outside [0, n_max]");

    for (std::size_t i = 0; i < segments.size(); ++i) {
        try {
            std::visit(overloaded{
                           [&](const DefectPass& d) { check_pass(d.pass, modes.size()); },
                           [&](const DispersivePass& d) {
                               check_pass(d.pass, modes.size());
                               if (!(d.guard > 0))
                                   throw ConfigError("guard", "must be > 0");
                           },
                           [&](const IdealPulse& p) {
                               check_mode(p.mode, modes.size());
                               if (!std::isfinite(p.area))
                                   throw ConfigError("area", "must be finite");
                           },
                           [&](const IdealDispersive& p) {
                               check_mode(p.mode, modes.size());
                               if (!std::isfinite(p.theta))
                                   throw ConfigError("theta", "must be finite");
                           },
                           [&](const ClassicalRotation& r) {
                               if (!std::isfinite(r.theta) || !std::isfinite(r.field_phase))
                                   throw ConfigError("theta", "must be finite");
                           },
                           [&](const ZRotation& z) {
                               if (!std::isfinite(z.angle))
                                   throw ConfigError("angle", "must be finite");
                           },
                           [&](const LossInterval& l) {
                               if (!(l.duration >= 0) || !std::isfinite(l.duration))
                                   throw ConfigError("duration", "must be finite and >= 0");
                           },
                           [&](const MeasureAtom&) {},
                       },
                       segments[i]);
        } catch (const ConfigError& e) {
            throw e.nested("segments[" + std::to_string(i) + "]");
        }
    }
}

LossModel LossModel::from_modes(const std::vector<DefectMode>& modes)
{
    LossModel m;
    for (const auto& mode : modes)
        m.kappa.push_back(std::isfinite(mode.Q) ? mode.omega_d / mode.Q : 0.0);
    return m;
}

JointState apply_classical_rotation(const JointState& s, double theta, double field_phase)
{
    const auto n = s.field_dim();
    const auto& a = s.amplitudes();
    const std::complex<double> c = std::cos(theta);
    const std::complex<double> i_sin(0, std::sin(theta));
    // (e, g) <- [[c, i sin e^{-i phi}], [i sin e^{+i phi}, c]] (e, g)
    const auto off_eg = i_sin * std::polar(1.0, -field_phase);
    const auto off_ge = i_sin * std::polar(1.0, field_phase);
    JointState::Vector out(a.size());
    out.head(n) = c * a.head(n) + off_eg * a.tail(n);
    out.tail(n) = off_ge * a.head(n) + c * a.tail(n);
    return s.with_amplitudes(std::move(out));
}

JointState apply_z_rotation(const JointState& s, double angle)
{
    const auto n = s.field_dim();
    JointState::Vector out = s.amplitudes();
    out.head(n) *= std::polar(1.0, -angle / 2);
    out.tail(n) *= std::polar(1.0, angle / 2);
    return s.with_amplitudes(std::move(out));
}

LossOutcome apply_loss(const JointState& s, double duration, const LossModel& loss)
{
    if (!(duration >= 0))
        throw ConfigError("duration", "must be >= 0");
    if (loss.kappa.size() != static_cast<std::size_t>(s.mode_count()))
        throw ConfigError("kappa", "one decay rate per mode is required");
    JointState::Vector out = s.amplitudes();
    for (Eigen::Index i = 0; i < s.dim(); ++i) {
        double rate = 0;
        for (int k = 0; k < s.mode_count(); ++k)
            rate += s.occupation(i, k) * loss.kappa[k];
        if (rate > 0)
            out[i] *= std::exp(-rate * duration / 2);
    }
    const double before = s.norm_squared();
    const double after = out.squaredNorm();
    if (!(after > 0))
        throw DegenerateMeasurementError("no-jump branch has zero norm");
    out /= std::sqrt(after);
    return {s.with_amplitudes(std::move(out)), 1.0 - after / before};
}

TrajectoryRecord execute_plan(const FlightPlan& plan)
{
    plan.validate();
    const auto initial = build_state(plan.initial.atom, plan.initial.occupations, plan.modes, plan.n_max);
    return execute_plan(plan, initial);
}

TrajectoryRecord execute_plan(const FlightPlan& plan, const JointState& initial)
{
    plan.validate();
    if (initial.mode_count() != static_cast<int>(plan.modes.size()))
        throw ConfigError("initial_state", "mode count does not match the plan");

    const auto loss = LossModel::from_modes(plan.modes);
    TrajectoryRecord rec{initial, {}};
    JointState state = initial;
    double leak = 0;
    double elapsed = 0;

    for (std::size_t i = 0; i < plan.segments.size(); ++i) {
        const Segment& seg = plan.segments[i];
        std::optional<MeasurementRecord<double>> measurement;
        try {
            state = std::visit(
                overloaded{
                    [&](const DefectPass& d) { return propagate_pass(state, d.pass); },
                    [&](const DispersivePass& d) {
                        // Regime check only; the evolution itself is exact.
                        dispersive_theta(d.pass, d.guard);
                        return propagate_pass(state, d.pass);
                    },
                    [&](const IdealPulse& p) { return ideal_pulse(state, p.mode, p.area); },
                    [&](const IdealDispersive& p) { return ideal_dispersive(state, p.mode, p.theta); },
                    [&](const ClassicalRotation& r) { return apply_classical_rotation(state, r.theta, r.field_phase); },
                    [&](const ZRotation& z) { return apply_z_rotation(state, z.angle); },
                    [&](const LossInterval& l) {
                        auto out = apply_loss(state, l.duration, loss);
                        leak += (1 - leak) * out.leak_probability;
                        return out.state;
                    },
                    [&](const MeasureAtom& m) {
                        auto r = measure_atom(state, m.seed.value_or(mix_seed(plan.seed, i)));
                        auto collapsed = r.collapsed_state;
                        measurement = std::move(r);
                        return collapsed;
                    },
                },
                seg);
        } catch (const SegmentError&) {
            throw;
        } catch (const std::exception& e) {
            throw SegmentError(i, segment_kind(seg) + ": " + e.what());
        }
        elapsed += segment_duration(seg);
        rec.snapshots.push_back({i, segment_kind(seg), state, std::move(measurement), leak, elapsed});
    }
    return rec;
}

} // namespace pbgq
