#include "pbgq/gates.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "pbgq/csv.hpp"
#include "pbgq/parallel.hpp"
#include "pbgq/scenarios.hpp"

namespace pbgq {

namespace {

constexpr double inv_sqrt2 = 0.70710678118654752440;

PassConfig with_detuning(PassConfig cfg, double delta)
{
    cfg.delta = delta;
    return cfg;
}

} // namespace

EntangleResult compose_entanglement(const PassResult& first, const PassResult& second, double second_free_phase,
                                    double tolerance)
{
    EntangleResult r;
    r.alpha = first.w * std::polar(1.0, second_free_phase);
    r.beta = first.u * second.w;
    r.gamma = first.u * second.u;
    r.tolerance = tolerance;
    r.is_maximal = std::abs(std::abs(r.alpha) - inv_sqrt2) < tolerance &&
                   std::abs(std::abs(r.beta) - inv_sqrt2) < tolerance && std::abs(r.gamma) < tolerance;
    return r;
}

EntangleResult entangle_two_defects(const PassConfig& first, const PassConfig& second, double tolerance)
{
    const auto p1 = single_pass_amplitudes(first);
    const auto p2 = single_pass_amplitudes(second);
    return compose_entanglement(p1, p2, second.delta * second.transit_time() / 2, tolerance);
}

double two_mode_tangle(const EntangleResult& r)
{
    return 2 * std::abs(r.alpha) * std::abs(r.beta);
}

std::vector<DetuningRoot> scan_entanglement_minima(const PassConfig& first, const PassConfig& second_template,
                                                   double lo, double hi, const RootScanOptions& opts)
{
    if (!(hi > lo))
        throw ConfigError("delta2_range", "upper bound must exceed lower bound");
    if (opts.grid < 3)
        throw ConfigError("grid", "at least 3 points are required");

    const double u1_sq = std::norm(single_pass_amplitudes(first).u);
    const auto objective = [&](double delta2) {
        return u1_sq * std::norm(single_pass_amplitudes(with_detuning(second_template, delta2)).u);
    };

    const int n = opts.grid;
    const double step = (hi - lo) / (n - 1);
    std::vector<double> xs(n), fs(n);
    for (int i = 0; i < n; ++i)
        xs[i] = lo + step * i;
    parallel_for(n, opts.jobs, [&](std::size_t i) { fs[i] = objective(xs[i]); });

    const double omega0 = second_template.coupling.omega_0;
    const double width_tol = opts.step_factor * (omega0 > 0 ? omega0 : hi - lo);

    std::vector<int> brackets;
    for (int i = 0; i < n; ++i) {
        const bool le_left = i == 0 || fs[i] <= fs[i - 1];
        const bool le_right = i == n - 1 || fs[i] <= fs[i + 1];
        const bool strict = (i > 0 && fs[i] < fs[i - 1]) || (i < n - 1 && fs[i] < fs[i + 1]);
        if (le_left && le_right && strict)
            brackets.push_back(i);
    }

    std::vector<DetuningRoot> out(brackets.size());
    parallel_for(brackets.size(), opts.jobs, [&](std::size_t k) {
        const int i = brackets[k];
        // Golden-section search on the neighbouring grid cells.
        double a = xs[std::max(i - 1, 0)];
        double b = xs[std::min(i + 1, n - 1)];
        const double ratio = (std::sqrt(5.0) - 1) / 2;
        double c = b - ratio * (b - a), d = a + ratio * (b - a);
        double fc = objective(c), fd = objective(d);
        while (b - a > width_tol) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - ratio * (b - a);
                fc = objective(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + ratio * (b - a);
                fd = objective(d);
            }
        }
        double best = (a + b) / 2;
        if (fs[i] < std::min(fc, fd))
            best = xs[i];

        const auto r = entangle_two_defects(first, with_detuning(second_template, best), opts.tolerance);
        const double g = std::abs(r.gamma);
        const double dev = std::abs(std::abs(r.alpha) - inv_sqrt2);
        out[k] = {best, g, dev, g < opts.tolerance && dev < opts.tolerance};
    });
    return out;
}

std::vector<DetuningRoot> find_max_entanglement_detunings(const PassConfig& first, const PassConfig& second_template,
                                                          double lo, double hi, const RootScanOptions& opts)
{
    std::vector<DetuningRoot> roots;
    for (const auto& m : scan_entanglement_minima(first, second_template, lo, hi, opts))
        if (m.certified)
            roots.push_back(m);
    return roots;
}

CnotCalibration CnotCalibration::standard()
{
    constexpr double pi = std::numbers::pi;
    CnotCalibration c;
    c.transfer_area = pi / 2;
    c.rotation = pi / 4;
    c.dispersive_theta = pi / 2;
    // e/g relative phase left by the dispersive pass with the cavity empty
    // is exp(-i Theta); the z-rotation removes it.
    c.compensation_angle = -pi / 2;
    c.write_area = 3 * pi / 2;
    return c;
}

CnotLayout CnotLayout::optical()
{
    CnotLayout l;
    l.atom = scenarios::rb_optical();
    l.modes = {scenarios::optical_defect("p"), scenarios::optical_defect("q"), scenarios::optical_defect("p'")};
    return l;
}

double calibrate_omega0(const DefectMode& mode, double v, double area)
{
    Coupling unit;
    unit.omega_0 = 1;
    unit.profile = profile_of<double>(mode);
    const double per_unit = pulse_area(unit, v, 10 * mode.R_def);
    if (per_unit == 0)
        throw ConfigError("phi", "mode profile has zero pulse area");
    const double omega0 = area / per_unit;
    if (!(omega0 >= 0))
        throw ConfigError("area", "sign incompatible with the mode profile");
    return omega0;
}

FlightPlan build_cnot_plan(const CnotCalibration& calib, CnotVariant variant, const CnotLayout& layout)
{
    const auto need = [](const std::optional<double>& x, const char* name) {
        if (!x)
            throw ConfigError(name, "missing CNOT calibration value");
        return *x;
    };
    const double transfer = need(calib.transfer_area, "transfer_area");
    const double rotation = need(calib.rotation, "rotation");
    const double theta = need(calib.dispersive_theta, "dispersive_theta");
    const double comp = need(calib.compensation_angle, "compensation_angle");
    const double write = need(calib.write_area, "write_area");

    const int n = static_cast<int>(layout.modes.size());
    for (int m : {layout.p, layout.q, layout.p_out})
        if (m < 0 || m >= n)
            throw ConfigError("modes", "CNOT role index out of range");

    FlightPlan plan;
    plan.atom = layout.atom;
    plan.modes = layout.modes;
    plan.initial = {AtomLevel::g, std::vector<int>(layout.modes.size(), 0)};

    const auto exchange = [&](int mode, double area) -> Segment {
        if (variant == CnotVariant::ideal)
            return IdealPulse{mode, area};
        const auto& m = layout.modes[mode];
        return DefectPass{make_pass<double>(m, calibrate_omega0(m, layout.v, area), layout.v, 0.0, mode,
                                            layout.integrator)};
    };

    plan.segments = {
        exchange(layout.p, transfer),
        ClassicalRotation{rotation, calib.field_phase},
        IdealDispersive{layout.q, theta},
        ZRotation{comp},
        ClassicalRotation{-rotation, calib.field_phase},
        exchange(layout.p_out, write),
    };
    return plan;
}

GateReport cnot_truth_table(const FlightPlan& plan, const CnotRoles& roles)
{
    const int n = static_cast<int>(plan.modes.size());
    for (int m : {roles.p, roles.q, roles.p_out})
        if (m < 0 || m >= n)
            throw ConfigError("roles", "mode index out of range");
    if (roles.p == roles.q || roles.q == roles.p_out)
        throw ConfigError("roles", "control must differ from the target modes");

    GateReport rep;
    rep.truth.setZero();
    rep.occupation_map.setZero();
    rep.classical_fidelity = 1;
    rep.min_atom_ground = 1;

    for (int in = 0; in < 4; ++in) {
        const int p_in = in >> 1, q_in = in & 1;
        std::vector<int> occ(n, 0);
        occ[roles.p] = p_in;
        occ[roles.q] = q_in;
        const auto initial = build_state(AtomLevel::g, occ, plan.modes, plan.n_max);
        const auto out = execute_plan(plan, initial).final_state();

        const double norm = out.norm_squared();
        for (Eigen::Index i = 0; i < out.dim(); ++i) {
            const int j = out.occupation(i, roles.p_out), k = out.occupation(i, roles.q);
            if (j <= 1 && k <= 1)
                rep.truth(in, 2 * j + k) += std::norm(out.amplitudes()[i]) / norm;
        }
        for (int o = 0; o < 4; ++o) {
            std::vector<int> occ_out(n, 0);
            occ_out[roles.p_out] = o >> 1;
            occ_out[roles.q] = o & 1;
            rep.occupation_map(o, in) = out.amplitude({AtomLevel::g, occ_out}) / std::sqrt(norm);
        }

        const int expected = 2 * (p_in ^ q_in) + q_in;
        rep.classical_fidelity = std::min(rep.classical_fidelity, rep.truth(in, expected));
        rep.output_phase[in] = std::arg(rep.occupation_map(expected, in));
        rep.atom_excited[in] = atom_population(out, AtomLevel::e);
        rep.min_atom_ground = std::min(rep.min_atom_ground, 1 - rep.atom_excited[in]);
    }
    rep.unitarity_defect =
        (rep.occupation_map.adjoint() * rep.occupation_map - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff();
    return rep;
}

void SweepSpec::validate() const
{
    if (count < 1)
        throw ConfigError("count", "must be >= 1");
    if (count > 1 && !(to != from))
        throw ConfigError("to", "range must be nonempty");
    if (!std::isfinite(from) || !std::isfinite(to))
        throw ConfigError("from", "range must be finite");
}

SweepTable sweep(const SweepSpec& spec, int jobs)
{
    spec.validate();
    SweepTable table{spec.parameter, std::vector<SweepRow>(spec.count)};
    parallel_for(spec.count, jobs, [&](std::size_t i) {
        auto& row = table.rows[i];
        row.value = spec.value(static_cast<int>(i));
        PassConfig cfg = spec.base;
        if (spec.parameter == SweepParameter::velocity)
            cfg.v = row.value;
        else
            cfg.delta = row.value;
        try {
            row.result = single_pass_amplitudes(cfg);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });
    return table;
}

std::string sweep_column_name(SweepParameter p)
{
    return p == SweepParameter::velocity ? "v_m_per_s" : "delta_rad_per_s";
}

void write_sweep_csv(std::ostream& os, const SweepTable& table)
{
    csv::write_row(os, {sweep_column_name(table.parameter), "u2"});
    for (const auto& row : table.rows)
        csv::write_row(os, {csv::format(row.value), csv::format(row.result ? std::norm(row.result->u) : NAN)});
}

} // namespace pbgq
