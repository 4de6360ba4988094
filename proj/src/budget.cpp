#include "pbgq/budget.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>

#include "pbgq/constants.hpp"
#include "pbgq/errors.hpp"
#include "pbgq/scenarios.hpp"

namespace pbgq {

namespace {

void require_positive(double x, const char* name)
{
    if (!(x > 0) || !std::isfinite(x))
        throw ConfigError(name, "must be finite and > 0");
}

std::string sci(double x, int digits = 2)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*e", digits - 1, x);
    return buf;
}

} // namespace

double q_from_absorption(double epsilon2, double eta)
{
    require_positive(epsilon2, "epsilon2");
    require_positive(eta, "eta");
    if (eta > 1)
        throw ConfigError("eta", "must be <= 1");
    return (1 / eta) / epsilon2;
}

double photon_lifetime(double Q, double omega_d)
{
    require_positive(Q, "Q");
    require_positive(omega_d, "omega_d");
    return Q / omega_d;
}

double min_field_for_rotation(const AtomSpecies& atom, double v, double waveguide_width, double theta_target)
{
    atom.validate();
    require_positive(v, "v");
    require_positive(waveguide_width, "waveguide_width");
    require_positive(theta_target, "theta_target");
    // theta = R0 t with R0 = d21 E / 2 hbar and t = width / v
    return 2 * constants::hbar * theta_target * v / (atom.d21 * waveguide_width);
}

void BudgetInputs::validate() const
{
    require_positive(epsilon2, "epsilon2");
    require_positive(eta, "eta");
    if (eta > 1)
        throw ConfigError("eta", "must be <= 1");
    require_positive(omega_d, "omega_d");
    require_positive(separation_in_lattice_constants, "separation_in_lattice_constants");
    require_positive(v, "v");
    require_positive(lattice_a, "lattice_a");
    require_positive(R_def, "R_def");
    if (!(waveguide_width >= 0))
        throw ConfigError("waveguide_width", "must be >= 0");
}

double BudgetInputs::width() const
{
    return waveguide_width > 0 ? waveguide_width : 2 * constants::wavelength_from_omega(omega_d);
}

GateTime gate_time(const BudgetInputs& in)
{
    in.validate();
    const double window = 2 * 10 * in.R_def / in.v;
    const double transit = in.separation_in_lattice_constants * in.lattice_a / in.v;
    return {window, transit, window + transit};
}

double decoherence_gate_ratio(const BudgetInputs& in, double tau)
{
    require_positive(tau, "tau");
    return tau / gate_time(in).total;
}

BudgetScenario BudgetScenario::standard()
{
    BudgetScenario s;
    s.optical_atom = scenarios::rb_optical();
    s.microwave_atom = scenarios::rb_microwave();

    s.optical.omega_d = scenarios::optical_omega_a;
    s.optical.lattice_a = s.optical.R_def = scenarios::optical_lattice_constant();
    s.optical.v = scenarios::entangling_speed;

    s.microwave.omega_d = s.microwave_atom.omega_a;
    s.microwave.lattice_a = s.microwave.R_def = 0.8 * scenarios::microwave_wavelength;
    s.microwave.v = 100;
    return s;
}

BudgetLedger build_budget_ledger(const BudgetScenario& s)
{
    BudgetLedger L;
    auto add = [&](std::string section, std::string quantity, double value, std::string unit, std::string note = {}) {
        L.entries.push_back({std::move(section), std::move(quantity), value, std::move(unit), std::move(note)});
    };

    const double Q_opt = q_from_absorption(s.optical.epsilon2, s.optical.eta);
    const double Q_mw = q_from_absorption(s.microwave.epsilon2, s.microwave.eta);
    add("absorption", "epsilon2", s.optical.epsilon2, "");
    add("absorption", "eta (mode fraction in dielectric)", s.optical.eta, "");
    add("absorption", "Q = 1/(eta epsilon2)", Q_opt, "", "quoted: 1e10");

    const double tau_mw = photon_lifetime(Q_mw, s.microwave.omega_d);
    const double tau_opt = photon_lifetime(Q_opt, s.optical.omega_d);
    add("lifetime", "microwave omega_d", s.microwave.omega_d, "rad/s");
    add("lifetime", "microwave tau = Q/omega_d", tau_mw, "s", "quoted: 1e-1 s");
    add("lifetime", "optical omega_d", s.optical.omega_d, "rad/s");
    add("lifetime", "optical tau = Q/omega_d", tau_opt, "s", "quoted: 1e-4 s");
    L.remarks.push_back("optical photon lifetime discrepancy: computed " + sci(tau_opt) +
                        " s vs. quoted 1e-04 s (tau = Q/omega_d at Q = " + sci(Q_opt) +
                        ", omega_d = " + sci(s.optical.omega_d) + " rad/s); not reconciled");

    const double lambda_mw = constants::wavelength_from_omega(s.microwave_atom.omega_a);
    const double lambda_opt = constants::wavelength_from_omega(s.optical_atom.omega_a);
    const double E_mw = min_field_for_rotation(s.microwave_atom, s.field_speed, 2 * lambda_mw, s.theta_target);
    const double E_opt = min_field_for_rotation(s.optical_atom, s.field_speed, 2 * lambda_opt, s.theta_target);
    const double E_ff = min_field_for_rotation(s.optical_atom, s.free_fall_speed, 2 * lambda_opt, s.theta_target);
    add("field", "theta_target", s.theta_target, "rad", "waveguide width 2 lambda");
    add("field", "microwave E at " + sci(s.field_speed) + " m/s", E_mw, "V/m", "quoted: ~1e-3 V/m");
    add("field", "optical E at " + sci(s.field_speed) + " m/s", E_opt, "V/m", "quoted: ~9e3 V/m");
    add("field", "optical E at " + sci(s.free_fall_speed) + " m/s", E_ff, "V/m", "quoted: ~30 V/m");

    for (const auto& [name, in, tau] : {std::tuple{"optical", s.optical, tau_opt},
                                        std::tuple{"microwave", s.microwave, tau_mw}}) {
        const auto gt = gate_time(in);
        const std::string sec = std::string("ratio/") + name;
        add(sec, "v", in.v, "m/s");
        add(sec, "lattice_a = R_def", in.lattice_a, "m");
        add(sec, "separation", in.separation_in_lattice_constants, "lattice constants");
        add(sec, "pass window 2b/v", gt.pass_window, "s");
        add(sec, "inter-defect transit", gt.transit, "s");
        add(sec, "gate time", gt.total, "s");
        add(sec, "tau / gate time", decoherence_gate_ratio(in, tau), "", "quoted: ~200");
    }
    L.remarks.push_back(std::string("convention: ") + gate_time_convention);
    return L;
}

void BudgetLedger::render_text(std::ostream& os) const
{
    std::string section;
    for (const auto& e : entries) {
        if (e.section != section) {
            section = e.section;
            os << "[" << section << "]\n";
        }
        os << "  " << std::left << std::setw(38) << e.quantity << " " << std::setw(11) << sci(e.value, 3) << " "
           << std::setw(18) << e.unit << e.note << "\n";
    }
    for (const auto& r : remarks)
        os << "* " << r << "\n";
}

nlohmann::json BudgetLedger::to_json() const
{
    nlohmann::json j;
    j["entries"] = nlohmann::json::array();
    for (const auto& e : entries)
        j["entries"].push_back(
            {{"section", e.section}, {"quantity", e.quantity}, {"value", e.value}, {"unit", e.unit}, {"note", e.note}});
    j["remarks"] = remarks;
    return j;
}

} // namespace pbgq
