#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "pbgq/state.hpp"

namespace pbgq {

/// Q of a defect mode limited by absorption in the dielectric backbone:
/// Q = 1 / (eta epsilon2), eta the fraction of mode energy in the dielectric.
double q_from_absorption(double epsilon2, double eta);

/// Energy decay time tau = Q / omega_d.
double photon_lifetime(double Q, double omega_d);

/// Field amplitude whose semiclassical Rabi frequency d21 E / 2 hbar rotates
/// the Bloch vector by theta_target while the atom crosses a uniform
/// waveguide mode of the given width at speed v.
double min_field_for_rotation(const AtomSpecies& atom, double v, double waveguide_width,
                              double theta_target = 2 * 3.14159265358979323846);

struct BudgetInputs
{
    double epsilon2 = 1e-9;
    double eta = 0.1;
    double omega_d = 0;
    double separation_in_lattice_constants = 10;
    double v = 0;
    double lattice_a = 0;
    double R_def = 0;
    double waveguide_width = 0; ///< 0 selects 2 lambda(omega_d)

    void validate() const;
    double width() const;
};

/// Gate time: one pass window 2b/v (b = 10 R_def) plus one transit between
/// defects separation*a/v.
struct GateTime
{
    double pass_window;
    double transit;
    double total;
};

inline constexpr const char* gate_time_convention =
    "gate time = (2 b + separation * a) / v with b = 10 R_def (one pass window plus one inter-defect transit)";

GateTime gate_time(const BudgetInputs& in);
double decoherence_gate_ratio(const BudgetInputs& in, double tau);

struct LedgerEntry
{
    std::string section;
    std::string quantity;
    double value;
    std::string unit;
    std::string note;
};

struct BudgetLedger
{
    std::vector<LedgerEntry> entries;
    std::vector<std::string> remarks;

    void render_text(std::ostream& os) const;
    nlohmann::json to_json() const;
};

struct BudgetScenario
{
    BudgetInputs optical;
    BudgetInputs microwave;
    AtomSpecies optical_atom;
    AtomSpecies microwave_atom;
    double field_speed = 100;        ///< m/s, thermal beam
    double free_fall_speed = 0.3;    ///< m/s
    double theta_target = 2 * 3.14159265358979323846;

    /// Optical geometry of the 780 nm defect pass at 278 m/s and the
    /// microwave transition with the same a = R_def = 0.8 lambda scaling at
    /// 100 m/s.
    static BudgetScenario standard();
};

BudgetLedger build_budget_ledger(const BudgetScenario& s);

} // namespace pbgq
