#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "pbgq/errors.hpp"
#include "pbgq/gates.hpp"
#include "support.hpp"

using namespace pbgq;
using namespace testing_support;

namespace {

const double omega0 = scenarios::optical_omega_0;
const double inv_sqrt2 = 1 / std::sqrt(2.0);

/// Omega_0 for which a resonant reference pass at v has the given area.
double omega_for_area(double v, double area)
{
    const auto c = ref_pass(v);
    const auto& p = c.coupling.profile;
    return area / closed_form_area(1.0, 1.0, p.R_def, p.lattice_a, p.phi, v, c.b);
}

FlightPlan two_pass_plan(const PassConfig& first, const PassConfig& second)
{
    FlightPlan plan;
    plan.atom = scenarios::rb_optical();
    plan.modes = {ref_mode("p"), ref_mode("q")};
    plan.initial = {AtomLevel::e, {0, 0}};
    plan.segments = {DefectPass{first}, DefectPass{second}};
    return plan;
}

Eigen::Matrix4cd reduced_two_mode(const JointState& s)
{
    // trace out the atom; two modes with n_max = 1 in |n_p n_q> order
    Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
    const auto fd = s.field_dim();
    for (int atom = 0; atom < 2; ++atom) {
        const Eigen::Vector4cd phi = s.amplitudes().segment(atom * fd, 4);
        rho += phi * phi.adjoint();
    }
    return rho;
}

} // namespace

TEST_SUITE("gates")
{
    TEST_CASE("full first transfer")
    {
        auto first = ref_pass(278);
        first.coupling.omega_0 = omega_for_area(278, pi / 2);
        const auto r = entangle_two_defects(first, ref_pass(300, 0.2 * omega0, 1));
        CHECK(std::abs(std::abs(r.alpha) - 1) < 1e-8);
        CHECK(std::abs(r.beta) < 1e-4);
        CHECK(std::abs(r.gamma) < 1e-4);
    }

    TEST_CASE("no interaction")
    {
        auto cfg = ref_pass(278);
        cfg.coupling.omega_0 = 0;
        const auto r = entangle_two_defects(cfg, cfg);
        CHECK(std::abs(r.gamma) == doctest::Approx(1));
        CHECK(std::abs(r.alpha) == 0.0);
        CHECK(std::abs(r.beta) == 0.0);
        CHECK_FALSE(r.is_maximal);
    }

    TEST_CASE("composition matches sequential simulation on 100 random scenarios")
    {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> U(0, 1);
        double worst = 0;
        for (int trial = 0; trial < 100; ++trial) {
            auto first = ref_pass(100 + 500 * U(rng), (U(rng) - 0.5) * omega0, 0);
            auto second = ref_pass(100 + 500 * U(rng), (U(rng) - 0.5) * omega0, 1);
            first.coupling.profile.phi = U(rng);
            second.coupling.omega_0 *= 0.5 + U(rng);
            const auto r = entangle_two_defects(first, second);
            const auto s = execute_plan(two_pass_plan(first, second)).final_state();
            const double err = std::max({std::abs(r.alpha - s.amplitude({AtomLevel::g, {1, 0}})),
                                         std::abs(r.beta - s.amplitude({AtomLevel::g, {0, 1}})),
                                         std::abs(r.gamma - s.amplitude({AtomLevel::e, {0, 0}}))});
            worst = std::max(worst, err);
            CHECK(std::abs(std::norm(r.alpha) + std::norm(r.beta) + std::norm(r.gamma) - 1) < 1e-9);
        }
        CAPTURE(worst);
        CHECK(worst < 1e-8);
    }

    TEST_CASE("tangle formula against the Wootters concurrence")
    {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> U(0, 1);
        for (int trial = 0; trial < 20; ++trial) {
            const auto first = ref_pass(100 + 500 * U(rng), (U(rng) - 0.5) * omega0, 0);
            const auto second = ref_pass(100 + 500 * U(rng), (U(rng) - 0.5) * omega0, 1);
            const auto r = entangle_two_defects(first, second);
            const auto s = execute_plan(two_pass_plan(first, second)).final_state();
            CHECK(std::abs(two_mode_tangle(r) - concurrence(reduced_two_mode(s))) < 1e-8);
        }
    }

    TEST_CASE("tangle values")
    {
        EntangleResult r;
        r.alpha = inv_sqrt2;
        r.beta = std::complex<double>(0, inv_sqrt2);
        CHECK(two_mode_tangle(r) == doctest::Approx(1));
        r.alpha = 1;
        r.beta = 0;
        CHECK(two_mode_tangle(r) == 0.0);
        r.alpha = 0.5;
        r.beta = -0.5;
        r.gamma = inv_sqrt2;
        CHECK(two_mode_tangle(r) == doctest::Approx(0.5));
    }

    TEST_CASE("root finder: no coupling in the second pass")
    {
        auto second = ref_pass(278, 0, 1);
        second.coupling.omega_0 = 0;
        const auto roots = find_max_entanglement_detunings(ref_pass(278), second, 0, 0.35 * omega0);
        CHECK(roots.empty());
    }

    TEST_CASE("root finder: synthetic root at zero detuning")
    {
        // pass 1 leaves |u1| = 1/sqrt(2) (area pi/4); pass 2 transfers fully at resonance (area pi/2)
        auto first = ref_pass(278);
        first.coupling.omega_0 = omega_for_area(278, pi / 4);
        auto second = ref_pass(278, 0, 1);
        second.coupling.omega_0 = omega_for_area(278, pi / 2);
        RootScanOptions opts;
        opts.jobs = 2;
        const auto roots = find_max_entanglement_detunings(first, second, 0, 0.35 * omega0, opts);
        REQUIRE(roots.size() >= 1);
        CHECK(std::abs(roots.front().delta2) <= 1e-4 * second.coupling.omega_0);
        for (const auto& r : roots) {
            const auto check = entangle_two_defects(first, [&] {
                auto c = second;
                c.delta = r.delta2;
                return c;
            }());
            CHECK(std::abs(check.gamma) < 0.02);
            CHECK(std::abs(std::abs(check.alpha) - inv_sqrt2) < 0.02);
            CHECK(check.is_maximal);
        }
    }

    TEST_CASE("root scan reports uncertified minima too")
    {
        const auto minima = scan_entanglement_minima(ref_pass(278), ref_pass(278, 0, 1), 0, 0.35 * omega0);
        CHECK(!minima.empty());
        for (std::size_t i = 1; i < minima.size(); ++i)
            CHECK(minima[i].delta2 > minima[i - 1].delta2);
        CHECK_THROWS_AS(scan_entanglement_minima(ref_pass(278), ref_pass(278, 0, 1), 1.0, 0.0), ConfigError);
    }

    TEST_CASE("CNOT ideal plan")
    {
        const auto plan = build_cnot_plan(CnotCalibration::standard());
        REQUIRE(plan.segments.size() == 6);
        CHECK(std::holds_alternative<IdealPulse>(plan.segments[0]));
        CHECK(std::get<IdealDispersive>(plan.segments[2]).theta == doctest::Approx(pi / 2));
        CHECK(std::get<ZRotation>(plan.segments[3]).angle == doctest::Approx(-pi / 2));
        CHECK(std::get<IdealPulse>(plan.segments[5]).area == doctest::Approx(3 * pi / 2));

        const auto rep = cnot_truth_table(plan);
        CHECK(rep.truth(0, 0) >= 0.999); // p=0 q=0 -> p'=0
        CHECK(rep.truth(1, 3) >= 0.999); // p=0 q=1 -> p'=1 q=1
        CHECK(rep.truth(2, 2) >= 0.999); // p=1 q=0 -> p'=1
        CHECK(rep.truth(3, 1) >= 0.999); // p=1 q=1 -> p'=0 q=1
        CHECK(rep.classical_fidelity >= 0.999);
        CHECK(rep.min_atom_ground >= 0.999);
        CHECK(rep.unitarity_defect < 1e-6);
        for (int i = 0; i < 4; ++i)
            CHECK(std::abs(rep.truth.row(i).sum() - 1) < 1e-9);
    }

    TEST_CASE("CNOT physical variant")
    {
        const auto plan = build_cnot_plan(CnotCalibration::standard(), CnotVariant::physical);
        CHECK(std::holds_alternative<DefectPass>(plan.segments[0]));
        const auto rep = cnot_truth_table(plan);
        CHECK(rep.classical_fidelity >= 0.999);

        auto off = CnotCalibration::standard();
        *off.transfer_area += 0.1;
        const auto bad = cnot_truth_table(build_cnot_plan(off, CnotVariant::physical));
        CHECK(bad.classical_fidelity < rep.classical_fidelity - 1e-3);
    }

    TEST_CASE("CNOT missing calibration names the field")
    {
        auto c = CnotCalibration::standard();
        c.dispersive_theta.reset();
        try {
            build_cnot_plan(c);
            FAIL("expected a ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.field() == "dispersive_theta");
        }
    }

    TEST_CASE("identity plan gives the identity truth table")
    {
        auto plan = build_cnot_plan(CnotCalibration::standard());
        plan.segments.clear();
        const auto rep = cnot_truth_table(plan, {0, 1, 0});
        CHECK((rep.truth - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-15);
    }

    TEST_CASE("v sweep follows the area theorem")
    {
        SweepSpec spec{SweepParameter::velocity, 100, 600, 51, ref_pass(278)};
        const auto table = sweep(spec, 3);
        REQUIRE(table.rows.size() == 51);
        for (const auto& row : table.rows) {
            REQUIRE(row.result);
            const double A = closed_form_area_symmetric(omega0, spec.base.coupling.profile.R_def, row.value, spec.base.b);
            CHECK(std::abs(std::norm(row.result->u) - std::pow(std::cos(A), 2)) < 1e-6);
        }
        CHECK(table.rows.front().value == 100.0);
        CHECK(table.rows.back().value == 600.0);
    }

    TEST_CASE("delta sweep is symmetric")
    {
        SweepSpec spec{SweepParameter::detuning, -0.5 * omega0, 0.5 * omega0, 21, ref_pass(278)};
        const auto table = sweep(spec);
        const int n = static_cast<int>(table.rows.size());
        for (int i = 0; i < n; ++i)
            CHECK(std::abs(std::norm(table.rows[i].result->u) - std::norm(table.rows[n - 1 - i].result->u)) < 1e-8);
    }

    TEST_CASE("single-point sweep equals a single pass")
    {
        SweepSpec spec{SweepParameter::velocity, 278, 278, 1, ref_pass(100)};
        const auto table = sweep(spec);
        const auto r = single_pass_amplitudes(ref_pass(278));
        CHECK(table.rows.at(0).result->u == r.u);
        CHECK(table.rows.at(0).result->w == r.w);
    }

    TEST_CASE("sweep CSV is deterministic and records failures")
    {
        SweepSpec spec{SweepParameter::velocity, -100, 300, 5, ref_pass(278)};
        const auto table = sweep(spec, 2);
        CHECK_FALSE(table.rows[0].result);
        CHECK(table.rows[0].error.find("v") != std::string::npos);
        std::ostringstream a, b;
        write_sweep_csv(a, table);
        write_sweep_csv(b, sweep(spec, 1));
        CHECK(a.str() == b.str());
        CHECK(a.str().rfind("v_m_per_s,u2\n-1e+02,nan\n", 0) == 0);
        CHECK(a.str().find('\r') == std::string::npos);

        SweepSpec bad = spec;
        bad.count = 0;
        CHECK_THROWS_AS(sweep(bad), ConfigError);
    }
}
