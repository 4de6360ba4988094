#include "doctest.h"

#include <cmath>

#include "pbgq/errors.hpp"
#include "pbgq/flightplan.hpp"
#include "support.hpp"

using namespace pbgq;
using namespace testing_support;

namespace {

const std::complex<double> I(0, 1);

FlightPlan base_plan(int modes, BasisLabel initial)
{
    FlightPlan p;
    p.atom = scenarios::rb_optical();
    for (int k = 0; k < modes; ++k)
        p.modes.push_back(ref_mode("m" + std::to_string(k)));
    p.initial = std::move(initial);
    return p;
}

Eigen::Matrix2cd rotation(double theta, double phi)
{
    // Atom-only matrix in (e, g) order, built from Pauli matrices.
    Eigen::Matrix2cd sx, sy;
    sx << 0, 1, 1, 0;
    sy << 0, -I, I, 0;
    return std::cos(theta) * Eigen::Matrix2cd::Identity() + I * std::sin(theta) * (std::cos(phi) * sx + std::sin(phi) * sy);
}

} // namespace

TEST_SUITE("flightplan")
{
    TEST_CASE("single ideal transfer")
    {
        auto plan = base_plan(1, {AtomLevel::e, {0}});
        plan.segments = {IdealPulse{0, pi / 2}};
        const auto rec = execute_plan(plan);
        CHECK(std::abs(rec.final_state().amplitude({AtomLevel::g, {1}}) + I) < 1e-15);
        REQUIRE(rec.snapshots.size() == 1);
        CHECK(rec.snapshots[0].kind == "IdealPulse");
    }

    TEST_CASE("empty-coupling plan returns the initial state")
    {
        auto plan = base_plan(2, {AtomLevel::g, {1, 0}});
        auto pass = ref_pass(278);
        pass.coupling.omega_0 = 0;
        plan.segments = {DefectPass{pass}, ClassicalRotation{0, 0}, ZRotation{0}, LossInterval{0}};
        const auto rec = execute_plan(plan);
        CHECK((rec.final_state().amplitudes() - rec.initial.amplitudes()).norm() < 1e-15);

        plan.segments.clear();
        CHECK(execute_plan(plan).final_state().amplitudes() == rec.initial.amplitudes());
    }

    TEST_CASE("classical rotation")
    {
        const auto modes = std::vector<DefectMode>{ref_mode()};
        const double r = 1 / std::sqrt(2.0);
        const auto e = apply_classical_rotation(build_state(AtomLevel::e, {0}, modes), pi / 4, 0);
        CHECK(std::abs(e.amplitude({AtomLevel::e, {0}}) - r) < 1e-15);
        CHECK(std::abs(e.amplitude({AtomLevel::g, {0}}) - I * r) < 1e-15);
        const auto g = apply_classical_rotation(build_state(AtomLevel::g, {0}, modes), pi / 4, 0);
        CHECK(std::abs(g.amplitude({AtomLevel::e, {0}}) - I * r) < 1e-15);
        CHECK(std::abs(g.amplitude({AtomLevel::g, {0}}) - r) < 1e-15);

        const auto s = build_state(AtomLevel::g, {1}, modes);
        CHECK(apply_classical_rotation(s, 0, 0.7).amplitudes() == s.amplitudes());
    }

    TEST_CASE("classical rotation against the Pauli form")
    {
        const std::vector<DefectMode> modes{ref_mode()};
        for (double phi : {0.0, 0.9, -2.1})
            for (double theta : {0.3, pi / 4, 2.0}) {
                const Eigen::Matrix2cd M = rotation(theta, phi);
                for (AtomLevel l : {AtomLevel::e, AtomLevel::g}) {
                    const auto out = apply_classical_rotation(build_state(l, {1}, modes), theta, phi);
                    const int col = l == AtomLevel::e ? 0 : 1;
                    CHECK(std::abs(out.amplitude({AtomLevel::e, {1}}) - M(0, col)) < 1e-15);
                    CHECK(std::abs(out.amplitude({AtomLevel::g, {1}}) - M(1, col)) < 1e-15);
                }
            }
    }

    TEST_CASE("rotation composition and inverse")
    {
        auto s = build_state(AtomLevel::e, {0, 1}, {ref_mode("p"), ref_mode("q")});
        JointState::Vector a(s.dim());
        for (Eigen::Index i = 0; i < a.size(); ++i)
            a[i] = {std::sin(1.0 + i), std::cos(2.0 * i)};
        s = s.with_amplitudes(a.normalized());
        for (double phi : {0.0, 1.1}) {
            const auto two = apply_classical_rotation(apply_classical_rotation(s, 0.4, phi), 0.7, phi);
            const auto one = apply_classical_rotation(s, 1.1, phi);
            CHECK((two.amplitudes() - one.amplitudes()).cwiseAbs().maxCoeff() < 1e-12);
        }
        const auto back = apply_classical_rotation(apply_classical_rotation(s, pi / 4, 0), -pi / 4, 0);
        CHECK((back.amplitudes() - s.amplitudes()).cwiseAbs().maxCoeff() < 1e-12);
    }

    TEST_CASE("z rotation phases")
    {
        const std::vector<DefectMode> m{ref_mode()};
        const auto e = apply_z_rotation(build_state(AtomLevel::e, {0}, m), 0.8);
        const auto g = apply_z_rotation(build_state(AtomLevel::g, {1}, m), 0.8);
        CHECK(std::abs(e.amplitude({AtomLevel::e, {0}}) - std::polar(1.0, -0.4)) < 1e-15);
        CHECK(std::abs(g.amplitude({AtomLevel::g, {1}}) - std::polar(1.0, 0.4)) < 1e-15);
    }

    TEST_CASE("loss intervals")
    {
        auto mode = ref_mode();
        mode.Q = 1e10;
        const std::vector<DefectMode> m{mode};
        const auto loss = LossModel::from_modes(m);
        const double kappa = mode.omega_d / mode.Q;
        CHECK(loss.kappa[0] == doctest::Approx(kappa));
        CHECK(LossModel::from_modes({ref_mode()}).kappa[0] == 0.0);

        const auto g1 = build_state(AtomLevel::g, {1}, m);
        const auto zero = apply_loss(g1, 0, loss);
        CHECK(zero.leak_probability == 0.0);
        CHECK(zero.state.amplitudes() == g1.amplitudes());

        const auto quarter = apply_loss(g1, 2 * std::log(2.0) / kappa, loss);
        CHECK(quarter.leak_probability == doctest::Approx(0.75).epsilon(1e-12));

        const auto e0 = apply_loss(build_state(AtomLevel::e, {0}, m), 1.0, loss);
        CHECK(e0.leak_probability == 0.0);

        CHECK_THROWS_AS(apply_loss(g1, -1, loss), ConfigError);
    }

    TEST_CASE("loss bookkeeping: survival^2 + leak = 1")
    {
        auto mode = ref_mode();
        mode.Q = 3e4;
        const std::vector<DefectMode> m{mode, ref_mode("q")};
        const auto loss = LossModel::from_modes(m);
        auto s = build_state(AtomLevel::e, {0, 0}, m, 2);
        JointState::Vector a(s.dim());
        for (Eigen::Index i = 0; i < a.size(); ++i)
            a[i] = {std::cos(0.3 * i), std::sin(1.7 * i)};
        s = s.with_amplitudes(a.normalized());
        for (double t : {1e-12, 1e-9, 3e-8, 1e-6}) {
            const auto out = apply_loss(s, t, loss);
            // survival amplitude recomputed independently
            double survival2 = 0;
            for (Eigen::Index i = 0; i < s.dim(); ++i)
                survival2 += std::norm(s.amplitudes()[i]) * std::exp(-s.occupation(i, 0) * loss.kappa[0] * t);
            CHECK(std::abs(survival2 + out.leak_probability - 1) < 1e-9);
            CHECK(std::abs(out.state.norm_squared() - 1) < 1e-12);
        }
    }

    TEST_CASE("cumulative leak is nondecreasing")
    {
        auto mode = ref_mode();
        mode.Q = 1e5;
        auto plan = base_plan(1, {AtomLevel::e, {0}});
        plan.modes[0] = mode;
        plan.segments = {IdealPulse{0, pi / 4}, LossInterval{1e-9}, LossInterval{5e-9}, IdealPulse{0, 0.3},
                         LossInterval{2e-9}};
        const auto rec = execute_plan(plan);
        double prev = 0, t = 0;
        for (const auto& s : rec.snapshots) {
            CHECK(s.leak_probability >= prev);
            prev = s.leak_probability;
            t += segment_duration(plan.segments[s.segment_index]);
            CHECK(s.elapsed == doctest::Approx(t));
        }
        CHECK(rec.total_leak() > 0);
    }

    TEST_CASE("lossless plans preserve norm")
    {
        auto plan = base_plan(2, {AtomLevel::e, {0, 0}});
        plan.segments = {DefectPass{ref_pass(278)},     LossInterval{2e-8}, ClassicalRotation{0.3, 0.2},
                         DefectPass{ref_pass(300, 7e8, 1)}, ZRotation{0.4},   IdealDispersive{1, 0.9}};
        const auto rec = execute_plan(plan);
        for (const auto& s : rec.snapshots)
            CHECK(std::abs(s.state.norm_squared() - 1) < 1e-9);
        CHECK(rec.total_leak() == 0.0);
    }

    TEST_CASE("spectator protection")
    {
        auto plan = base_plan(2, {AtomLevel::e, {0, 1}});
        plan.segments = {DefectPass{ref_pass(278, 0.1e10, 0)}};
        const auto rec = execute_plan(plan);
        CHECK(std::abs(mode_population(rec.final_state(), 1)[1] - 1) < 1e-12);
    }

    TEST_CASE("measurement segments are deterministic")
    {
        auto plan = base_plan(1, {AtomLevel::e, {0}});
        plan.segments = {IdealPulse{0, pi / 4}, MeasureAtom{}};
        plan.seed = 99;
        const auto a = execute_plan(plan);
        const auto b = execute_plan(plan);
        REQUIRE(a.snapshots[1].measurement);
        CHECK(a.snapshots[1].measurement->outcome == b.snapshots[1].measurement->outcome);
        CHECK(a.final_state().amplitudes() == b.final_state().amplitudes());
        CHECK(a.snapshots[1].measurement->probability == doctest::Approx(0.5));

        int excited = 0;
        for (std::uint64_t seed = 0; seed < 2000; ++seed) {
            plan.seed = seed;
            excited += execute_plan(plan).snapshots[1].measurement->outcome == AtomLevel::e;
        }
        CHECK(std::abs(excited / 2000.0 - 0.5) < 4 * std::sqrt(0.25 / 2000));

        plan.segments[1] = MeasureAtom{42};
        CHECK(execute_plan(plan).snapshots[1].measurement->seed == 42);
    }

    TEST_CASE("segment errors carry the index")
    {
        auto plan = base_plan(1, {AtomLevel::e, {0}});
        plan.segments = {IdealPulse{0, 0.1}, DispersivePass{ref_pass(278, 1e9)}};
        try {
            execute_plan(plan);
            FAIL("expected a SegmentError");
        } catch (const SegmentError& e) {
            CHECK(e.segment_index() == 1);
            CHECK(std::string(e.what()).find("DispersivePass") != std::string::npos);
        }
    }

    TEST_CASE("plan validation")
    {
        auto plan = base_plan(1, {AtomLevel::e, {0}});
        plan.segments = {IdealPulse{3, 0.1}};
        try {
            plan.validate();
            FAIL("expected a ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.field() == "segments[0].mode");
        }
        plan.segments = {DefectPass{ref_pass(278)}};
        std::get<DefectPass>(plan.segments[0]).pass.v = -5;
        try {
            plan.validate();
            FAIL("expected a ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.field() == "segments[0].v");
        }
        plan.segments = {LossInterval{-1}};
        CHECK_THROWS_AS(plan.validate(), ConfigError);
        plan.segments.clear();
        plan.initial = {AtomLevel::e, {0, 0}};
        CHECK_THROWS_AS(plan.validate(), ConfigError);
    }
}
