#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "kdv/galerkin.hpp"
#include "test_util.hpp"

using namespace kdv;
using testutil::entry_diff_rel;
using testutil::h0_diff;

TEST_CASE("rhs_truncated") {
    CHECK(rhs_truncated(FourierState{}, 0.0, 8).empty());

    auto v = FourierState::single_pair(1, {1.0, 0.0});
    auto out = rhs_truncated(v, 0.0, 2);
    CHECK(std::abs(out.at(2) - Complex{0.0, 1.0}) < 1e-15);
    CHECK(out.at(3) == Complex{0.0, 0.0});  // projected away

    SECTION("Hermitian output for Hermitian input") {
        auto w = random_state(8, 12, 0.0, 1.0);
        CHECK(rhs_truncated(w, 0.37, 12).is_hermitian(1e-12));
    }
}

TEST_CASE("integrate basics") {
    SECTION("zero state stays zero") {
        SimConfig cfg;
        cfg.m = 4;
        cfg.dt = 1e-3;
        cfg.T = 0.01;
        auto traj = integrate(FourierState{}, cfg);
        for (const auto& s : traj.states) CHECK(s.empty());
    }
    SECTION("one step matches the leading Taylor term: v2(dt) ~ i dt") {
        auto v0 = FourierState::single_pair(1, {1.0, 0.0});
        SimConfig cfg;
        cfg.m = 8;
        cfg.dt = 1e-4;
        cfg.T = 1e-4;
        auto traj = integrate(v0, cfg);
        Complex v2 = traj.states.back().at(2);
        CHECK(std::abs(v2 - Complex{0.0, 1e-4}) < 5e-8);  // O(dt^2) remainder
    }
    SECTION("frozen tail is bit-identical along the trajectory") {
        auto core = random_state(3, 4, 0.0, 0.5);
        FourierState v0 = core;
        v0.set(9, {0.25, 0.125});
        v0.set(-9, {0.25, -0.125});
        v0.mark_real_valued(true);
        SimConfig cfg;
        cfg.m = 4;
        cfg.dt = 1e-3;
        cfg.T = 0.05;
        cfg.record_stride = 10;
        auto traj = integrate(v0, cfg);
        for (const auto& s : traj.states) {
            CHECK(s.at(9) == Complex{0.25, 0.125});
            CHECK(s.at(-9) == Complex{0.25, -0.125});
        }
    }
    SECTION("recorded samples are Hermitian by construction") {
        auto v0 = random_state(5, 10, 0.0, 1.0);
        SimConfig cfg;
        cfg.m = 10;
        cfg.dt = 5e-4;
        cfg.T = 0.05;
        cfg.record_stride = 20;
        auto traj = integrate(v0, cfg);
        for (const auto& s : traj.states) CHECK(s.is_hermitian(0.0));
    }
    SECTION("divergence guard trips on absurd thresholds") {
        auto v0 = random_state(5, 6, 0.0, 1.0);
        SimConfig cfg;
        cfg.m = 6;
        cfg.dt = 1e-3;
        cfg.T = 0.01;
        cfg.divergence_guard = 1e-9;
        CHECK_THROWS(integrate(v0, cfg));
    }
}

TEST_CASE("integrators cross-validate at a resolved step size") {
    auto v0 = random_state(11, 6, 0.0, 0.5);
    SimConfig a;
    a.m = 6;
    a.dt = 2e-5;  // 3 m^3 dt ~ 0.013: resolved for classical RK4
    a.T = 0.02;
    a.record_stride = 1000;
    SimConfig b = a;
    b.integrator = Integrator::rk4_classical;
    auto ta = integrate(v0, a);
    auto tb = integrate(v0, b);
    CHECK(h0_diff(ta.states.back(), tb.states.back()) < 1e-10);
}

TEST_CASE("energy conservation at desk scale") {
    auto v0 = random_state(21, 16, 0.0, 1.0);
    SimConfig cfg;
    cfg.m = 16;
    cfg.dt = 5e-4;  // the step rule dt <= 1e-3 / |v0| with margin
    cfg.T = 0.5;
    cfg.record_stride = 50;
    auto traj = integrate(v0, cfg);
    CHECK(traj.relative_energy_drift() < 1e-8);
}

TEST_CASE("residual checks on a short run") {
    auto v0 = random_state(33, 8, 0.0, 0.6);
    SimConfig cfg;
    cfg.m = 8;
    cfg.dt = 2e-4;
    cfg.T = 0.1;
    cfg.record_stride = 5;  // 101 samples
    auto traj = integrate(v0, cfg);

    SECTION("all three forms hold") {
        CHECK(residual_first_form(traj) < 1e-8);
        CHECK(residual_second_form(traj) < 1e-8);
        for (int n : {2, 4}) CHECK(residual_third_form(traj, n) < 1e-8);
    }
    SECTION("zero trajectory gives zero residuals") {
        SimConfig z = cfg;
        auto zt = integrate(FourierState{}, z);
        CHECK(residual_first_form(zt) == 0.0);
        CHECK(residual_second_form(zt) == 0.0);
    }
    SECTION("third form with n = 0 equals the second form") {
        CHECK(residual_third_form(traj, 0) == residual_second_form(traj));
    }
    SECTION("third form with n >= m still closes (B30 term vanishes)") {
        CHECK(residual_third_form(traj, 8) < 1e-8);
    }
    SECTION("negative control: perturbing the resonant term breaks the identity") {
        double good = residual_second_form(traj);
        double bad = residual_second_form(traj, 2.0);
        CHECK(bad > 1e3 * std::max(good, 1e-12));
    }
    SECTION("requires >= 3 uniformly spaced samples") {
        Trajectory broken = traj;
        broken.times.resize(2);
        broken.states.resize(2);
        broken.energy_series.resize(2);
        CHECK_THROWS(residual_first_form(broken));
    }
}

TEST_CASE("residual decreases under record refinement") {
    auto v0 = random_state(43, 8, 0.0, 0.8);
    SimConfig coarse;
    coarse.m = 8;
    coarse.dt = 4e-4;
    coarse.T = 0.2;
    coarse.record_stride = 25;  // slow-part interpolation dominates
    SimConfig fine = coarse;
    fine.record_stride = 5;
    double rc = residual_first_form(integrate(v0, coarse));
    double rf = residual_first_form(integrate(v0, fine));
    CHECK(rf < rc);
    CHECK(rf < 1e-7);
}

TEST_CASE("contraction solver") {
    SECTION("zero data converges immediately to zero") {
        auto res = contraction_solve(FourierState{}, 1.0, 0.05, 8, 65);
        CHECK(res.converged);
        CHECK(res.iterations <= 2);
        for (const auto& s : res.traj.states) CHECK(s.empty());
    }
    SECTION("matches direct integration for small data") {
        auto v0 = FourierState::single_pair(1, {0.1, 0.0});
        const int m = 8;
        auto res = contraction_solve(v0, 1.0, 0.05, m, 101);
        REQUIRE(res.converged);
        CHECK(res.contracted);

        SimConfig cfg;
        cfg.m = m;
        cfg.dt = 0.05 / 4000;
        cfg.T = 0.05;
        cfg.record_stride = 4000;
        auto traj = integrate(v0, cfg);
        double diff = sobolev_norm(res.traj.states.back() - traj.states.back(), 1.0);
        CHECK(diff < 1e-8);

        SECTION("iteration ratios are < 1/2 in the contraction regime") {
            for (std::size_t i = 0; i + 1 < res.iteration_ratios.size(); ++i)
                CHECK(res.iteration_ratios[i] < 0.5);
        }
    }
}

TEST_CASE("lipschitz probe") {
    SECTION("identical inputs guarded") {
        auto v0 = random_state(55, 6, 0.0, 0.5);
        SimConfig cfg;
        cfg.m = 6;
        cfg.dt = 1e-3;
        cfg.T = 0.02;
        auto probe = lipschitz_probe(v0, v0, 0.0, cfg);
        CHECK(probe.identical_inputs);
        for (double r : probe.ratios) CHECK(r == 0.0);
    }
    SECTION("small perturbations stay bounded") {
        auto v0 = random_state(56, 8, 0.0, 1.0);
        auto delta = random_state(57, 8, 0.0, 1e-6);
        FourierState w0 = v0 + delta;
        SimConfig cfg;
        cfg.m = 8;
        cfg.dt = 5e-4;
        cfg.T = 0.25;
        cfg.record_stride = 100;
        auto probe = lipschitz_probe(v0, w0, 0.0, cfg);
        CHECK(!probe.identical_inputs);
        CHECK(probe.ratios.front() == Catch::Approx(1.0).margin(1e-9));
        CHECK(probe.max_ratio < 10.0);
    }
}
