#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "kdv/estimates.hpp"

using namespace kdv;

TEST_CASE("zeta and kernel-sum constants") {
    CHECK(zeta_em(2.0) == Catch::Approx(M_PI * M_PI / 6.0).epsilon(1e-12));
    CHECK(zeta_em(4.0) == Catch::Approx(std::pow(M_PI, 4) / 90.0).epsilon(1e-12));
    CHECK(c_sum(1.0) == Catch::Approx(M_PI / std::sqrt(3.0)).epsilon(1e-12));

    CHECK(c3_const(0.0) == Catch::Approx(3.0 * M_PI * M_PI / 2.0).epsilon(1e-15));
    CHECK(c6_const(1.0) == Catch::Approx(std::pow(M_PI, 4) / 15.0).epsilon(1e-12));
    CHECK(b30_const(1.0, 4) == Catch::Approx(M_PI * M_PI / 4.0).epsilon(1e-15));
}

TEST_CASE("validity ranges are enforced") {
    CHECK_THROWS(c_sum(0.5));
    CHECK_THROWS(c1_const(1.5));
    CHECK_THROWS(c2_const(-0.5));
    CHECK_THROWS(c3_const(-0.1));
    CHECK_THROWS(c4_const(0.0, 0.5));
    CHECK_THROWS(c4_const(0.0, 0.0));
    CHECK_THROWS(c6_const(0.5));
    CHECK_THROWS(c2pp_const(0.1));
    CHECK_THROWS(c2pp_const(-1.8));
    CHECK_THROWS(b30_const(1.2, 4));
    CHECK_THROWS(BoundSpec::algebra_spec(0.4));
    CHECK_THROWS(qbound_check(-0.1, 0.25, 1));
    CHECK_THROWS(k3_sum_estimate(1.5, 0.0, 0.0, 64));
}

TEST_CASE("ratio runs against closed constants (small batches)") {
    const int trials = 60, m = 12;
    for (const auto& spec : {BoundSpec::b2_spec(0.0), BoundSpec::b3_spec(0.0),
                             BoundSpec::r3_spec(1.0), BoundSpec::b4_spec(0.0, 0.25),
                             BoundSpec::neg_b2_spec(1.0), BoundSpec::b1_spec(1.75),
                             BoundSpec::a_res_spec(1.0), BoundSpec::lip_r3_spec(1.0),
                             BoundSpec::min_r3_spec(1.0, 0.25),
                             BoundSpec::q_bound_spec(0.0, 0.25)}) {
        auto rep = empirical_ratio(spec, trials, m, 7);
        INFO(spec.formula_id << ": max ratio " << rep.max_ratio << " vs "
                             << (rep.constant ? *rep.constant : -1.0));
        CHECK(rep.pass);
        CHECK(rep.max_ratio > 0.0);
        CHECK(rep.trials == trials);
        CHECK(static_cast<int>(rep.ratios.size()) == trials);
    }
}

TEST_CASE("A_res ratio never exceeds the energy") {
    auto rep = empirical_ratio(BoundSpec::a_res_spec(0.7), 120, 16, 3);
    CHECK(rep.max_ratio <= 1.0 + 1e-12);  // normalized by the energy
}

TEST_CASE("B30^n decay in n") {
    // the pi^2/n^s bound itself, and the decay of the measured ratio
    double r2 = empirical_ratio(BoundSpec::b30n_spec(1.0, 2), 80, 16, 11).max_ratio;
    double r16 = empirical_ratio(BoundSpec::b30n_spec(1.0, 16), 80, 16, 11).max_ratio;
    CHECK(r2 <= b30_const(1.0, 2) * 1.01);
    CHECK(r16 <= b30_const(1.0, 16) * 1.01);
    CHECK(r16 / r2 <= (2.0 / 16.0) * 1.25);
}

TEST_CASE("empirical max ratios are stable under m doubling (no-constant lemmas)") {
    // evidence of m-uniform boundedness: ratio moves by < 20% from m to 2m
    const BoundSpec specs[] = {
        BoundSpec::neg_b21_spec(-0.5),
        BoundSpec::b30n_neg_spec(-0.25, 0.4, 2),
        BoundSpec::r310_spec(0.5, 2),
        BoundSpec::b41n_spec(0.0, 2),
        BoundSpec::b42n_spec(0.0, 2),
    };
    for (const auto& sp : specs) {
        double a = empirical_ratio(sp, 60, 8, 5).max_ratio;
        double b = empirical_ratio(sp, 60, 16, 5).max_ratio;
        INFO(sp.formula_id << ": m=8 -> " << a << ", m=16 -> " << b);
        CHECK(std::abs(b - a) / a < 0.2);
    }
}

TEST_CASE("spec factories reject out-of-range parameters") {
    CHECK_THROWS(BoundSpec::b30n_neg_spec(0.5, 0.4, 2));   // s must be <= 0
    CHECK_THROWS(BoundSpec::b30n_neg_spec(-0.6, 0.3, 2));  // p+a >= 5/6
    CHECK_THROWS(BoundSpec::r310_spec(1.5, 2));
    CHECK_THROWS(BoundSpec::b41n_spec(0.6, 2));
    CHECK_THROWS(BoundSpec::b42n_spec(-1.6, 2));
}

TEST_CASE("k3 summability verdicts") {
    auto conv = k3_sum_estimate(0.0, 0.0, 0.0, 64);
    CHECK(conv.verdict == K3Verdict::converging);

    auto div = k3_sum_estimate(0.0, 1.0, 1.0, 64);  // gamma+delta = 2 > 5/3
    CHECK(div.verdict == K3Verdict::diverging);

    auto conv2 = k3_sum_estimate(1.0, 0.8, 0.8, 64);  // 1.6 < 5/3 by margin < 5%?
    // 1.6 is within 5% of 5/3 = 1.667 (|1.6-1.667|/1.667 = 4%): inconclusive zone
    CHECK(conv2.verdict == K3Verdict::inconclusive);

    auto conv3 = k3_sum_estimate(1.0, 0.7, 0.7, 64);  // 1.4: clearly converging
    CHECK(conv3.verdict == K3Verdict::converging);

    SECTION("verdicts agree with the threshold on a small grid (>= 5% margin)") {
        for (double g : {0.0, 0.4, 0.75})
            for (double d : {0.0, 0.4, 0.75}) {
                double sum = g + d;
                if (std::abs(sum - 5.0 / 3.0) < 0.05 * 5.0 / 3.0) continue;
                auto est = k3_sum_estimate(0.5, g, d, 64);
                if (sum < 5.0 / 3.0)
                    CHECK(est.verdict == K3Verdict::converging);
                else
                    CHECK(est.verdict == K3Verdict::diverging);
            }
    }
}

TEST_CASE("qbound scaling probe") {
    // the quartic term scales by 16 under v -> 2v when the resonant energy
    // scales accordingly; the combined ratio test stays <= 1
    auto v = random_state(77, 10, 0.0, 1.0);
    auto v2 = Complex{2.0, 0.0} * v;
    auto q1 = Complex{0.0, 1.0 / 18.0} * b4(v, v, v, v, 0.0).total;
    auto q2 = Complex{0.0, 1.0 / 18.0} * b4(v2, v2, v2, v2, 0.0).total;
    CHECK(sobolev_norm(q2, 0.25) == Catch::Approx(16.0 * sobolev_norm(q1, 0.25)).epsilon(1e-10));

    auto rep = qbound_check(0.0, 0.25, 40, 12, 9);
    CHECK(rep.pass);
}
