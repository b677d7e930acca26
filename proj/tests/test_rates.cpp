#include "doctest.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pdcvis/errors.hpp"
#include "pdcvis/rates.hpp"

using namespace pdcvis;

namespace {

JIntegrals hand_integrals() {
    JIntegrals j;
    j.j = 2.0;
    j.j_a = 1.2;
    j.j_b = 0.8;
    j.j_ab = 0.9;
    j.j4 = 3.0;
    return j;
}

} // namespace

TEST_CASE("calibration peaks: literal values and the side/center ratio") {
    const JIntegrals j = hand_integrals();
    const CalibrationResult r = calibration_rates(j, 0.05);
    CHECK(r.r_center == doctest::Approx(0.045).epsilon(1e-15));           // I j_ab
    CHECK(r.r_side == doctest::Approx(0.0025 * 0.96).epsilon(1e-15));     // I^2 j_a j_b
    CHECK(r.rho == doctest::Approx(0.0024 / 0.045).epsilon(1e-14));
    CHECK(r.rho == doctest::Approx(pair_emission_ratio(j, 0.05)).epsilon(1e-15));

    SUBCASE("no pump, no counts") {
        const CalibrationResult z = calibration_rates(j, 0.0);
        CHECK(z.r_center == 0.0);
        CHECK(z.r_side == 0.0);
        CHECK(z.rho == 0.0);
    }
    SUBCASE("ratio is linear in intensity") {
        CHECK(pair_emission_ratio(j, 0.10) ==
              doctest::Approx(2.0 * pair_emission_ratio(j, 0.05)).epsilon(1e-15));
    }
}

TEST_CASE("interferometer rates: phase structure and scaling") {
    const JIntegrals j = hand_integrals();

    SUBCASE("bright and dark fringe components") {
        const SetupConfig bright(0.02, 100.0, 10.0, 0.0, 0.0);
        const FransonRates rb = franson_rates(j, bright);
        // fringe factor (1 + cos 0) = 2
        CHECK(rb.r2 == doctest::Approx(0.02 * 0.9 * 2.0).epsilon(1e-14));
        CHECK(rb.r41 == doctest::Approx(2.0 * 4e-4 * 2.0 * 0.9 * 2.0).epsilon(1e-14));
        CHECK(rb.r42cc == doctest::Approx(4e-4 * 3.0 * 2.0).epsilon(1e-14));
        CHECK(rb.r43 == doctest::Approx(2.0 * 4e-4 * 1.2 * 0.8).epsilon(1e-14));
        CHECK(rb.r4_total == doctest::Approx(rb.r41 + rb.r42cc + rb.r43).epsilon(1e-15));
        CHECK(rb.total == doctest::Approx(rb.r2 + rb.r4_total).epsilon(1e-15));

        const SetupConfig dark(0.02, 100.0, 10.0, std::numbers::pi, 0.0);
        const FransonRates rd = franson_rates(j, dark);
        // at alpha + beta = pi only the incoherent cross-pair term is left
        CHECK(rd.r2 == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(rd.r41 == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(rd.total == doctest::Approx(rd.r43).epsilon(1e-12));
    }

    SUBCASE("only the phase sum matters, and franson_rate_at agrees") {
        const double phase_pairs[][2] = {{0.3, 0.4}, {0.7, 0.0}, {-0.1, 0.8}};
        double first = 0.0;
        for (int i = 0; i < 3; ++i) {
            const SetupConfig s(0.02, 100.0, 10.0, phase_pairs[i][0], phase_pairs[i][1]);
            const double total = franson_rates(j, s).total;
            if (i == 0) first = total;
            CHECK(total == doctest::Approx(first).epsilon(1e-14));
            CHECK(total == doctest::Approx(franson_rate_at(
                               j, 0.02, phase_pairs[i][0] + phase_pairs[i][1]))
                               .epsilon(1e-14));
        }
    }

    SUBCASE("detection efficiency scales every component equally") {
        const SetupConfig unit(0.02, 100.0, 10.0, 0.5, 0.2, 1.0);
        const SetupConfig dim(0.02, 100.0, 10.0, 0.5, 0.2, 0.37);
        const FransonRates r1 = franson_rates(j, unit);
        const FransonRates r2 = franson_rates(j, dim);
        CHECK(r2.r2 == doctest::Approx(0.37 * r1.r2).epsilon(1e-14));
        CHECK(r2.r41 == doctest::Approx(0.37 * r1.r41).epsilon(1e-14));
        CHECK(r2.r42cc == doctest::Approx(0.37 * r1.r42cc).epsilon(1e-14));
        CHECK(r2.r43 == doctest::Approx(0.37 * r1.r43).epsilon(1e-14));
    }
}

TEST_CASE("visibility: three readings of the same fringe") {
    const JIntegrals j = hand_integrals();
    const double I = 0.03;
    const VisibilityResult v = visibility(j, I);

    SUBCASE("first order is exactly 1 - 2 rho") {
        CHECK(v.rho == doctest::Approx(I * 1.2 * 0.8 / 0.9).epsilon(1e-15));
        CHECK(v.v_first_order == doctest::Approx(1.0 - 2.0 * v.rho).epsilon(1e-15));
        CHECK(v.two_rho == doctest::Approx(2.0 * v.rho).epsilon(1e-15));
    }

    SUBCASE("second-order closed-form ratio, assembled independently") {
        const double num = 1.0 + I * (2.0 + 3.0 / 0.9);
        const double den = 1.0 + I * (2.0 + (3.0 + 1.2 * 0.8) / 0.9);
        CHECK(v.v_exact == doctest::Approx(num / den).epsilon(1e-15));
    }

    SUBCASE("fringe contrast equals the 0-vs-pi rate contrast exactly") {
        const double hi = franson_rate_at(j, I, 0.0);
        const double lo = franson_rate_at(j, I, std::numbers::pi);
        CHECK(v.v_fringe == doctest::Approx((hi - lo) / (hi + lo)).epsilon(1e-13));
    }

    SUBCASE("ordering: the exact ratio flatters, the contrast sits between") {
        // 1 - v_fringe ~ 2 rho while 1 - v_exact ~ rho, and the saturating
        // denominator keeps the contrast above the straight line.
        CHECK(v.v_exact > v.v_fringe);
        CHECK(v.v_fringe > v.v_first_order);
    }

    SUBCASE("rate table covers one period with endpoints on the extrema") {
        REQUIRE(v.rate_table.size() == 73);
        CHECK(v.rate_table.front().first == doctest::Approx(0.0));
        CHECK(v.rate_table.back().first == doctest::Approx(2.0 * std::numbers::pi));
        double lo = v.rate_table.front().second;
        for (const auto& [phase, rate] : v.rate_table) lo = std::min(lo, rate);
        CHECK(lo == doctest::Approx(franson_rate_at(j, I, std::numbers::pi)).epsilon(1e-12));
        CHECK(v.mean_rate == doctest::Approx(I * 0.9).epsilon(1e-15));
    }

    SUBCASE("zero intensity reports unit visibility") {
        const VisibilityResult z = visibility(j, 0.0);
        CHECK(z.v_exact == 1.0);
        CHECK(z.v_first_order == 1.0);
        CHECK(z.v_fringe == 1.0);
    }
}

TEST_CASE("independent-pair model") {
    SUBCASE("literal rates at the bright fringe") {
        const PoissonModelParams p(0.1, 1.0, 1.0);
        const PoissonRates r = poisson_rates(p, 0.0, 0.0);
        CHECK(r.r2 == doctest::Approx(0.1).epsilon(1e-15));
        CHECK(r.r4 == doctest::Approx(0.015).epsilon(1e-15));
        CHECK(r.total == doctest::Approx(0.115).epsilon(1e-15));
        const PoissonRates dark = poisson_rates(p, std::numbers::pi, 0.0);
        CHECK(dark.r2 == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(dark.r4 == doctest::Approx(0.005).epsilon(1e-15));
    }

    SUBCASE("closed-form visibility is the contrast of the assembled rates") {
        for (double p2c : {0.02, 0.05, 0.2})
            for (double rb : {0.4, 1.0}) {
                const PoissonModelParams p(p2c, 0.9, rb);
                const double hi = poisson_rates(p, 0.0, 0.0).total;
                const double lo = poisson_rates(p, std::numbers::pi, 0.0).total;
                CHECK(poisson_visibility(p) ==
                      doctest::Approx((hi - lo) / (hi + lo)).epsilon(1e-13));
            }
    }

    SUBCASE("frozen example and first-order reading") {
        const PoissonModelParams p(0.05, 1.0, 1.0);
        CHECK(poisson_visibility(p) == doctest::Approx(0.9545454545454545).epsilon(1e-14));
        CHECK(poisson_visibility_first_order(p) == doctest::Approx(0.95).epsilon(1e-15));
    }

    SUBCASE("parameter validation") {
        CHECK_THROWS_AS(PoissonModelParams(-0.1, 1.0, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(PoissonModelParams(0.1, 0.0, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(PoissonModelParams(0.1, 1.0, 1.2), std::invalid_argument);
        CHECK_THROWS_AS(PoissonModelParams(std::nan(""), 1.0, 1.0), std::invalid_argument);
    }
}

TEST_CASE("squeezed-state pair probability against its quadratic reading") {
    SUBCASE("frozen values") {
        const PairProbabilityCheck c = note_in_proof_check(0.3);
        CHECK(c.p_pair == doctest::Approx(0.14214145762121524).epsilon(1e-13));
        CHECK(c.quadratic == doctest::Approx(0.18).epsilon(1e-15));
        CHECK(c.deviation == doctest::Approx(0.03785854237878475).epsilon(1e-12));
        CHECK(c.v_predicted == doctest::Approx(1.0 - c.p_pair).epsilon(1e-15));
        CHECK(c.v_quadratic == doctest::Approx(0.82).epsilon(1e-15));
    }
    SUBCASE("series: p = 2 s^2 - (16/3) s^4 + O(s^6)") {
        const PairProbabilityCheck c = note_in_proof_check(0.05);
        CHECK(c.p_pair == doctest::Approx(0.0049667926972781365).epsilon(1e-12));
        const double series = 2.0 * 0.0025 - 16.0 / 3.0 * 0.0025 * 0.0025;
        CHECK(c.p_pair == doctest::Approx(series).epsilon(1e-4));
    }
    SUBCASE("zero squeezing is exact agreement") {
        const PairProbabilityCheck c = note_in_proof_check(0.0);
        CHECK(c.p_pair == 0.0);
        CHECK(c.deviation == 0.0);
        CHECK(c.v_predicted == 1.0);
    }
    CHECK_THROWS_AS(note_in_proof_check(-0.1), std::invalid_argument);
}

TEST_CASE("degenerate inputs are refused") {
    JIntegrals j = hand_integrals();
    j.j_ab = 0.0;
    CHECK_THROWS_AS(calibration_rates(j, 0.1), DegenerateModel);
    CHECK_THROWS_AS(visibility(j, 0.1), DegenerateModel);
    JIntegrals neg = hand_integrals();
    neg.j_a = -0.5;
    CHECK_THROWS_AS(pair_emission_ratio(neg, 0.1), DegenerateModel);
    CHECK_THROWS_AS(calibration_rates(hand_integrals(), -1.0), std::invalid_argument);
    const SetupConfig s(0.02, 100.0, 10.0);
    JIntegrals zero = hand_integrals();
    zero.j_ab = 0.0;
    CHECK_THROWS_AS(franson_rates(zero, s), DegenerateModel);
}
