#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <string>

#include "pdcvis/errors.hpp"
#include "pdcvis/rates.hpp"
#include "pdcvis/term_algebra.hpp"

using namespace pdcvis;

namespace {

std::set<std::string> survivor_labels(const SurvivorReport& r) {
    std::set<std::string> s;
    for (const Term& t : r.survivors) s.insert(t.label);
    return s;
}

SurvivorReport run(RateKind k, SetupKind s, int ta, int tb) {
    return select_stationary(enumerate_terms(k, s, ta, tb));
}

bool zero_map(const CoeffMap& m) {
    return std::all_of(m.begin(), m.end(), [](int c) { return c == 0; });
}

} // namespace

TEST_CASE("term counts per family") {
    CHECK(enumerate_terms(RateKind::r2, SetupKind::franson, 1, 1).terms.size() == 64);
    CHECK(enumerate_terms(RateKind::r2, SetupKind::calibration, 0, 0).terms.size() == 4);
    CHECK(enumerate_terms(RateKind::r41, SetupKind::franson, 1, 1).terms.size() == 256);
    CHECK(enumerate_terms(RateKind::r42, SetupKind::franson, 1, 1).terms.size() == 256);
    CHECK(enumerate_terms(RateKind::r43, SetupKind::franson, 1, 1).terms.size() == 256);
    CHECK(enumerate_terms(RateKind::r43, SetupKind::calibration, 1, 0).terms.size() == 16);
    CHECK_THROWS_AS(enumerate_terms(RateKind::r2, SetupKind::franson, 3, 0), InvalidTimeBin);
    CHECK_THROWS_AS(enumerate_terms(RateKind::r2, SetupKind::franson, 0, -1), InvalidTimeBin);
}

TEST_CASE("label grammar") {
    const TermSet ts = enumerate_terms(RateKind::r2, SetupKind::franson, 1, 1);
    for (const Term& t : ts.terms) {
        REQUIRE(t.label.size() == 7);  // two pump slots, '|', four evolution slots
        CHECK(t.label[2] == '|');
        for (char c : t.label)
            CHECK((c == '1' || c == 'e' || c == '|'));
    }
    const TermSet cal = enumerate_terms(RateKind::r42, SetupKind::calibration, 0, 0);
    for (const Term& t : cal.terms) {
        CHECK(t.label.size() == 4);  // pump block only, no evolution factors
        CHECK(t.label.find('|') == std::string::npos);
    }
}

TEST_CASE("single-pair survivors, both interferometers in") {
    const SurvivorReport r = run(RateKind::r2, SetupKind::franson, 1, 1);
    CHECK(r.total_terms == 64);
    REQUIRE(r.survivors.size() == 4);
    CHECK(survivor_labels(r) ==
          std::set<std::string>{"ee|1111", "11|eeee", "1e|ee11", "e1|11ee"});
    CHECK(r.trig_constant == 2);
    CHECK(r.trig_cosine == 2);
    CHECK(r.kernel_class == KernelClass::j_ab);
    CHECK_FALSE(r.includes_conjugate);

    SUBCASE("phase bookkeeping of the two oscillating survivors") {
        for (const Term& t : r.survivors) {
            if (t.label == "1e|ee11") {
                CHECK(t.alpha_units == 1);
                CHECK(t.beta_units == 1);
                CHECK(t.sign == 1);  // one pump minus times two evolution minuses
            }
            if (t.label == "e1|11ee") {
                CHECK(t.alpha_units == -1);
                CHECK(t.beta_units == -1);
                CHECK(t.sign == 1);
            }
            if (t.label == "ee|1111" || t.label == "11|eeee") {
                CHECK(t.alpha_units == 0);
                CHECK(t.beta_units == 0);
                CHECK(t.sign == 1);
            }
        }
    }
}

TEST_CASE("twin-detection survivors carry the spectator pair along") {
    const SurvivorReport r = run(RateKind::r41, SetupKind::franson, 1, 1);
    CHECK(r.total_terms == 256);
    REQUIRE(r.survivors.size() == 8);
    // every single-pair survivor appears once with the spectator pair's pump
    // factors both off and once with both on
    CHECK(survivor_labels(r) ==
          std::set<std::string>{"11ee|1111", "eeee|1111", "1111|eeee", "ee11|eeee",
                                "111e|ee11", "ee1e|ee11", "11e1|11ee", "eee1|11ee"});
    CHECK(r.trig_constant == 4);
    CHECK(r.trig_cosine == 4);
    CHECK(r.kernel_class == KernelClass::j_times_j_ab);
    CHECK_FALSE(r.includes_conjugate);
}

TEST_CASE("exchange survivors") {
    const SurvivorReport r = run(RateKind::r42, SetupKind::franson, 1, 1);
    CHECK(r.total_terms == 256);
    REQUIRE(r.survivors.size() == 4);
    CHECK(survivor_labels(r) ==
          std::set<std::string>{"1111|eeee", "eeee|1111", "1e11|ee11", "e1ee|11ee"});
    CHECK(r.trig_constant == 2);
    CHECK(r.trig_cosine == 2);
    CHECK(r.kernel_class == KernelClass::j4_exchange);
    CHECK(r.includes_conjugate);  // reported together with its complex conjugate
}

TEST_CASE("cross-pair survivors are phase-blind") {
    const SurvivorReport r = run(RateKind::r43, SetupKind::franson, 1, 1);
    CHECK(r.total_terms == 256);
    REQUIRE(r.survivors.size() == 4);
    CHECK(survivor_labels(r) ==
          std::set<std::string>{"1111|eeee", "eeee|1111", "1e1e|e1e1", "e1e1|1e1e"});
    CHECK(r.trig_constant == 4);
    CHECK(r.trig_cosine == 0);  // no analyzer-phase dependence at all
    CHECK(r.kernel_class == KernelClass::j_a_times_j_b);
    for (const Term& t : r.survivors) {
        CHECK(t.alpha_units == 0);
        CHECK(t.beta_units == 0);
        CHECK(t.sign == 1);
    }
}

TEST_CASE("direct-detection survivors") {
    SUBCASE("single pair, both photons in the center bin") {
        const SurvivorReport r = run(RateKind::r2, SetupKind::calibration, 0, 0);
        CHECK(r.total_terms == 4);
        REQUIRE(r.survivors.size() == 1);
        CHECK(r.survivors.front().label == "11");
        CHECK(r.trig_constant == 1);
        CHECK(r.trig_cosine == 0);
        CHECK(r.kernel_class == KernelClass::j_ab);
    }
    SUBCASE("single pair cannot reach the side bin") {
        const SurvivorReport r = run(RateKind::r2, SetupKind::calibration, 1, 0);
        CHECK(r.total_terms == 4);
        CHECK(r.survivors.empty());
    }
    SUBCASE("cross-pair detection in the side bin") {
        const SurvivorReport r = run(RateKind::r43, SetupKind::calibration, 1, 0);
        CHECK(r.total_terms == 16);
        REQUIRE(r.survivors.size() == 1);
        CHECK(r.survivors.front().label == "1e1e");
        CHECK(r.trig_constant == 1);
        CHECK(r.trig_cosine == 0);
        CHECK(r.kernel_class == KernelClass::j_a_times_j_b);
    }
    SUBCASE("cross-pair detection in the center bin") {
        const SurvivorReport r = run(RateKind::r43, SetupKind::calibration, 0, 0);
        CHECK(r.total_terms == 16);
        REQUIRE(r.survivors.size() == 1);
        CHECK(r.survivors.front().label == "1111");
    }
    SUBCASE("exchange term needs both photons in the same bin") {
        const SurvivorReport r = run(RateKind::r42, SetupKind::calibration, 1, 0);
        CHECK(r.total_terms == 16);
        CHECK(r.survivors.empty());
    }
}

namespace {

// Complex conjugation of the rate integrand exchanges each detected variable
// with its primed partner and negates the undetected pair's coefficients in
// place, so the conjugate of a term has coefficient map
//   a <-> -a', b <-> -b', at -> -at, bt -> -bt
// together with negated analyzer phases and an unchanged sign.
Term conjugate_image(const Term& t) {
    Term u = t;
    const auto a = static_cast<std::size_t>(TermVariable::a);
    const auto b = static_cast<std::size_t>(TermVariable::b);
    const auto ap = static_cast<std::size_t>(TermVariable::a_prime);
    const auto bp = static_cast<std::size_t>(TermVariable::b_prime);
    const auto at = static_cast<std::size_t>(TermVariable::a_tilde);
    const auto bt = static_cast<std::size_t>(TermVariable::b_tilde);
    u.coeff_map[a] = -t.coeff_map[ap];
    u.coeff_map[ap] = -t.coeff_map[a];
    u.coeff_map[b] = -t.coeff_map[bp];
    u.coeff_map[bp] = -t.coeff_map[b];
    u.coeff_map[at] = -t.coeff_map[at];
    u.coeff_map[bt] = -t.coeff_map[bt];
    u.alpha_units = -t.alpha_units;
    u.beta_units = -t.beta_units;
    return u;
}

bool contains_term(const TermSet& ts, const Term& want) {
    return std::any_of(ts.terms.begin(), ts.terms.end(), [&](const Term& u) {
        return u.coeff_map == want.coeff_map && u.alpha_units == want.alpha_units &&
               u.beta_units == want.beta_units && u.sign == want.sign;
    });
}

} // namespace

TEST_CASE("survivors are exactly the zero-form terms") {
    const RateKind kinds[] = {RateKind::r2, RateKind::r41, RateKind::r42, RateKind::r43};
    const SetupKind setups[] = {SetupKind::calibration, SetupKind::franson};
    for (RateKind k : kinds)
        for (SetupKind s : setups)
            for (int ta : {0, 1})
                for (int tb : {0, 1}) {
                    const TermSet ts = enumerate_terms(k, s, ta, tb);
                    const SurvivorReport r = select_stationary(ts);
                    std::size_t zero_count = 0;
                    for (const Term& t : ts.terms)
                        if (zero_map(t.coeff_map)) ++zero_count;
                    CHECK(zero_count == r.survivors.size());
                    for (const Term& t : r.survivors) CHECK(zero_map(t.coeff_map));
                }
}

TEST_CASE("hermitian families are closed under conjugation") {
    // r2, r41 and r43 are real contributions: their expansions must contain
    // the conjugate image of every term. r42 is deliberately a single ordering
    // of the exchange term (its conjugate is bookkept by includes_conjugate at
    // reconstruction), so it is excluded here.
    const RateKind kinds[] = {RateKind::r2, RateKind::r41, RateKind::r43};
    const SetupKind setups[] = {SetupKind::calibration, SetupKind::franson};
    for (RateKind k : kinds)
        for (SetupKind s : setups)
            for (int ta : {0, 1})
                for (int tb : {0, 1}) {
                    const TermSet ts = enumerate_terms(k, s, ta, tb);
                    for (const Term& t : ts.terms) CHECK(contains_term(ts, conjugate_image(t)));
                }
}

TEST_CASE("the exchange ordering is not self-conjugate") {
    // If r42's expansion were closed under conjugation, doubling it at
    // reconstruction would double-count; this pins the single-ordering choice.
    const TermSet ts = enumerate_terms(RateKind::r42, SetupKind::franson, 1, 1);
    const bool closed = std::all_of(ts.terms.begin(), ts.terms.end(), [&](const Term& t) {
        return contains_term(ts, conjugate_image(t));
    });
    CHECK_FALSE(closed);
}

TEST_CASE("rate reconstruction") {
    JIntegrals j;
    j.j = 1.7;
    j.j_a = 1.1;
    j.j_b = 0.6;
    j.j_ab = 0.8;
    j.j4 = 2.1;
    const double I = 0.04;

    SUBCASE("single pair: 2 I j_ab (1 + cos)") {
        const RateExpression e = reconstruct_rate(run(RateKind::r2, SetupKind::franson, 1, 1), j, I);
        CHECK(e.constant == doctest::Approx(2.0 * I * 0.8).epsilon(1e-15));
        CHECK(e.cosine == doctest::Approx(2.0 * I * 0.8).epsilon(1e-15));
        CHECK(e.value_at(0.0) == doctest::Approx(4.0 * I * 0.8).epsilon(1e-14));
        CHECK(e.value_at(std::numbers::pi) == doctest::Approx(0.0).epsilon(1e-14));
    }

    SUBCASE("twin detection equals 2 I j times the single-pair rate") {
        const RateExpression r41 =
            reconstruct_rate(run(RateKind::r41, SetupKind::franson, 1, 1), j, I);
        const RateExpression r2 =
            reconstruct_rate(run(RateKind::r2, SetupKind::franson, 1, 1), j, I);
        CHECK(r41.constant == doctest::Approx(2.0 * I * j.j * r2.constant).epsilon(1e-14));
        CHECK(r41.cosine == doctest::Approx(2.0 * I * j.j * r2.cosine).epsilon(1e-14));
    }

    SUBCASE("exchange doubles for the conjugate and halves for the ordering") {
        const RateExpression e = reconstruct_rate(run(RateKind::r42, SetupKind::franson, 1, 1), j, I);
        CHECK(e.constant == doctest::Approx(2.0 * I * I * j.j4).epsilon(1e-14));
        CHECK(e.cosine == doctest::Approx(2.0 * I * I * j.j4).epsilon(1e-14));
    }

    SUBCASE("cross pairs: 4 I^2 j_a j_b, flat") {
        const RateExpression e = reconstruct_rate(run(RateKind::r43, SetupKind::franson, 1, 1), j, I);
        CHECK(e.constant == doctest::Approx(4.0 * I * I * 1.1 * 0.6).epsilon(1e-14));
        CHECK(e.cosine == doctest::Approx(0.0).epsilon(1e-15));
    }

    SUBCASE("zero-survivor reports reconstruct to zero") {
        const RateExpression e =
            reconstruct_rate(run(RateKind::r2, SetupKind::calibration, 1, 0), j, I);
        CHECK(e.constant == 0.0);
        CHECK(e.cosine == 0.0);
        CHECK(e.value_at(1.234) == 0.0);
    }

    SUBCASE("negative intensity is refused") {
        CHECK_THROWS_AS(reconstruct_rate(run(RateKind::r2, SetupKind::franson, 1, 1), j, -0.1),
                        std::invalid_argument);
    }
}

TEST_CASE("reconstruction sums to the closed-form rates across random draws") {
    std::mt19937 rng(20260819u);
    std::uniform_real_distribution<double> U(0.2, 3.0);
    std::uniform_real_distribution<double> phase(-3.0, 3.0);

    const SurvivorReport rep2 = run(RateKind::r2, SetupKind::franson, 1, 1);
    const SurvivorReport rep41 = run(RateKind::r41, SetupKind::franson, 1, 1);
    const SurvivorReport rep42 = run(RateKind::r42, SetupKind::franson, 1, 1);
    const SurvivorReport rep43 = run(RateKind::r43, SetupKind::franson, 1, 1);

    for (int draw = 0; draw < 25; ++draw) {
        JIntegrals j;
        j.j = U(rng);
        j.j_a = U(rng);
        j.j_b = U(rng);
        j.j_ab = U(rng);
        j.j4 = U(rng);
        const double I = 0.1 * U(rng);
        const double a = phase(rng);
        const double b = phase(rng);

        const double sum = kFransonNormalization *
                           (reconstruct_rate(rep2, j, I).value_at(a + b) +
                            reconstruct_rate(rep41, j, I).value_at(a + b) +
                            reconstruct_rate(rep42, j, I).value_at(a + b) +
                            reconstruct_rate(rep43, j, I).value_at(a + b));
        const SetupConfig s(I, 100.0, 10.0, a, b);
        const FransonRates fr = franson_rates(j, s);
        CHECK(sum == doctest::Approx(fr.total).epsilon(1e-12));

        const double r4sum = kFransonNormalization *
                             (reconstruct_rate(rep41, j, I).value_at(a + b) +
                              reconstruct_rate(rep42, j, I).value_at(a + b) +
                              reconstruct_rate(rep43, j, I).value_at(a + b));
        CHECK(r4sum == doctest::Approx(fr.r4_total).epsilon(1e-12));
    }
}

TEST_CASE("name rendering for reports") {
    CHECK(to_string(RateKind::r2) == "r2");
    CHECK(to_string(RateKind::r42) == "r42");
    CHECK(to_string(SetupKind::franson) == "franson");
    CHECK(to_string(SetupKind::calibration) == "calibration");
    CHECK(to_string(KernelClass::j_ab) == "j_ab");
    CHECK(to_string(KernelClass::j_times_j_ab) == "j*j_ab");
    CHECK(to_string(KernelClass::j4_exchange) == "j4");
    CHECK(to_string(KernelClass::j_a_times_j_b) == "j_a*j_b");
}
