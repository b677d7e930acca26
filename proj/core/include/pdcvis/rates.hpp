#pragma once

#include <utility>
#include <vector>

#include "pdcvis/quadrature.hpp"
#include "pdcvis/spectral.hpp"

namespace pdcvis {

/// Arrival-time histogram peaks of the no-interferometer reference
/// measurement. rho — the side/center ratio — is the probability per pulse of
/// creating a detectable pair, and is what the interference visibility is
/// predicted from. r_center is kept to leading order in the intensity (the
/// second-order correction has no closed form here and is deliberately
/// omitted); r_side starts at second order.
struct CalibrationResult {
    double r_center = 0;  // both photons from the same pulse
    double r_side = 0;    // photons from pulses one period apart
    double rho = 0;
};

CalibrationResult calibration_rates(const JIntegrals& j, double intensity);

double pair_emission_ratio(const JIntegrals& j, double intensity);

/// Coincidence rates in the intermediate time-bin of the two-interferometer
/// setup, split by photon-number origin and kept to second order in the
/// emission intensity. The detection-efficiency constant eta_product scales
/// every term equally (it cancels in any visibility).
struct FransonRates {
    double r2 = 0;        // single pair, fully interfering
    double r41 = 0;       // two pairs, twin detection, second pair undetected
    double r42cc = 0;     // exchange contribution (conjugate pair included)
    double r43 = 0;       // photons from different pairs: flat background
    double r4_total = 0;
    double total = 0;
};

FransonRates franson_rates(const JIntegrals& j, const SetupConfig& setup);

/// Intermediate-bin coincidence rate as a function of the analyzer phase sum
/// alpha + beta, with eta_product = 1.
double franson_rate_at(const JIntegrals& j, double intensity, double phase_sum);

/// Visibility of the intermediate-bin fringe.
///
/// v_exact keeps the conventional second-order closed form. v_first_order is
/// the meaningful truncation 1 - 2 rho (anything beyond first order would
/// compete with neglected six-photon terms). v_fringe is the (max-min)/(max+min)
/// contrast of the assembled fringe itself; it agrees with both of the others
/// at first order but differs from v_exact at O(I^2), because the conventional
/// ratio is not the contrast of the assembled rates — we carry all three so
/// the discrepancy stays visible instead of being silently reconciled.
struct VisibilityResult {
    double v_exact = 0;
    double v_first_order = 0;
    double v_fringe = 0;
    double rho = 0;
    double two_rho = 0;
    double mean_rate = 0;  // leading order: intensity * j_ab
    // (alpha+beta, rate) samples over one full fringe period, endpoints
    // included, so extrema land exactly on table entries.
    std::vector<std::pair<double, double>> rate_table;
};

VisibilityResult visibility(const JIntegrals& j, double intensity);

/// Pair statistics when the four-photon component is modeled as two
/// independent pairs with Poissonian creation numbers. The transmission
/// ratios are filter width over photon width on the narrower-filter arm (a)
/// and the wider-filter arm (b).
struct PoissonModelParams {
    double p2c = 0;      // probability per detection window of creating a pair
    double ratio_a = 1;  // in (0, 1]
    double ratio_b = 1;  // in (0, 1]

    PoissonModelParams(double p, double ra, double rb);
};

struct PoissonRates {
    double r2 = 0;
    double r4 = 0;
    double total = 0;
};

PoissonRates poisson_rates(const PoissonModelParams& p, double alpha, double beta);

double poisson_visibility(const PoissonModelParams& p);
double poisson_visibility_first_order(const PoissonModelParams& p);

/// Per-qubit pair probability of the single-mode squeezed-state description,
/// p = 2 tanh^2(s) / cosh^4(s), against its small-squeezing quadratic reading
/// 2 s^2, and the visibilities each of them predicts through the independent-
/// pair model with ratio_b = 1.
struct PairProbabilityCheck {
    double squeeze = 0;
    double p_pair = 0;       // 2 tanh^2 / cosh^4
    double quadratic = 0;    // 2 s^2
    double v_predicted = 0;  // 1 - p_pair
    double v_quadratic = 0;  // 1 - 2 s^2
    double deviation = 0;    // |p_pair - quadratic| = |v_predicted - v_quadratic|
};

PairProbabilityCheck note_in_proof_check(double tau_param);

} // namespace pdcvis
