#include "pdcvis/rates.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pdcvis/errors.hpp"

namespace pdcvis {

namespace {

void require_integrals(const JIntegrals& j, double intensity) {
    if (!(intensity >= 0.0) || !std::isfinite(intensity))
        throw std::invalid_argument("rates: intensity must be nonnegative and finite");
    if (intensity > 0.0 && !(j.j_ab > 0.0))
        throw DegenerateModel(
            "rates: the doubly filtered intensity integral vanishes; no coincidences");
    if (j.j < 0.0 || j.j_a < 0.0 || j.j_b < 0.0 || j.j_ab < 0.0)
        throw DegenerateModel("rates: intensity integrals must be nonnegative");
}

} // namespace

CalibrationResult calibration_rates(const JIntegrals& j, double intensity) {
    require_integrals(j, intensity);
    CalibrationResult r;
    if (intensity == 0.0) return r;  // no pump, no counts
    r.r_center = intensity * j.j_ab;
    r.r_side = intensity * intensity * j.j_a * j.j_b;
    r.rho = r.r_side / r.r_center;
    return r;
}

double pair_emission_ratio(const JIntegrals& j, double intensity) {
    require_integrals(j, intensity);
    if (intensity == 0.0) return 0.0;
    return intensity * j.j_a * j.j_b / j.j_ab;
}

FransonRates franson_rates(const JIntegrals& j, const SetupConfig& setup) {
    require_integrals(j, setup.intensity);
    const double i1 = setup.intensity;
    const double i2 = i1 * i1;
    const double fringe = 1.0 + std::cos(setup.alpha + setup.beta);
    const double eta = setup.eta_product;

    FransonRates r;
    r.r2 = eta * i1 * j.j_ab * fringe;
    r.r41 = eta * 2.0 * i2 * j.j * j.j_ab * fringe;
    r.r42cc = eta * i2 * j.j4 * fringe;
    // Photons from different pairs are uncorrelated in frequency, hence pass
    // the filters independently and carry no phase information.
    r.r43 = eta * 2.0 * i2 * j.j_a * j.j_b;
    r.r4_total = r.r41 + r.r42cc + r.r43;
    r.total = r.r2 + r.r4_total;
    return r;
}

double franson_rate_at(const JIntegrals& j, double intensity, double phase_sum) {
    require_integrals(j, intensity);
    const double i2 = intensity * intensity;
    const double fringe = 1.0 + std::cos(phase_sum);
    return intensity * j.j_ab * fringe +
           i2 * ((2.0 * j.j * j.j_ab + j.j4) * fringe + 2.0 * j.j_a * j.j_b);
}

VisibilityResult visibility(const JIntegrals& j, double intensity) {
    require_integrals(j, intensity);
    VisibilityResult v;
    if (intensity == 0.0) {
        v.v_exact = v.v_first_order = v.v_fringe = 1.0;
        return v;
    }
    v.rho = pair_emission_ratio(j, intensity);
    v.two_rho = 2.0 * v.rho;
    v.v_first_order = 1.0 - v.two_rho;

    const double x = intensity;
    const double j4_over = j.j4 / j.j_ab;
    const double acc_over = j.j_a * j.j_b / j.j_ab;
    // Second-order closed form, kept exactly in its conventional shape. Note its own
    // first-order truncation is 1 - rho; the meaningful prediction at first
    // order is v_first_order, and the honest contrast of the assembled fringe
    // is v_fringe below. See README for why all three are carried.
    v.v_exact = (1.0 + x * (j.j + j4_over)) /
                (1.0 + x * (j.j + j4_over + acc_over));

    const double osc = 1.0 + x * (2.0 * j.j + j4_over);
    v.v_fringe = osc / (osc + 2.0 * x * acc_over);

    // Leading order; the O(I^2) correction to the fringe average is omitted
    // on purpose, matching the calibration center peak convention.
    v.mean_rate = x * j.j_ab;

    constexpr int kSamples = 72;  // 5-degree steps: 0 and pi land on entries
    v.rate_table.reserve(kSamples + 1);
    for (int k = 0; k <= kSamples; ++k) {
        const double phase = 2.0 * std::numbers::pi * k / kSamples;
        v.rate_table.emplace_back(phase, franson_rate_at(j, intensity, phase));
    }
    return v;
}

PoissonModelParams::PoissonModelParams(double p, double ra, double rb)
    : p2c(p), ratio_a(ra), ratio_b(rb) {
    if (!(p >= 0.0) || !std::isfinite(p))
        throw std::invalid_argument(
            "PoissonModelParams: pair probability must be nonnegative and finite");
    if (!(ra > 0.0) || ra > 1.0 || !(rb > 0.0) || rb > 1.0)
        throw std::invalid_argument(
            "PoissonModelParams: transmission ratios must lie in (0, 1]");
}

PoissonRates poisson_rates(const PoissonModelParams& p, double alpha, double beta) {
    const double p4c = 0.5 * p.p2c * p.p2c;  // independent pairs, Poisson statistics
    const double fringe = 0.5 * (1.0 + std::cos(alpha + beta));
    PoissonRates r;
    r.r2 = p.p2c * p.ratio_a * fringe;
    // Four photons allow four coincidence pairings: two twin pairings that
    // interfere like the two-photon case, and two cross pairings in which the
    // partner passes its filter only by accident — flat in the phases.
    r.r4 = p4c * (2.0 * p.ratio_a * fringe + 2.0 * p.ratio_a * p.ratio_b * 0.5);
    r.total = r.r2 + r.r4;
    return r;
}

double poisson_visibility(const PoissonModelParams& p) {
    return 1.0 / (1.0 + (p.p2c / (1.0 + p.p2c)) * p.ratio_b);
}

double poisson_visibility_first_order(const PoissonModelParams& p) {
    return 1.0 - p.p2c * p.ratio_b;
}

PairProbabilityCheck note_in_proof_check(double tau_param) {
    if (!(tau_param >= 0.0) || !std::isfinite(tau_param))
        throw std::invalid_argument(
            "note_in_proof_check: squeezing parameter must be nonnegative");
    PairProbabilityCheck c;
    c.squeeze = tau_param;
    const double th = std::tanh(tau_param);
    const double ch = std::cosh(tau_param);
    c.p_pair = 2.0 * th * th / (ch * ch * ch * ch);
    c.quadratic = 2.0 * tau_param * tau_param;
    c.v_predicted = 1.0 - c.p_pair;
    c.v_quadratic = 1.0 - c.quadratic;
    c.deviation = std::abs(c.p_pair - c.quadratic);
    return c;
}

} // namespace pdcvis
