#pragma once

#include <string>

namespace pdcvis {

// Conventions used throughout:
//  * frequencies are angular detunings from the central signal/idler
//    frequencies, in rad/ps; times are in ps;
//  * "width" parameters delta_p / delta_a / delta_b are Gaussian sigmas of the
//    corresponding *amplitude* profiles;
//  * filter widths are FWHM of the *intensity* transmission (the usual way a
//    bandpass is quoted on a datasheet).

enum class ModelShape {
    gaussian,            // joint amplitude = phase-matching * pump envelope
    separable_gaussian,  // broad-pump limit: joint amplitude factorizes exactly
};

/// Joint spectral amplitude of the down-converted pair,
/// g(wa, wb) = Phi(wa, wb) * pump(wa + wb), normalized to g(0,0) = 1.
struct SpectralModel {
    double delta_p;  // pump spectral width (rad/ps)
    double delta_a;  // marginal width of mode a before filtering (rad/ps)
    double delta_b;  // marginal width of mode b before filtering (rad/ps)
    ModelShape shape = ModelShape::gaussian;

    SpectralModel(double dp, double da, double db, ModelShape s = ModelShape::gaussian);
};

enum class FilterShape { none, rectangular, gaussian };

/// One detection arm's bandpass. Intensity transmission F in [0,1];
/// amplitude transmission is sqrt(F), real and nonnegative.
struct FilterSpec {
    FilterShape shape = FilterShape::none;
    double width = 0.0;          // FWHM of intensity transmission (rad/ps); ignored for none
    double center_offset = 0.0;  // filter center detuning (rad/ps)

    FilterSpec() = default;
    FilterSpec(FilterShape s, double w, double c = 0.0);

    static FilterSpec none_filter() { return FilterSpec{}; }
};

/// Pump/interferometer/detection settings shared by the rate formulas.
struct SetupConfig {
    double intensity;       // dimensionless pump parameter I
    double tau;             // time-bin separation (ps)
    double alpha = 0.0;     // analyzer phase, arm a (rad)
    double beta = 0.0;      // analyzer phase, arm b (rad)
    double delta_t;         // detector time resolution (ps)
    double eta_product = 1; // single constant detection-efficiency factor

    SetupConfig(double I, double tau_, double dt, double a = 0.0, double b = 0.0,
                double eta = 1.0);
};

/// The closed-form rate expressions assume well-separated time bins
/// (tau*delta_p >> 1) and detector resolution far above the photon coherence
/// time (delta_t*delta_a >> 1). Both products are reported so callers can gate
/// comparisons on regime validity instead of silently trusting the formulas.
struct RegimeReport {
    double tau_delta_p;
    double dt_delta_a;
    bool well_separated_bins;  // tau*delta_p >= 10
    bool delta_limit_ok;       // delta_t*delta_a >= 10
};

RegimeReport assess_regime(const SpectralModel& model, const SetupConfig& setup);

/// Pump spectral envelope, exp(-w^2 / (2 sigma_p^2)); peak-normalized.
double eval_pump(const SpectralModel& model, double omega);

/// Joint spectral amplitude at detunings (wa, wb). Real and nonnegative for
/// the built-in families (no pump chirp, no phase-matching phase).
double eval_g(const SpectralModel& model, double omega_a, double omega_b);

/// Intensity transmission F(w) in [0,1].
double eval_filter(const FilterSpec& filter, double omega);

/// Amplitude transmission sqrt(F(w)).
double eval_filter_amplitude(const FilterSpec& filter, double omega);

std::string to_string(ModelShape s);
std::string to_string(FilterShape s);

} // namespace pdcvis
