#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "pdcvis/quadrature.hpp"

namespace pdcvis {

/// The four contributions to the coincidence rate: the single-pair rate and
/// the three pieces of the two-pair rate (twin detection with an undetected
/// spectator pair; the exchange cross term, reported together with its
/// conjugate; and cross-pair detection).
enum class RateKind { r2, r41, r42, r43 };

/// Detection geometry: direct detection after the wavelength splitter
/// (calibration), or one unbalanced interferometer per arm (franson).
enum class SetupKind { calibration, franson };

/// Frequency variables of the rate integrands, in fixed index order:
/// 0: a, 1: b, 2: a' (conjugate side), 3: b', 4: a-tilde, 5: b-tilde
/// (the tilde pair only appears in the two-pair contributions).
inline constexpr int kTermVariables = 6;
using CoeffMap = std::array<int, kTermVariables>;

enum class TermVariable { a = 0, b = 1, a_prime = 2, b_prime = 3, a_tilde = 4, b_tilde = 5 };

/// One expansion term: a binary choice ('1' or 'e') in every pump and
/// evolution factor of the integrand. The phase of the chosen exponentials is
/// an exact integer linear form in the frequency variables (units of tau);
/// detection-time factors are folded in as integer multiples as well, so
/// stationarity is a pure integer test with no tolerance anywhere.
struct Term {
    std::string label;     // e.g. "1e|ee11" (franson) or "1e1e" (calibration)
    CoeffMap coeff_map{};  // integer coefficient of each frequency variable
    int alpha_units = 0;   // net multiple of the arm-a analyzer phase
    int beta_units = 0;    // net multiple of the arm-b analyzer phase
    int sign = 1;          // accumulated minus signs of the chosen exponentials
};

struct TermSet {
    RateKind kind = RateKind::r2;
    SetupKind setup = SetupKind::franson;
    int t_a = 0;  // detection time of arm a, integer multiple of tau
    int t_b = 0;
    std::vector<Term> terms;
};

/// Expand a rate integrand into all of its constituent terms.
///
/// Factor bookkeeping, in label order:
///  * pump slots: r2 has two, (a+b) and -(a'+b'); the two-pair kinds have
///    four, ordered as the integrand displays them — for r41 the spectator
///    pair's two factors come first, +(at+bt) then -(at+bt);
///  * evolution slots (franson only): arm-b then arm-a on the unprimed side,
///    then their conjugates, i.e. (b, a, b', a'); each chosen exponential
///    contributes a minus sign and one unit of the matching analyzer phase.
/// Detection times contribute -t_a to a, +t_a to a', -t_b to b, +t_b to b'.
///
/// Throws InvalidTimeBin unless t_a, t_b are in {0, 1, 2}.
TermSet enumerate_terms(RateKind kind, SetupKind setup, int t_a, int t_b);

/// Which product of intensity integrals a family's surviving terms reduce to
/// once the detector-resolution kernels identify a with a' and b with b'.
/// j_plain never arises alone for the four coincidence families but is kept
/// so every component kernel has a standalone name; the undetected spectator
/// pair of the r41 family multiplies the twin-pair kernel, giving the
/// product class j_times_j_ab.
enum class KernelClass {
    j_plain,         // unfiltered |g|^2
    j_a,             // |g|^2 against the arm-a filter only
    j_b,             // |g|^2 against the arm-b filter only
    j_ab,            // |g|^2 against both filters
    j_times_j_ab,    // spectator-pair j times the twin-pair j_ab
    j4_exchange,     // the crossed four-fold product (one ordering, half of j4)
    j_a_times_j_b,   // two disjoint singly filtered |g|^2 factors
};

struct SurvivorReport {
    RateKind kind = RateKind::r2;
    SetupKind setup = SetupKind::franson;
    int t_a = 0;
    int t_b = 0;
    std::size_t total_terms = 0;
    std::vector<Term> survivors;  // exactly the terms whose coeff_map is the zero form
    // Every stationary term of one family reduces onto the same kernel (the
    // detector-resolution identifications do not depend on the branch choices).
    KernelClass kernel_class = KernelClass::j_ab;
    // Survivor sum assembled as c0 + c1*cos(alpha+beta); exact small integers.
    int trig_constant = 0;
    int trig_cosine = 0;
    // The exchange contribution enters the rate together with its complex
    // conjugate; reconstruction doubles it when this is set.
    bool includes_conjugate = false;
};

/// Keep the terms whose phase vanishes identically (every integer coefficient
/// zero — the only ones that survive averaging over well-separated pulses),
/// assemble their phase factors into c0 + c1*cos(alpha+beta), and classify
/// the family's kernel by merging a'->a, b'->b and pattern-matching the
/// resulting product of joint-amplitude factors.
///
/// Throws NonRealCoefficient if the survivor sum is not of that trigonometric
/// form (it always is for these integrands; anything else means the
/// enumeration is corrupted). Throws UnclassifiedKernel if the merged factor
/// graph matches none of the known patterns.
SurvivorReport select_stationary(const TermSet& terms);

/// A reconstructed rate as a function of the analyzer phase sum.
struct RateExpression {
    double constant = 0;
    double cosine = 0;

    double value_at(double phase_sum) const;
};

/// Multiply the survivor trigonometry by the classified kernel value and the
/// appropriate intensity power. Results are in the expansion's own
/// normalization, where every unit-modulus factor is kept whole; multiply by
/// kFransonNormalization (resp. kCalibrationNormalization) to land on the
/// rates-visibility closed forms.
RateExpression reconstruct_rate(const SurvivorReport& report, const JIntegrals& j,
                                double intensity);

inline constexpr double kFransonNormalization = 0.5;
inline constexpr double kCalibrationNormalization = 1.0;

std::string to_string(RateKind k);
std::string to_string(SetupKind s);
std::string to_string(KernelClass k);

} // namespace pdcvis
