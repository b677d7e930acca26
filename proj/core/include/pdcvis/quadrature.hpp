#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "pdcvis/spectral.hpp"

namespace pdcvis {

enum class QuadratureRule { gauss_legendre, trapezoid };

struct QuadratureConfig {
    // Nodes per axis for the 2-D integrals. The 4-D exchange integral uses
    // j4_nodes_per_axis (0 = pick a default that keeps n^4 affordable).
    int nodes_per_axis = 48;
    double range_sigmas = 8.0;  // half-width of node placement in local Gaussian sigmas
    QuadratureRule rule = QuadratureRule::gauss_legendre;
    int j4_nodes_per_axis = 0;

    void validate() const;
    int j4_nodes() const { return j4_nodes_per_axis > 0 ? j4_nodes_per_axis : 20; }
};

struct GridMeta {
    int nodes_two_dim = 0;
    int nodes_four_dim = 0;
    double range_sigmas = 0.0;
    QuadratureRule rule = QuadratureRule::gauss_legendre;
};

/// The five spectral integrals with per-integral refinement error estimates
/// (absolute, |value(n) - value(2n)|). All are plain numbers in the working
/// units; ratios of them are what carries physical meaning.
struct JIntegrals {
    double j = 0, j_a = 0, j_b = 0, j_ab = 0, j4 = 0;
    double err_j = 0, err_j_a = 0, err_j_b = 0, err_j_ab = 0, err_j4 = 0;
    GridMeta grid;
};

struct TwoDimResult {
    double j, j_a, j_b, j_ab;
    double err_j, err_j_a, err_j_b, err_j_ab;
};

struct J4Result {
    double j4;
    double err;
};

/// The four 2-D integrals: plain intensity integral of |g|^2 and its
/// filter-weighted variants. Throws NonConvergence if the n vs 2n refinement
/// disagrees by more than 1% (relative) on any of them.
TwoDimResult compute_two_dim(const SpectralModel& model, const FilterSpec& fa,
                             const FilterSpec& fb, const QuadratureConfig& cfg);

/// The 4-D exchange integral: kernel g(x,y) g(x',y') g(x,y') g(x',y) weighted
/// by F_A(x) F_B(y) on the unprimed pair, plus complex conjugate (so for real
/// nonnegative g this is twice the plain product integral). A separable model
/// factorizes exactly and takes a 1-D product fast path.
J4Result compute_j4(const SpectralModel& model, const FilterSpec& fa,
                    const FilterSpec& fb, const QuadratureConfig& cfg);

/// Convenience: both of the above assembled into one JIntegrals record.
JIntegrals compute_all(const SpectralModel& model, const FilterSpec& fa,
                       const FilterSpec& fb, const QuadratureConfig& cfg);

/// Normalized four-photon coherence j4 / (2 j j_ab): 1 for a fully coherent
/// (separable) state, below 1 when pump correlations make the two pairs
/// partially distinguishable. Clamped into [0,1] only when the excursion is
/// within the propagated error bars; a genuine violation is returned as-is.
double coherence_ratio(const JIntegrals& j);

/// Uniform symmetric axis over +/- range_sigmas * max(delta_a, delta_b) with
/// trapezoid weights (half weight at the endpoints). This is the exact grid
/// the trapezoid rule sums over, exposed so the discrete oracle can run on
/// byte-identical nodes.
struct UniformAxis {
    std::vector<double> nodes;
    std::vector<double> weights;
    double spacing = 0.0;
};

UniformAxis make_uniform_axis(const SpectralModel& model, const QuadratureConfig& cfg,
                              int nodes_override = 0);

namespace detail {

/// Gauss-Legendre nodes/weights on [-1,1] (Newton iteration on P_n).
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// The general iterated 4-D evaluation of the exchange integral, bypassing the
/// separable fast path. Exposed so tests can verify the factorization identity
/// j4 = 2 j j_ab on the separable family through the full 4-D machinery.
J4Result compute_j4_general(const SpectralModel& model, const FilterSpec& fa,
                            const FilterSpec& fb, const QuadratureConfig& cfg);

} // namespace detail

} // namespace pdcvis
