#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "pdcvis/quadrature.hpp"
#include "pdcvis/spectral.hpp"
#include "pdcvis/term_algebra.hpp"

namespace pdcvis {

/// Brute-force ground truth. The closed-form rates rest on two limits taken
/// analytically (well-separated time bins averaging the oscillatory terms to
/// zero, and detector response wide enough to act as a frequency delta). The
/// oracle takes neither limit: it evaluates the raw coincidence-rate sums on
/// a discrete frequency grid with every oscillatory factor and finite-width
/// detection kernel in place, so the closed forms can be checked against
/// first principles instead of against themselves.

/// Joint amplitude and filters sampled on a fixed frequency grid.
/// Axes may differ per arm, but the default builder shares one axis so the
/// sums are bit-comparable with the trapezoid quadrature on the same nodes.
struct DiscreteModel {
    std::vector<double> axis_a;    // detuning nodes, arm a (symmetric about 0)
    std::vector<double> axis_b;    // detuning nodes, arm b
    std::vector<double> weight_a;  // quadrature weight per node
    std::vector<double> weight_b;
    Eigen::MatrixXcd g;            // g sampled at (axis_a[i], axis_b[j])
    Eigen::VectorXd fa;            // amplitude transmission per arm-a node
    Eigen::VectorXd fb;            // amplitude transmission per arm-b node
    double delta_p = 1.0;          // pump width, kept for regime diagnostics

    std::size_t na() const { return axis_a.size(); }
    std::size_t nb() const { return axis_b.size(); }
};

/// Sample a spectral model onto the uniform trapezoid grid (the same nodes
/// make_uniform_axis hands the quadrature module, so grid-identity checks
/// compare identical sums). Throws DegenerateModel if g is not finite
/// everywhere on the grid.
DiscreteModel make_discrete_model(const SpectralModel& model, const FilterSpec& fa,
                                  const FilterSpec& fb, const QuadratureConfig& cfg,
                                  int nodes_override = 0);

struct OracleConfig {
    double tau;        // time-bin separation (ps)
    double delta_t;    // detector integration window (ps)
    double intensity = 1.0;
    // true: evaluate the complete integrand, every oscillating term included.
    // false: keep only the stationary terms — by construction this reproduces
    // the closed forms evaluated with grid-summed integrals.
    bool include_oscillatory = true;
    // Node-count cap for the sums over the full product space (a 6-D sum at n
    // nodes costs n^6 evaluations). Raise it deliberately for resolved-grid
    // runs; the cycle-contraction evaluation used internally scales as n^3.
    std::size_t max_grid = 12;

    OracleConfig(double tau_, double dt, double I = 1.0);
    void validate() const;
};

/// Normalization bookkeeping for absolute-rate comparisons.
///
/// The raw sums follow the rate integrands literally: a (delta_t)^2 prefactor
/// with one sin(x)/x detection kernel per arm, and interferometer amplitudes
/// (1 - e^{i(w tau + phase)})/2 carrying their factors 1/2. In the wide-window
/// limit each detection kernel contributes pi/delta_t against the diagonal,
/// so a literal rate exceeds its closed form by pi^2, and the sixteen halves
/// of the four interferometer amplitudes, net of the term-expansion
/// convention, leave the closed forms 8x the literal franson sums. Oracle
/// results are returned on the closed-form scale (raw * the constant below),
/// keeping every comparison a plain ratio.
inline constexpr double kOracleDeltaKernelWeight = 3.14159265358979323846;  // per arm
double oracle_to_closed_scale(SetupKind setup);

/// Single-pair coincidence rate: direct sum over (w_a, w_b, w_a', w_b') of
/// the full integrand — pump double-pulse factors, interferometer evolution
/// (identity for calibration), detection-time exponentials and finite-window
/// detection kernels. T_A, T_B are the detection times (multiples of tau give
/// the time-bin peaks). Throws GridTooLarge when an axis exceeds cfg.max_grid.
double oracle_R2(const DiscreteModel& dm, const OracleConfig& cfg, SetupKind setup,
                 double T_A, double T_B, double alpha, double beta);

struct FourfoldRates {
    double r41 = 0;          // twin detection, spectator pair undetected
    double r42_plus_cc = 0;  // exchange cross term plus its conjugate
    double r43 = 0;          // one photon from each pair
    double r41_via_identity = 0;  // 2 I j * R2 consistency route
    double total() const { return r41 + r42_plus_cc + r43; }
};

/// The three four-photon contributions summed directly from their integrands
/// (6 frequency variables each). r41 is also reported through the product
/// identity 2*I*j*R2 as a cross-check; with oscillatory terms enabled the
/// direct path keeps the spectator-pair interference the identity drops.
/// Throws GridTooLarge when an axis exceeds cfg.max_grid.
FourfoldRates oracle_R4(const DiscreteModel& dm, const OracleConfig& cfg, SetupKind setup,
                        double T_A, double T_B, double alpha, double beta);

/// The five spectral integrals as plain sums on the grid — the trapezoid
/// quadrature values, term for term, for grid-identity checks.
JIntegrals oracle_j_sums(const DiscreteModel& dm);

struct ConvergenceRow {
    double tau = 0;           // scaled bin separation for this row
    double tau_delta_p = 0;   // regime parameter
    double deviation_rate = 0;        // max relative rate deviation over phases
    double deviation_visibility = 0;  // |V_oracle - V_closed|
    bool regime_valid = false;        // tau*delta_p >= 10
};

/// Scale (tau, delta_t) together by each multiplier and compare the
/// full-oscillatory franson rates at the interference peak against the
/// stationary closed forms built from the same grid's integrals. The
/// closed-form description is only trustworthy where deviations fall with
/// growing tau*delta_p; rows outside the regime are flagged rather than
/// hidden.
std::vector<ConvergenceRow> convergence_study(const DiscreteModel& dm,
                                              const OracleConfig& cfg,
                                              const std::vector<double>& tau_multipliers);

namespace detail {

/// Direct product-space summations (4 or 6 nested loops), kept as the
/// independent check on the cycle-contraction evaluation: same integrand,
/// no algebra between the integrand and the accumulator. Gated by
/// cfg.max_grid like the public entry points.
double oracle_R2_naive(const DiscreteModel& dm, const OracleConfig& cfg, SetupKind setup,
                       double T_A, double T_B, double alpha, double beta);
double oracle_R41_naive(const DiscreteModel& dm, const OracleConfig& cfg, SetupKind setup,
                        double T_A, double T_B, double alpha, double beta);
double oracle_R42cc_naive(const DiscreteModel& dm, const OracleConfig& cfg, SetupKind setup,
                          double T_A, double T_B, double alpha, double beta);
double oracle_R43_naive(const DiscreteModel& dm, const OracleConfig& cfg, SetupKind setup,
                        double T_A, double T_B, double alpha, double beta);

} // namespace detail

} // namespace pdcvis
