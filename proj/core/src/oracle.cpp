#include "pdcvis/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "pdcvis/errors.hpp"

namespace pdcvis {

namespace {

using cd = std::complex<double>;
constexpr double kPi = 3.14159265358979323846;
constexpr cd kJ{0.0, 1.0};

double sinc(double x) {
    // sin(x)/x with the removable singularity expanded; the series keeps the
    // kernel smooth through x = 0 instead of special-casing exact zero only.
    if (std::abs(x) < 1e-6) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

void check_grid(const DiscreteModel& dm, const OracleConfig& cfg) {
    if (dm.na() > cfg.max_grid || dm.nb() > cfg.max_grid) {
        std::ostringstream msg;
        msg << "oracle grid " << dm.na() << "x" << dm.nb() << " exceeds max_grid = "
            << cfg.max_grid << "; raise OracleConfig::max_grid deliberately if the "
            << "product-space cost is intended";
        throw GridTooLarge(msg.str());
    }
}

// Map a detection time onto its time-bin index; stationary-term evaluation is
// only defined on the bin grid {0, tau, 2 tau}.
int to_bin(double T, double tau, const char* name) {
    const double ratio = T / tau;
    const int bin = static_cast<int>(std::lround(ratio));
    if (bin < 0 || bin > 2 || std::abs(T - bin * tau) > 1e-9 * std::max(tau, 1.0)) {
        std::ostringstream msg;
        msg << name << " = " << T << " is not on the time-bin grid {0, tau, 2*tau} "
            << "required for stationary-term evaluation (tau = " << tau << ")";
        throw std::invalid_argument(msg.str());
    }
    return bin;
}

// Interferometer amplitude for one spectral component, with its 1/2 kept.
cd franson_amp(double omega, double tau, double phase) {
    return 0.5 * (1.0 - std::exp(kJ * (omega * tau + phase)));
}

// Per-variable dressings: full quadrature weight (each variable is summed
// exactly once), filter amplitude, interferometer amplitude, detection phase.
struct ArmDress {
    Eigen::VectorXcd unprimed;
    Eigen::VectorXcd primed;
};

ArmDress dress_arm(const std::vector<double>& axis, const std::vector<double>& w,
                   const Eigen::VectorXd& f, SetupKind setup, double tau, double phase,
                   double T) {
    const auto n = static_cast<Eigen::Index>(axis.size());
    ArmDress d;
    d.unprimed.resize(n);
    d.primed.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = axis[static_cast<std::size_t>(i)];
        const cd s = setup == SetupKind::franson ? franson_amp(x, tau, phase) : cd{1.0, 0.0};
        const cd det = std::exp(-kJ * (x * T));
        const cd base = w[static_cast<std::size_t>(i)] * f[i];
        d.unprimed[i] = base * s * det;
        d.primed[i] = base * std::conj(s * det);
    }
    return d;
}

// Real-valued kernel stored complex so every factor in the matrix chains
// shares one scalar type.
Eigen::MatrixXcd sinc_kernel(const std::vector<double>& axis, double dt) {
    const auto n = static_cast<Eigen::Index>(axis.size());
    Eigen::MatrixXcd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            k(i, j) = sinc((axis[static_cast<std::size_t>(i)] -
                            axis[static_cast<std::size_t>(j)]) *
                           dt);
    return k;
}

// Joint amplitude times the double-pulse pump factor (1 + e^{i(x+y) tau}).
Eigen::MatrixXcd pumped_g(const DiscreteModel& dm, double tau) {
    Eigen::MatrixXcd G(static_cast<Eigen::Index>(dm.na()), static_cast<Eigen::Index>(dm.nb()));
    for (Eigen::Index i = 0; i < G.rows(); ++i)
        for (Eigen::Index j = 0; j < G.cols(); ++j) {
            const double sum = dm.axis_a[static_cast<std::size_t>(i)] +
                               dm.axis_b[static_cast<std::size_t>(j)];
            G(i, j) = dm.g(i, j) * (1.0 + std::exp(kJ * (sum * tau)));
        }
    return G;
}

// Closed-form rates assembled from grid-summed integrals through the term
// expansion; this is the "stationary terms only" branch of every oracle call.
double closed_rate(RateKind kind, SetupKind setup, int ta, int tb, double alpha,
                   double beta, const JIntegrals& js, double intensity) {
    const auto report = select_stationary(enumerate_terms(kind, setup, ta, tb));
    const double norm =
        setup == SetupKind::franson ? kFransonNormalization : kCalibrationNormalization;
    return norm * reconstruct_rate(report, js, intensity).value_at(alpha + beta);
}

struct ContractionParts {
    Eigen::MatrixXcd G;   // pumped joint amplitude on the (arm a x arm b) grid
    Eigen::MatrixXcd ka;  // detection kernel, arm a
    Eigen::MatrixXcd kb;  // detection kernel, arm b
    ArmDress a;           // detected arm-a variables
    ArmDress b;           // detected arm-b variables
    Eigen::VectorXcd wa;  // bare weights for undetected (spectator) variables
    Eigen::VectorXcd wb;
};

ContractionParts make_parts(const DiscreteModel& dm, const OracleConfig& cfg,
                            SetupKind setup, double T_A, double T_B, double alpha,
                            double beta) {
    ContractionParts p;
    p.G = pumped_g(dm, cfg.tau);
    p.ka = sinc_kernel(dm.axis_a, cfg.delta_t);
    p.kb = sinc_kernel(dm.axis_b, cfg.delta_t);
    p.a = dress_arm(dm.axis_a, dm.weight_a, dm.fa, setup, cfg.tau, alpha, T_A);
    p.b = dress_arm(dm.axis_b, dm.weight_b, dm.fb, setup, cfg.tau, beta, T_B);
    p.wa = Eigen::Map<const Eigen::VectorXd>(dm.weight_a.data(),
                                             static_cast<Eigen::Index>(dm.weight_a.size()))
               .cast<cd>();
    p.wb = Eigen::Map<const Eigen::VectorXd>(dm.weight_b.data(),
                                             static_cast<Eigen::Index>(dm.weight_b.size()))
               .cast<cd>();
    return p;
}

// Twin-pair sum (shared by R2 and R41): all four detected variables, one
// detection kernel per arm, dressings folded in. Equals the literal product-
// space sum with the summation reorganized into matrix products.
double twin_core(const ContractionParts& p, double dt) {
    // M(a,b) carries the unprimed pair, its adjoint the conjugate pair.
    const Eigen::MatrixXcd m =
        p.a.unprimed.asDiagonal() * p.G * p.b.unprimed.asDiagonal();
    const cd tr = (p.ka * m * p.kb * m.adjoint()).trace();
    return dt * dt * tr.real();
}

// Spectator-pair sum of R41: unfiltered, undetected, but with its own
// double-pulse factor whose oscillation only averages out in the limit.
double spectator_sum(const ContractionParts& p) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < p.G.rows(); ++i)
        for (Eigen::Index j = 0; j < p.G.cols(); ++j)
            s += (p.wa[i] * p.wb[j]).real() * std::norm(p.G(i, j));
    return s;
}

double exchange_cycle(const ContractionParts& p, double dt) {
    // One ordering of the exchange term as a closed walk
    // a -> bt -> at -> b -> b' -> a' -> a; each variable is the row index of
    // exactly one matrix and carries its full dressing there.
    const Eigen::MatrixXcd m1 = p.a.unprimed.asDiagonal() * p.G;                   // (a, bt)
    const Eigen::MatrixXcd m2 = p.wb.asDiagonal() * p.G.transpose().conjugate();   // (bt, at)
    const Eigen::MatrixXcd m3 = p.wa.asDiagonal() * p.G;                           // (at, b)
    const Eigen::MatrixXcd m4 = p.b.unprimed.asDiagonal() * p.kb;                  // (b, b')
    const Eigen::MatrixXcd m5 = p.b.primed.asDiagonal() * p.G.transpose().conjugate(); // (b', a')
    const Eigen::MatrixXcd m6 = p.a.primed.asDiagonal() * p.ka;                    // (a', a)
    const cd tr = (m1 * m2 * m3 * m4 * m5 * m6).trace();
    return dt * dt * 2.0 * tr.real();  // plus complex conjugate
}

double cross_pair(const ContractionParts& p, double dt) {
    // Two disjoint 3-walks: {a, bt, a'} on the arm-a kernel and {b, at, b'}
    // on the arm-b kernel; the rate is the product of the two loop sums.
    const Eigen::MatrixXcd n1 = p.a.unprimed.asDiagonal() * p.G;                   // (a, bt)
    const Eigen::MatrixXcd n2 = p.wb.asDiagonal() * p.G.transpose().conjugate();   // (bt, a')
    const Eigen::MatrixXcd n3 = p.a.primed.asDiagonal() * p.ka;                    // (a', a)
    const Eigen::MatrixXcd q1 = p.b.unprimed.asDiagonal() * p.G.transpose();       // (b, at)
    const Eigen::MatrixXcd q2 = p.wa.asDiagonal() * p.G.conjugate();               // (at, b')
    const Eigen::MatrixXcd q3 = p.b.primed.asDiagonal() * p.kb;                    // (b', b)
    const cd ta = (n1 * n2 * n3).trace();
    const cd tb = (q1 * q2 * q3).trace();
    return dt * dt * ta.real() * tb.real();
}

} // namespace

OracleConfig::OracleConfig(double tau_, double dt, double I)
    : tau(tau_), delta_t(dt), intensity(I) {
    validate();
}

void OracleConfig::validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw std::invalid_argument("OracleConfig: tau must be finite and > 0");
    if (!(delta_t > 0.0) || !std::isfinite(delta_t))
        throw std::invalid_argument("OracleConfig: delta_t must be finite and > 0");
    if (!(intensity >= 0.0) || !std::isfinite(intensity))
        throw std::invalid_argument("OracleConfig: intensity must be finite and >= 0");
    if (max_grid < 2) throw std::invalid_argument("OracleConfig: max_grid must be >= 2");
}

DiscreteModel make_discrete_model(const SpectralModel& model, const FilterSpec& fa,
                                  const FilterSpec& fb, const QuadratureConfig& cfg,
                                  int nodes_override) {
    const UniformAxis ax = make_uniform_axis(model, cfg, nodes_override);
    DiscreteModel dm;
    dm.axis_a = ax.nodes;
    dm.axis_b = ax.nodes;
    dm.weight_a = ax.weights;
    dm.weight_b = ax.weights;
    dm.delta_p = model.delta_p;

    const auto n = static_cast<Eigen::Index>(ax.nodes.size());
    dm.g.resize(n, n);
    dm.fa.resize(n);
    dm.fb.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = ax.nodes[static_cast<std::size_t>(i)];
        dm.fa[i] = eval_filter_amplitude(fa, x);
        dm.fb[i] = eval_filter_amplitude(fb, x);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double y = ax.nodes[static_cast<std::size_t>(j)];
            const double v = eval_g(model, x, y);
            if (!std::isfinite(v))
                throw DegenerateModel("joint amplitude is not finite on the oracle grid");
            dm.g(i, j) = v;
        }
    }
    return dm;
}

double oracle_to_closed_scale(SetupKind setup) {
    const double half_powers =
        setup == SetupKind::franson ? 16.0 * kFransonNormalization : kCalibrationNormalization;
    return half_powers / (kOracleDeltaKernelWeight * kOracleDeltaKernelWeight);
}

JIntegrals oracle_j_sums(const DiscreteModel& dm) {
    JIntegrals out;
    const auto na = static_cast<Eigen::Index>(dm.na());
    const auto nb = static_cast<Eigen::Index>(dm.nb());

    Eigen::MatrixXcd gw(na, nb);  // sqrt-weighted amplitude for the exchange sum
    for (Eigen::Index i = 0; i < na; ++i) {
        const double wa = dm.weight_a[static_cast<std::size_t>(i)];
        const double Fa = dm.fa[i] * dm.fa[i];
        for (Eigen::Index j = 0; j < nb; ++j) {
            const double wb = dm.weight_b[static_cast<std::size_t>(j)];
            const double Fb = dm.fb[j] * dm.fb[j];
            const double t = wa * wb * std::norm(dm.g(i, j));
            out.j += t;
            out.j_a += Fa * t;
            out.j_b += Fb * t;
            out.j_ab += Fa * Fb * t;
            gw(i, j) = std::sqrt(wa * wb) * dm.g(i, j);
        }
    }

    // Exchange sum reorganized as one matrix chain: summing the primed pair
    // first gives (G G^H G), leaving a filtered elementwise contraction.
    const Eigen::MatrixXcd chain = gw * gw.adjoint() * gw;
    cd one_ordering{0.0, 0.0};
    for (Eigen::Index i = 0; i < na; ++i)
        for (Eigen::Index j = 0; j < nb; ++j)
            one_ordering += dm.fa[i] * dm.fa[i] * dm.fb[j] * dm.fb[j] *
                            std::conj(gw(i, j)) * chain(i, j);
    out.j4 = 2.0 * one_ordering.real();

    out.grid.nodes_two_dim = static_cast<int>(dm.na());
    out.grid.nodes_four_dim = static_cast<int>(dm.na());
    out.grid.rule = QuadratureRule::trapezoid;
    return out;
}

double oracle_R2(const DiscreteModel& dm, const OracleConfig& cfg, SetupKind setup,
                 double T_A, double T_B, double alpha, double beta) {
    cfg.validate();
    check_grid(dm, cfg);
    if (!cfg.include_oscillatory) {
        const JIntegrals js = oracle_j_sums(dm);
        return closed_rate(RateKind::r2, setup, to_bin(T_A, cfg.tau, "T_A"),
                           to_bin(T_B, cfg.tau, "T_B"), alpha, beta, js, cfg.intensity);
    }
    const ContractionParts p = make_parts(dm, cfg, setup, T_A, T_B, alpha, beta);
    return oracle_to_closed_scale(setup) * cfg.intensity * twin_core(p, cfg.delta_t);
}

FourfoldRates oracle_R4(const DiscreteModel& dm, const OracleConfig& cfg, SetupKind setup,
                        double T_A, double T_B, double alpha, double beta) {
    cfg.validate();
    check_grid(dm, cfg);
    FourfoldRates out;
    const double I2 = cfg.intensity * cfg.intensity;
    if (!cfg.include_oscillatory) {
        const JIntegrals js = oracle_j_sums(dm);
        const int ta = to_bin(T_A, cfg.tau, "T_A");
        const int tb = to_bin(T_B, cfg.tau, "T_B");
        out.r41 = closed_rate(RateKind::r41, setup, ta, tb, alpha, beta, js, cfg.intensity);
        out.r42_plus_cc =
            closed_rate(RateKind::r42, setup, ta, tb, alpha, beta, js, cfg.intensity);
        out.r43 = closed_rate(RateKind::r43, setup, ta, tb, alpha, beta, js, cfg.intensity);
        out.r41_via_identity =
            2.0 * cfg.intensity * js.j *
            closed_rate(RateKind::r2, setup, ta, tb, alpha, beta, js, cfg.intensity);
        return out;
    }

    const ContractionParts p = make_parts(dm, cfg, setup, T_A, T_B, alpha, beta);
    const double scale = oracle_to_closed_scale(setup);
    const double core = twin_core(p, cfg.delta_t);

    out.r41 = scale * I2 * spectator_sum(p) * core;
    out.r42_plus_cc = scale * I2 * exchange_cycle(p, cfg.delta_t);
    out.r43 = scale * I2 * cross_pair(p, cfg.delta_t);

    const JIntegrals js = oracle_j_sums(dm);
    out.r41_via_identity = 2.0 * cfg.intensity * js.j * scale * cfg.intensity * core;
    return out;
}

std::vector<ConvergenceRow> convergence_study(const DiscreteModel& dm,
                                              const OracleConfig& cfg,
                                              const std::vector<double>& tau_multipliers) {
    cfg.validate();
    const JIntegrals js = oracle_j_sums(dm);
    const double phases[] = {0.0, 0.5 * kPi, kPi};

    std::vector<ConvergenceRow> rows;
    rows.reserve(tau_multipliers.size());
    for (double mult : tau_multipliers) {
        OracleConfig scaled = cfg;
        scaled.tau = cfg.tau * mult;
        scaled.delta_t = cfg.delta_t * mult;  // keep bins/window ratio fixed

        ConvergenceRow row;
        row.tau = scaled.tau;
        row.tau_delta_p = scaled.tau * dm.delta_p;
        row.regime_valid = row.tau_delta_p >= 10.0;

        double worst = 0.0;
        double full_at[3] = {0, 0, 0};
        double stat_at[3] = {0, 0, 0};
        for (int k = 0; k < 3; ++k) {
            const double a = phases[k];
            const double full =
                oracle_R2(dm, scaled, SetupKind::franson, scaled.tau, scaled.tau, a, 0.0) +
                oracle_R4(dm, scaled, SetupKind::franson, scaled.tau, scaled.tau, a, 0.0)
                    .total();
            double stat = closed_rate(RateKind::r2, SetupKind::franson, 1, 1, a, 0.0, js,
                                      scaled.intensity);
            for (RateKind kind : {RateKind::r41, RateKind::r42, RateKind::r43})
                stat += closed_rate(kind, SetupKind::franson, 1, 1, a, 0.0, js,
                                    scaled.intensity);
            full_at[k] = full;
            stat_at[k] = stat;
            if (stat != 0.0) worst = std::max(worst, std::abs(full - stat) / std::abs(stat));
        }
        row.deviation_rate = worst;

        const auto fringe = [](double hi, double lo) {
            const double s = hi + lo;
            return s == 0.0 ? 0.0 : (hi - lo) / s;
        };
        row.deviation_visibility =
            std::abs(fringe(full_at[0], full_at[2]) - fringe(stat_at[0], stat_at[2]));
        rows.push_back(row);
    }
    return rows;
}

namespace detail {

namespace {

struct NaiveParts {
    Eigen::MatrixXcd G;
    Eigen::MatrixXcd ka, kb;
    Eigen::VectorXcd ua, va, ub, vb;  // dressed detected variables (a, a', b, b')
    std::vector<double> wa, wb;
};

NaiveParts make_naive(const DiscreteModel& dm, const OracleConfig& cfg, SetupKind setup,
                      double T_A, double T_B, double alpha, double beta) {
    check_grid(dm, cfg);
    NaiveParts p;
    p.G = pumped_g(dm, cfg.tau);
    p.ka = sinc_kernel(dm.axis_a, cfg.delta_t);
    p.kb = sinc_kernel(dm.axis_b, cfg.delta_t);
    const ArmDress a = dress_arm(dm.axis_a, dm.weight_a, dm.fa, setup, cfg.tau, alpha, T_A);
    const ArmDress b = dress_arm(dm.axis_b, dm.weight_b, dm.fb, setup, cfg.tau, beta, T_B);
    p.ua = a.unprimed;
    p.va = a.primed;
    p.ub = b.unprimed;
    p.vb = b.primed;
    p.wa = dm.weight_a;
    p.wb = dm.weight_b;
    return p;
}

} // namespace

double oracle_R2_naive(const DiscreteModel& dm, const OracleConfig& cfg, SetupKind setup,
                       double T_A, double T_B, double alpha, double beta) {
    const NaiveParts p = make_naive(dm, cfg, setup, T_A, T_B, alpha, beta);
    const auto na = static_cast<Eigen::Index>(dm.na());
    const auto nb = static_cast<Eigen::Index>(dm.nb());
    cd acc{0.0, 0.0};
    for (Eigen::Index a = 0; a < na; ++a)
        for (Eigen::Index a2 = 0; a2 < na; ++a2) {
            const cd fa2 = p.ua[a] * p.va[a2] * p.ka(a, a2);
            for (Eigen::Index b = 0; b < nb; ++b) {
                const cd fb3 = fa2 * p.ub[b] * p.G(a, b);
                for (Eigen::Index b2 = 0; b2 < nb; ++b2)
                    acc += fb3 * p.vb[b2] * std::conj(p.G(a2, b2)) * p.kb(b, b2);
            }
        }
    return oracle_to_closed_scale(setup) * cfg.intensity * cfg.delta_t * cfg.delta_t *
           acc.real();
}

double oracle_R41_naive(const DiscreteModel& dm, const OracleConfig& cfg, SetupKind setup,
                        double T_A, double T_B, double alpha, double beta) {
    const NaiveParts p = make_naive(dm, cfg, setup, T_A, T_B, alpha, beta);
    const auto na = static_cast<Eigen::Index>(dm.na());
    const auto nb = static_cast<Eigen::Index>(dm.nb());
    cd acc{0.0, 0.0};
    for (Eigen::Index a = 0; a < na; ++a)
        for (Eigen::Index a2 = 0; a2 < na; ++a2) {
            const cd fa2 = p.ua[a] * p.va[a2] * p.ka(a, a2);
            for (Eigen::Index b = 0; b < nb; ++b) {
                const cd fb3 = fa2 * p.ub[b] * p.G(a, b);
                for (Eigen::Index b2 = 0; b2 < nb; ++b2) {
                    const cd twin = fb3 * p.vb[b2] * std::conj(p.G(a2, b2)) * p.kb(b, b2);
                    for (Eigen::Index at = 0; at < na; ++at)
                        for (Eigen::Index bt = 0; bt < nb; ++bt)
                            acc += twin * p.wa[static_cast<std::size_t>(at)] *
                                   p.wb[static_cast<std::size_t>(bt)] *
                                   std::norm(p.G(at, bt));
                }
            }
        }
    const double I2 = cfg.intensity * cfg.intensity;
    return oracle_to_closed_scale(setup) * I2 * cfg.delta_t * cfg.delta_t * acc.real();
}

double oracle_R42cc_naive(const DiscreteModel& dm, const OracleConfig& cfg, SetupKind setup,
                          double T_A, double T_B, double alpha, double beta) {
    const NaiveParts p = make_naive(dm, cfg, setup, T_A, T_B, alpha, beta);
    const auto na = static_cast<Eigen::Index>(dm.na());
    const auto nb = static_cast<Eigen::Index>(dm.nb());
    cd acc{0.0, 0.0};
    for (Eigen::Index a = 0; a < na; ++a)
        for (Eigen::Index a2 = 0; a2 < na; ++a2) {
            const cd fa2 = p.ua[a] * p.va[a2] * p.ka(a, a2);
            for (Eigen::Index b = 0; b < nb; ++b) {
                const cd fb3 = fa2 * p.ub[b];
                for (Eigen::Index b2 = 0; b2 < nb; ++b2) {
                    const cd fb4 = fb3 * p.vb[b2] * p.kb(b, b2) * std::conj(p.G(a2, b2));
                    for (Eigen::Index at = 0; at < na; ++at) {
                        const cd fa5 = fb4 * p.wa[static_cast<std::size_t>(at)] * p.G(at, b);
                        for (Eigen::Index bt = 0; bt < nb; ++bt)
                            acc += fa5 * p.wb[static_cast<std::size_t>(bt)] *
                                   std::conj(p.G(at, bt)) * p.G(a, bt);
                    }
                }
            }
        }
    const double I2 = cfg.intensity * cfg.intensity;
    return oracle_to_closed_scale(setup) * I2 * cfg.delta_t * cfg.delta_t * 2.0 * acc.real();
}

double oracle_R43_naive(const DiscreteModel& dm, const OracleConfig& cfg, SetupKind setup,
                        double T_A, double T_B, double alpha, double beta) {
    const NaiveParts p = make_naive(dm, cfg, setup, T_A, T_B, alpha, beta);
    const auto na = static_cast<Eigen::Index>(dm.na());
    const auto nb = static_cast<Eigen::Index>(dm.nb());
    cd acc{0.0, 0.0};
    for (Eigen::Index a = 0; a < na; ++a)
        for (Eigen::Index a2 = 0; a2 < na; ++a2) {
            const cd fa2 = p.ua[a] * p.va[a2] * p.ka(a, a2);
            for (Eigen::Index b = 0; b < nb; ++b) {
                const cd fb3 = fa2 * p.ub[b];
                for (Eigen::Index b2 = 0; b2 < nb; ++b2) {
                    const cd fb4 = fb3 * p.vb[b2] * p.kb(b, b2);
                    for (Eigen::Index at = 0; at < na; ++at) {
                        const cd fa5 = fb4 * p.wa[static_cast<std::size_t>(at)] *
                                       p.G(at, b) * std::conj(p.G(at, b2));
                        for (Eigen::Index bt = 0; bt < nb; ++bt)
                            acc += fa5 * p.wb[static_cast<std::size_t>(bt)] * p.G(a, bt) *
                                   std::conj(p.G(a2, bt));
                    }
                }
            }
        }
    const double I2 = cfg.intensity * cfg.intensity;
    return oracle_to_closed_scale(setup) * I2 * cfg.delta_t * cfg.delta_t * acc.real();
}

} // namespace detail

} // namespace pdcvis
