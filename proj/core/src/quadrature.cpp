#include "pdcvis/quadrature.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "pdcvis/errors.hpp"

namespace pdcvis {

void QuadratureConfig::validate() const {
    if (nodes_per_axis < 8)
        throw std::invalid_argument("QuadratureConfig: nodes_per_axis must be at least 8");
    if (!(range_sigmas >= 5.0) || !std::isfinite(range_sigmas))
        throw std::invalid_argument("QuadratureConfig: range_sigmas must be at least 5");
    if (j4_nodes_per_axis != 0 && j4_nodes_per_axis < 8)
        throw std::invalid_argument(
            "QuadratureConfig: j4_nodes_per_axis must be 0 (auto) or at least 8");
}

namespace detail {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
    nodes.assign(static_cast<size_t>(n), 0.0);
    weights.assign(static_cast<size_t>(n), 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev estimate of the i-th root of P_n, then Newton. Converges in
        // three or four steps for every n we use.
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double step = p1 / pp;
            z -= step;
            if (std::abs(step) < 1e-15) break;
        }
        nodes[static_cast<size_t>(i)] = -z;
        nodes[static_cast<size_t>(n - 1 - i)] = z;
        const double w = 2.0 / ((1.0 - z * z) * pp * pp);
        weights[static_cast<size_t>(i)] = w;
        weights[static_cast<size_t>(n - 1 - i)] = w;
    }
}

} // namespace detail

namespace {

constexpr double kRefineRelTol = 0.01;

double gauss_filter_coeff(const FilterSpec& f) {
    // Intensity FWHM w for a Gaussian filter means exp(-4 ln2 (x-c)^2 / w^2).
    if (f.shape != FilterShape::gaussian) return 0.0;
    return 4.0 * std::numbers::ln2 / (f.width * f.width);
}

// Quadratic form of the Gaussian envelope of an integrand, in the convention
//   envelope = exp(-(z^T M z - 2 b . z)).
// Only used to place quadrature nodes; the integrand itself is always
// evaluated through the honest model/filter functions.
struct GaussForm {
    Eigen::MatrixXd m;
    Eigen::VectorXd b;
};

GaussForm two_dim_form(const SpectralModel& model, const FilterSpec& fa,
                       const FilterSpec& fb) {
    const double inv_a = 1.0 / (model.delta_a * model.delta_a);
    const double inv_b = 1.0 / (model.delta_b * model.delta_b);
    const double p = model.shape == ModelShape::gaussian
                         ? 1.0 / (model.delta_p * model.delta_p)
                         : 0.0;
    const double ca = gauss_filter_coeff(fa);
    const double cb = gauss_filter_coeff(fb);
    GaussForm f;
    f.m.resize(2, 2);
    // |g|^2 contributes x^2/da^2 + y^2/db^2 + (x+y)^2/dp^2.
    f.m << inv_a + p + ca, p,
           p, inv_b + p + cb;
    f.b.resize(2);
    f.b << ca * fa.center_offset, cb * fb.center_offset;
    return f;
}

GaussForm exchange_form(const SpectralModel& model, const FilterSpec& fa,
                        const FilterSpec& fb) {
    // Envelope of g(x,y) g(x',y') g(x,y') g(x',y): each signal variable meets
    // each idler variable through exactly one pump factor, so the pump couples
    // (x,y), (x,y'), (x',y), (x',y') but never x to x' or y to y'.
    const double inv_a = 1.0 / (model.delta_a * model.delta_a);
    const double inv_b = 1.0 / (model.delta_b * model.delta_b);
    const double p = model.shape == ModelShape::gaussian
                         ? 1.0 / (model.delta_p * model.delta_p)
                         : 0.0;
    const double ca = gauss_filter_coeff(fa);
    const double cb = gauss_filter_coeff(fb);
    GaussForm f;
    f.m.resize(4, 4);
    f.m.setZero();
    // Variable order: x (signal), y (idler), x' (signal), y' (idler).
    f.m(0, 0) = inv_a + p + ca;
    f.m(1, 1) = inv_b + p + cb;
    f.m(2, 2) = inv_a + p;
    f.m(3, 3) = inv_b + p;
    const double half_p = 0.5 * p;
    f.m(0, 1) = f.m(1, 0) = half_p;
    f.m(0, 3) = f.m(3, 0) = half_p;
    f.m(2, 1) = f.m(1, 2) = half_p;
    f.m(2, 3) = f.m(3, 2) = half_p;
    f.b.resize(4);
    f.b.setZero();
    f.b(0) = ca * fa.center_offset;
    f.b(1) = cb * fb.center_offset;
    return f;
}

// Per-level placement data for iterated quadrature: integrating the envelope
// over all later variables leaves exp(-S (z_i - mu)^2) where mu is affine in
// the already-fixed outer variables and S is a Schur complement of M. We
// reduce that to scalar coefficients so the hot loops stay allocation-free.
struct PlacementLevel {
    double c0 = 0.0;                 // constant part of the conditional center
    std::array<double, 3> a{};       // coefficients of the outer variables
    int n_outer = 0;
    double sigma = 0.0;              // standard deviation of the marginal
};

PlacementLevel make_level(const GaussForm& f, int level) {
    const int dim = static_cast<int>(f.m.rows());
    const int k = dim - level;
    Eigen::MatrixXd inner = f.m.block(level, level, k, k);
    Eigen::MatrixXd inv = inner.inverse();
    const double inv00 = inv(0, 0);
    if (!std::isfinite(inv00) || inv00 <= 0.0)
        throw DegenerateModel("quadrature: Gaussian envelope is not positive definite");
    PlacementLevel L;
    L.n_outer = level;
    // exp(-S (z-mu)^2) with S = 1/inv00 is a normal density of variance inv00/2.
    L.sigma = std::sqrt(0.5 * inv00);
    Eigen::RowVectorXd row0 = inv.row(0);
    L.c0 = row0.dot(f.b.segment(level, k));
    for (int j = 0; j < level; ++j) {
        // center = row0 . (b_inner - M_cross z_outer)
        Eigen::VectorXd cross_col = f.m.block(level, j, k, 1);
        L.a[static_cast<size_t>(j)] = -row0.dot(cross_col);
    }
    return L;
}

double level_center(const PlacementLevel& L, const double* outer) {
    double c = L.c0;
    for (int j = 0; j < L.n_outer; ++j) c += L.a[static_cast<size_t>(j)] * outer[j];
    return c;
}

struct Interval {
    double lo = 0.0, hi = 0.0;
    bool empty = false;
};

Interval place_interval(double center, double sigma, double range_sigmas,
                        const FilterSpec& filter) {
    Interval iv;
    iv.lo = center - range_sigmas * sigma;
    iv.hi = center + range_sigmas * sigma;
    if (filter.shape == FilterShape::rectangular) {
        // A hard-edged filter annihilates everything outside its passband, so
        // the quadrature interval is the overlap.
        iv.lo = std::max(iv.lo, filter.center_offset - 0.5 * filter.width);
        iv.hi = std::min(iv.hi, filter.center_offset + 0.5 * filter.width);
    }
    if (!(iv.lo < iv.hi)) iv.empty = true;
    return iv;
}

struct MappedRule {
    std::vector<double> x, w;
};

void map_rule(const std::vector<double>& base_x, const std::vector<double>& base_w,
              const Interval& iv, MappedRule& out) {
    const double mid = 0.5 * (iv.hi + iv.lo);
    const double half = 0.5 * (iv.hi - iv.lo);
    const size_t n = base_x.size();
    out.x.resize(n);
    out.w.resize(n);
    for (size_t i = 0; i < n; ++i) {
        out.x[i] = mid + half * base_x[i];
        out.w[i] = half * base_w[i];
    }
}

double two_dim_pass(const SpectralModel& model, const FilterSpec& fa,
                    const FilterSpec& fb, int n, double range_sigmas) {
    const GaussForm form = two_dim_form(model, fa, fb);
    const PlacementLevel L0 = make_level(form, 0);
    const PlacementLevel L1 = make_level(form, 1);

    std::vector<double> bx, bw;
    detail::gauss_legendre(n, bx, bw);

    const Interval ix = place_interval(level_center(L0, nullptr), L0.sigma,
                                       range_sigmas, fa);
    if (ix.empty) return 0.0;
    MappedRule rx, ry;
    map_rule(bx, bw, ix, rx);

    double acc = 0.0;
    for (size_t i = 0; i < rx.x.size(); ++i) {
        const double x = rx.x[i];
        const Interval iy = place_interval(level_center(L1, &x), L1.sigma,
                                           range_sigmas, fb);
        if (iy.empty) continue;
        map_rule(bx, bw, iy, ry);
        const double fx = eval_filter(fa, x);
        double inner = 0.0;
        for (size_t jy = 0; jy < ry.x.size(); ++jy) {
            const double y = ry.x[jy];
            const double g = eval_g(model, x, y);
            inner += ry.w[jy] * eval_filter(fb, y) * g * g;
        }
        acc += rx.w[i] * fx * inner;
    }
    return acc;
}

double two_dim_trap(const SpectralModel& model, const FilterSpec& fa,
                    const FilterSpec& fb, const UniformAxis& axis) {
    double acc = 0.0;
    const size_t n = axis.nodes.size();
    for (size_t i = 0; i < n; ++i) {
        const double x = axis.nodes[i];
        const double fx = eval_filter(fa, x);
        if (fx == 0.0) continue;
        double inner = 0.0;
        for (size_t jy = 0; jy < n; ++jy) {
            const double y = axis.nodes[jy];
            const double g = eval_g(model, x, y);
            inner += axis.weights[jy] * eval_filter(fb, y) * g * g;
        }
        acc += axis.weights[i] * fx * inner;
    }
    return acc;
}

double exchange_pass(const SpectralModel& model, const FilterSpec& fa,
                     const FilterSpec& fb, int n, double range_sigmas) {
    const GaussForm form = exchange_form(model, fa, fb);
    const PlacementLevel L0 = make_level(form, 0);
    const PlacementLevel L1 = make_level(form, 1);
    const PlacementLevel L2 = make_level(form, 2);
    const PlacementLevel L3 = make_level(form, 3);

    std::vector<double> bx, bw;
    detail::gauss_legendre(n, bx, bw);

    const Interval ix = place_interval(level_center(L0, nullptr), L0.sigma,
                                       range_sigmas, fa);
    if (ix.empty) return 0.0;
    MappedRule rx, ry, rxp, ryp;
    map_rule(bx, bw, ix, rx);

    // The kernel is complex in general; the built-in Gaussian families are
    // real, so the closing "+ conjugate" reduces to a factor of two on the
    // real part.
    std::complex<double> acc = 0.0;
    double z[3];
    for (size_t i = 0; i < rx.x.size(); ++i) {
        const double x = rx.x[i];
        z[0] = x;
        const Interval iy = place_interval(level_center(L1, z), L1.sigma,
                                           range_sigmas, fb);
        if (iy.empty) continue;
        map_rule(bx, bw, iy, ry);
        const double wfx = rx.w[i] * eval_filter(fa, x);
        for (size_t jy = 0; jy < ry.x.size(); ++jy) {
            const double y = ry.x[jy];
            z[1] = y;
            const Interval ixp = place_interval(level_center(L2, z), L2.sigma,
                                                range_sigmas, FilterSpec::none_filter());
            map_rule(bx, bw, ixp, rxp);
            const double wfxy = wfx * ry.w[jy] * eval_filter(fb, y);
            for (size_t k = 0; k < rxp.x.size(); ++k) {
                const double xp = rxp.x[k];
                z[2] = xp;
                const Interval iyp = place_interval(level_center(L3, z), L3.sigma,
                                                    range_sigmas, FilterSpec::none_filter());
                map_rule(bx, bw, iyp, ryp);
                const double g_xy = eval_g(model, x, y);
                const double g_xpy = eval_g(model, xp, y);
                const double w3 = wfxy * rxp.w[k] * g_xy * g_xpy;
                double inner = 0.0;
                for (size_t l = 0; l < ryp.x.size(); ++l) {
                    const double yp = ryp.x[l];
                    inner += ryp.w[l] * eval_g(model, xp, yp) * eval_g(model, x, yp);
                }
                acc += w3 * inner;
            }
        }
    }
    return 2.0 * acc.real();
}

double exchange_trap(const SpectralModel& model, const FilterSpec& fa,
                     const FilterSpec& fb, const UniformAxis& axis) {
    const size_t n = axis.nodes.size();
    std::complex<double> acc = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double x = axis.nodes[i];
        const double wfx = axis.weights[i] * eval_filter(fa, x);
        if (wfx == 0.0) continue;
        for (size_t jy = 0; jy < n; ++jy) {
            const double y = axis.nodes[jy];
            const double wfxy = wfx * axis.weights[jy] * eval_filter(fb, y);
            if (wfxy == 0.0) continue;
            const double g_xy = eval_g(model, x, y);
            for (size_t k = 0; k < n; ++k) {
                const double xp = axis.nodes[k];
                const double w3 = wfxy * axis.weights[k] * g_xy * eval_g(model, xp, y);
                double inner = 0.0;
                for (size_t l = 0; l < n; ++l) {
                    const double yp = axis.nodes[l];
                    inner += axis.weights[l] * eval_g(model, xp, yp) * eval_g(model, x, yp);
                }
                acc += w3 * inner;
            }
        }
    }
    return 2.0 * acc.real();
}

double one_dim_pass(double exp_coeff, const FilterSpec& filter, int n,
                    double range_sigmas) {
    // Single-arm integral of exp(-c x^2) against a filter, used when the joint
    // amplitude factorizes exactly.
    const double cf = gauss_filter_coeff(filter);
    const double m = exp_coeff + cf;
    const double center = (cf * filter.center_offset) / m;
    const double sigma = std::sqrt(0.5 / m);
    const Interval iv = place_interval(center, sigma, range_sigmas, filter);
    if (iv.empty) return 0.0;
    std::vector<double> bx, bw;
    detail::gauss_legendre(n, bx, bw);
    MappedRule r;
    map_rule(bx, bw, iv, r);
    double acc = 0.0;
    for (size_t i = 0; i < r.x.size(); ++i) {
        const double x = r.x[i];
        acc += r.w[i] * eval_filter(filter, x) * std::exp(-exp_coeff * x * x);
    }
    return acc;
}

// Two-level refinement: evaluate at n and 2n nodes per axis. The adaptive rule
// returns the refined value and must converge; the literal uniform rule
// returns the value on the requested grid (that grid is the point of the
// exercise) and only reports the discrepancy.
struct Refined {
    double value = 0.0;
    double err = 0.0;
};

template <typename F>
Refined refine(F&& evaluate, int n, bool adaptive, const char* name) {
    const double coarse = evaluate(n);
    const double fine = evaluate(2 * n);
    Refined r;
    r.err = std::abs(fine - coarse);
    r.value = adaptive ? fine : coarse;
    if (adaptive) {
        const double scale = std::abs(fine);
        if (r.err > kRefineRelTol * scale &&
            r.err > std::numeric_limits<double>::min()) {
            std::ostringstream msg;
            msg << "quadrature for " << name << " did not converge: |" << coarse
                << " - " << fine << "| exceeds " << kRefineRelTol * 100
                << "% of the refined value";
            throw NonConvergence(msg.str());
        }
    }
    return r;
}

} // namespace

UniformAxis make_uniform_axis(const SpectralModel& model, const QuadratureConfig& cfg,
                              int nodes_override) {
    const int n = nodes_override > 0 ? nodes_override : cfg.nodes_per_axis;
    if (n < 2) throw std::invalid_argument("make_uniform_axis: need at least two nodes");
    const double half = cfg.range_sigmas * std::max(model.delta_a, model.delta_b);
    UniformAxis axis;
    axis.spacing = 2.0 * half / (n - 1);
    axis.nodes.resize(static_cast<size_t>(n));
    axis.weights.assign(static_cast<size_t>(n), axis.spacing);
    for (int i = 0; i < n; ++i)
        axis.nodes[static_cast<size_t>(i)] = -half + axis.spacing * i;
    axis.weights.front() *= 0.5;
    axis.weights.back() *= 0.5;
    return axis;
}

TwoDimResult compute_two_dim(const SpectralModel& model, const FilterSpec& fa,
                             const FilterSpec& fb, const QuadratureConfig& cfg) {
    cfg.validate();
    const FilterSpec open = FilterSpec::none_filter();
    const bool adaptive = cfg.rule == QuadratureRule::gauss_legendre;

    auto run = [&](const FilterSpec& fx, const FilterSpec& fy, const char* name) {
        if (adaptive) {
            return refine(
                [&](int n) { return two_dim_pass(model, fx, fy, n, cfg.range_sigmas); },
                cfg.nodes_per_axis, true, name);
        }
        return refine(
            [&](int n) {
                return two_dim_trap(model, fx, fy, make_uniform_axis(model, cfg, n));
            },
            cfg.nodes_per_axis, false, name);
    };

    const Refined rj = run(open, open, "the plain intensity integral");
    const Refined ra = run(fa, open, "the signal-filtered integral");
    const Refined rb = run(open, fb, "the idler-filtered integral");
    const Refined rab = run(fa, fb, "the doubly filtered integral");

    return TwoDimResult{rj.value,  ra.value,  rb.value,  rab.value,
                        rj.err,    ra.err,    rb.err,    rab.err};
}

namespace detail {

J4Result compute_j4_general(const SpectralModel& model, const FilterSpec& fa,
                            const FilterSpec& fb, const QuadratureConfig& cfg) {
    cfg.validate();
    if (cfg.rule == QuadratureRule::gauss_legendre) {
        const Refined r = refine(
            [&](int n) { return exchange_pass(model, fa, fb, n, cfg.range_sigmas); },
            cfg.j4_nodes(), true, "the exchange integral");
        return J4Result{r.value, r.err};
    }
    const Refined r = refine(
        [&](int n) {
            return exchange_trap(model, fa, fb, make_uniform_axis(model, cfg, n));
        },
        cfg.j4_nodes(), false, "the exchange integral");
    return J4Result{r.value, r.err};
}

} // namespace detail

J4Result compute_j4(const SpectralModel& model, const FilterSpec& fa,
                    const FilterSpec& fb, const QuadratureConfig& cfg) {
    cfg.validate();
    if (model.shape == ModelShape::separable_gaussian &&
        cfg.rule == QuadratureRule::gauss_legendre) {
        // Without pump correlations the four-fold kernel factorizes into
        // single-arm integrals; evaluate the product at both refinement levels
        // so the error estimate covers the whole expression.
        const double inv_a = 1.0 / (model.delta_a * model.delta_a);
        const double inv_b = 1.0 / (model.delta_b * model.delta_b);
        const FilterSpec open = FilterSpec::none_filter();
        auto product = [&](int n) {
            const double ia_open = one_dim_pass(inv_a, open, n, cfg.range_sigmas);
            const double ib_open = one_dim_pass(inv_b, open, n, cfg.range_sigmas);
            const double ia_filt = one_dim_pass(inv_a, fa, n, cfg.range_sigmas);
            const double ib_filt = one_dim_pass(inv_b, fb, n, cfg.range_sigmas);
            return 2.0 * ia_open * ib_open * ia_filt * ib_filt;
        };
        const Refined r = refine(product, cfg.nodes_per_axis, true,
                                 "the factorized exchange integral");
        return J4Result{r.value, r.err};
    }
    return detail::compute_j4_general(model, fa, fb, cfg);
}

JIntegrals compute_all(const SpectralModel& model, const FilterSpec& fa,
                       const FilterSpec& fb, const QuadratureConfig& cfg) {
    const TwoDimResult two = compute_two_dim(model, fa, fb, cfg);
    const J4Result four = compute_j4(model, fa, fb, cfg);
    JIntegrals out;
    out.j = two.j;
    out.j_a = two.j_a;
    out.j_b = two.j_b;
    out.j_ab = two.j_ab;
    out.j4 = four.j4;
    out.err_j = two.err_j;
    out.err_j_a = two.err_j_a;
    out.err_j_b = two.err_j_b;
    out.err_j_ab = two.err_j_ab;
    out.err_j4 = four.err;
    out.grid.nodes_two_dim = cfg.nodes_per_axis;
    out.grid.nodes_four_dim = cfg.j4_nodes();
    out.grid.range_sigmas = cfg.range_sigmas;
    out.grid.rule = cfg.rule;
    return out;
}

double coherence_ratio(const JIntegrals& j) {
    if (!(j.j > 0.0) || !(j.j_ab > 0.0))
        throw DegenerateModel(
            "coherence_ratio: intensity integrals vanish, ratio undefined");
    const double denom = 2.0 * j.j * j.j_ab;
    const double kappa = j.j4 / denom;
    // First-order propagated relative error of the ratio.
    double rel = j.err_j / j.j + j.err_j_ab / j.j_ab;
    if (j.j4 != 0.0) rel += std::abs(j.err_j4 / j.j4);
    const double band = std::abs(kappa) * rel + 1e-12;
    if (kappa > 1.0 && kappa - 1.0 <= band) return 1.0;
    if (kappa < 0.0 && -kappa <= band) return 0.0;
    return kappa;
}

} // namespace pdcvis
