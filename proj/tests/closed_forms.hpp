#pragma once

// Independent reference values for the Gaussian model families.
//
// Every integrand in the library is (for Gaussian filters) the exponential of
// a quadratic form, so each integral has a determinant closed form:
//
//   integral exp(-z^T M z + 2 b.z) d^d z = pi^{d/2} / sqrt(det M) * exp(b^T M^{-1} b)
//
// The forms below are assembled directly from the model definitions -- NOT by
// calling the quadrature code -- so agreement is a genuine cross-check, not a
// tautology. Rectangular filters only have elementary closed forms when the
// joint amplitude factorizes; those use erf differences per arm.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pdcvis/spectral.hpp"

namespace closedform {

inline double gauss_filter_coeff(const pdcvis::FilterSpec& f) {
    if (f.shape == pdcvis::FilterShape::none) return 0.0;
    if (f.shape != pdcvis::FilterShape::gaussian)
        throw std::invalid_argument("closedform: only gaussian/none filters here");
    return 4.0 * std::numbers::ln2 / (f.width * f.width);
}

inline double gauss_integral(const Eigen::MatrixXd& m, const Eigen::VectorXd& b) {
    const double d = static_cast<double>(m.rows());
    return std::pow(std::numbers::pi, 0.5 * d) / std::sqrt(m.determinant()) *
           std::exp(b.dot(m.fullPivLu().solve(b)));
}

/// Doubly filtered intensity integral of |g|^2 for the correlated or separable
/// Gaussian model with gaussian/none filters (arbitrary centers).
inline double two_dim(const pdcvis::SpectralModel& model, const pdcvis::FilterSpec& fa,
                      const pdcvis::FilterSpec& fb) {
    const double p = model.shape == pdcvis::ModelShape::gaussian
                         ? 1.0 / (model.delta_p * model.delta_p)
                         : 0.0;
    const double ca = gauss_filter_coeff(fa);
    const double cb = gauss_filter_coeff(fb);
    Eigen::Matrix2d m;
    m << 1.0 / (model.delta_a * model.delta_a) + p + ca, p,
         p, 1.0 / (model.delta_b * model.delta_b) + p + cb;
    Eigen::Vector2d b(ca * fa.center_offset, cb * fb.center_offset);
    const double k = ca * fa.center_offset * fa.center_offset +
                     cb * fb.center_offset * fb.center_offset;
    return gauss_integral(m, b) * std::exp(-k);
}

/// Exchange integral (both orderings, i.e. the "+ c.c." already applied).
/// Variable order (x, y, x', y'); each signal variable shares one pump factor
/// with each idler variable, the filters sit on the unprimed pair only.
inline double exchange(const pdcvis::SpectralModel& model, const pdcvis::FilterSpec& fa,
                       const pdcvis::FilterSpec& fb) {
    const double p = model.shape == pdcvis::ModelShape::gaussian
                         ? 1.0 / (model.delta_p * model.delta_p)
                         : 0.0;
    const double inv_a = 1.0 / (model.delta_a * model.delta_a);
    const double inv_b = 1.0 / (model.delta_b * model.delta_b);
    const double ca = gauss_filter_coeff(fa);
    const double cb = gauss_filter_coeff(fb);
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m(0, 0) = inv_a + p + ca;
    m(1, 1) = inv_b + p + cb;
    m(2, 2) = inv_a + p;
    m(3, 3) = inv_b + p;
    const double hp = 0.5 * p;
    m(0, 1) = m(1, 0) = hp;
    m(0, 3) = m(3, 0) = hp;
    m(2, 1) = m(1, 2) = hp;
    m(2, 3) = m(3, 2) = hp;
    Eigen::Vector4d b(ca * fa.center_offset, cb * fb.center_offset, 0.0, 0.0);
    const double k = ca * fa.center_offset * fa.center_offset +
                     cb * fb.center_offset * fb.center_offset;
    return 2.0 * gauss_integral(m, b) * std::exp(-k);
}

/// Single-arm integral of F(w) exp(-w^2 / delta^2); the building block of the
/// separable family, where every integral is a product of these.
inline double one_arm(double delta, const pdcvis::FilterSpec& f) {
    const double inv = 1.0 / (delta * delta);
    switch (f.shape) {
        case pdcvis::FilterShape::none:
            return delta * std::sqrt(std::numbers::pi);
        case pdcvis::FilterShape::gaussian: {
            const double c = gauss_filter_coeff(f);
            const double m = inv + c;
            const double b = c * f.center_offset;
            return std::sqrt(std::numbers::pi / m) *
                   std::exp(b * b / m - c * f.center_offset * f.center_offset);
        }
        case pdcvis::FilterShape::rectangular: {
            const double lo = (f.center_offset - 0.5 * f.width) / delta;
            const double hi = (f.center_offset + 0.5 * f.width) / delta;
            return delta * 0.5 * std::sqrt(std::numbers::pi) * (std::erf(hi) - std::erf(lo));
        }
    }
    return 0.0;
}

} // namespace closedform
