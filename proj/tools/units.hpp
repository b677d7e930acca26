#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

// Wavelength bookkeeping. The core works in angular detunings (rad/ps); lab
// filters are quoted as an intensity FWHM in nanometers at a carrier
// wavelength. Around a carrier lambda, |d omega / d lambda| = 2 pi c /
// lambda^2, which is what converts a datasheet width into a detuning width.
// Kept out of the core on purpose: the physics there is unit-agnostic.

namespace pdcvis_tool {

inline constexpr double kSpeedOfLightNmPerPs = 2.99792458e5;

// Common telecom carriers for quick reference in configs:
//   1310 nm (O band): 1 nm FWHM ~ 1.098 rad/ps
//   1550 nm (C band): 1 nm FWHM ~ 0.784 rad/ps
inline constexpr double kOBandCarrierNm = 1310.0;
inline constexpr double kCBandCarrierNm = 1550.0;

inline double nm_fwhm_to_rad_per_ps(double fwhm_nm, double carrier_nm) {
    if (!(fwhm_nm > 0.0) || !std::isfinite(fwhm_nm))
        throw std::invalid_argument("width_nm must be positive and finite");
    if (!(carrier_nm > 0.0) || !std::isfinite(carrier_nm))
        throw std::invalid_argument("lambda_nm must be positive and finite");
    return 2.0 * std::numbers::pi * kSpeedOfLightNmPerPs * fwhm_nm /
           (carrier_nm * carrier_nm);
}

} // namespace pdcvis_tool
