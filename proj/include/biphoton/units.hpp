#pragma once

#include <numbers>

// All internal frequencies are in units of the excited-state decay rate
// Gamma = 2*pi x 6 MHz; times are in units of 1/Gamma.
namespace biphoton::units {

inline constexpr double kGammaOver2PiHz = 6.0e6;
inline constexpr double kGammaRadPerSecond = 2.0 * std::numbers::pi * kGammaOver2PiHz;

/// One 1/Gamma expressed in nanoseconds (26.526 ns).
inline constexpr double kNsPerInverseGamma = 1.0e9 / kGammaRadPerSecond;

/// Cyclic frequency (e.g. a filter FWHM quoted in MHz) to Gamma-units.
constexpr double mhz_to_gamma(double mhz) { return mhz * 1.0e6 / kGammaOver2PiHz; }
constexpr double gamma_to_mhz(double g) { return g * kGammaOver2PiHz / 1.0e6; }

constexpr double ns_to_inverse_gamma(double ns) { return ns / kNsPerInverseGamma; }

}  // namespace biphoton::units
