#pragma once

#include <string>

#include "biphoton/specfun.hpp"

namespace biphoton {

/// Physical parameters of the Doppler-broadened four-level medium.
/// Every frequency is in units of the natural linewidth Gamma (= 1).
struct MediumParams {
  double omega_c = 2.5;          ///< coupling Rabi frequency
  double omega_p = 2.0;          ///< pump Rabi frequency
  double delta_p = -2000.0 / 6.0;///< pump one-photon detuning (-2.0 GHz)
  double gamma = 0.05;           ///< ground-state decoherence rate
  double gamma_doppler = 54.0;   ///< Doppler width
  double alpha_s = 350.0;        ///< Stokes optical depth
  double alpha_as = 350.0;       ///< anti-Stokes optical depth

  static constexpr double gamma_natural = 1.0;

  /// Throws DomainError naming the first offending field.
  void validate() const;
};

enum class PathlengthMode {
  BiphotonQuarter,     ///< generated Stokes photon, alpha_s' = alpha_s sqrt(pi) / (4 Gamma_D)
  ClassicalProbeHalf,  ///< input probe field, alpha_s' = alpha_s sqrt(pi) / (2 Gamma_D)
};

enum class PumpMode {
  ExactPumpDenominator,  ///< Omega_p / (Delta_p - omega_D + i/2) inside the Doppler average
  ConstantPumpRatio,     ///< pulled out as Omega_p / Delta_p
};

std::string to_string(PathlengthMode mode);
std::string to_string(PumpMode mode);

double effective_optical_depth(const MediumParams& p, PathlengthMode mode);

/// Velocity-class resonance of the two-photon Lorentzian:
/// (delta + i gamma) / D(omega_D) = -(1/4) / (omega_D - center + i width).
struct TwoPhotonPole {
  double center;  ///< omega_0
  double width;   ///< beta (exact form, including 2 gamma Gamma)
};
TwoPhotonPole two_photon_pole(const MediumParams& p, double delta);

/// (k_s L / 4) xi(delta): Doppler-averaged self-susceptibility of the Stokes photon.
/// Evaluated in closed form through the Faddeeva function.
Complex self_susceptibility(const MediumParams& p, double delta);

/// (sqrt(k_as k_s) L / 2) chi(delta): Doppler-averaged cross-susceptibility.
/// ConstantPumpRatio throws DomainError when delta_p == 0.
Complex cross_susceptibility(const MediumParams& p, double delta,
                             PumpMode mode = PumpMode::ExactPumpDenominator);

/// Same quantities by direct Gauss-Hermite averaging of the velocity integrand.
/// Only converges when the Lorentzian width is not much smaller than Gamma_D.
AveragedValue self_susceptibility_quadrature(const MediumParams& p, double delta,
                                             const QuadratureOptions& options = {});
AveragedValue cross_susceptibility_quadrature(const MediumParams& p, double delta, PumpMode mode,
                                              const QuadratureOptions& options = {});

}  // namespace biphoton
