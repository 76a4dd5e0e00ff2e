#include "biphoton/medium.hpp"

#include <cmath>
#include <numbers>

#include "biphoton/errors.hpp"

namespace biphoton {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw DomainError(std::string("invalid parameter '") + field + "': " + what);
}

// Doppler average of 1/(omega_D - pole), pole strictly off the real axis.
Complex average_simple_pole(Complex pole, double gamma_doppler) {
  if (pole.imag() < 0.0) {
    return Complex(0.0, -kSqrtPi) * faddeeva(-pole / gamma_doppler) / gamma_doppler;
  }
  return Complex(0.0, kSqrtPi) * faddeeva(pole / gamma_doppler) / gamma_doppler;
}

}  // namespace

void MediumParams::validate() const {
  require(std::isfinite(omega_c) && omega_c >= 0.0, "omega_c", "must be finite and >= 0");
  require(std::isfinite(omega_p) && omega_p >= 0.0, "omega_p", "must be finite and >= 0");
  require(std::isfinite(delta_p), "delta_p", "must be finite");
  require(std::isfinite(gamma) && gamma > 0.0, "gamma", "must be finite and > 0");
  require(std::isfinite(gamma_doppler) && gamma_doppler > 0.0, "gamma_doppler",
          "must be finite and > 0");
  require(std::isfinite(alpha_s) && alpha_s > 0.0, "alpha_s", "must be finite and > 0");
  require(std::isfinite(alpha_as) && alpha_as > 0.0, "alpha_as", "must be finite and > 0");
}

std::string to_string(PathlengthMode mode) {
  return mode == PathlengthMode::BiphotonQuarter ? "biphoton_quarter" : "classical_probe_half";
}

std::string to_string(PumpMode mode) {
  return mode == PumpMode::ExactPumpDenominator ? "exact" : "constant_ratio";
}

double effective_optical_depth(const MediumParams& p, PathlengthMode mode) {
  const double divisor = mode == PathlengthMode::BiphotonQuarter ? 4.0 : 2.0;
  return p.alpha_s * kSqrtPi * MediumParams::gamma_natural / (divisor * p.gamma_doppler);
}

TwoPhotonPole two_photon_pole(const MediumParams& p, double delta) {
  const double G = MediumParams::gamma_natural;
  const double oc2 = p.omega_c * p.omega_c;
  const double denom = 4.0 * (delta * delta + p.gamma * p.gamma);
  return {delta * oc2 / denom - delta,
          (2.0 * delta * delta * G + p.gamma * (2.0 * p.gamma * G + oc2)) / denom};
}

Complex self_susceptibility(const MediumParams& p, double delta) {
  p.validate();
  if (!std::isfinite(delta)) throw DomainError("self_susceptibility: delta must be finite");
  const auto pole = two_photon_pole(p, delta);
  const Complex b(pole.center, -pole.width);
  return 0.5 * p.alpha_s * MediumParams::gamma_natural * (-0.25) *
         average_simple_pole(b, p.gamma_doppler);
}

Complex cross_susceptibility(const MediumParams& p, double delta, PumpMode mode) {
  p.validate();
  if (!std::isfinite(delta)) throw DomainError("cross_susceptibility: delta must be finite");
  if (mode == PumpMode::ConstantPumpRatio && p.delta_p == 0.0) {
    throw DomainError("cross_susceptibility: constant pump ratio needs delta_p != 0");
  }
  const double G = MediumParams::gamma_natural;
  const double prefactor = std::sqrt(p.alpha_as * p.alpha_s) * G / 4.0;
  if (p.omega_c == 0.0 || p.omega_p == 0.0) return 0.0;

  const Complex s(delta, p.gamma);
  const auto pole = two_photon_pole(p, delta);
  const Complex b(pole.center, -pole.width);

  if (mode == PumpMode::ConstantPumpRatio) {
    // (Omega_p/Delta_p) * Omega_c / D,  D = -4 s (omega_D - b)
    return prefactor * (p.omega_p / p.delta_p) * (p.omega_c / (-4.0 * s)) *
           average_simple_pole(b, p.gamma_doppler);
  }
  // Omega_p/(Delta_p - omega_D + iG/2) * Omega_c/D
  //   = Omega_p Omega_c / (4 s) * 1/((omega_D - a)(omega_D - b)),  a = Delta_p + iG/2
  const Complex a(p.delta_p, 0.5 * G);
  const Complex pair = (average_simple_pole(a, p.gamma_doppler) -
                        average_simple_pole(b, p.gamma_doppler)) / (a - b);
  return prefactor * p.omega_p * p.omega_c / (4.0 * s) * pair;
}

AveragedValue self_susceptibility_quadrature(const MediumParams& p, double delta,
                                             const QuadratureOptions& options) {
  p.validate();
  const double G = MediumParams::gamma_natural;
  const Complex s(delta, p.gamma);
  const double oc2 = p.omega_c * p.omega_c;
  auto integrand = [&](double omega_d) {
    return s / (oc2 - 4.0 * s * Complex(delta + omega_d, 0.5 * G));
  };
  AveragedValue avg = doppler_average(integrand, p.gamma_doppler, options);
  avg.value *= 0.5 * p.alpha_s * G;
  return avg;
}

AveragedValue cross_susceptibility_quadrature(const MediumParams& p, double delta, PumpMode mode,
                                              const QuadratureOptions& options) {
  p.validate();
  if (mode == PumpMode::ConstantPumpRatio && p.delta_p == 0.0) {
    throw DomainError("cross_susceptibility: constant pump ratio needs delta_p != 0");
  }
  const double G = MediumParams::gamma_natural;
  const Complex s(delta, p.gamma);
  const double oc2 = p.omega_c * p.omega_c;
  auto integrand = [&](double omega_d) {
    const Complex pump = mode == PumpMode::ExactPumpDenominator
                             ? p.omega_p / Complex(p.delta_p - omega_d, 0.5 * G)
                             : Complex(p.omega_p / p.delta_p, 0.0);
    return pump * p.omega_c / (oc2 - 4.0 * s * Complex(delta + omega_d, 0.5 * G));
  };
  AveragedValue avg = doppler_average(integrand, p.gamma_doppler, options);
  avg.value *= std::sqrt(p.alpha_as * p.alpha_s) * G / 4.0;
  return avg;
}

}  // namespace biphoton
