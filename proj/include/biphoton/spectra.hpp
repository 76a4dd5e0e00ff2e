#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "biphoton/medium.hpp"

namespace biphoton {

/// Uniformly spaced two-photon detunings (Gamma-units).
class DetuningGrid {
 public:
  DetuningGrid() = default;  ///< empty
  /// `count` points from -span to +span inclusive.
  static DetuningGrid symmetric(double span, std::size_t count);
  /// Arbitrary uniformly spaced, strictly increasing points (e.g. measured data).
  static DetuningGrid from_points(std::vector<double> points);

  const std::vector<double>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double spacing() const { return spacing_; }
  /// Half-width max(|first|, |last|).
  double span() const;
  bool is_symmetric(double tol = 1e-9) const;
  bool is_power_of_two() const;

  bool operator==(const DetuningGrid&) const = default;

 private:
  DetuningGrid(std::vector<double> points, double spacing);
  std::vector<double> points_;
  double spacing_ = 0.0;
};

struct RealSpectrum {
  DetuningGrid grid;
  std::vector<double> values;
};

struct ComplexSpectrum {
  DetuningGrid grid;
  std::vector<Complex> values;
};

/// Lorentzian approximation of the biphoton EIT spectrum.
struct LorentzianSummary {
  double R = 0.0;
  double A = 0.0;
  double gamma_L = 0.0;
  double gamma_EIT = 0.0;
  double baseline = 0.0;       ///< exp(-alpha_s' R)
  double peak = 0.0;           ///< exp(-alpha_s' R (1 - A))
  double alpha_s_prime = 0.0;
  std::vector<std::string> warnings;
};

/// Stable evaluation of sqrt(y / ln((1 + e^y)/2) - 1), the ratio Gamma_EIT / Gamma_L.
double eit_width_factor(double y);

/// Exact biphoton (or classical-probe) EIT transmission exp(-alpha_s' Re w(z)).
RealSpectrum eit_exact(const MediumParams& p, const DetuningGrid& grid, PathlengthMode mode);

LorentzianSummary eit_lorentzian_summary(const MediumParams& p, PathlengthMode mode);

struct EitAnalytic {
  LorentzianSummary summary;
  RealSpectrum exponential_form;  ///< exp(-alpha_s' R (1 - A / (1 + 4 d^2 / G_L^2)))
  RealSpectrum lorentzian_form;   ///< baseline * (1 + (e^{alpha_s' R A} - 1) / (1 + 4 d^2 / G_EIT^2))
};
EitAnalytic eit_analytic(const MediumParams& p, const DetuningGrid& grid, PathlengthMode mode);

/// |cross susceptibility|^2 on the grid.
RealSpectrum fwm_exact(const MediumParams& p, const DetuningGrid& grid,
                       PumpMode pump = PumpMode::ExactPumpDenominator);

struct FwmAnalytic {
  RealSpectrum spectrum;
  double gamma_FWM = 0.0;
  double B = 0.0;
  bool lorentzian_valid = false;  ///< gamma_FWM >= 5 x the two-peak separation
};
FwmAnalytic fwm_analytic(const MediumParams& p, const DetuningGrid& grid);

/// sin(z)/z with the removable singularity handled by a series near 0.
Complex complex_sinc(Complex z);

/// Spectral amplitude F(delta) of the biphoton.
ComplexSpectrum biphoton_spectrum(const MediumParams& p, const DetuningGrid& grid,
                                  bool include_sinc = true,
                                  PumpMode pump = PumpMode::ExactPumpDenominator);

/// |F|^2 of a complex spectrum.
RealSpectrum power_spectrum(const ComplexSpectrum& f);

struct ValidityMetrics {
  double x = 0.0;                     ///< Omega_c^2 / (4 gamma Gamma_D)
  double premise_ratio = 0.0;         ///< 2 gamma Gamma / Omega_c^2
  double fwm_peak_separation = 0.0;   ///< Omega_c^2 / (5.4 Gamma_D)
  bool premise_ok = false;            ///< premise_ratio < 0.1
  bool analytic_width_trusted = false;///< x <= 2.6
  bool fwm_lorentzian_valid = false;  ///< Gamma_FWM >= 5 x separation
};
ValidityMetrics validity_metrics(const MediumParams& p);

/// Grid used for spectrum output: span = max(20 Gamma_L, 40 Gamma_EIT), 2^14 points.
DetuningGrid default_spectrum_grid(const MediumParams& p);

}  // namespace biphoton
