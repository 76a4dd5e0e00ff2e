#pragma once

#include <optional>
#include <string>
#include <vector>

#include "biphoton/spectra.hpp"
#include "biphoton/temporal.hpp"

namespace biphoton {

enum class PeakSense { PeakAboveBaseline, DipBelowBaseline };

struct LorentzianFit {
  double center = 0.0;
  double fwhm = 0.0;
  double amplitude = 0.0;  ///< signed: negative for a dip
  double baseline = 0.0;
  double rms_residual = 0.0;
  int iterations = 0;
};

struct ExpDecayFit {
  double y0 = 0.0;
  double A = 0.0;
  double t0 = 0.0;
  double tau = 0.0;  ///< same time unit as the input
  double rms_residual = 0.0;
  int iterations = 0;
};

/// Mean of the outer 5% of samples (half from each end, at least one each).
double edge_baseline(const std::vector<double>& values);

/// Distance between linearly interpolated half-maximum crossings around the
/// global extremum, measured from edge_baseline. Throws NumericalError if the
/// profile never reaches half height on one side.
double fwhm_halfmax(const RealSpectrum& s, PeakSense sense = PeakSense::PeakAboveBaseline);

/// baseline + amplitude / (1 + 4 (delta - center)^2 / fwhm^2).
LorentzianFit fit_lorentzian(const RealSpectrum& s, PeakSense sense = PeakSense::PeakAboveBaseline);

/// Staged fit of y0 + A exp(-(t - t0)/tau): y0 from the trailing baseline
/// window, t0 at the maximum, then A and tau on t >= t0.
ExpDecayFit fit_exp_decay(const std::vector<double>& times, const std::vector<double>& values,
                          double baseline_window = 0.2);
ExpDecayFit fit_exp_decay(const WavePacket& w, double baseline_window = 0.2);

/// int (f - g)^2 / int f g, trapezoid rule. Requires identical grids.
double profile_distance(const RealSpectrum& f, const RealSpectrum& g);

/// Numeric linewidths from Lorentzian fits of the exact profiles, each on
/// +-5 analytic widths sampled at 1025 points.
double numeric_eit_fwhm(const MediumParams& p, PathlengthMode mode = PathlengthMode::BiphotonQuarter);
double numeric_fwm_fwhm(const MediumParams& p, PumpMode pump = PumpMode::ExactPumpDenominator);
double numeric_biphoton_fwhm(const MediumParams& p, bool include_sinc = true,
                             PumpMode pump = PumpMode::ExactPumpDenominator);

enum class MapKind { EIT, FWM, Overall };
std::string to_string(MapKind kind);

struct DiffMap {
  MapKind kind = MapKind::EIT;
  std::vector<double> omega_c_sq_axis;
  std::vector<double> gamma_axis;
  // Row-major, rows follow gamma_axis, columns follow omega_c_sq_axis.
  std::vector<double> percent_diff;
  std::vector<double> numeric_fwhm;
  std::vector<double> analytic_fwhm;
  std::vector<std::string> cell_errors;  ///< empty string for cells that succeeded
  int failed_cells = 0;

  std::size_t index(std::size_t i_gamma, std::size_t i_omega) const {
    return i_gamma * omega_c_sq_axis.size() + i_omega;
  }
  double at(std::size_t i_gamma, std::size_t i_omega) const {
    return percent_diff[index(i_gamma, i_omega)];
  }
};

/// 100 |numeric - analytic| / numeric over the (Omega_c^2, gamma) grid. Other
/// parameters come from `base`. Failed cells hold NaN.
DiffMap fwhm_diff_map(MapKind kind, const std::vector<double>& omega_c_sq_axis,
                      const std::vector<double>& gamma_axis, const MediumParams& base);

struct RatioCurve {
  double alpha_s = 0.0;
  double gamma = 0.0;
  std::vector<double> omega_c_sq;
  std::vector<double> gamma_EIT;  ///< numeric, Gamma-units
  std::vector<double> gamma_FWM;
  std::vector<double> gamma_BI;
  std::vector<double> eit_over_bi;
  std::vector<double> fwm_over_bi;
  std::vector<std::string> point_errors;
  int failed_points = 0;
};

/// One curve per (alpha_s, gamma) pair, alpha_s varying slowest.
std::vector<RatioCurve> linewidth_ratio_curves(const std::vector<double>& alpha_s_list,
                                               const std::vector<double>& gamma_list,
                                               const std::vector<double>& omega_c_sq_list,
                                               const MediumParams& base);

struct EstimateOptions {
  /// Supplies gamma_doppler, delta_p and the other fixed fields.
  MediumParams base;
  /// When set, gamma is held at these values (one per spectrum).
  std::optional<std::vector<double>> fixed_gamma;
  std::optional<double> omega_c0_guess;
  std::optional<std::vector<double>> gamma_guess;
  PathlengthMode mode = PathlengthMode::ClassicalProbeHalf;
};

struct EstimateResult {
  double omega_c0 = 0.0;
  std::vector<double> gamma_per_spectrum;
  std::vector<double> residual_rms;  ///< per spectrum
  int iterations = 0;
  std::vector<std::string> warnings;
};

/// Joint fit of measured EIT spectra with Omega_c,i = Omega_c0 sqrt(r_i) and one
/// gamma per spectrum.
EstimateResult estimate_params_from_eit(const std::vector<RealSpectrum>& measured, double alpha_s,
                                        const std::vector<double>& power_ratios,
                                        const EstimateOptions& options = {});

}  // namespace biphoton
