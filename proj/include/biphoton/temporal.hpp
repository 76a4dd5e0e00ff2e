#pragma once

#include <string>
#include <vector>

#include "biphoton/spectra.hpp"

namespace biphoton {

struct FilterSpec {
  enum class Kind { None, LorentzianEtalon };
  Kind kind = Kind::None;
  double fwhm = 0.0;  // Gamma-units

  static FilterSpec none() { return {}; }
  static FilterSpec etalon(double fwhm) { return {Kind::LorentzianEtalon, fwhm}; }
  void validate() const;
  /// Field response, unity at delta = 0.
  Complex amplitude(double delta) const;
};

std::string to_string(FilterSpec::Kind kind);

/// How a numeric wave packet was sampled; enough to reproduce it exactly.
struct TransformInfo {
  double span = 0.0;        ///< detuning half-width actually used
  std::size_t count = 0;    ///< detuning samples actually used
  double spacing = 0.0;     ///< detuning step
  double time_step = 0.0;   ///< 2 pi / (count * spacing)
  int widenings = 0;        ///< how many times the requested grid was doubled
  double edge_ratio = 0.0;  ///< max |F| at the two edges / max |F|
};

struct WavePacket {
  std::vector<double> times;   ///< Gamma^-1
  std::vector<double> values;  ///< peak-normalized G2
  double raw_scale = 0.0;      ///< value that was divided out
  double negative_time_fraction = 0.0;
  std::string normalization_note;
  TransformInfo discretization;
};

struct TransformOptions {
  double edge_tolerance = 1e-4;
  int max_widenings = 8;
};

/// |(d delta / 2 pi) sum_k exp(-i delta_k tau) F_k|^2 on tau = m 2pi/(N d delta).
/// Fails with GridError when the edges of F exceed the tolerance; no widening.
WavePacket wavepacket_from_spectrum(const ComplexSpectrum& f, const FilterSpec& filter = {},
                                    const TransformOptions& options = {});

/// Same transform applied to the biphoton amplitude. The grid is widened
/// (span and count doubled, spacing kept) until the edges are small enough.
WavePacket wavepacket_numeric(const MediumParams& p, const DetuningGrid& grid,
                              const FilterSpec& filter = {}, bool include_sinc = true,
                              PumpMode pump = PumpMode::ExactPumpDenominator,
                              const TransformOptions& options = {});

/// Grid for wavepacket_numeric: span max(6 Gamma_D, 2e4 Gamma_EIT), tau window of +-20/Gamma_EIT.
DetuningGrid default_wavepacket_grid(const MediumParams& p);

/// Direct sum of the same Riemann approximation at one delay (slow, for checks).
double correlation_direct(const ComplexSpectrum& f, double tau);

struct AnalyticWavePacket {
  WavePacket packet;
  double gamma_BI = 0.0;  ///< Gamma-units
};

/// C exp(-Gamma_BI tau) for tau >= 0, with Gamma_BI taken as Gamma_EIT (biphoton pathlength).
AnalyticWavePacket wavepacket_analytic(const MediumParams& p, const std::vector<double>& times);

double to_physical_time(double tau_inverse_gamma);

}  // namespace biphoton
