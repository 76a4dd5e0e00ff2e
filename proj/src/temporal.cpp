#include "biphoton/temporal.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <numbers>

#include "biphoton/errors.hpp"
#include "biphoton/units.hpp"

namespace biphoton {

namespace {

// FFTW planning touches global state.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

void forward_fft(std::vector<Complex>& data) {
  const int n = static_cast<int>(data.size());
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  if (!plan) throw NumericalError("fftw: plan creation failed");
  fftw_execute(plan);
  std::lock_guard lock(fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

double edge_ratio(const std::vector<Complex>& f) {
  double peak = 0.0;
  for (const auto& v : f) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return 0.0;
  return std::max(std::abs(f.front()), std::abs(f.back())) / peak;
}

void require_transform_grid(const DetuningGrid& g) {
  if (!g.is_power_of_two()) {
    throw GridError("wavepacket: detuning grid size " + std::to_string(g.size()) +
                    " is not a power of two");
  }
  if (!g.is_symmetric()) throw GridError("wavepacket: detuning grid is not symmetric about 0");
}

std::vector<Complex> filtered(const ComplexSpectrum& f, const FilterSpec& filter) {
  std::vector<Complex> out = f.values;
  if (filter.kind == FilterSpec::Kind::None) return out;
  const auto& d = f.grid.points();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] *= filter.amplitude(d[k]);
  return out;
}

WavePacket transform(std::vector<Complex> amp, const DetuningGrid& grid, int widenings,
                     double edge) {
  const std::size_t n = amp.size();
  const double dd = grid.spacing();
  forward_fft(amp);

  WavePacket w;
  w.discretization = {grid.span(), n, dd, 2.0 * std::numbers::pi / (static_cast<double>(n) * dd),
                      widenings, edge};
  w.times.resize(n);
  w.values.resize(n);
  const double scale = dd / (2.0 * std::numbers::pi);
  // fftshift: output index m <-> tau = (m - n/2) * dt
  const std::size_t half = n / 2;
  double peak = 0.0, total = 0.0, negative = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t m = (j + half) % n;
    const double tau = (static_cast<double>(j) - static_cast<double>(half)) * w.discretization.time_step;
    const double g2 = std::norm(scale * amp[m]);
    w.times[j] = tau;
    w.values[j] = g2;
    peak = std::max(peak, g2);
    total += g2;
    if (tau < 0.0) negative += g2;
  }
  w.raw_scale = peak;
  w.negative_time_fraction = total > 0.0 ? negative / total : 0.0;
  if (peak > 0.0) {
    for (double& v : w.values) v /= peak;
  }
  w.normalization_note = "peak-normalized |(d delta/2pi) sum exp(-i delta tau) F|^2; raw_scale is the "
                         "peak in Gamma-units";
  return w;
}

}  // namespace

void FilterSpec::validate() const {
  if (kind != Kind::None && !(fwhm > 0.0 && std::isfinite(fwhm))) {
    throw DomainError("invalid parameter 'filter_fwhm': must be finite and > 0");
  }
}

Complex FilterSpec::amplitude(double delta) const {
  if (kind == Kind::None) return 1.0;
  return 1.0 / Complex(1.0, -2.0 * delta / fwhm);
}

std::string to_string(FilterSpec::Kind kind) {
  return kind == FilterSpec::Kind::None ? "none" : "lorentzian_etalon";
}

WavePacket wavepacket_from_spectrum(const ComplexSpectrum& f, const FilterSpec& filter,
                                    const TransformOptions& options) {
  filter.validate();
  require_transform_grid(f.grid);
  auto amp = filtered(f, filter);
  const double edge = edge_ratio(amp);
  if (edge >= options.edge_tolerance) {
    throw GridError("wavepacket: spectrum not negligible at grid edge (ratio " +
                    std::to_string(edge) + ")");
  }
  return transform(std::move(amp), f.grid, 0, edge);
}

WavePacket wavepacket_numeric(const MediumParams& p, const DetuningGrid& grid,
                              const FilterSpec& filter, bool include_sinc, PumpMode pump,
                              const TransformOptions& options) {
  p.validate();
  filter.validate();
  require_transform_grid(grid);
  DetuningGrid g = grid;
  for (int widen = 0;; ++widen) {
    auto amp = filtered(biphoton_spectrum(p, g, include_sinc, pump), filter);
    const double edge = edge_ratio(amp);
    if (edge < options.edge_tolerance) return transform(std::move(amp), g, widen, edge);
    if (widen == options.max_widenings) {
      throw GridError("wavepacket: grid too narrow after " + std::to_string(widen) +
                      " widenings (edge ratio " + std::to_string(edge) + ")");
    }
    g = DetuningGrid::symmetric(2.0 * g.span() + 0.5 * g.spacing(), 2 * g.size());
  }
}

DetuningGrid default_wavepacket_grid(const MediumParams& p) {
  const auto s = eit_lorentzian_summary(p, PathlengthMode::BiphotonQuarter);
  // Truncating the spectral tail perturbs the fitted decay by about
  // 2.3 Gamma_EIT / span; 2e4 Gamma_EIT keeps a grid doubling below 1e-4.
  const double span = std::max(6.0 * p.gamma_doppler, 2.0e4 * s.gamma_EIT);
  const double spacing = 2.0 * std::numbers::pi * s.gamma_EIT / 40.0;
  const auto wanted = static_cast<std::size_t>(std::ceil(2.0 * span / spacing)) + 1;
  return DetuningGrid::symmetric(span, std::bit_ceil(std::max<std::size_t>(wanted, 1024)));
}

double correlation_direct(const ComplexSpectrum& f, double tau) {
  const auto& d = f.grid.points();
  Complex sum = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) sum += std::polar(1.0, -d[k] * tau) * f.values[k];
  return std::norm(sum * f.grid.spacing() / (2.0 * std::numbers::pi));
}

AnalyticWavePacket wavepacket_analytic(const MediumParams& p, const std::vector<double>& times) {
  const auto s = eit_lorentzian_summary(p, PathlengthMode::BiphotonQuarter);
  const double x = p.omega_c * p.omega_c / (4.0 * p.gamma * p.gamma_doppler);
  const double B = 1.7724538509055160273 * p.omega_c / (4.0 * p.gamma * p.gamma_doppler) * erfcx(x);
  const double pump = p.delta_p != 0.0 ? p.omega_p / p.delta_p : 0.0;
  const double G = MediumParams::gamma_natural;

  AnalyticWavePacket out;
  out.gamma_BI = s.gamma_EIT;
  auto& w = out.packet;
  w.times = times;
  w.values.reserve(times.size());
  for (double t : times) w.values.push_back(t >= 0.0 ? std::exp(-out.gamma_BI * t) : 0.0);
  w.raw_scale = p.alpha_as * p.alpha_s * G * G * pump * pump * B * B * s.peak;
  w.negative_time_fraction = 0.0;
  w.normalization_note = "C normalized to 1; raw_scale = alpha_as alpha_s (Omega_p/Delta_p)^2 B^2 "
                         "exp(-alpha_s' R (1 - A))";
  return out;
}

double to_physical_time(double tau_inverse_gamma) {
  if (!std::isfinite(tau_inverse_gamma)) throw DomainError("to_physical_time: non-finite input");
  return tau_inverse_gamma * units::kNsPerInverseGamma;
}

}  // namespace biphoton
