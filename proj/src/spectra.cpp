#include "biphoton/spectra.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "biphoton/errors.hpp"

namespace biphoton {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kFwmValidityFactor = 5.0;

}  // namespace

DetuningGrid::DetuningGrid(std::vector<double> points, double spacing)
    : points_(std::move(points)), spacing_(spacing) {}

DetuningGrid DetuningGrid::symmetric(double span, std::size_t count) {
  if (!(span > 0.0) || !std::isfinite(span)) throw GridError("detuning grid: span must be > 0");
  if (count < 2) throw GridError("detuning grid: need at least 2 points");
  const double spacing = 2.0 * span / static_cast<double>(count - 1);
  std::vector<double> pts(count);
  for (std::size_t i = 0; i < count; ++i) {
    // Mirror pairs are computed from the same offset so the grid is exactly symmetric.
    const std::size_t j = count - 1 - i;
    pts[i] = i <= j ? -span + spacing * static_cast<double>(i)
                    : span - spacing * static_cast<double>(j);
  }
  if (count % 2 == 1) pts[count / 2] = 0.0;
  for (std::size_t i = 0; i < count / 2; ++i) pts[count - 1 - i] = -pts[i];
  return DetuningGrid(std::move(pts), spacing);
}

DetuningGrid DetuningGrid::from_points(std::vector<double> points) {
  if (points.size() < 2) throw GridError("detuning grid: need at least 2 points");
  const double spacing = (points.back() - points.front()) / static_cast<double>(points.size() - 1);
  if (!(spacing > 0.0)) throw GridError("detuning grid: points must be increasing");
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double step = points[i] - points[i - 1];
    if (!(step > 0.0) || std::abs(step - spacing) > 1e-6 * spacing) {
      throw GridError("detuning grid: points must be uniformly spaced (row " + std::to_string(i) +
                      ")");
    }
  }
  return DetuningGrid(std::move(points), spacing);
}

double DetuningGrid::span() const {
  if (points_.empty()) return 0.0;
  return std::max(std::abs(points_.front()), std::abs(points_.back()));
}

bool DetuningGrid::is_symmetric(double tol) const {
  const std::size_t n = points_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(points_[i] + points_[n - 1 - i]) > tol * std::max(1.0, span())) return false;
  }
  return true;
}

bool DetuningGrid::is_power_of_two() const { return std::has_single_bit(points_.size()); }

double eit_width_factor(double y) {
  if (!(y > 0.0)) throw DomainError("eit width factor: alpha_s' R A must be > 0");
  // ln((1 + e^y)/2) = y - ln 2 + log1p(e^-y) = ln(1 + expm1(y)/2)
  const double log_term = y > 1.0 ? y - std::log(2.0) + std::log1p(std::exp(-y))
                                  : std::log1p(0.5 * std::expm1(y));
  return std::sqrt(y / log_term - 1.0);
}

RealSpectrum eit_exact(const MediumParams& p, const DetuningGrid& grid, PathlengthMode mode) {
  p.validate();
  const double alpha_prime = effective_optical_depth(p, mode);
  RealSpectrum out{grid, std::vector<double>(grid.size())};
  const auto& d = grid.points();
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto pole = two_photon_pole(p, d[i]);
    const Complex z(pole.center / p.gamma_doppler, pole.width / p.gamma_doppler);
    out.values[i] = std::exp(-alpha_prime * faddeeva(z).real());
  }
  return out;
}

LorentzianSummary eit_lorentzian_summary(const MediumParams& p, PathlengthMode mode) {
  p.validate();
  LorentzianSummary s;
  const double G = MediumParams::gamma_natural;
  const double oc2 = p.omega_c * p.omega_c;
  const double x = oc2 / (4.0 * p.gamma * p.gamma_doppler);
  s.alpha_s_prime = effective_optical_depth(p, mode);
  s.R = erfcx(G / (2.0 * p.gamma_doppler));
  s.A = 1.0 - erfcx(x) / s.R;
  if (!(s.A > 0.0)) {
    throw DomainError("eit_lorentzian_summary: A <= 0, Lorentzian approximation is void "
                      "(Omega_c^2 too small compared with 2 gamma Gamma)");
  }
  s.gamma_L = 2.0 * p.gamma * (1.0 + x);
  const double y = s.alpha_s_prime * s.R * s.A;
  s.gamma_EIT = s.gamma_L * eit_width_factor(y);
  s.baseline = std::exp(-s.alpha_s_prime * s.R);
  s.peak = std::exp(-s.alpha_s_prime * s.R * (1.0 - s.A));
  if (!(oc2 > 2.0 * p.gamma * G)) {
    s.warnings.emplace_back("premise 2 gamma Gamma << Omega_c^2 violated");
  } else if (2.0 * p.gamma * G / oc2 >= 0.1) {
    s.warnings.emplace_back("premise 2 gamma Gamma << Omega_c^2 only weakly satisfied");
  }
  if (x > 2.6) s.warnings.emplace_back("Omega_c^2/(4 gamma Gamma_D) > 2.6, analytic widths less reliable");
  return s;
}

EitAnalytic eit_analytic(const MediumParams& p, const DetuningGrid& grid, PathlengthMode mode) {
  EitAnalytic out{eit_lorentzian_summary(p, mode), {grid, {}}, {grid, {}}};
  const auto& s = out.summary;
  const double depth = s.alpha_s_prime * s.R;
  const double rise = std::expm1(depth * s.A);
  out.exponential_form.values.reserve(grid.size());
  out.lorentzian_form.values.reserve(grid.size());
  for (double d : grid.points()) {
    const double lor_l = 1.0 / (1.0 + 4.0 * d * d / (s.gamma_L * s.gamma_L));
    const double lor_e = 1.0 / (1.0 + 4.0 * d * d / (s.gamma_EIT * s.gamma_EIT));
    out.exponential_form.values.push_back(std::exp(-depth * (1.0 - s.A * lor_l)));
    out.lorentzian_form.values.push_back(s.baseline * (1.0 + rise * lor_e));
  }
  return out;
}

RealSpectrum fwm_exact(const MediumParams& p, const DetuningGrid& grid, PumpMode pump) {
  RealSpectrum out{grid, std::vector<double>(grid.size())};
  const auto& d = grid.points();
  for (std::size_t i = 0; i < d.size(); ++i) out.values[i] = std::norm(cross_susceptibility(p, d[i], pump));
  return out;
}

FwmAnalytic fwm_analytic(const MediumParams& p, const DetuningGrid& grid) {
  p.validate();
  if (p.delta_p == 0.0) throw DomainError("fwm_analytic: delta_p must be nonzero");
  const double G = MediumParams::gamma_natural;
  const double x = p.omega_c * p.omega_c / (4.0 * p.gamma * p.gamma_doppler);
  FwmAnalytic out;
  out.gamma_FWM = 2.0 * p.gamma * (1.0 + x);
  out.B = kSqrtPi * p.omega_c / (4.0 * p.gamma * p.gamma_doppler) * erfcx(x);
  const double separation = p.omega_c * p.omega_c / (5.4 * p.gamma_doppler);
  out.lorentzian_valid = out.gamma_FWM >= kFwmValidityFactor * separation;
  const double amp = G * std::sqrt(p.alpha_as * p.alpha_s) / 4.0 * (p.omega_p / p.delta_p) * out.B;
  out.spectrum = {grid, std::vector<double>(grid.size())};
  const auto& d = grid.points();
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double r = 2.0 * d[i] / out.gamma_FWM;
    out.spectrum.values[i] = amp * amp / (1.0 + r * r);
  }
  return out;
}

Complex complex_sinc(Complex z) {
  if (std::abs(z) < 1e-4) {
    const Complex z2 = z * z;
    return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
  }
  return std::sin(z) / z;
}

ComplexSpectrum biphoton_spectrum(const MediumParams& p, const DetuningGrid& grid,
                                  bool include_sinc, PumpMode pump) {
  ComplexSpectrum out{grid, std::vector<Complex>(grid.size())};
  const auto& d = grid.points();
  const Complex i(0.0, 1.0);
  for (std::size_t k = 0; k < d.size(); ++k) {
    const Complex xi = self_susceptibility(p, d[k]);
    const Complex chi = cross_susceptibility(p, d[k], pump);
    const Complex envelope = include_sinc ? complex_sinc(xi) : Complex(1.0, 0.0);
    out.values[k] = chi * envelope * std::exp(i * xi);
  }
  return out;
}

RealSpectrum power_spectrum(const ComplexSpectrum& f) {
  RealSpectrum out{f.grid, std::vector<double>(f.values.size())};
  for (std::size_t i = 0; i < f.values.size(); ++i) out.values[i] = std::norm(f.values[i]);
  return out;
}

ValidityMetrics validity_metrics(const MediumParams& p) {
  if (!(p.gamma > 0.0)) throw DomainError("invalid parameter 'gamma': must be > 0");
  if (!(p.omega_c > 0.0)) throw DomainError("invalid parameter 'omega_c': must be > 0");
  p.validate();
  const double G = MediumParams::gamma_natural;
  const double oc2 = p.omega_c * p.omega_c;
  ValidityMetrics m;
  m.x = oc2 / (4.0 * p.gamma * p.gamma_doppler);
  m.premise_ratio = 2.0 * p.gamma * G / oc2;
  m.fwm_peak_separation = oc2 / (5.4 * p.gamma_doppler);
  m.premise_ok = m.premise_ratio < 0.1;
  m.analytic_width_trusted = m.x <= 2.6;
  m.fwm_lorentzian_valid = 2.0 * p.gamma * (1.0 + m.x) >= kFwmValidityFactor * m.fwm_peak_separation;
  return m;
}

DetuningGrid default_spectrum_grid(const MediumParams& p) {
  const auto s = eit_lorentzian_summary(p, PathlengthMode::BiphotonQuarter);
  return DetuningGrid::symmetric(std::max(20.0 * s.gamma_L, 40.0 * s.gamma_EIT), 1u << 14);
}

}  // namespace biphoton
