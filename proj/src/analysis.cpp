#include "biphoton/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "biphoton/errors.hpp"
#include "detail/least_squares.hpp"
#include "detail/parallel.hpp"

namespace biphoton {

namespace {

constexpr double kWindowWidths = 5.0;
constexpr std::size_t kWindowPoints = 1025;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t extremum_index(const std::vector<double>& v, PeakSense sense) {
  const auto it = sense == PeakSense::PeakAboveBaseline ? std::max_element(v.begin(), v.end())
                                                        : std::min_element(v.begin(), v.end());
  return static_cast<std::size_t>(it - v.begin());
}

double lorentzian(double d, double center, double fwhm, double amplitude, double baseline) {
  const double u = 2.0 * (d - center) / fwhm;
  return baseline + amplitude / (1.0 + u * u);
}

}  // namespace

double edge_baseline(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 2) throw GridError("edge_baseline: need at least 2 samples");
  const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.025 * n)));
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += values[i] + values[n - 1 - i];
  return sum / (2.0 * k);
}

double fwhm_halfmax(const RealSpectrum& s, PeakSense sense) {
  const auto& v = s.values;
  const auto& d = s.grid.points();
  if (v.size() != d.size()) throw GridError("fwhm_halfmax: values and grid differ in length");
  const std::size_t n = v.size();
  const std::size_t i0 = extremum_index(v, sense);
  if (i0 == 0 || i0 == n - 1) throw NumericalError("fwhm_halfmax: extremum at the grid edge");
  const double base = edge_baseline(v);
  const double half = base + 0.5 * (v[i0] - base);
  const bool peak = sense == PeakSense::PeakAboveBaseline;
  auto beyond = [&](double y) { return peak ? y <= half : y >= half; };
  auto cross = [&](std::size_t inside, std::size_t outside) {
    const double t = (half - v[inside]) / (v[outside] - v[inside]);
    return d[inside] + t * (d[outside] - d[inside]);
  };

  std::size_t r = i0;
  while (r + 1 < n && !beyond(v[r + 1])) ++r;
  std::size_t l = i0;
  while (l > 0 && !beyond(v[l - 1])) --l;
  if (r + 1 == n || l == 0 || v[i0] == base) {
    throw NumericalError("fwhm_halfmax: profile does not reach half maximum inside the grid");
  }
  return cross(r, r + 1) - cross(l, l - 1);
}

LorentzianFit fit_lorentzian(const RealSpectrum& s, PeakSense sense) {
  const auto& v = s.values;
  const auto& d = s.grid.points();
  if (v.size() != d.size()) throw GridError("fit_lorentzian: values and grid differ in length");
  const double width0 = fwhm_halfmax(s, sense);
  const std::size_t i0 = extremum_index(v, sense);
  const double base0 = edge_baseline(v);

  // Parameters: center, fwhm, amplitude, baseline.
  Eigen::VectorXd x(4);
  x << d[i0], width0, v[i0] - base0, base0;
  const int n = static_cast<int>(v.size());
  auto residuals = [&](const Eigen::VectorXd& q, Eigen::VectorXd& r) {
    for (int i = 0; i < n; ++i) r[i] = lorentzian(d[i], q[0], q[1], q[2], q[3]) - v[i];
  };
  const auto out = detail::least_squares(residuals, x, n, "fit_lorentzian");
  LorentzianFit fit{out.x[0], std::abs(out.x[1]), out.x[2], out.x[3], out.rms, out.iterations};
  if (!(fit.fwhm > 0.0)) throw NumericalError("fit_lorentzian: collapsed to zero width");
  return fit;
}

ExpDecayFit fit_exp_decay(const std::vector<double>& times, const std::vector<double>& values,
                          double baseline_window) {
  if (times.size() != values.size()) throw GridError("fit_exp_decay: length mismatch");
  if (!(baseline_window > 0.0 && baseline_window < 0.5)) {
    throw DomainError("fit_exp_decay: baseline_window must lie in (0, 0.5)");
  }
  const std::size_t n = times.size();
  if (n < 4) throw GridError("fit_exp_decay: need at least 4 samples");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(times[i] > times[i - 1])) throw GridError("fit_exp_decay: times must be increasing");
  }

  const std::size_t nb = std::max<std::size_t>(1, static_cast<std::size_t>(baseline_window * n));
  const double y0 = std::accumulate(values.end() - static_cast<std::ptrdiff_t>(nb), values.end(), 0.0) /
                    static_cast<double>(nb);
  const std::size_t ip = extremum_index(values, PeakSense::PeakAboveBaseline);
  if (ip == 0 || ip + 2 >= n) throw NumericalError("fit_exp_decay: peak at the edge of the record");
  const double t0 = times[ip];

  const double a0 = values[ip] - y0;
  if (!(a0 > 0.0)) throw NumericalError("fit_exp_decay: peak does not rise above the baseline");
  double tau0 = 0.2 * (times.back() - t0);
  for (std::size_t i = ip; i < n; ++i) {
    if (values[i] - y0 <= a0 / std::exp(1.0)) {
      tau0 = std::max(times[i] - t0, times[ip + 1] - t0);
      break;
    }
  }

  const int m = static_cast<int>(n - ip);
  auto residuals = [&](const Eigen::VectorXd& q, Eigen::VectorXd& r) {
    for (int i = 0; i < m; ++i) {
      const std::size_t k = ip + static_cast<std::size_t>(i);
      r[i] = y0 + q[0] * std::exp(-(times[k] - t0) / q[1]) - values[k];
    }
  };
  Eigen::VectorXd x(2);
  x << a0, tau0;
  const auto out = detail::least_squares(residuals, x, m, "fit_exp_decay");
  ExpDecayFit fit{y0, out.x[0], t0, out.x[1], out.rms, out.iterations};
  if (!(fit.tau > 0.0) || !(fit.A > 0.0)) {
    throw NumericalError("fit_exp_decay: fit left the physical region (tau or A <= 0)");
  }
  return fit;
}

ExpDecayFit fit_exp_decay(const WavePacket& w, double baseline_window) {
  return fit_exp_decay(w.times, w.values, baseline_window);
}

double profile_distance(const RealSpectrum& f, const RealSpectrum& g) {
  if (!(f.grid == g.grid)) throw GridError("profile_distance: spectra are on different grids");
  if (f.values.size() != g.values.size() || f.values.size() != f.grid.size()) {
    throw GridError("profile_distance: value/grid length mismatch");
  }
  const auto& d = f.grid.points();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 1; i < d.size(); ++i) {
    const double h = 0.5 * (d[i] - d[i - 1]);
    const double e0 = f.values[i - 1] - g.values[i - 1];
    const double e1 = f.values[i] - g.values[i];
    num += h * (e0 * e0 + e1 * e1);
    // Products commute, so d(f, g) == d(g, f) bit for bit.
    den += h * (f.values[i - 1] * g.values[i - 1] + f.values[i] * g.values[i]);
  }
  if (!(den > 0.0)) throw DomainError("profile_distance: overlap integral is not positive");
  return num / den;
}

double numeric_eit_fwhm(const MediumParams& p, PathlengthMode mode) {
  const auto s = eit_lorentzian_summary(p, mode);
  const auto grid = DetuningGrid::symmetric(kWindowWidths * s.gamma_EIT, kWindowPoints);
  return fit_lorentzian(eit_exact(p, grid, mode)).fwhm;
}

double numeric_fwm_fwhm(const MediumParams& p, PumpMode pump) {
  const double x = p.omega_c * p.omega_c / (4.0 * p.gamma * p.gamma_doppler);
  const double gamma_L = 2.0 * p.gamma * (1.0 + x);
  const auto grid = DetuningGrid::symmetric(kWindowWidths * gamma_L, kWindowPoints);
  return fit_lorentzian(fwm_exact(p, grid, pump)).fwhm;
}

double numeric_biphoton_fwhm(const MediumParams& p, bool include_sinc, PumpMode pump) {
  const auto s = eit_lorentzian_summary(p, PathlengthMode::BiphotonQuarter);
  const auto grid = DetuningGrid::symmetric(kWindowWidths * s.gamma_EIT, kWindowPoints);
  return fit_lorentzian(power_spectrum(biphoton_spectrum(p, grid, include_sinc, pump))).fwhm;
}

std::string to_string(MapKind kind) {
  switch (kind) {
    case MapKind::EIT: return "eit";
    case MapKind::FWM: return "fwm";
    case MapKind::Overall: return "overall";
  }
  return "?";
}

namespace {

void require_positive_sorted(const std::vector<double>& axis, const char* name) {
  if (axis.empty()) throw DomainError(std::string("invalid axis '") + name + "': empty");
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (!(axis[i] > 0.0) || !std::isfinite(axis[i]) || (i > 0 && !(axis[i] > axis[i - 1]))) {
      throw DomainError(std::string("invalid axis '") + name + "': must be positive and increasing");
    }
  }
}

}  // namespace

DiffMap fwhm_diff_map(MapKind kind, const std::vector<double>& omega_c_sq_axis,
                      const std::vector<double>& gamma_axis, const MediumParams& base) {
  require_positive_sorted(omega_c_sq_axis, "omega_c_sq");
  require_positive_sorted(gamma_axis, "gamma");
  base.validate();
  DiffMap map;
  map.kind = kind;
  map.omega_c_sq_axis = omega_c_sq_axis;
  map.gamma_axis = gamma_axis;
  const std::size_t cells = omega_c_sq_axis.size() * gamma_axis.size();
  map.percent_diff.assign(cells, kNaN);
  map.numeric_fwhm.assign(cells, kNaN);
  map.analytic_fwhm.assign(cells, kNaN);
  map.cell_errors.assign(cells, "");

  detail::parallel_for(cells, [&](std::size_t c) {
    MediumParams p = base;
    p.gamma = gamma_axis[c / omega_c_sq_axis.size()];
    p.omega_c = std::sqrt(omega_c_sq_axis[c % omega_c_sq_axis.size()]);
    try {
      const auto s = eit_lorentzian_summary(p, PathlengthMode::BiphotonQuarter);
      double numeric = 0.0, analytic = 0.0;
      switch (kind) {
        case MapKind::EIT:
          numeric = numeric_eit_fwhm(p);
          analytic = s.gamma_EIT;
          break;
        case MapKind::FWM:
          numeric = numeric_fwm_fwhm(p);
          analytic = s.gamma_L;
          break;
        case MapKind::Overall:
          numeric = numeric_biphoton_fwhm(p);
          analytic = s.gamma_EIT;
          break;
      }
      map.numeric_fwhm[c] = numeric;
      map.analytic_fwhm[c] = analytic;
      map.percent_diff[c] = 100.0 * std::abs(numeric - analytic) / numeric;
    } catch (const std::exception& e) {
      map.cell_errors[c] = e.what();
    }
  });
  map.failed_cells = static_cast<int>(
      std::count_if(map.cell_errors.begin(), map.cell_errors.end(), [](const auto& e) { return !e.empty(); }));
  return map;
}

std::vector<RatioCurve> linewidth_ratio_curves(const std::vector<double>& alpha_s_list,
                                               const std::vector<double>& gamma_list,
                                               const std::vector<double>& omega_c_sq_list,
                                               const MediumParams& base) {
  require_positive_sorted(omega_c_sq_list, "omega_c_sq");
  for (double a : alpha_s_list) {
    if (!(a > 0.0)) throw DomainError("invalid parameter 'alpha_s': must be > 0");
  }
  for (double g : gamma_list) {
    if (!(g > 0.0)) throw DomainError("invalid parameter 'gamma': must be > 0");
  }
  base.validate();

  std::vector<RatioCurve> curves;
  for (double a : alpha_s_list) {
    for (double g : gamma_list) {
      RatioCurve c;
      c.alpha_s = a;
      c.gamma = g;
      c.omega_c_sq = omega_c_sq_list;
      const std::size_t n = omega_c_sq_list.size();
      c.gamma_EIT.assign(n, kNaN);
      c.gamma_FWM.assign(n, kNaN);
      c.gamma_BI.assign(n, kNaN);
      c.eit_over_bi.assign(n, kNaN);
      c.fwm_over_bi.assign(n, kNaN);
      c.point_errors.assign(n, "");
      curves.push_back(std::move(c));
    }
  }
  const std::size_t per_curve = omega_c_sq_list.size();
  detail::parallel_for(curves.size() * per_curve, [&](std::size_t k) {
    RatioCurve& c = curves[k / per_curve];
    const std::size_t i = k % per_curve;
    MediumParams p = base;
    p.alpha_s = c.alpha_s;
    p.gamma = c.gamma;
    p.omega_c = std::sqrt(c.omega_c_sq[i]);
    try {
      c.gamma_EIT[i] = numeric_eit_fwhm(p);
      c.gamma_FWM[i] = numeric_fwm_fwhm(p);
      c.gamma_BI[i] = numeric_biphoton_fwhm(p);
      c.eit_over_bi[i] = c.gamma_EIT[i] / c.gamma_BI[i];
      c.fwm_over_bi[i] = c.gamma_FWM[i] / c.gamma_BI[i];
    } catch (const std::exception& e) {
      c.point_errors[i] = e.what();
    }
  });
  for (auto& c : curves) {
    c.failed_points = static_cast<int>(std::count_if(
        c.point_errors.begin(), c.point_errors.end(), [](const auto& e) { return !e.empty(); }));
  }
  return curves;
}

namespace {

// Invert erfcx on [0, inf) by bisection in log space.
double erfcx_inverse(double target) {
  if (!(target > 0.0) || target >= 1.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (erfcx(hi) > target) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (erfcx(mid) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct SpectrumGuess {
  double omega_c;
  double gamma;
};

// Peak transmission fixes x = Omega_c^2 / (4 gamma Gamma_D); the measured
// width then fixes gamma through the Lorentzian summary (linear in gamma).
std::optional<SpectrumGuess> initial_guess(const RealSpectrum& s, const MediumParams& base,
                                           PathlengthMode mode, std::optional<double> fixed_gamma) {
  const double alpha_prime = effective_optical_depth(base, mode);
  const double top = *std::max_element(s.values.begin(), s.values.end());
  if (!(top > 0.0 && top < 1.0)) return std::nullopt;
  const double y = erfcx_inverse(-std::log(top) / alpha_prime);
  const double x = std::max(y - 0.5 / base.gamma_doppler, 1e-6);
  double gamma = 0.0;
  if (fixed_gamma) {
    gamma = *fixed_gamma;
  } else {
    double width = 0.0;
    try {
      width = fwhm_halfmax(s);
    } catch (const NumericalError&) {
      return std::nullopt;
    }
    const double R = erfcx(0.5 / base.gamma_doppler);
    const double A = 1.0 - erfcx(x) / R;
    if (!(A > 0.0)) return std::nullopt;
    gamma = width / (2.0 * (1.0 + x) * eit_width_factor(alpha_prime * R * A));
  }
  return SpectrumGuess{std::sqrt(4.0 * gamma * base.gamma_doppler * x), gamma};
}

}  // namespace

EstimateResult estimate_params_from_eit(const std::vector<RealSpectrum>& measured, double alpha_s,
                                        const std::vector<double>& power_ratios,
                                        const EstimateOptions& options) {
  const std::size_t m = measured.size();
  if (m == 0) throw DomainError("estimate_params_from_eit: no spectra");
  if (power_ratios.size() != m) {
    throw DomainError("estimate_params_from_eit: need one power ratio per spectrum");
  }
  for (double r : power_ratios) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("invalid power ratio: must be > 0");
  }
  if (!(alpha_s > 0.0)) throw DomainError("invalid parameter 'alpha_s': must be > 0");
  const bool gamma_fixed = options.fixed_gamma.has_value();
  if (gamma_fixed && options.fixed_gamma->size() != m) {
    throw DomainError("estimate_params_from_eit: need one fixed gamma per spectrum");
  }
  if (options.gamma_guess && options.gamma_guess->size() != m) {
    throw DomainError("estimate_params_from_eit: need one gamma guess per spectrum");
  }
  MediumParams base = options.base;
  base.alpha_s = alpha_s;
  base.validate();

  EstimateResult result;
  std::vector<double> gamma0(m, 0.05);
  double log_oc0_sum = 0.0;
  int guesses = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& s = measured[i];
    if (s.values.size() != s.grid.size()) throw GridError("estimate_params_from_eit: length mismatch");
    const double lo = *std::min_element(s.values.begin(), s.values.end());
    const double hi = *std::max_element(s.values.begin(), s.values.end());
    if (hi - lo < 0.02) {
      result.warnings.push_back("spectrum " + std::to_string(i) +
                                " is shallow (contrast < 0.02); parameters are ill-conditioned");
    }
    const auto g = initial_guess(s, base, options.mode,
                                 gamma_fixed ? std::optional<double>((*options.fixed_gamma)[i])
                                             : std::nullopt);
    if (g) {
      gamma0[i] = g->gamma;
      log_oc0_sum += std::log(g->omega_c / std::sqrt(power_ratios[i]));
      ++guesses;
    }
  }
  if (gamma_fixed) gamma0 = *options.fixed_gamma;
  if (options.gamma_guess) gamma0 = *options.gamma_guess;
  double oc0 = guesses > 0 ? std::exp(log_oc0_sum / guesses) : base.omega_c;
  if (options.omega_c0_guess) oc0 = *options.omega_c0_guess;

  // Log parameters keep Omega_c0 and every gamma positive.
  const int n_params = 1 + (gamma_fixed ? 0 : static_cast<int>(m));
  Eigen::VectorXd x(n_params);
  x[0] = std::log(oc0);
  if (!gamma_fixed) {
    for (std::size_t i = 0; i < m; ++i) x[1 + static_cast<int>(i)] = std::log(gamma0[i]);
  }
  int n_res = 0;
  for (const auto& s : measured) n_res += static_cast<int>(s.values.size());

  auto params_for = [&](const Eigen::VectorXd& q, std::size_t i) {
    MediumParams p = base;
    p.omega_c = std::exp(q[0]) * std::sqrt(power_ratios[i]);
    p.gamma = gamma_fixed ? (*options.fixed_gamma)[i] : std::exp(q[1 + static_cast<int>(i)]);
    return p;
  };
  auto residuals = [&](const Eigen::VectorXd& q, Eigen::VectorXd& r) {
    int k = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const auto model = eit_exact(params_for(q, i), measured[i].grid, options.mode);
      for (std::size_t j = 0; j < model.values.size(); ++j) r[k++] = model.values[j] - measured[i].values[j];
    }
  };
  const auto out = detail::least_squares(residuals, x, n_res, "estimate_params_from_eit");

  result.omega_c0 = std::exp(out.x[0]);
  result.iterations = out.iterations;
  for (std::size_t i = 0; i < m; ++i) {
    const auto p = params_for(out.x, i);
    result.gamma_per_spectrum.push_back(p.gamma);
    const auto model = eit_exact(p, measured[i].grid, options.mode);
    double ss = 0.0;
    for (std::size_t j = 0; j < model.values.size(); ++j) {
      const double e = model.values[j] - measured[i].values[j];
      ss += e * e;
    }
    result.residual_rms.push_back(std::sqrt(ss / static_cast<double>(model.values.size())));
  }
  return result;
}

}  // namespace biphoton
