#include "oracles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

namespace mp = boost::multiprecision;
using big_complex = mp::cpp_complex<130>;
using big_real = big_complex::value_type;

cplx faddeeva(cplx z) {
  const big_complex iz(big_real(-z.imag()), big_real(z.real()));
  // Split even and odd terms: (iz)^(2k)/k! and (iz)^(2k+1)/Gamma(k + 3/2).
  const big_real sqrt_pi = mp::sqrt(boost::math::constants::pi<big_real>());
  big_complex even(1), odd = iz * 2 / sqrt_pi;
  big_complex term_even(1), term_odd = odd;
  const big_complex iz2 = iz * iz;
  const double r2 = std::norm(z);
  const big_real tiny("1e-40");
  for (int k = 1;; ++k) {
    term_even *= iz2 / big_real(k);
    term_odd *= iz2 / (big_real(k) + big_real(0.5));
    even += term_even;
    odd += term_odd;
    if (k > r2 + 10 && mp::abs(term_even) < tiny && mp::abs(term_odd) < tiny) break;
  }
  const big_complex w = even + odd;
  return {static_cast<double>(w.real()), static_cast<double>(w.imag())};
}

namespace {

constexpr double kPi = 3.14159265358979323846;

// Integral over the real line, broken at the given points (plus +-cutoff).
double integrate(const std::function<double(double)>& f, std::vector<double> breaks, double cutoff) {
  breaks.push_back(-cutoff);
  breaks.push_back(cutoff);
  std::vector<double> pts;
  for (double b : breaks) {
    if (std::isfinite(b) && b >= -cutoff && b <= cutoff) pts.push_back(b);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, pts[i - 1], pts[i], 25,
                                                                           1e-14);
  }
  return total;
}

std::vector<double> breaks_around(double center, double width) {
  std::vector<double> out{center};
  for (double k : {1.0, 10.0, 100.0, 1e3, 1e4, 1e5}) {
    out.push_back(center - k * width);
    out.push_back(center + k * width);
  }
  return out;
}

// Gaussian velocity average of a complex integrand with a simple pole near
// the real axis (and optionally a second one).
cplx doppler_average(const Medium& m, const std::function<cplx(double)>& g,
                     std::vector<double> breaks) {
  const double gd = m.gamma_doppler;
  auto weight = [gd](double w) { return std::exp(-w * w / (gd * gd)) / (std::sqrt(kPi) * gd); };
  const double cutoff = 12.0 * gd;
  const double re = integrate([&](double w) { return weight(w) * g(w).real(); }, breaks, cutoff);
  const double im = integrate([&](double w) { return weight(w) * g(w).imag(); }, breaks, cutoff);
  return {re, im};
}

// Root in omega of Omega_c^2 - 4 s (delta + omega + i/2).
cplx denominator_root(const Medium& m, double delta) {
  const cplx s(delta, m.gamma);
  return m.omega_c * m.omega_c / (4.0 * s) - delta - cplx(0.0, 0.5);
}

cplx denominator(const Medium& m, double delta, double w) {
  const cplx s(delta, m.gamma);
  return m.omega_c * m.omega_c - 4.0 * s * cplx(delta + w, 0.5);
}

}  // namespace

cplx self_susceptibility(const Medium& m, double delta) {
  const cplx s(delta, m.gamma);
  const cplx root = denominator_root(m, delta);
  const cplx avg = doppler_average(
      m, [&](double w) { return s / denominator(m, delta, w); },
      breaks_around(root.real(), std::abs(root.imag())));
  return 0.5 * m.alpha_s * avg;
}

cplx cross_susceptibility(const Medium& m, double delta, bool exact_pump) {
  const cplx root = denominator_root(m, delta);
  auto breaks = breaks_around(root.real(), std::abs(root.imag()));
  for (double k : {0.0, -5.0, 5.0, -50.0, 50.0}) breaks.push_back(m.delta_p + k);
  const cplx avg = doppler_average(
      m,
      [&](double w) {
        const cplx pump = exact_pump ? m.omega_p / cplx(m.delta_p - w, 0.5) : cplx(m.omega_p / m.delta_p);
        return pump * m.omega_c / denominator(m, delta, w);
      },
      breaks);
  return std::sqrt(m.alpha_as * m.alpha_s) / 4.0 * avg;
}

double eit_transmission(const Medium& m, double delta, double divisor) {
  const double oc2 = m.omega_c * m.omega_c;
  const double g = m.gamma;
  const double d2g2 = delta * delta + g * g;
  const double w0 = delta * oc2 / (4.0 * d2g2) - delta;
  const double beta = (2.0 * delta * delta + g * (2.0 * g + oc2)) / (4.0 * d2g2);
  const double gd = m.gamma_doppler;
  const double integral = integrate(
      [&](double w) {
        const double u = w - w0;
        return std::exp(-w * w / (gd * gd)) * beta / (u * u + beta * beta);
      },
      breaks_around(w0, beta), 12.0 * gd);
  const double alpha_prime = m.alpha_s * std::sqrt(kPi) / (divisor * gd);
  return std::exp(-alpha_prime / kPi * integral);
}

double biphoton_power(const Medium& m, double delta) {
  const cplx xi = self_susceptibility(m, delta);
  const cplx chi = cross_susceptibility(m, delta, true);
  const cplx sinc = std::abs(xi) < 1e-8 ? cplx(1.0) : std::sin(xi) / xi;
  return std::norm(chi * sinc * std::exp(cplx(0.0, 1.0) * xi));
}

}  // namespace oracle
