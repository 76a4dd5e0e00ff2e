#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace biphoton {

using Complex = std::complex<double>;

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz) on the closed upper half-plane.
/// Relative accuracy is better than 1e-13 everywhere in the domain.
/// Throws DomainError for Im(z) < 0 or non-finite input.
Complex faddeeva(Complex z);

/// Scaled complementary error function exp(x^2) erfc(x).
/// Overflows to +inf for x below about -26.6.
double erfcx(double x);

/// Gauss-Hermite rule for the normalized weight exp(-t^2)/sqrt(pi).
///
/// Nodes whose weight underflows double precision (|t| beyond ~27) are dropped,
/// so `size()` can be smaller than `order()` for very high orders.
class QuadratureRule {
 public:
  static QuadratureRule gauss_hermite(int order);

  int order() const { return order_; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  QuadratureRule(int order, std::vector<double> nodes, std::vector<double> weights);

  int order_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Shared, lazily built rule. Safe to call concurrently.
const QuadratureRule& cached_gauss_hermite(int order);

using DopplerIntegrand = std::function<Complex(double omega_d)>;

/// One quadrature pass: sum_i w_i f(gamma_doppler * t_i).
Complex doppler_average(const DopplerIntegrand& f, double gamma_doppler,
                        const QuadratureRule& rule);

struct QuadratureOptions {
  int initial_order = 200;
  int max_order = 1600;
  double rel_tol = 1e-9;
};

struct AveragedValue {
  Complex value;
  bool converged = false;
  int order = 0;           // order of the last pass
  double rel_change = 0.0; // |I(2n) - I(n)| relative to the integrand scale
};

/// Gaussian Doppler average with order doubling until two consecutive passes
/// agree to `rel_tol`. `converged == false` means the maximum order was
/// reached without meeting the tolerance; the last estimate is still returned.
AveragedValue doppler_average(const DopplerIntegrand& f, double gamma_doppler,
                              const QuadratureOptions& options = {});

}  // namespace biphoton
