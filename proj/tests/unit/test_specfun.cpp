#include <doctest.h>

#include <biphoton/errors.hpp>
#include <biphoton/specfun.hpp>

#include <cmath>
#include <limits>

#include "oracles.hpp"

using namespace biphoton;

namespace {
double rel(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST_CASE("faddeeva at the origin and on the real axis") {
  CHECK(std::abs(faddeeva(0.0) - 1.0) < 1e-15);
  CHECK(faddeeva(1.0).real() == doctest::Approx(0.36787944117144233).epsilon(1e-15));
  double worst = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double x = -10.0 + 0.01 * i;
    worst = std::max(worst, std::abs(faddeeva(x).real() - std::exp(-x * x)));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("faddeeva matches the multiprecision series") {
  CHECK(rel(faddeeva({0.0, 1.0}), oracle::faddeeva({0.0, 1.0})) < 1e-14);
  CHECK(faddeeva({0.0, 1.0}).real() == doctest::Approx(0.4275836).epsilon(1e-7));
  // both sides of the region switch at |z| = 8
  for (Complex z : {Complex(7.9, 0.01), Complex(8.1, 0.01), Complex(0.3, 7.99), Complex(5.0, 6.5),
                    Complex(1e-3, 1e-6), Complex(12.0, 3.0), Complex(-4.2, 0.7)}) {
    CAPTURE(z);
    CHECK(rel(faddeeva(z), oracle::faddeeva(z)) < 1e-12);
  }
}

TEST_CASE("faddeeva far from the origin") {
  // w(z) ~ i / (sqrt(pi) z) (1 + 1/(2 z^2))
  for (Complex z : {Complex(1e3, 1.0), Complex(-2e4, 5.0), Complex(0.0, 1e5), Complex(3e7, 1e-3)}) {
    const Complex asym = Complex(0.0, 1.0) / (std::sqrt(M_PI) * z) * (1.0 + 0.5 / (z * z));
    CAPTURE(z);
    CHECK(rel(faddeeva(z), asym) < 1e-10);
  }
}

TEST_CASE("faddeeva reflection symmetry") {
  for (double x : {0.1, 1.0, 3.7, 9.0, 40.0}) {
    for (double y : {0.0, 1e-4, 0.5, 2.0, 11.0}) {
      const Complex z(x, y);
      CHECK(std::abs(faddeeva(-std::conj(z)) - std::conj(faddeeva(z))) <= 1e-12);
    }
  }
}

TEST_CASE("faddeeva rejects the lower half-plane and non-finite input") {
  CHECK_THROWS_AS(faddeeva({1.0, -1e-12}), DomainError);
  CHECK_THROWS_AS(faddeeva({std::numeric_limits<double>::quiet_NaN(), 1.0}), DomainError);
  CHECK_THROWS_AS(faddeeva({0.0, std::numeric_limits<double>::infinity()}), DomainError);
}

TEST_CASE("erfcx values") {
  CHECK(erfcx(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(erfcx(50.0) * std::sqrt(M_PI) * 50.0 == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(erfcx(1.0) == doctest::Approx(oracle::faddeeva({0.0, 1.0}).real()).epsilon(1e-14));
  CHECK(erfcx(std::numeric_limits<double>::infinity()) == 0.0);
  CHECK_THROWS_AS(erfcx(std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST_CASE("erfcx for negative arguments agrees with exp(x^2) erfc(x)") {
  for (double x : {-0.1, -0.7, -1.5, -3.0, -6.0}) {
    CHECK(erfcx(x) == doctest::Approx(std::exp(x * x) * std::erfc(x)).epsilon(1e-13));
  }
}

TEST_CASE("erfcx is decreasing on [0, inf) and equals Re w(ix)") {
  double prev = erfcx(0.0);
  for (int i = 1; i <= 4000; ++i) {
    const double x = 0.005 * i;
    const double v = erfcx(x);
    CHECK(v < prev);
    CHECK(v > 0.0);
    CHECK(std::abs(v - faddeeva({0.0, x}).real()) <= 1e-12);
    prev = v;
  }
}

TEST_CASE("gauss-hermite rule structure") {
  for (int n : {2, 3, 20, 200, 201, 1600}) {
    const auto rule = QuadratureRule::gauss_hermite(n);
    CAPTURE(n);
    CHECK(rule.order() == n);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      CHECK(rule.weights()[i] > 0.0);
      if (i > 0) CHECK(rule.nodes()[i] > rule.nodes()[i - 1]);
      sum += rule.weights()[i];
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
  CHECK_THROWS_AS(QuadratureRule::gauss_hermite(1), DomainError);
}

TEST_CASE("doppler_average reproduces Gaussian moments") {
  const double gd = 54.0;
  const auto& rule = cached_gauss_hermite(200);
  CHECK(std::abs(doppler_average([](double) { return Complex(1.0); }, gd, rule) - 1.0) < 1e-12);
  CHECK(std::abs(doppler_average([](double w) { return Complex(w); }, gd, rule)) < 1e-10 * gd);
  // <w^(2k)> = G_D^(2k) (2k-1)!! / 2^k
  double double_factorial = 1.0;
  for (int k = 1; k <= 4; ++k) {
    double_factorial *= 2 * k - 1;
    const double exact = std::pow(gd, 2 * k) * double_factorial / std::pow(2.0, k);
    const Complex got = doppler_average([k](double w) { return Complex(std::pow(w, 2 * k)); }, gd, rule);
    CAPTURE(k);
    CHECK(std::abs(got.real() - exact) <= 1e-10 * exact);
    CHECK(got.imag() == 0.0);
  }
  CHECK(doppler_average([](double w) { return Complex(w * w); }, gd, rule).real() ==
        doctest::Approx(gd * gd / 2.0).epsilon(1e-12));
}

TEST_CASE("adaptive doppler_average reports convergence honestly") {
  const auto smooth = doppler_average([](double w) { return Complex(std::cos(w / 30.0)); }, 54.0);
  CHECK(smooth.converged);
  CHECK(smooth.order == 400);
  CHECK(smooth.value.real() == doctest::Approx(std::exp(-std::pow(54.0 / 30.0, 2) / 4.0)).epsilon(1e-12));

  // Lorentzian far narrower than the Gaussian: not resolvable by 1600 nodes.
  const auto narrow = doppler_average([](double w) { return 1.0 / Complex(w - 3.0, 0.05); }, 54.0);
  CHECK_FALSE(narrow.converged);
  CHECK(narrow.order == 1600);
  CHECK(narrow.rel_change > 1e-9);

  CHECK_THROWS_AS(doppler_average([](double) { return Complex(NAN); }, 54.0), DomainError);
  CHECK_THROWS_AS(doppler_average([](double) { return Complex(1.0); }, 0.0), DomainError);
}
