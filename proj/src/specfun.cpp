#include "biphoton/specfun.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "biphoton/errors.hpp"

namespace biphoton {

namespace {

constexpr double kInvSqrtPi = 0.56418958354775628695;  // 1/sqrt(pi)

// Weideman's rational expansion, N = 40 terms. Accurate to ~1e-15 for |z| < 8
// in the upper half-plane.
constexpr int kWeidemanTerms = 40;
constexpr double kWeidemanRadius = 8.0;

struct WeidemanTable {
  double L;
  std::array<double, kWeidemanTerms> a;  // a[n-1] multiplies Z^(n-1)
};

WeidemanTable make_weideman_table() {
  constexpr int N = kWeidemanTerms;
  constexpr int M = 2 * N;
  constexpr int M2 = 2 * M;
  WeidemanTable table{};
  table.L = std::sqrt(N / std::numbers::sqrt2);
  const double L = table.L;

  // Samples of exp(-t^2)(L^2 + t^2) at t = L tan(theta/2), theta = k pi / M.
  std::array<double, 2 * M - 1> f{};
  for (int k = -M + 1; k <= M - 1; ++k) {
    const double t = L * std::tan(0.5 * k * std::numbers::pi / M);
    f[k + M - 1] = std::exp(-t * t) * (L * L + t * t);
  }
  // Real DFT of the even sample sequence.
  for (int n = 1; n <= N; ++n) {
    double sum = 0.0;
    for (int k = -M + 1; k <= M - 1; ++k) {
      sum += f[k + M - 1] * std::cos(std::numbers::pi * n * k / M);
    }
    table.a[n - 1] = sum / M2;
  }
  return table;
}

const WeidemanTable& weideman_table() {
  static const WeidemanTable table = make_weideman_table();
  return table;
}

Complex faddeeva_weideman(Complex z) {
  const auto& t = weideman_table();
  const Complex i(0.0, 1.0);
  const Complex denom = t.L - i * z;
  const Complex Z = (t.L + i * z) / denom;
  Complex p = t.a[kWeidemanTerms - 1];
  for (int n = kWeidemanTerms - 2; n >= 0; --n) p = p * Z + t.a[n];
  return 2.0 * p / (denom * denom) + kInvSqrtPi / denom;
}

// Laplace continued fraction, evaluated bottom-up.
Complex faddeeva_continued_fraction(Complex z) {
  const double r = std::abs(z);
  const int depth = r < 20.0 ? 32 : (r < 1e3 ? 16 : 4);
  Complex tail = 0.0;
  for (int k = depth; k >= 1; --k) tail = (0.5 * k) / (z - tail);
  return Complex(0.0, kInvSqrtPi) / (z - tail);
}

// w(z) for Re z >= 0, Im z >= 0.
Complex faddeeva_first_quadrant(Complex z) {
  if (std::abs(z) < kWeidemanRadius) return faddeeva_weideman(z);
  return faddeeva_continued_fraction(z);
}

}  // namespace

Complex faddeeva(Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw DomainError("faddeeva: non-finite argument");
  }
  if (z.imag() < 0.0) {
    throw DomainError("faddeeva: Im(z) < 0 is outside the supported domain");
  }
  if (z.real() < 0.0) {
    // w(-conj(z)) = conj(w(z))
    return std::conj(faddeeva_first_quadrant(Complex(-z.real(), z.imag())));
  }
  return faddeeva_first_quadrant(z);
}

double erfcx(double x) {
  if (std::isnan(x)) throw DomainError("erfcx: NaN argument");
  if (x >= 0.0) {
    if (std::isinf(x)) return 0.0;
    return faddeeva_first_quadrant(Complex(0.0, x)).real();
  }
  // erfcx(-y) = 2 exp(y^2) - erfcx(y)
  return 2.0 * std::exp(x * x) - erfcx(-x);
}

QuadratureRule::QuadratureRule(int order, std::vector<double> nodes, std::vector<double> weights)
    : order_(order), nodes_(std::move(nodes)), weights_(std::move(weights)) {}

namespace {

// Orthonormal Hermite recurrence for the normalized Gaussian measure:
// t q_k = b_{k+1} q_{k+1} + b_k q_{k-1}, b_k = sqrt(k/2).
// Returns log(sum_{k<n} q_k^2) and q_n/q_n' (Newton correction), with
// periodic rescaling so the recurrence never overflows.
struct RecurrenceResult {
  double log_sum_sq;
  double newton_step;
};

RecurrenceResult hermite_recurrence(int n, double t) {
  double q_prev = 0.0, q = 1.0;    // q_{-1}, q_0
  double d_prev = 0.0, d = 0.0;    // derivatives
  double sum_sq = 0.0;
  double log_scale = 0.0;          // q_true = q * exp(log_scale)
  for (int k = 0; k < n; ++k) {
    sum_sq += q * q;
    const double b_k = std::sqrt(0.5 * k);
    const double b_next = std::sqrt(0.5 * (k + 1));
    const double q_next = (t * q - b_k * q_prev) / b_next;
    const double d_next = (q + t * d - b_k * d_prev) / b_next;
    q_prev = q;
    q = q_next;
    d_prev = d;
    d = d_next;
    const double mag = std::max({std::abs(q), std::abs(d), std::abs(q_prev)});
    if (mag > 1e150) {
      const double s = 1.0 / mag;
      q *= s;
      q_prev *= s;
      d *= s;
      d_prev *= s;
      sum_sq *= s * s;
      log_scale -= std::log(s);
    }
  }
  return {std::log(sum_sq) + 2.0 * log_scale, d != 0.0 ? q / d : 0.0};
}

}  // namespace

QuadratureRule QuadratureRule::gauss_hermite(int order) {
  if (order < 2) throw DomainError("gauss_hermite: order must be >= 2");
  const int n = order;

  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n - 1);
  for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("gauss_hermite: tridiagonal eigenvalue solve failed");
  }
  std::vector<double> t(solver.eigenvalues().data(), solver.eigenvalues().data() + n);

  for (double& x : t) {
    for (int it = 0; it < 2; ++it) x -= hermite_recurrence(n, x).newton_step;
  }
  // Exact mirror symmetry keeps odd moments at round-off level.
  for (int i = 0; i < n / 2; ++i) {
    const double m = 0.5 * (t[n - 1 - i] - t[i]);
    t[i] = -m;
    t[n - 1 - i] = m;
  }
  if (n % 2 == 1) t[n / 2] = 0.0;

  std::vector<double> nodes, weights;
  nodes.reserve(n);
  weights.reserve(n);
  for (double x : t) {
    const double w = std::exp(-hermite_recurrence(n, x).log_sum_sq);
    if (w > 0.0) {
      nodes.push_back(x);
      weights.push_back(w);
    }
  }
  return QuadratureRule(order, std::move(nodes), std::move(weights));
}

const QuadratureRule& cached_gauss_hermite(int order) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<QuadratureRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<QuadratureRule>(QuadratureRule::gauss_hermite(order));
  return *slot;
}

Complex doppler_average(const DopplerIntegrand& f, double gamma_doppler,
                        const QuadratureRule& rule) {
  if (!(gamma_doppler > 0.0)) throw DomainError("doppler_average: gamma_doppler must be > 0");
  Complex sum = 0.0;
  const auto& t = rule.nodes();
  const auto& w = rule.weights();
  for (std::size_t i = 0; i < t.size(); ++i) sum += w[i] * f(gamma_doppler * t[i]);
  return sum;
}

namespace {

struct PassResult {
  Complex value;
  double magnitude;  // sum_i w_i |f_i|
};

PassResult doppler_pass(const DopplerIntegrand& f, double gamma_doppler, const QuadratureRule& rule) {
  PassResult r{0.0, 0.0};
  const auto& t = rule.nodes();
  const auto& w = rule.weights();
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Complex v = f(gamma_doppler * t[i]);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw DomainError("doppler_average: integrand is not finite at a quadrature node");
    }
    r.value += w[i] * v;
    r.magnitude += w[i] * std::abs(v);
  }
  return r;
}

}  // namespace

AveragedValue doppler_average(const DopplerIntegrand& f, double gamma_doppler,
                              const QuadratureOptions& options) {
  if (!(gamma_doppler > 0.0)) throw DomainError("doppler_average: gamma_doppler must be > 0");
  if (options.initial_order < 2 || options.max_order < options.initial_order) {
    throw DomainError("doppler_average: invalid quadrature orders");
  }
  int order = options.initial_order;
  PassResult prev = doppler_pass(f, gamma_doppler, cached_gauss_hermite(order));
  AveragedValue out{prev.value, false, order, 0.0};
  while (2 * order <= options.max_order) {
    order *= 2;
    const PassResult cur = doppler_pass(f, gamma_doppler, cached_gauss_hermite(order));
    const double scale = std::max(cur.magnitude, std::abs(cur.value));
    const double change = scale > 0.0 ? std::abs(cur.value - prev.value) / scale : 0.0;
    out = {cur.value, change <= options.rel_tol, order, change};
    if (out.converged) return out;
    prev = cur;
  }
  return out;
}

}  // namespace biphoton
