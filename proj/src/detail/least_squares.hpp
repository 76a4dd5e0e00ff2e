#pragma once

#include <Eigen/Core>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include <cmath>
#include <functional>
#include <string>

#include "biphoton/errors.hpp"

namespace biphoton::detail {

using ResidualFn = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& r)>;

struct LeastSquaresOutcome {
  Eigen::VectorXd x;
  int iterations = 0;
  double rms = 0.0;
};

// Adapter in the shape Eigen::NumericalDiff expects.
struct ResidualFunctor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  ResidualFn fn;
  int n_in = 0;
  int n_out = 0;

  int inputs() const { return n_in; }
  int values() const { return n_out; }
  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& r) const {
    fn(x, r);
    return r.allFinite() ? 0 : -1;
  }
};

using CentralDiff = Eigen::NumericalDiff<ResidualFunctor, Eigen::Central>;

// Damped Gauss-Newton (MINPACK lmder) on a central-difference Jacobian with
// step 1e-6 |x_j|. Converged when the relative parameter step drops below xtol.
inline LeastSquaresOutcome least_squares(const ResidualFn& fn, Eigen::VectorXd x0, int n_residuals,
                                         const std::string& what, int max_iterations = 200,
                                         double xtol = 1e-8) {
  if (n_residuals < x0.size()) {
    throw NumericalError(what + ": fewer data points than parameters");
  }
  ResidualFunctor functor{fn, static_cast<int>(x0.size()), n_residuals};
  CentralDiff diff(functor, 1e-12);
  Eigen::LevenbergMarquardt<CentralDiff> lm(diff);
  lm.parameters.xtol = xtol;
  lm.parameters.ftol = 1e-14;
  lm.parameters.maxfev = 100 * max_iterations * static_cast<int>(x0.size() + 1);

  namespace S = Eigen::LevenbergMarquardtSpace;
  auto status = lm.minimizeInit(x0);
  if (status == S::ImproperInputParameters) throw NumericalError(what + ": improper input");
  int steps = 0;
  do {
    status = lm.minimizeOneStep(x0);
    ++steps;
  } while (status == S::Running && steps < max_iterations);

  if (status == S::Running || status == S::TooManyFunctionEvaluation) {
    throw NumericalError(what + ": no convergence after " + std::to_string(steps) + " iterations");
  }
  if (status == S::UserAsked || !x0.allFinite()) {
    throw NumericalError(what + ": model produced non-finite residuals");
  }
  Eigen::VectorXd r(n_residuals);
  fn(x0, r);
  return {x0, steps, std::sqrt(r.squaredNorm() / n_residuals)};
}

}  // namespace biphoton::detail
