#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstddef>
#include <vector>

#include "ns1d/steady.hpp"

namespace ns1d {

using Complex = std::complex<double>;

/// (r, v, w) with w = v_x.
using EvansState = Eigen::Matrix<Complex, 3, 1>;

/// D(lambda) = d_scaled * exp(log_scale), |d_scaled| <= 1.
struct EvansEvaluation {
  Complex lambda{};
  Complex d_scaled{};
  double log_scale = 0.0;

  Complex value() const { return d_scaled * std::exp(log_scale); }
};

/// Derivative of the linearized eigenvalue system at x, with the profile
/// sampled by Hermite interpolation.
EvansState evans_rhs(double x, const EvansState& state, Complex lambda,
                     const SteadyProfile& profile);

/// Coefficient bounds of the Evans system used to choose step counts.
class EvansStepRule {
 public:
  explicit EvansStepRule(const SteadyProfile& profile);

  /// Upper bound on the local growth/oscillation rate at lambda.
  double rate(Complex lambda) const;
  /// Power of two, at least 4096 and at least `per_unit` times rate(lambda).
  std::size_t steps(Complex lambda, double per_unit = 8.0) const;

 private:
  double inv_u_ = 0.0;
  double sqrt_rho_nu_ = 0.0;
  double base_ = 0.0;
};

/// Coefficients of the Evans system tabulated at every half step of a fixed
/// grid, so repeated evaluations along a contour skip the profile sampling.
class EvansSystem {
 public:
  EvansSystem(const SteadyProfile& profile, std::size_t n_steps);

  EvansEvaluation operator()(Complex lambda, const EvansState& initial = {0.0, 0.0, 1.0}) const;
  std::size_t steps() const { return n_steps_; }

  struct Coefficients {
    double rr, rv, rw, lr;      // r' = (rr + lambda lr) r + rv v + rw w
    double wr, wv, ww, lwr, lwv;  // w' = (wr + lambda lwr) r + (wv + lambda lwv) v + ww w
  };

 private:
  std::size_t n_steps_;
  std::vector<Coefficients> table_;
};

/// RK4 shooting from (r, v, w)(0) = initial (default (0, 0, 1)) to x = 1 with
/// rescaling whenever the state norm leaves [e^-10, e^10]. n_steps = 0 picks
/// EvansStepRule::steps(lambda). Throws NumericalFailure on NaN.
EvansEvaluation evans(Complex lambda, const SteadyProfile& profile, std::size_t n_steps = 0,
                      const EvansState& initial = {0.0, 0.0, 1.0});

/// v(1) at lambda = 0 from the closed-form solution of the reduced ODE,
/// by cumulative Gauss quadrature for the inner integral and composite
/// Simpson for the outer one. Returned in scaled form with d_scaled = 1.
EvansEvaluation evans_at_zero_quadrature(const SteadyProfile& profile);

struct StabilityIndex {
  int index = 0;
  int sign_at_zero = 0;
  int sign_at_infinity = 0;
  double lambda_big = 0.0;
  /// sign of Re D agrees at lambda_big / 4, lambda_big and 4 lambda_big
  bool consistent = false;
};

/// sgn D(0) * sgn Re D(lambda_big) with lambda_big = big_factor * nu.
StabilityIndex stability_index(const SteadyProfile& profile, double big_factor = 1e4);

}  // namespace ns1d
