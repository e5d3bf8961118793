#include "ns1d/evans.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "ns1d/errors.hpp"

namespace ns1d {

namespace {

using Coefficients = EvansSystem::Coefficients;

constexpr double kRescaleLog = 10.0;
constexpr std::size_t kMinSteps = 4096;
constexpr std::size_t kMaxSteps = std::size_t{1} << 24;

/// Coefficients at a sampled density; u and u_x follow from rho u = m so
/// the momentum flux is exactly constant inside the system.
Coefficients coefficients_at(double rho, double rho_x, double m, double nu,
                             const PressureLaw& law) {
  const double u = m / rho;
  const double u_x = -m * rho_x / (rho * rho);
  const double p1 = law.dp(rho);
  const double p2 = law.d2p(rho);
  Coefficients c{};
  c.rr = -u_x / u;
  c.rv = -rho_x / u;
  c.rw = -rho / u;
  c.lr = -1.0 / u;
  c.wr = (p2 * rho_x + u_x * u + p1 * c.rr) / nu;
  c.wv = (u_x * rho + p1 * c.rv) / nu;
  c.ww = (rho * u + p1 * c.rw) / nu;
  c.lwr = p1 * c.lr / nu;
  c.lwv = rho / nu;
  return c;
}

Coefficients coefficients_at(const SteadyProfile& profile, double x) {
  const auto s = profile.sample(x);
  return coefficients_at(s.rho, s.rho_x, profile.m(), profile.params().nu, profile.law());
}

inline EvansState apply(const Coefficients& c, Complex lambda, const EvansState& y) {
  EvansState d;
  d[0] = (c.rr + lambda * c.lr) * y[0] + c.rv * y[1] + c.rw * y[2];
  d[1] = y[2];
  d[2] = (c.wr + lambda * c.lwr) * y[0] + (c.wv + lambda * c.lwv) * y[1] + c.ww * y[2];
  return d;
}

/// RK4 over n steps; coeff(j) gives the coefficients at x = j / (2n).
template <typename CoeffAt>
EvansEvaluation shoot(Complex lambda, std::size_t n, const EvansState& initial,
                      const CoeffAt& coeff) {
  const double h = 1.0 / static_cast<double>(n);
  EvansState y = initial;
  double log_scale = 0.0;
  Coefficients c0 = coeff(0);
  for (std::size_t k = 0; k < n; ++k) {
    const Coefficients c1 = coeff(2 * k + 1);
    const Coefficients c2 = coeff(2 * k + 2);
    const EvansState k1 = apply(c0, lambda, y);
    const EvansState k2 = apply(c1, lambda, y + (0.5 * h) * k1);
    const EvansState k3 = apply(c1, lambda, y + (0.5 * h) * k2);
    const EvansState k4 = apply(c2, lambda, y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    c0 = c2;
    const double norm = y.norm();
    if (!std::isfinite(norm)) {
      throw NumericalFailure("Evans integration produced a non-finite state", static_cast<long>(k));
    }
    if (norm > 0.0 && std::abs(std::log(norm)) > kRescaleLog) {
      y /= norm;
      log_scale += std::log(norm);
    }
  }
  const double norm = y.norm();
  EvansEvaluation out;
  out.lambda = lambda;
  if (norm > 0.0) {
    out.d_scaled = y[1] / norm;
    out.log_scale = log_scale + std::log(norm);
  } else {
    out.log_scale = log_scale;
  }
  return out;
}

std::size_t pow2_steps(double value) {
  const double clamped =
      std::min(static_cast<double>(kMaxSteps), std::max(static_cast<double>(kMinSteps), value));
  return std::bit_ceil(static_cast<std::size_t>(std::ceil(clamped)));
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

EvansState evans_rhs(double x, const EvansState& state, Complex lambda,
                     const SteadyProfile& profile) {
  return apply(coefficients_at(profile, x), lambda, state);
}

EvansStepRule::EvansStepRule(const SteadyProfile& profile) {
  const double nu = profile.params().nu;
  const double m = profile.m();
  for (Eigen::Index i = 0; i < profile.rho().size(); ++i) {
    const double rho = profile.rho()[i];
    const double u = m / rho;
    const double u_x = -m * profile.rho_x()[i] / (rho * rho);
    const double c = rho * (u * u - profile.law().dp(rho)) / (nu * u);
    inv_u_ = std::max(inv_u_, 1.0 / u);
    sqrt_rho_nu_ = std::max(sqrt_rho_nu_, std::sqrt(rho / nu));
    base_ = std::max(base_, std::abs(c) + std::abs(u_x) / u);
  }
}

double EvansStepRule::rate(Complex lambda) const {
  const double a = std::abs(lambda);
  return a * inv_u_ + std::sqrt(a) * sqrt_rho_nu_ + base_;
}

std::size_t EvansStepRule::steps(Complex lambda, double per_unit) const {
  return pow2_steps(per_unit * rate(lambda));
}

EvansSystem::EvansSystem(const SteadyProfile& profile, std::size_t n_steps) : n_steps_(n_steps) {
  if (n_steps < 1) throw DomainError("Evans system needs at least one step");
  table_.resize(2 * n_steps + 1);
  const double half = 0.5 / static_cast<double>(n_steps);
  for (std::size_t j = 0; j < table_.size(); ++j) {
    table_[j] = coefficients_at(profile, std::min(1.0, static_cast<double>(j) * half));
  }
}

EvansEvaluation EvansSystem::operator()(Complex lambda, const EvansState& initial) const {
  return shoot(lambda, n_steps_, initial, [this](std::size_t j) { return table_[j]; });
}

EvansEvaluation evans(Complex lambda, const SteadyProfile& profile, std::size_t n_steps,
                      const EvansState& initial) {
  if (n_steps == 0) n_steps = EvansStepRule(profile).steps(lambda);
  const double half = 0.5 / static_cast<double>(n_steps);
  return shoot(lambda, n_steps, initial, [&](std::size_t j) {
    return coefficients_at(profile, std::min(1.0, static_cast<double>(j) * half));
  });
}

EvansEvaluation evans_at_zero_quadrature(const SteadyProfile& profile) {
  const auto n = static_cast<Eigen::Index>(profile.intervals());
  const double h = profile.h();
  const double m = profile.m();
  const double nu = profile.params().nu;
  const PressureLaw& law = profile.law();
  // g = rho u - P'(rho) rho / u with u = m / rho
  auto g = [&](double rho) { return m - law.dp(rho) * rho * rho / m; };

  // Cumulative G(x_i) by three-point Gauss on each cell.
  const double gauss_offset = 0.5 * std::sqrt(3.0 / 5.0);
  Eigen::VectorXd G(n + 1);
  G[0] = 0.0;
  double carry = 0.0;  // Kahan compensation
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mid = (static_cast<double>(i) + 0.5) * h;
    const double left = profile.sample(mid - gauss_offset * h).rho;
    const double centre = profile.sample(mid).rho;
    const double right = profile.sample(mid + gauss_offset * h).rho;
    const double term = h * (5.0 * g(left) + 8.0 * g(centre) + 5.0 * g(right)) / 18.0 - carry;
    const double next = G[i] + term;
    carry = (next - G[i]) - term;
    G[i + 1] = next;
  }

  // Outer integral of exp((G(1) - G(y)) / nu), evaluated relative to its maximum.
  const Eigen::ArrayXd e = (G[n] - G.array()) / nu;
  const double top = e.maxCoeff();
  const Eigen::ArrayXd f = (e - top).exp();
  double sum = 0.0;
  Eigen::Index simpson_end = n;
  if (n % 2 == 1) {
    simpson_end = n - 3;
    sum += 3.0 * h / 8.0 * (f[n - 3] + 3.0 * f[n - 2] + 3.0 * f[n - 1] + f[n]);
  }
  if (simpson_end > 0) {
    double acc = f[0] + f[simpson_end];
    for (Eigen::Index i = 1; i < simpson_end; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * f[i];
    sum += h / 3.0 * acc;
  }
  EvansEvaluation out;
  out.lambda = 0.0;
  out.d_scaled = 1.0;
  out.log_scale = top + std::log(sum);
  return out;
}

StabilityIndex stability_index(const SteadyProfile& profile, double big_factor) {
  StabilityIndex out;
  const EvansEvaluation zero = evans_at_zero_quadrature(profile);
  out.sign_at_zero = sign_of(zero.d_scaled.real());
  out.lambda_big = big_factor * profile.params().nu;
  const EvansStepRule rule(profile);
  auto sign_at = [&](double lambda) {
    const Complex l(lambda, 0.0);
    return sign_of(evans(l, profile, rule.steps(l, 3.0)).d_scaled.real());
  };
  out.sign_at_infinity = sign_at(out.lambda_big);
  out.consistent = sign_at(0.25 * out.lambda_big) == out.sign_at_infinity &&
                   sign_at(4.0 * out.lambda_big) == out.sign_at_infinity;
  out.index = out.sign_at_zero * out.sign_at_infinity;
  return out;
}

}  // namespace ns1d
