#include "ns1d/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ns1d/errors.hpp"
#include "ns1d/rk4.hpp"

namespace ns1d {

namespace {

double default_slack(const DiscreteField& f) { return 1.0 + 10.0 * f.h(); }

}  // namespace

double norm(const DiscreteField& field, int k) {
  if (k < 0 || k > 3) throw DomainError("norm order must be 0, 1, 2 or 3");
  const std::size_t needed = k == 0 ? 2 : (k == 3 ? 4 : 3);
  if (field.nodes() < needed) throw DomainError("too few nodes for the requested norm order");
  const double h = field.h();
  Eigen::VectorXd d = field.values;
  double sum = std::pow(trapezoid_l2(d, h), 2);
  for (int j = 1; j <= k; ++j) {
    d = grid_derivative(d, h);
    sum += std::pow(trapezoid_l2(d, h), 2);
  }
  return std::sqrt(sum);
}

PoincareCheck check_poincare(const DiscreteField& field, std::optional<double> slack) {
  if (field.nodes() < 3) throw DomainError("too few nodes for the Poincare check");
  if (field.values[0] != 0.0) throw DomainError("Poincare check needs f(0) = 0");
  const double h = field.h();
  const double f = trapezoid_l2(field.values, h);
  const double fx = trapezoid_l2(grid_derivative(field.values, h), h);
  PoincareCheck out;
  if (f == 0.0) return out;
  out.ratio = f / fx;
  out.holds = f <= slack.value_or(default_slack(field)) * 2.0 * fx;
  return out;
}

double interpolation_constant() { return 2.0 * (8.0 + 3456.0 + std::cbrt(2.0)); }

InterpolationCheck check_linf_interp(const DiscreteField& field, std::optional<double> slack) {
  if (field.nodes() < 4) throw DomainError("too few nodes for the interpolation checks");
  const double s = slack.value_or(default_slack(field));
  const double h = field.h();
  const Eigen::VectorXd dx = grid_derivative(field.values, h);
  const Eigen::VectorXd dxx = grid_derivative(dx, h);
  const double f = trapezoid_l2(field.values, h);
  const double fx = trapezoid_l2(dx, h);
  const double fxx = trapezoid_l2(dxx, h);

  InterpolationCheck out;
  out.sup = field.values.cwiseAbs().maxCoeff();
  out.sup_bound = f + std::sqrt(2.0 * f * fx);
  out.sup_holds = out.sup <= s * out.sup_bound;
  if (field.values[0] == 0.0) {
    out.pinned_bound = std::sqrt(2.0 * f * fx);
    out.pinned_holds = out.sup <= s * *out.pinned_bound;
  }
  const double C = interpolation_constant();
  out.derivative_sq = fx * fx;
  out.derivative_bound = C * f * f + C * f * fxx;
  out.derivative_holds = out.derivative_sq <= s * out.derivative_bound;
  const double base = f * f + f * fxx;
  out.observed_constant = base > 0.0 ? out.derivative_sq / base : 0.0;
  return out;
}

DiscreteField random_spline_field(std::uint64_t seed, std::size_t intervals, int knots, bool pinned) {
  if (knots < 4) throw DomainError("a cubic B-spline needs at least 4 control points");
  if (intervals < 3) throw DomainError("too few intervals");
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  Eigen::VectorXd c(knots);
  for (auto& v : c) v = coef(gen);

  const int pieces = knots - 3;
  DiscreteField out;
  out.values.resize(static_cast<Eigen::Index>(intervals) + 1);
  for (Eigen::Index i = 0; i < out.values.size(); ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(intervals) * pieces;
    const int j = std::min(static_cast<int>(s), pieces - 1);
    const double t = s - j;
    const double t2 = t * t, t3 = t2 * t;
    const double b0 = (1.0 - 3.0 * t + 3.0 * t2 - t3) / 6.0;
    const double b1 = (4.0 - 6.0 * t2 + 3.0 * t3) / 6.0;
    const double b2 = (1.0 + 3.0 * t + 3.0 * t2 - 3.0 * t3) / 6.0;
    const double b3 = t3 / 6.0;
    out.values[i] = b0 * c[j] + b1 * c[j + 1] + b2 * c[j + 2] + b3 * c[j + 3];
  }
  if (pinned) out.values.array() -= out.values[0];
  return out;
}

InequalitySuite inequality_suite(std::size_t fields, std::size_t intervals, std::uint64_t first_seed) {
  InequalitySuite out;
  out.fields = fields;
  out.intervals = intervals;
  out.slack = 1.0 + 10.0 / static_cast<double>(intervals);
  for (std::uint64_t seed = first_seed; seed < first_seed + fields; ++seed) {
    const DiscreteField f = random_spline_field(seed, intervals);
    const DiscreteField g = random_spline_field(seed, intervals, 8, true);
    const PoincareCheck p = check_poincare(g);
    const InterpolationCheck a = check_linf_interp(f);
    const InterpolationCheck b = check_linf_interp(g);
    out.poincare_failures += !p.holds;
    out.sup_failures += !a.sup_holds;
    out.derivative_failures += !a.derivative_holds;
    out.pinned_failures += !b.pinned_holds;
    out.max_poincare_ratio = std::max(out.max_poincare_ratio, p.ratio);
    out.max_sup_ratio = std::max(out.max_sup_ratio, a.sup / a.sup_bound);
    out.max_observed_constant = std::max(out.max_observed_constant, a.observed_constant);
    if (!out.first_failure && !(p.holds && a.sup_holds && a.derivative_holds && b.pinned_holds)) {
      out.first_failure = seed;
    }
  }
  return out;
}

std::string_view cond2_label(Cond2Status s) {
  switch (s) {
    case Cond2Status::Satisfied:
      return "Satisfied";
    case Cond2Status::Violated:
      return "Violated";
    case Cond2Status::NotApplicable:
      return "NotApplicable";
  }
  return "NotApplicable";
}

Cond2Report cond2_check(const SteadyProfile& profile, const PressureLaw& law) {
  Cond2Report out;
  const Slope slope = classify(profile);
  if (slope == Slope::Constant) return out;
  out.status = Cond2Status::Satisfied;
  const auto& rho = profile.rho();
  for (Eigen::Index i = 0; i < rho.size(); ++i) {
    const auto node = static_cast<std::size_t>(i);
    if (slope == Slope::PositiveSlope) {
      if (!(law.d2p(rho[i]) > 0.0)) {
        out = {Cond2Status::Violated, node, "P''>0"};
        return out;
      }
      continue;
    }
    if (!(law.d2p(rho[i]) / law.dp(rho[i]) < 2.0 / rho[i])) {
      out = {Cond2Status::Violated, node, "P''/P'<2/rho"};
      return out;
    }
    if (!(profile.rho_x()[i] < rho[i] / 4.0)) {
      out = {Cond2Status::Violated, node, "rho_x<rho/4"};
      return out;
    }
  }
  return out;
}

WeightPair weight_functions(const SteadyProfile& profile, const PressureLaw& law, double delta) {
  if (!(delta > 0.0)) throw DomainError("weight construction needs delta > 0");
  const std::size_t n = profile.intervals();
  const double h = profile.h();
  auto rhs = [&](double x, double phi) {
    const auto s = profile.sample(std::min(x, 1.0));
    return 3.0 * s.u_x / s.u * phi - delta;
  };

  WeightPair out;
  out.delta = delta;
  out.phi1.resize(static_cast<Eigen::Index>(n) + 1);
  out.phi1[0] = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.phi1[static_cast<Eigen::Index>(i) + 1] = rk4_step(rhs, profile.x(i), out.phi1[static_cast<Eigen::Index>(i)], h);
  }
  out.phi2.resize(out.phi1.size());
  for (Eigen::Index i = 0; i < out.phi1.size(); ++i) out.phi2[i] = out.phi1[i] / law.dp(profile.rho()[i]);

  const Eigen::VectorXd flux = profile.u().cwiseProduct(out.phi1);
  out.quantity = 0.5 * grid_derivative(flux, h) - 2.0 * profile.u_x().cwiseProduct(out.phi1);
  out.quantity_negative = (out.quantity.array() < 0.0).all();
  for (Eigen::Index i = 0; i < out.phi1.size(); ++i) {
    if (!(out.phi1[i] > 0.0)) {
      out.failure_node = static_cast<std::size_t>(i);
      break;
    }
  }
  out.phi_positive = !out.failure_node;
  return out;
}

double default_weight_delta(const SteadyProfile& profile) { return 0.1 * profile.u().minCoeff(); }

}  // namespace ns1d
