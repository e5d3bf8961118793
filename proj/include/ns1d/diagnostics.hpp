#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "ns1d/steady.hpp"

namespace ns1d {

/// Samples of a real function on the uniform grid x_i = i / (n - 1).
struct DiscreteField {
  Eigen::VectorXd values;

  std::size_t nodes() const { return static_cast<std::size_t>(values.size()); }
  double h() const { return 1.0 / static_cast<double>(values.size() - 1); }
};

/// Second-order derivative on a uniform grid: centred inside, three-point
/// one-sided at both ends. Needs at least 3 nodes.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> grid_derivative(
    const Eigen::MatrixBase<Derived>& f, double h) {
  using Vec = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index n = f.size();
  Vec d(n);
  d.segment(1, n - 2) = (f.tail(n - 2) - f.head(n - 2)) / (2.0 * h);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return d;
}

/// Trapezoidal L2 norm on [0,1].
template <typename Derived>
double trapezoid_l2(const Eigen::MatrixBase<Derived>& f, double h) {
  const Eigen::Index n = f.size();
  const double ends = 0.5 * (std::norm(f[0]) + std::norm(f[n - 1]));
  return std::sqrt(h * (f.squaredNorm() - ends));
}

/// sqrt(sum_{j<=k} |d^j f|_2^2). Throws DomainError when the field is too
/// short for order k (2 nodes for k = 0, 3 for k = 1, 2, and 4 for k = 3).
double norm(const DiscreteField& field, int k);

struct PoincareCheck {
  bool holds = true;
  /// |f|_2 / |f_x|_2, or 0 when f vanishes
  double ratio = 0.0;
};

/// |f|_2 <= 2 |f_x|_2 for f(0) = 0, relaxed by `slack` (default 1 + 10h).
/// Throws DomainError if f(0) != 0.
PoincareCheck check_poincare(const DiscreteField& field, std::optional<double> slack = {});

/// C for |v_x|_2^2 <= C |v|_2^2 + C |v|_2 |v_xx|_2, obtained by integrating
/// by parts, bounding the boundary term with the L-infinity estimate and
/// absorbing each cross term into |v_x|_2^2 / 8 by Young's inequality.
double interpolation_constant();

struct InterpolationCheck {
  double sup = 0.0;
  double sup_bound = 0.0;
  bool sup_holds = true;
  /// Sharper sup bound sqrt(2 |f|_2 |f_x|_2), only meaningful when f(0) = 0.
  std::optional<double> pinned_bound;
  bool pinned_holds = true;
  double derivative_sq = 0.0;
  double derivative_bound = 0.0;
  bool derivative_holds = true;
  /// |v_x|^2 / (|v|^2 + |v| |v_xx|): the smallest constant this field needs
  double observed_constant = 0.0;
};

/// |f|_inf <= |f|_2 + sqrt(2 |f|_2 |f_x|_2) and the derivative
/// interpolation bound, each relaxed by `slack` (default 1 + 10h).
InterpolationCheck check_linf_interp(const DiscreteField& field, std::optional<double> slack = {});

/// Uniform cubic B-spline with `knots` control points drawn uniformly from
/// [-1, 1], sampled on `intervals` cells. With `pinned` the value at 0 is
/// subtracted so the field vanishes there.
DiscreteField random_spline_field(std::uint64_t seed, std::size_t intervals, int knots = 8,
                                  bool pinned = false);

/// Poincare and interpolation checks over seeds first_seed, first_seed + 1, ...
/// of random_spline_field (pinned fields for the Poincare and pinned sup
/// bounds), with the default slack 1 + 10h.
struct InequalitySuite {
  std::size_t fields = 0;
  std::size_t intervals = 0;
  double slack = 1.0;
  std::size_t poincare_failures = 0;
  std::size_t sup_failures = 0;
  std::size_t pinned_failures = 0;
  std::size_t derivative_failures = 0;
  /// largest |f|_2 / |f_x|_2 over pinned fields (bound 2)
  double max_poincare_ratio = 0.0;
  /// largest sup / sup_bound
  double max_sup_ratio = 0.0;
  double max_observed_constant = 0.0;
  std::optional<std::uint64_t> first_failure;

  bool holds() const {
    return poincare_failures + sup_failures + pinned_failures + derivative_failures == 0;
  }
};

InequalitySuite inequality_suite(std::size_t fields, std::size_t intervals, std::uint64_t first_seed = 0);

enum class Cond2Status { Satisfied, Violated, NotApplicable };

struct Cond2Report {
  Cond2Status status = Cond2Status::NotApplicable;
  std::optional<std::size_t> node;
  /// "P''>0", "P''/P'<2/rho" or "rho_x<rho/4" for a violation
  std::string clause;
};

std::string_view cond2_label(Cond2Status s);

/// If u_x > 0: P''(rho) > 0 everywhere. If u_x < 0: P''/P' < 2/rho and
/// rho_x < rho/4 everywhere (rho_x taken literally, not |rho_x|).
Cond2Report cond2_check(const SteadyProfile& profile, const PressureLaw& law);

struct WeightPair {
  Eigen::VectorXd phi1;
  Eigen::VectorXd phi2;
  double delta = 0.0;
  /// (1/2)(u phi1)_x - 2 u_x phi1 at the nodes, by grid differences
  Eigen::VectorXd quantity;
  bool quantity_negative = false;
  bool phi_positive = false;
  /// first node with phi1 <= 0
  std::optional<std::size_t> failure_node;
};

/// Integrates u phi1' = 3 u_x phi1 - delta u from phi1(0) = 1 by RK4 on the
/// profile grid and sets phi2 = phi1 / P'(rho). Positivity and the sign of
/// the quantity are reported, not enforced. Throws DomainError unless
/// delta > 0.
WeightPair weight_functions(const SteadyProfile& profile, const PressureLaw& law, double delta);

/// 0.1 * min u.
double default_weight_delta(const SteadyProfile& profile);

}  // namespace ns1d
