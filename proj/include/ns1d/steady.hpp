#pragma once

#include <Eigen/Core>
#include <optional>
#include <string_view>

#include "ns1d/thermo.hpp"

namespace ns1d {

/// Viscosity and inflow/outflow data of the canonical problem
/// rho(0) = rho0, u(0) = u0, u(1) = u1, all positive.
struct FlowParams {
  double nu = 1.0;
  double rho0 = 1.0;
  double u0 = 1.0;
  double u1 = 1.0;

  /// Throws DomainError unless all four values are strictly positive.
  void validate() const;
  double momentum() const { return rho0 * u0; }
  double outflow_density() const { return rho0 * u0 / u1; }
  /// rho0 u0^2 + P(rho0): the flux constant of the constant state.
  double base_flux(const PressureLaw& law) const;
};

enum class Orientation { Canonical, Reflected };

/// Boundary data as posed, before the x -> 1-x normalization.
struct RawBoundaryData {
  enum class DensitySide { Left, Right };
  DensitySide density_side = DensitySide::Left;
  double rho = 1.0;
  double u_left = 1.0;
  double u_right = 1.0;
  double nu = 1.0;
};

struct NormalizedBc {
  FlowParams params;
  Orientation orientation = Orientation::Canonical;
};

/// Maps the two admissible noncharacteristic configurations onto the
/// canonical one. Throws UnsupportedBoundary for mixed or zero velocities,
/// or when the density is prescribed at the outflow end.
NormalizedBc normalize_bc(const RawBoundaryData& raw);

enum class ShootingDirection { Forward, Backward };

/// Where and how the density ODE left its admissible range.
struct BlowUp {
  std::size_t node = 0;
  double x = 0.0;
  double rho = 0.0;
  bool above = false;  ///< true: exceeded the ceiling; false: fell below the floor
};

struct DensityIntegration {
  Eigen::VectorXd rho;  ///< node values, valid up to the failure node
  std::optional<BlowUp> blowup;
};

/// RK4 for nu m rho' = b rho^2 - m^2 rho - rho^2 P(rho) on a uniform grid of
/// `intervals` cells. Forward starts from rho(0) = rho0, Backward from
/// rho(1) = m/u1. Leaving [1e-8 rho0, 1e8 rho0] stops the integration.
DensityIntegration integrate_density_ode(double b, const FlowParams& params, const PressureLaw& law,
                                         std::size_t intervals,
                                         ShootingDirection direction = ShootingDirection::Forward);

/// Thrown by phi() when b lies outside its domain.
class OutsideDomain : public std::runtime_error {
 public:
  OutsideDomain(double b, BlowUp where);
  double b;
  BlowUp where;
};

/// rho(1) - rho0 u0 / u1 for the forward solution with flux constant b.
double phi(double b, const FlowParams& params, const PressureLaw& law, std::size_t intervals);

struct SteadyOptions {
  std::size_t intervals = 2048;
  double tol_bc = 1e-10;
  double tol_flux = 1e-8;
  /// Raise `intervals` so that the stiffest linearized rate is resolved.
  bool auto_resolve = true;
  int max_iterations = 400;
};

/// Grid size actually used for the given request (power of two, at least
/// `requested`, resolving the profile's internal layers).
std::size_t resolved_intervals(const FlowParams& params, const PressureLaw& law,
                               std::size_t requested);

/// Discrete steady solution on a uniform grid of intervals()+1 nodes.
/// Immutable after construction.
class SteadyProfile {
 public:
  struct Sample {
    double rho;
    double u;
    double rho_x;
    double u_x;
  };

  /// Validates shapes, positivity and the uniform grid.
  SteadyProfile(FlowParams params, PressureLaw law, double b, Eigen::VectorXd rho,
                Eigen::VectorXd u, Eigen::VectorXd rho_x, Eigen::VectorXd u_x,
                ShootingDirection shooting = ShootingDirection::Forward);

  const FlowParams& params() const { return params_; }
  const PressureLaw& law() const { return law_; }
  double b() const { return b_; }
  double m() const { return params_.momentum(); }
  ShootingDirection shooting() const { return shooting_; }

  std::size_t intervals() const { return static_cast<std::size_t>(rho_.size()) - 1; }
  double h() const { return 1.0 / static_cast<double>(intervals()); }
  double x(std::size_t i) const { return static_cast<double>(i) * h(); }

  const Eigen::VectorXd& rho() const { return rho_; }
  const Eigen::VectorXd& u() const { return u_; }
  const Eigen::VectorXd& rho_x() const { return rho_x_; }
  const Eigen::VectorXd& u_x() const { return u_x_; }

  /// Cubic Hermite interpolation on [0,1]; exact at nodes.
  Sample sample(double x) const;

 private:
  FlowParams params_;
  PressureLaw law_;
  double b_;
  Eigen::VectorXd rho_, u_, rho_x_, u_x_;
  ShootingDirection shooting_;
};

/// Solves for the flux constant b and returns the steady profile.
///
/// Newton on phi with a finite-difference derivative, started from the
/// constant-state flux constant and safeguarded by bisection on a bracket
/// found by geometric expansion. For nu <= 1 a bisection phase always runs
/// first. If forward shooting cannot meet tol_bc in double precision
/// (the solution lingers near the inflow state), the same procedure is
/// applied to backward shooting from x = 1.
SteadyProfile solve_steady(const FlowParams& params, const PressureLaw& law,
                           const SteadyOptions& options = {});

enum class Slope { Constant, PositiveSlope, NegativeSlope };

/// Sign class of u_x. Nodes with |u_x| <= tol_flux carry no sign; mixed
/// signs elsewhere throw std::logic_error.
Slope classify(const SteadyProfile& profile, double tol_flux = 1e-8);

/// "constant", "compressive" (u_x > 0) or "expansive" (u_x < 0).
std::string_view slope_label(Slope slope);

}  // namespace ns1d
