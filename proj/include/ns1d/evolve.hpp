#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ns1d/steady.hpp"

namespace ns1d {

/// Density and velocity on x_i = i / cells(), i = 0..cells().
struct GasState {
  Eigen::VectorXd rho;
  Eigen::VectorXd u;
  double t = 0.0;

  std::size_t cells() const { return static_cast<std::size_t>(rho.size()) - 1; }
  double h() const { return 1.0 / static_cast<double>(cells()); }
};

/// The steady profile interpolated onto a grid of `cells` cells.
GasState sample_state(const SteadyProfile& profile, std::size_t cells);

/// Smooth bump supported in [0.25, 0.75]: (4s(1-s))^8 U_{k-1}(1-2s) with
/// s = 2(x - 1/4), scaled to unit maximum on the grid. k = 1 is a single
/// positive hump, each further k adds a sign change.
Eigen::VectorXd bump(std::size_t cells, int k);

/// Steady state plus epsilon * bump_k in both density and velocity.
/// Throws DomainError for epsilon < 0, epsilon > 0.1 min rho, or k < 1.
GasState perturb(const SteadyProfile& profile, double epsilon, int k, std::size_t cells = 1024);

/// Largest |u| + sqrt(P'(rho)) over the grid.
double max_wave_speed(const GasState& state, const PressureLaw& law);

/// One step of the semi-implicit scheme: upwind mass flux, upwind
/// convection with a centred pressure gradient, backward-Euler viscosity.
/// Boundary values are imposed afterwards and rho at x = 1 is copied from
/// its upwind neighbour. Throws DomainError if dt exceeds h / max wave
/// speed, NumericalFailure if the density loses positivity.
GasState step(const GasState& state, double dt, const PressureLaw& law, const FlowParams& params);

struct NormSample {
  double t = 0.0;
  double l2 = 0.0;
  double h1 = 0.0;
  /// sqrt(|r|_{H^2}^2 + |v|_{H^3}^2)
  double h2h3 = 0.0;
};

using NormHistory = std::vector<NormSample>;

/// Norms of (rho - rho_ref, u - u_ref).
NormSample perturbation_norms(const GasState& state, const GasState& reference);

/// Steps `initial` to time T and records norms against the steady profile
/// every `stride` steps (and at t = 0 and T). The step count is
/// ceil(T / dt); steps are shortened evenly so the run ends exactly at T.
NormHistory evolve(const GasState& initial, const SteadyProfile& profile, double T, double dt,
                   std::size_t stride);

struct PerturbationRun {
  std::size_t cells = 1024;
  double epsilon = 0.01;
  int mode = 1;
  double T = 20.0;
  /// 0: cfl * h / max wave speed of the steady state
  double dt = 0.0;
  double cfl = 0.25;
  /// 0: about every 0.02 time units
  std::size_t stride = 0;
};

/// Resolved time step and stride for a run.
double run_dt(const SteadyProfile& profile, const PerturbationRun& run);
std::size_t run_stride(const PerturbationRun& run, double dt);

/// Norm history of the perturbed run measured against the unperturbed run
/// on the same grid and time step, so the O(h) distance between the
/// discrete and continuous steady states drops out.
NormHistory perturbation_history(const SteadyProfile& profile, const PerturbationRun& run);

/// perturbation_history for several amplitudes sharing one baseline run.
std::vector<NormHistory> perturbation_histories(const SteadyProfile& profile, const PerturbationRun& run,
                                                const std::vector<double>& epsilons);

/// Start of the final stretch over which the L2 norm never increases.
std::optional<double> monotone_from(const NormHistory& history);

struct DecayFit {
  double theta = 0.0;
  double c = 0.0;
  double t_begin = 0.0;
  double t_end = 0.0;
  std::size_t samples = 0;
  /// RMS misfit of log(l2)
  double residual = 0.0;
};

/// Thrown when fewer than 10 samples of the tail window lie above the floor.
class DecayedBelowFloor : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Least squares of log l2 against t over the last `tail_fraction` of the
/// time span, theta = -slope. Samples at or below `floor` end the window
/// early. Throws DomainError for fewer than 10 samples in the window.
DecayFit fit_decay(const NormHistory& history, double tail_fraction = 0.5, double floor = 0.0);

}  // namespace ns1d
