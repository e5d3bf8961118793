#include "ns1d/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ns1d/diagnostics.hpp"
#include "ns1d/errors.hpp"

namespace ns1d {

namespace {

/// Solves the tridiagonal system sub_i x_{i-1} + diag_i x_i + sup_i x_{i+1} = rhs_i.
Eigen::VectorXd solve_tridiagonal(const Eigen::VectorXd& sub, Eigen::VectorXd diag, const Eigen::VectorXd& sup,
                                  Eigen::VectorXd rhs) {
  const Eigen::Index n = diag.size();
  for (Eigen::Index i = 1; i < n; ++i) {
    const double w = sub[i] / diag[i - 1];
    diag[i] -= w * sup[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (Eigen::Index i = n - 2; i >= 0; --i) rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
  return rhs;
}

std::size_t step_count(double T, double dt) {
  return static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
}

}  // namespace

GasState sample_state(const SteadyProfile& profile, std::size_t cells) {
  if (cells < 4) throw DomainError("time stepping needs at least 4 cells");
  GasState s;
  const auto n = static_cast<Eigen::Index>(cells);
  s.rho.resize(n + 1);
  s.u.resize(n + 1);
  for (Eigen::Index i = 0; i <= n; ++i) {
    const auto p = profile.sample(std::min(1.0, static_cast<double>(i) / static_cast<double>(n)));
    s.rho[i] = p.rho;
    s.u[i] = p.u;
  }
  return s;
}

Eigen::VectorXd bump(std::size_t cells, int k) {
  if (k < 1) throw DomainError("bump mode must be at least 1");
  const auto n = static_cast<Eigen::Index>(cells);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
  for (Eigen::Index i = 0; i <= n; ++i) {
    const double s = 2.0 * (static_cast<double>(i) / static_cast<double>(n) - 0.25);
    if (s <= 0.0 || s >= 1.0) continue;
    const double y = 1.0 - 2.0 * s;
    double prev = 1.0, cur = 1.0;
    for (int j = 1; j < k; ++j) {
      const double next = j == 1 ? 2.0 * y : 2.0 * y * cur - prev;
      prev = cur;
      cur = next;
    }
    b[i] = std::pow(4.0 * s * (1.0 - s), 8) * cur;
  }
  const double top = b.cwiseAbs().maxCoeff();
  if (top > 0.0) b /= top;
  return b;
}

GasState perturb(const SteadyProfile& profile, double epsilon, int k, std::size_t cells) {
  if (!(epsilon >= 0.0)) throw DomainError("perturbation amplitude must be nonnegative");
  if (epsilon > 0.1 * profile.rho().minCoeff()) {
    throw DomainError("perturbation amplitude exceeds 0.1 min rho");
  }
  GasState s = sample_state(profile, cells);
  const Eigen::VectorXd b = bump(cells, k);
  s.rho += epsilon * b;
  s.u += epsilon * b;
  return s;
}

double max_wave_speed(const GasState& state, const PressureLaw& law) {
  return (state.u.array().abs() + law.eval(state.rho.array(), 1).sqrt()).maxCoeff();
}

GasState step(const GasState& state, double dt, const PressureLaw& law, const FlowParams& params) {
  const auto n = static_cast<Eigen::Index>(state.cells());
  const double h = state.h();
  if (!(dt > 0.0) || dt > h / max_wave_speed(state, law)) {
    throw DomainError("time step violates the CFL limit");
  }
  const Eigen::VectorXd& rho = state.rho;
  const Eigen::VectorXd& u = state.u;

  GasState next;
  next.t = state.t + dt;

  // mass: upwind flux at the cell faces
  Eigen::VectorXd flux(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = 0.5 * (u[i] + u[i + 1]);
    flux[i] = a * (a > 0.0 ? rho[i] : rho[i + 1]);
  }
  next.rho.resize(n + 1);
  next.rho[0] = params.rho0;
  next.rho.segment(1, n - 1) = rho.segment(1, n - 1) - (dt / h) * (flux.tail(n - 1) - flux.head(n - 1));
  next.rho[n] = u[n] >= 0.0 ? next.rho[n - 1] : rho[n];
  for (Eigen::Index i = 0; i <= n; ++i) {
    if (!(next.rho[i] > 0.0) || !std::isfinite(next.rho[i])) {
      std::ostringstream os;
      os << "density lost positivity at x = " << static_cast<double>(i) * h << ", t = " << next.t;
      throw NumericalFailure(os.str(), -1);
    }
  }

  // momentum: explicit convection and pressure
  const Eigen::ArrayXd p = law.eval(rho.array(), 0);
  Eigen::VectorXd star(n + 1);
  star[0] = params.u0;
  star[n] = params.u1;
  for (Eigen::Index i = 1; i < n; ++i) {
    const double ux = u[i] > 0.0 ? (u[i] - u[i - 1]) / h : (u[i + 1] - u[i]) / h;
    const double px = (p[i + 1] - p[i - 1]) / (2.0 * h);
    star[i] = u[i] - dt * (u[i] * ux + px / rho[i]);
  }

  // viscosity: solve for the correction w, (1 - dt nu/rho D2) w = dt nu/rho D2 star, w = 0 at both ends
  const Eigen::Index m = n - 1;
  Eigen::VectorXd sub(m), diag(m), sup(m), rhs(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const Eigen::Index i = j + 1;
    const double a = dt * params.nu / (next.rho[i] * h * h);
    sub[j] = -a;
    diag[j] = 1.0 + 2.0 * a;
    sup[j] = -a;
    rhs[j] = a * (star[i + 1] - 2.0 * star[i] + star[i - 1]);
  }
  next.u = star;
  next.u.segment(1, m) += solve_tridiagonal(sub, diag, sup, rhs);
  if (!next.u.allFinite()) throw NumericalFailure("velocity is not finite", -1);
  return next;
}

NormSample perturbation_norms(const GasState& state, const GasState& reference) {
  const DiscreteField r{state.rho - reference.rho};
  const DiscreteField v{state.u - reference.u};
  NormSample s;
  s.t = state.t;
  s.l2 = std::hypot(norm(r, 0), norm(v, 0));
  s.h1 = std::hypot(norm(r, 1), norm(v, 1));
  s.h2h3 = std::hypot(norm(r, 2), norm(v, 3));
  return s;
}

NormHistory evolve(const GasState& initial, const SteadyProfile& profile, double T, double dt,
                   std::size_t stride) {
  if (!(T > 0.0) || !(dt > 0.0)) throw DomainError("evolve needs T > 0 and dt > 0");
  stride = std::max<std::size_t>(stride, 1);
  const GasState reference = sample_state(profile, initial.cells());
  const FlowParams& params = profile.params();
  const std::size_t steps = step_count(T, dt);
  const double k = T / static_cast<double>(steps);

  NormHistory out;
  GasState s = initial;
  out.push_back(perturbation_norms(s, reference));
  for (std::size_t j = 1; j <= steps; ++j) {
    try {
      s = step(s, k, profile.law(), params);
    } catch (const NumericalFailure& e) {
      throw NumericalFailure(e.what(), static_cast<long>(j));
    }
    s.t = static_cast<double>(j) * k;
    if (j % stride == 0 || j == steps) out.push_back(perturbation_norms(s, reference));
  }
  return out;
}

double run_dt(const SteadyProfile& profile, const PerturbationRun& run) {
  if (run.dt > 0.0) return run.dt;
  const GasState base = sample_state(profile, run.cells);
  return run.cfl * base.h() / max_wave_speed(base, profile.law());
}

std::size_t run_stride(const PerturbationRun& run, double dt) {
  if (run.stride > 0) return run.stride;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(0.02 / dt)));
}

std::vector<NormHistory> perturbation_histories(const SteadyProfile& profile, const PerturbationRun& run,
                                                const std::vector<double>& epsilons) {
  if (!(run.T > 0.0)) throw DomainError("evolve needs T > 0");
  const double dt = run_dt(profile, run);
  const std::size_t stride = run_stride(run, dt);
  const std::size_t steps = step_count(run.T, dt);
  const double k = run.T / static_cast<double>(steps);
  const FlowParams& params = profile.params();

  std::vector<GasState> runs;
  for (const double eps : epsilons) runs.push_back(perturb(profile, eps, run.mode, run.cells));
  GasState b = sample_state(profile, run.cells);
  std::vector<NormHistory> out(runs.size());
  for (std::size_t r = 0; r < runs.size(); ++r) out[r].push_back(perturbation_norms(runs[r], b));
  for (std::size_t j = 1; j <= steps; ++j) {
    try {
      for (auto& a : runs) a = step(a, k, profile.law(), params);
      b = step(b, k, profile.law(), params);
    } catch (const NumericalFailure& e) {
      throw NumericalFailure(e.what(), static_cast<long>(j));
    }
    b.t = static_cast<double>(j) * k;
    for (auto& a : runs) a.t = b.t;
    if (j % stride == 0 || j == steps) {
      for (std::size_t r = 0; r < runs.size(); ++r) out[r].push_back(perturbation_norms(runs[r], b));
    }
  }
  return out;
}

NormHistory perturbation_history(const SteadyProfile& profile, const PerturbationRun& run) {
  return perturbation_histories(profile, run, {run.epsilon}).front();
}

std::optional<double> monotone_from(const NormHistory& history) {
  if (history.empty()) return std::nullopt;
  std::size_t i = history.size() - 1;
  while (i > 0 && history[i - 1].l2 >= history[i].l2) --i;
  return history[i].t;
}

DecayFit fit_decay(const NormHistory& history, double tail_fraction, double floor) {
  if (history.empty()) throw DomainError("empty norm history");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw DomainError("tail fraction must lie in (0, 1]");
  const double t_last = history.back().t;
  const double t_start = t_last - tail_fraction * (t_last - history.front().t);
  std::vector<const NormSample*> window;
  for (const auto& s : history) {
    if (s.t >= t_start) window.push_back(&s);
  }
  if (window.size() < 10) throw DomainError("fewer than 10 samples in the fit window");
  const auto cut = std::find_if(window.begin(), window.end(), [&](const NormSample* s) { return !(s->l2 > floor); });
  if (cut != window.end()) {
    window.erase(cut, window.end());
    if (window.size() < 10) throw DecayedBelowFloor("perturbation decayed below the floor inside the fit window");
  }

  const auto n = static_cast<double>(window.size());
  double tm = 0.0, ym = 0.0;
  for (const auto* s : window) {
    tm += s->t;
    ym += std::log(s->l2);
  }
  tm /= n;
  ym /= n;
  double stt = 0.0, sty = 0.0;
  for (const auto* s : window) {
    stt += (s->t - tm) * (s->t - tm);
    sty += (s->t - tm) * (std::log(s->l2) - ym);
  }
  const double slope = sty / stt;
  const double intercept = ym - slope * tm;
  double ss = 0.0;
  for (const auto* s : window) ss += std::pow(std::log(s->l2) - (intercept + slope * s->t), 2);

  DecayFit fit;
  fit.theta = -slope;
  fit.c = std::exp(intercept);
  fit.t_begin = window.front()->t;
  fit.t_end = window.back()->t;
  fit.samples = window.size();
  fit.residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace ns1d
