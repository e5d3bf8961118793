#include "ns1d/steady.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ns1d/errors.hpp"

namespace ns1d {

namespace {

constexpr double kFloorFactor = 1e-8;
constexpr double kCeilingFactor = 1e8;
constexpr std::size_t kMaxIntervals = std::size_t{1} << 21;

/// nu m rho' = rho (rho (b - P(rho)) - m^2). Returns NaN outside rho > 0.
struct DensityRhs {
  double b, m, nu;
  const PressureLaw* law;

  double operator()(double rho) const {
    if (!(rho > 0.0) || !std::isfinite(rho)) return std::numeric_limits<double>::quiet_NaN();
    return rho * (rho * (b - law->p(rho)) - m * m) / (nu * m);
  }
};

/// Shooting residual with blow-ups mapped onto the sign they imply.
struct ShotValue {
  double value = 0.0;
  int blown = 0;  // 0: finite value; +1 / -1: outside the domain on that side

  int sign() const {
    if (blown != 0) return blown;
    return (value > 0.0) - (value < 0.0);
  }
};

struct RootSearch {
  double b = 0.0;
  ShotValue at_b;
  bool converged = false;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

/// RK4 on a uniform grid; leaving (floor, ceiling) stops the run and is reported as a blow-up.
DensityIntegration integrate_between(double b, const FlowParams& p, const PressureLaw& law,
                                     std::size_t intervals, ShootingDirection direction,
                                     double floor, double ceiling) {
  const auto n = static_cast<Eigen::Index>(intervals);
  const DensityRhs rhs{b, p.momentum(), p.nu, &law};
  const bool forward = direction == ShootingDirection::Forward;
  const double h = (forward ? 1.0 : -1.0) / static_cast<double>(intervals);

  DensityIntegration out;
  out.rho = Eigen::VectorXd::Constant(n + 1, std::numeric_limits<double>::quiet_NaN());
  Eigen::Index i = forward ? 0 : n;
  out.rho[i] = forward ? p.rho0 : p.outflow_density();
  double y = out.rho[i];
  for (Eigen::Index k = 0; k < n; ++k) {
    // Stage densities outside (0, ceiling) count as blow-up on that side.
    bool below = false;
    bool above = false;
    auto stage = [&](double s) {
      if (!(s > 0.0)) below = true;
      if (!std::isfinite(s) || s >= ceiling) above = true;
      return rhs(s);
    };
    const double k1 = stage(y);
    const double k2 = stage(y + 0.5 * h * k1);
    const double k3 = stage(y + 0.5 * h * k2);
    const double k4 = stage(y + h * k3);
    const double next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const Eigen::Index j = forward ? i + 1 : i - 1;
    if (!below && !above) {
      if (!std::isfinite(next)) above = true;
      else if (next <= floor) below = true;
      else if (next >= ceiling) above = true;
    }
    if (below || above) {
      out.blowup = BlowUp{static_cast<std::size_t>(j), static_cast<double>(j) / static_cast<double>(n),
                          std::isfinite(next) ? next : y, above && !below};
      return out;
    }
    out.rho[j] = next;
    y = next;
    i = j;
  }
  return out;
}

ShotValue shoot(double b, const FlowParams& p, const PressureLaw& law, std::size_t n,
                ShootingDirection dir) {
  // Exact trajectories are monotone, so leaving the band between the two end densities
  // already fixes the sign of the residual.
  const double lo = std::min(p.rho0, p.outflow_density());
  const double hi = std::max(p.rho0, p.outflow_density());
  const double margin = 0.01 * (hi - lo);
  const auto run = integrate_between(b, p, law, n, dir, std::max(kFloorFactor * p.rho0, lo - margin),
                                     hi + margin);
  if (dir == ShootingDirection::Forward) {
    if (run.blowup) return {0.0, run.blowup->above ? 1 : -1};
    return {run.rho[static_cast<Eigen::Index>(n)] - p.outflow_density(), 0};
  }
  // rho0 - rho(0) is increasing in b for the backward problem.
  if (run.blowup) return {0.0, run.blowup->above ? -1 : 1};
  return {p.rho0 - run.rho[0], 0};
}

/// Safeguarded Newton / bisection for an increasing residual.
template <typename F>
RootSearch find_root(const F& f, double b_start, double tol, bool prime_with_bisection,
                     int max_iterations) {
  RootSearch rs;
  rs.b = b_start;
  rs.at_b = f(b_start);
  auto update_bracket = [&rs](double b, const ShotValue& v) {
    if (v.sign() > 0) rs.hi = std::min(rs.hi, b);
    if (v.sign() < 0) rs.lo = std::max(rs.lo, b);
  };
  auto done = [&](const ShotValue& v) { return v.blown == 0 && std::abs(v.value) <= tol; };
  if (done(rs.at_b)) {
    rs.converged = true;
    return rs;
  }
  update_bracket(rs.b, rs.at_b);

  double expand = 1e-3 * std::max(1.0, std::abs(b_start));
  bool newton = !prime_with_bisection;
  int stalls = 0;
  for (int it = 0; it < max_iterations; ++it) {
    const bool bracketed = std::isfinite(rs.lo) && std::isfinite(rs.hi);
    if (bracketed && !newton && rs.hi - rs.lo <= 1e-3 * std::max(1.0, std::abs(rs.b))) {
      newton = true;
    }
    double next = std::numeric_limits<double>::quiet_NaN();
    if (newton && rs.at_b.blown == 0) {
      const double db = 1e-7 * std::max(1.0, std::abs(rs.b));
      const ShotValue shifted = f(rs.b + db);
      update_bracket(rs.b + db, shifted);
      if (shifted.blown == 0) {
        const double slope = (shifted.value - rs.at_b.value) / db;
        if (slope > 0.0) next = rs.b - rs.at_b.value / slope;
      }
      if (!(next > rs.lo && next < rs.hi)) next = std::numeric_limits<double>::quiet_NaN();
    }
    if (!std::isfinite(next)) {
      if (bracketed) {
        next = 0.5 * (rs.lo + rs.hi);
      } else if (std::isfinite(rs.hi)) {
        next = rs.hi - expand;
        expand *= 2.0;
      } else {
        next = rs.lo + expand;
        expand *= 2.0;
      }
    }
    const ShotValue v = f(next);
    update_bracket(next, v);
    const double previous = rs.at_b.blown == 0 ? std::abs(rs.at_b.value)
                                               : std::numeric_limits<double>::infinity();
    rs.b = next;
    rs.at_b = v;
    if (done(v)) {
      rs.converged = true;
      return rs;
    }
    if (newton && !(v.blown == 0 && std::abs(v.value) < 0.5 * previous)) {
      if (++stalls >= 2) {
        newton = false;
        stalls = 0;
      }
    }
    if (std::isfinite(rs.lo) && std::isfinite(rs.hi)) {
      const double scale = std::max(std::abs(rs.lo), std::abs(rs.hi));
      if (rs.hi - rs.lo <= 4.0 * std::numeric_limits<double>::epsilon() * scale) return rs;
    }
  }
  return rs;
}

std::size_t pow2_ceil(double value) {
  const double clamped = std::min(static_cast<double>(kMaxIntervals), std::max(2.0, value));
  return std::bit_ceil(static_cast<std::size_t>(std::ceil(clamped)));
}

/// Bound on the Jacobian of the density ODE over the density range, taken at b0.
double stiffness_rate(const FlowParams& p, const PressureLaw& law) {
  const double m = p.momentum();
  const double lo = std::min(p.rho0, p.outflow_density());
  const double hi = std::max(p.rho0, p.outflow_density());
  const DensityRhs rhs{p.base_flux(law), m, p.nu, &law};
  double rate = 0.0;
  constexpr int kSamples = 64;
  for (int j = 0; j <= kSamples; ++j) {
    const double rho = lo * std::pow(hi / lo, static_cast<double>(j) / kSamples);
    const double u = m / rho;
    const double rest = std::abs(rho * (u * u - law.dp(rho)) / (p.nu * u));
    rate = std::max(rate, rest + 2.0 * std::abs(rhs(rho)) / rho);
  }
  return rate + 2.0 * std::log(hi / lo);
}

SteadyProfile build_profile(const FlowParams& p, const PressureLaw& law, double b,
                            Eigen::VectorXd rho, ShootingDirection dir) {
  const double m = p.momentum();
  const DensityRhs rhs{b, m, p.nu, &law};
  const Eigen::Index n = rho.size() - 1;
  if (dir == ShootingDirection::Backward) rho[0] = p.rho0;
  rho[n] = dir == ShootingDirection::Forward ? rho[n] : p.outflow_density();
  const double expected = p.u1 < p.u0 ? 1.0 : (p.u1 > p.u0 ? -1.0 : 0.0);
  Eigen::VectorXd u(n + 1), rho_x(n + 1), u_x(n + 1);
  for (Eigen::Index i = 0; i <= n; ++i) {
    u[i] = m / rho[i];
    double d = rhs(rho[i]);
    // Near a rest state the right-hand side is pure rounding noise.
    if (expected * d < 0.0) d = 0.0;
    rho_x[i] = d;
    u_x[i] = -m * d / (rho[i] * rho[i]);
  }
  return SteadyProfile(p, law, b, std::move(rho), std::move(u), std::move(rho_x), std::move(u_x),
                       dir);
}

}  // namespace

void FlowParams::validate() const {
  if (!(nu > 0.0) || !(rho0 > 0.0) || !(u0 > 0.0) || !(u1 > 0.0) || !std::isfinite(nu) ||
      !std::isfinite(rho0) || !std::isfinite(u0) || !std::isfinite(u1)) {
    throw DomainError("flow parameters nu, rho0, u0, u1 must be finite and positive");
  }
}

double FlowParams::base_flux(const PressureLaw& law) const { return rho0 * u0 * u0 + law.p(rho0); }

NormalizedBc normalize_bc(const RawBoundaryData& raw) {
  if (raw.u_left == 0.0 || raw.u_right == 0.0) {
    throw UnsupportedBoundary("characteristic boundary: zero velocity admits only trivial states");
  }
  if ((raw.u_left > 0.0) != (raw.u_right > 0.0)) {
    throw UnsupportedBoundary("boundary velocities of opposite sign admit no steady state");
  }
  const bool rightward = raw.u_left > 0.0;
  const bool density_left = raw.density_side == RawBoundaryData::DensitySide::Left;
  if (rightward != density_left) {
    throw UnsupportedBoundary("density must be prescribed at the inflow boundary");
  }
  NormalizedBc out;
  if (rightward) {
    out.params = FlowParams{raw.nu, raw.rho, raw.u_left, raw.u_right};
  } else {
    out.params = FlowParams{raw.nu, raw.rho, -raw.u_right, -raw.u_left};
    out.orientation = Orientation::Reflected;
  }
  out.params.validate();
  return out;
}

DensityIntegration integrate_density_ode(double b, const FlowParams& p, const PressureLaw& law,
                                         std::size_t intervals, ShootingDirection direction) {
  p.validate();
  if (intervals < 2) throw DomainError("density integration needs at least 2 intervals");
  return integrate_between(b, p, law, intervals, direction, kFloorFactor * p.rho0,
                           kCeilingFactor * p.rho0);
}

OutsideDomain::OutsideDomain(double b, BlowUp where)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "b = " << b << " outside domain of phi: density left admissible range at x = "
           << where.x;
        return os.str();
      }()),
      b(b),
      where(where) {}

double phi(double b, const FlowParams& p, const PressureLaw& law, std::size_t intervals) {
  const auto run = integrate_density_ode(b, p, law, intervals, ShootingDirection::Forward);
  if (run.blowup) throw OutsideDomain(b, *run.blowup);
  return run.rho[static_cast<Eigen::Index>(intervals)] - p.outflow_density();
}

std::size_t resolved_intervals(const FlowParams& p, const PressureLaw& law, std::size_t requested) {
  p.validate();
  const std::size_t needed = pow2_ceil(64.0 * stiffness_rate(p, law));
  return std::max(requested, needed);
}

SteadyProfile::SteadyProfile(FlowParams params, PressureLaw law, double b, Eigen::VectorXd rho,
                             Eigen::VectorXd u, Eigen::VectorXd rho_x, Eigen::VectorXd u_x,
                             ShootingDirection shooting)
    : params_(params),
      law_(std::move(law)),
      b_(b),
      rho_(std::move(rho)),
      u_(std::move(u)),
      rho_x_(std::move(rho_x)),
      u_x_(std::move(u_x)),
      shooting_(shooting) {
  params_.validate();
  const auto n = rho_.size();
  if (n < 3 || u_.size() != n || rho_x_.size() != n || u_x_.size() != n) {
    throw DomainError("steady profile arrays must share a length of at least 3");
  }
  if (!rho_.allFinite() || !u_.allFinite() || !rho_x_.allFinite() || !u_x_.allFinite()) {
    throw DomainError("steady profile contains non-finite values");
  }
  if ((rho_.array() <= 0.0).any() || (u_.array() <= 0.0).any()) {
    throw DomainError("steady profile must have positive density and velocity");
  }
}

SteadyProfile::Sample SteadyProfile::sample(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("profile sampled outside [0,1]");
  const auto n = static_cast<Eigen::Index>(intervals());
  const double s = x * static_cast<double>(n);
  const double nearest = std::round(s);
  if (std::abs(s - nearest) <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, s)) {
    const auto i = static_cast<Eigen::Index>(nearest);
    return {rho_[i], u_[i], rho_x_[i], u_x_[i]};
  }
  const Eigen::Index i = std::min<Eigen::Index>(static_cast<Eigen::Index>(s), n - 1);
  const double t = s - static_cast<double>(i);
  const double hh = h();
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  const double d00 = (6.0 * t2 - 6.0 * t) / hh;
  const double d10 = 3.0 * t2 - 4.0 * t + 1.0;
  const double d01 = -d00;
  const double d11 = 3.0 * t2 - 2.0 * t;
  auto value = [&](const Eigen::VectorXd& y, const Eigen::VectorXd& dy) {
    return h00 * y[i] + h10 * hh * dy[i] + h01 * y[i + 1] + h11 * hh * dy[i + 1];
  };
  auto slope = [&](const Eigen::VectorXd& y, const Eigen::VectorXd& dy) {
    return d00 * y[i] + d10 * dy[i] + d01 * y[i + 1] + d11 * dy[i + 1];
  };
  return {value(rho_, rho_x_), value(u_, u_x_), slope(rho_, rho_x_), slope(u_, u_x_)};
}

SteadyProfile solve_steady(const FlowParams& p, const PressureLaw& law,
                           const SteadyOptions& options) {
  p.validate();
  if (options.intervals < 2) throw DomainError("steady solve needs at least 2 intervals");
  {
    const double ends[] = {p.rho0, p.outflow_density()};
    if (law.first_nonmonotone(ends)) throw DomainError("pressure law has P' <= 0 on the profile range");
  }
  const std::size_t fine =
      options.auto_resolve ? resolved_intervals(p, law, options.intervals) : options.intervals;
  const double b0 = p.base_flux(law);

  if (p.u0 == p.u1) {
    const auto n = static_cast<Eigen::Index>(fine);
    return SteadyProfile(p, law, b0, Eigen::VectorXd::Constant(n + 1, p.rho0),
                         Eigen::VectorXd::Constant(n + 1, p.u0), Eigen::VectorXd::Zero(n + 1),
                         Eigen::VectorXd::Zero(n + 1));
  }

  const std::size_t coarse =
      std::min(fine, std::max<std::size_t>(64, pow2_ceil(2.0 * stiffness_rate(p, law))));
  const bool prime = p.nu <= 1.0;
  RootSearch last;
  for (const auto dir : {ShootingDirection::Forward, ShootingDirection::Backward}) {
    auto on = [&](std::size_t n) {
      return [&, n](double b) { return shoot(b, p, law, n, dir); };
    };
    double start = b0;
    if (coarse < fine) {
      const RootSearch rough = find_root(on(coarse), b0, options.tol_bc, prime, options.max_iterations);
      last = rough;
      if (!rough.converged) continue;
      start = rough.b;
    }
    const RootSearch rs =
        find_root(on(fine), start, options.tol_bc, prime && coarse == fine, options.max_iterations);
    last = rs;
    if (!rs.converged) continue;
    auto run = integrate_density_ode(rs.b, p, law, fine, dir);
    return build_profile(p, law, rs.b, std::move(run.rho), dir);
  }
  throw NonConvergence("steady solve did not reach tol_bc in either shooting direction", last.lo,
                       last.hi);
}

Slope classify(const SteadyProfile& profile, double tol_flux) {
  const Eigen::VectorXd& ux = profile.u_x();
  if (ux.cwiseAbs().maxCoeff() <= tol_flux) return Slope::Constant;
  bool pos = false;
  bool neg = false;
  for (Eigen::Index i = 0; i < ux.size(); ++i) {
    if (ux[i] > tol_flux) pos = true;
    if (ux[i] < -tol_flux) neg = true;
  }
  if (pos && neg) throw std::logic_error("u_x changes sign across the steady profile");
  return pos ? Slope::PositiveSlope : Slope::NegativeSlope;
}

std::string_view slope_label(Slope slope) {
  switch (slope) {
    case Slope::Constant:
      return "constant";
    case Slope::PositiveSlope:
      return "compressive";
    case Slope::NegativeSlope:
      return "expansive";
  }
  return "unknown";
}

}  // namespace ns1d
