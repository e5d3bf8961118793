#include "ns1d/pencil.hpp"

#include "ns1d/errors.hpp"

namespace ns1d {

PencilDeterminant::PencilDeterminant(const SteadyProfile& profile, std::size_t N)
    : N_(N), nu_(profile.params().nu), m_(profile.m()), h_(1.0 / static_cast<double>(N)) {
  if (N < 4) throw DomainError("matrix discretization needs at least 4 cells");
  const auto n = static_cast<Eigen::Index>(N);
  rho_.resize(n + 1);
  u_.resize(n + 1);
  u_x_.resize(n + 1);
  dp_.resize(n + 1);
  for (Eigen::Index i = 0; i <= n; ++i) {
    const auto s = profile.sample(std::min(1.0, static_cast<double>(i) * h_));
    rho_[i] = s.rho;
    u_[i] = m_ / s.rho;
    u_x_[i] = -m_ * s.rho_x / (s.rho * s.rho);
    dp_[i] = profile.law().dp(s.rho);
  }
}

BandMatrix<Complex> PencilDeterminant::assemble(Complex lambda) const {
  const auto n = static_cast<Eigen::Index>(N_);
  BandMatrix<Complex> a(size(), 4, 3);
  auto R = [](Eigen::Index i) { return 2 * i; };
  auto V = [](Eigen::Index i) { return 2 * i + 1; };
  const double c1 = 1.0 / (2.0 * h_);
  const double c2 = nu_ / (h_ * h_);

  a(R(0), R(0)) = 1.0;
  a(V(0), V(0)) = 1.0;
  a(V(n), V(n)) = 1.0;
  for (Eigen::Index i = 1; i < n; ++i) {
    // lambda r + (rho v + u r)_x
    a(R(i), R(i)) += lambda;
    for (const auto& [j, s] : {std::pair{i - 1, -c1}, std::pair{i + 1, c1}}) {
      a(R(i), R(j)) += s * u_[j];
      a(R(i), V(j)) += s * rho_[j];
    }
    // lambda rho v + (m v + P' r)_x + u_x (u r + rho v) - nu v_xx
    a(V(i), V(i)) += lambda * rho_[i] + u_x_[i] * rho_[i] + 2.0 * c2;
    a(V(i), R(i)) += u_x_[i] * u_[i];
    for (const auto& [j, s] : {std::pair{i - 1, -c1}, std::pair{i + 1, c1}}) {
      a(V(i), V(j)) += s * m_ - c2;
      a(V(i), R(j)) += s * dp_[j];
    }
  }
  a(R(n), R(n)) += lambda;
  for (const auto& [j, s] : {std::pair{n, 3.0 * c1}, std::pair{n - 1, -4.0 * c1}, std::pair{n - 2, c1}}) {
    a(R(n), R(j)) += s * u_[j];
    a(R(n), V(j)) += s * rho_[j];
  }
  return a;
}

EvansEvaluation PencilDeterminant::operator()(Complex lambda) const {
  BandMatrix<Complex> a = assemble(lambda);
  const auto det = band_log_determinant(a);
  EvansEvaluation out;
  out.lambda = lambda;
  out.d_scaled = det.zero_pivot ? Complex(0.0) : det.phase;
  out.log_scale = det.log_abs;
  return out;
}

}  // namespace ns1d
