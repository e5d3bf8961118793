#pragma once

namespace ns1d {

/// One classical fourth-order Runge-Kutta step of y' = f(x, y).
///
/// State is any value type with vector-space operators (double,
/// std::complex, fixed or dynamic Eigen vectors).
template <typename State, typename Rhs>
State rk4_step(const Rhs& f, double x, const State& y, double h) {
  const State k1 = f(x, y);
  const State y2 = y + (0.5 * h) * k1;
  const State k2 = f(x + 0.5 * h, y2);
  const State y3 = y + (0.5 * h) * k2;
  const State k3 = f(x + 0.5 * h, y3);
  const State y4 = y + h * k3;
  const State k4 = f(x + h, y4);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace ns1d
