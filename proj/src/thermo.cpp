#include "ns1d/thermo.hpp"

#include <cmath>

#include "ns1d/errors.hpp"

namespace ns1d {

PressureLaw::PressureLaw(GammaLaw law) : law_(law) {
  if (!(law.kappa > 0.0) || !(law.gamma > 1.0)) {
    throw DomainError("gamma law needs kappa > 0 and gamma > 1");
  }
}

PressureLaw::PressureLaw(CustomLaw law) : law_(std::move(law)) {
  const auto& c = std::get<CustomLaw>(law_);
  if (!c.p || !c.dp || !c.d2p) throw DomainError("custom pressure law is incomplete");
}

double PressureLaw::eval(double rho, int order) const {
  if (!(rho > 0.0)) throw DomainError("pressure law evaluated at nonpositive density");
  if (order < 0 || order > 2) throw DomainError("pressure derivative order must be 0, 1 or 2");
  if (const auto* g = std::get_if<GammaLaw>(&law_)) {
    switch (order) {
      case 0:
        return g->kappa * std::pow(rho, g->gamma);
      case 1:
        return g->kappa * g->gamma * std::pow(rho, g->gamma - 1.0);
      default:
        return g->kappa * g->gamma * (g->gamma - 1.0) * std::pow(rho, g->gamma - 2.0);
    }
  }
  const auto& c = std::get<CustomLaw>(law_);
  switch (order) {
    case 0:
      return c.p(rho);
    case 1:
      return c.dp(rho);
    default:
      return c.d2p(rho);
  }
}

Eigen::ArrayXd PressureLaw::eval(const Eigen::ArrayXd& rho, int order) const {
  if (!(rho > 0.0).all()) throw DomainError("pressure law evaluated at nonpositive density");
  if (order < 0 || order > 2) throw DomainError("pressure derivative order must be 0, 1 or 2");
  if (const auto* g = std::get_if<GammaLaw>(&law_)) {
    const double e = g->gamma - order;
    double c = g->kappa;
    for (int j = 0; j < order; ++j) c *= g->gamma - j;
    return c * (e * rho.log()).exp();
  }
  return rho.unaryExpr([&](double r) { return eval(r, order); });
}

std::optional<std::size_t> PressureLaw::first_nonmonotone(std::span<const double> rho) const {
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!(dp(rho[i]) > 0.0)) return i;
  }
  return std::nullopt;
}

std::string PressureLaw::kind() const {
  if (std::holds_alternative<GammaLaw>(law_)) return "gamma";
  return std::get<CustomLaw>(law_).name;
}

}  // namespace ns1d
