#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>

namespace ns1d {

/// P(rho) = kappa * rho^gamma.
struct GammaLaw {
  double kappa = 1.0;
  double gamma = 1.4;
};

/// Arbitrary smooth law given by its value and first two derivatives.
struct CustomLaw {
  std::string name;
  std::function<double(double)> p;
  std::function<double(double)> dp;
  std::function<double(double)> d2p;
};

/// Barotropic pressure law rho -> P(rho). Immutable; evaluation is pure.
///
/// P' > 0 is required of every law but only checked on densities that are
/// actually visited (see first_nonmonotone).
class PressureLaw {
 public:
  PressureLaw() : PressureLaw(GammaLaw{}) {}
  explicit PressureLaw(GammaLaw law);
  explicit PressureLaw(CustomLaw law);

  static PressureLaw gamma_law(double kappa, double gamma) {
    return PressureLaw(GammaLaw{kappa, gamma});
  }

  /// P, P' or P'' at rho depending on order (0, 1, 2). Throws DomainError
  /// for rho <= 0 or an order outside {0,1,2}.
  double eval(double rho, int order) const;

  /// Elementwise eval over an array of densities.
  Eigen::ArrayXd eval(const Eigen::ArrayXd& rho, int order) const;

  double p(double rho) const { return eval(rho, 0); }
  double dp(double rho) const { return eval(rho, 1); }
  double d2p(double rho) const { return eval(rho, 2); }

  /// Index of the first density where P' <= 0, if any.
  std::optional<std::size_t> first_nonmonotone(std::span<const double> rho) const;

  /// "gamma" or the custom law's name.
  std::string kind() const;
  const GammaLaw* as_gamma() const { return std::get_if<GammaLaw>(&law_); }

 private:
  std::variant<GammaLaw, CustomLaw> law_;
};

}  // namespace ns1d
