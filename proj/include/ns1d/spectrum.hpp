#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ns1d/contour.hpp"
#include "ns1d/evans.hpp"
#include "ns1d/pencil.hpp"

namespace ns1d {

/// Evans function with coefficient tables cached per step count. Not
/// thread-safe; use one per worker.
class EvansEvaluator {
 public:
  explicit EvansEvaluator(const SteadyProfile& profile, double steps_per_unit = 8.0);

  EvansEvaluation operator()(Complex lambda);
  ScaledFunction function() {
    return [this](Complex lambda) { return (*this)(lambda); };
  }

 private:
  const SteadyProfile& profile_;
  EvansStepRule rule_;
  double steps_per_unit_;
  std::map<std::size_t, std::unique_ptr<EvansSystem>> systems_;
};

enum class Verdict { SpectrallyStable, NonstableEigenvalues, Inconclusive };

std::string_view verdict_label(Verdict v);

struct SpectrumOptions {
  WindingOptions winding;
  double steps_per_unit = 8.0;
};

struct SpectrumReport {
  Contour contour;
  int winding = 0;
  double min_abs_on_contour = 0.0;
  std::vector<Root> roots;
  Verdict verdict = Verdict::Inconclusive;
  int nonstable_count = 0;
  std::string note;
  std::size_t nodes = 0;
  WindingResult detail;
};

/// Winding of the Evans function along the contour. Odd windings are
/// reported as Inconclusive (the stability index forces an even count).
SpectrumReport winding_number(const SteadyProfile& profile, const Contour& contour,
                              const SpectrumOptions& options = {});

/// Zeros of the Evans function inside the box.
LocateResult locate_roots(const SteadyProfile& profile, const Box& box,
                          const LocateOptions& options = {}, double steps_per_unit = 8.0);

/// det(lambda S_h - L_h), with an exact zero pivot retried once at a node
/// moved 1e-10 * scale along the contour tangent.
ScaledFunction pencil_function(const PencilDeterminant& det, double scale);

/// Winding of det(lambda S_h - L_h) along the contour, refined by the same rule
/// as winding_number.
WindingResult matrix_winding_oracle(const SteadyProfile& profile, const Contour& contour,
                                    std::size_t N, const WindingOptions& options = {});

struct AbscissaOptions {
  double M = 10.0;
  double delta_start = 0.05;
  double delta_max = 5.0;
  /// Bisection steps on delta before locating; each halves the strip width.
  int bisections = 0;
  std::size_t contour_nodes = 256;
  LocateOptions locate;
  double steps_per_unit = 8.0;
};

struct Abscissa {
  /// max Re over located zeros, or -delta_max when none is found
  double value = 0.0;
  bool found = false;
  bool conclusive = true;
  std::string note;
  double delta_lo = 0.0;
  double delta_hi = 0.0;
  std::vector<Root> roots;
};

/// Rightmost zero of f inside the radius-M half disc: the straight edge is
/// pushed left by doubling until the winding turns positive, optionally
/// narrowed by bisection, and the zeros in the remaining strip are located.
Abscissa rightmost_zero(const ScaledFunction& f, const AbscissaOptions& options = {});

/// rightmost_zero of the Evans function.
Abscissa spectral_abscissa(const SteadyProfile& profile, const AbscissaOptions& options = {});

/// rightmost_zero of the matrix pencil determinant on N cells.
Abscissa pencil_abscissa(const SteadyProfile& profile, std::size_t N,
                         const AbscissaOptions& options = {});

}  // namespace ns1d
