#include "ns1d/spectrum.hpp"

#include <algorithm>
#include <cmath>

namespace ns1d {

namespace {

constexpr std::size_t kMaxTabulatedSteps = std::size_t{1} << 18;

}  // namespace

EvansEvaluator::EvansEvaluator(const SteadyProfile& profile, double steps_per_unit)
    : profile_(profile), rule_(profile), steps_per_unit_(steps_per_unit) {}

EvansEvaluation EvansEvaluator::operator()(Complex lambda) {
  const std::size_t n = rule_.steps(lambda, steps_per_unit_);
  if (n > kMaxTabulatedSteps) return evans(lambda, profile_, n);
  auto& slot = systems_[n];
  if (!slot) slot = std::make_unique<EvansSystem>(profile_, n);
  return (*slot)(lambda);
}

std::string_view verdict_label(Verdict v) {
  switch (v) {
    case Verdict::SpectrallyStable:
      return "SpectrallyStable";
    case Verdict::NonstableEigenvalues:
      return "NonstableEigenvalues";
    case Verdict::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

SpectrumReport winding_number(const SteadyProfile& profile, const Contour& contour,
                              const SpectrumOptions& options) {
  EvansEvaluator evaluator(profile, options.steps_per_unit);
  SpectrumReport report;
  report.contour = contour;
  report.detail = adaptive_winding(contour, evaluator.function(), options.winding);
  report.nodes = report.detail.t.size();
  report.winding = report.detail.winding;
  report.min_abs_on_contour = report.detail.min_relative;
  report.note = report.detail.note;
  if (!report.detail.conclusive) {
    report.verdict = Verdict::Inconclusive;
  } else if (report.winding < 0 || report.winding % 2 != 0) {
    report.verdict = Verdict::Inconclusive;
    report.note = "winding violates the even-count parity of the stability index";
  } else if (report.winding == 0) {
    report.verdict = Verdict::SpectrallyStable;
  } else {
    report.verdict = Verdict::NonstableEigenvalues;
    report.nonstable_count = report.winding;
  }
  return report;
}

LocateResult locate_roots(const SteadyProfile& profile, const Box& box,
                          const LocateOptions& options, double steps_per_unit) {
  EvansEvaluator evaluator(profile, steps_per_unit);
  return locate_zeros(evaluator.function(), box, options);
}

ScaledFunction pencil_function(const PencilDeterminant& det, double scale) {
  return [&det, scale](Complex lambda) {
    EvansEvaluation e = det(lambda);
    if (e.d_scaled != Complex(0.0)) return e;
    const double r = std::abs(lambda);
    const Complex tangent = r > 0.0 ? Complex(0.0, 1.0) * lambda / r : Complex(0.0, 1.0);
    e = det(lambda + 1e-10 * scale * tangent);
    e.lambda = lambda;
    return e;
  };
}

WindingResult matrix_winding_oracle(const SteadyProfile& profile, const Contour& contour,
                                    std::size_t N, const WindingOptions& options) {
  const PencilDeterminant det(profile, N);
  const double scale = contour.rectangle() ? std::max(contour.rectangle()->width(),
                                                      contour.rectangle()->height())
                                           : contour.radius();
  return adaptive_winding(contour, pencil_function(det, scale), options);
}

Abscissa rightmost_zero(const ScaledFunction& f, const AbscissaOptions& options) {
  Abscissa out;
  const double delta_max = std::min(options.delta_max, 0.9 * options.M);
  // Winding with the straight edge at -delta; nudges delta if a zero sits on it.
  auto winding_at = [&](double& delta) -> std::optional<int> {
    for (int attempt = 0; attempt < 4; ++attempt) {
      const auto w = adaptive_winding(Contour::semicircle(options.M, delta, options.contour_nodes), f,
                                      options.locate.winding);
      if (w.conclusive) return w.winding;
      delta *= 1.0137;
    }
    return std::nullopt;
  };

  double zero = 0.0;
  const auto at_axis = winding_at(zero);
  if (!at_axis) {
    out.conclusive = false;
    out.note = "winding on the imaginary axis contour is inconclusive";
    return out;
  }
  Box box;
  if (*at_axis > 0) {
    box = {-1e-9 * options.M, options.M, -options.M, options.M};
  } else {
    double lo = zero;
    double hi = 0.0;
    for (double delta = options.delta_start; delta <= delta_max; delta *= 2.0) {
      double d = delta;
      const auto w = winding_at(d);
      if (!w) {
        out.conclusive = false;
        out.note = "winding inconclusive while shifting the contour";
        return out;
      }
      if (*w > 0) {
        hi = d;
        break;
      }
      lo = d;
    }
    out.delta_lo = lo;
    if (hi == 0.0) {
      out.value = -delta_max;
      out.delta_hi = delta_max;
      out.note = "no zero found to the right of -delta_max";
      return out;
    }
    for (int k = 0; k < options.bisections; ++k) {
      double mid = 0.5 * (lo + hi);
      const auto w = winding_at(mid);
      if (!w) break;
      if (*w > 0) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    out.delta_lo = lo;
    out.delta_hi = hi;
    box = {-hi, -lo, -options.M, options.M};
  }
  const LocateResult located = locate_zeros(f, box, options.locate);
  out.conclusive = located.conclusive;
  out.note = located.note;
  out.roots = located.roots;
  if (located.roots.empty()) {
    out.value = -out.delta_hi;
    return out;
  }
  out.found = true;
  out.value = located.roots.front().lambda.real();
  return out;
}

Abscissa spectral_abscissa(const SteadyProfile& profile, const AbscissaOptions& options) {
  EvansEvaluator evaluator(profile, options.steps_per_unit);
  return rightmost_zero(evaluator.function(), options);
}

Abscissa pencil_abscissa(const SteadyProfile& profile, std::size_t N,
                         const AbscissaOptions& options) {
  const PencilDeterminant det(profile, N);
  return rightmost_zero(pencil_function(det, options.M), options);
}

}  // namespace ns1d
