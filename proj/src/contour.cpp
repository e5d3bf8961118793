#include "ns1d/contour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ns1d/errors.hpp"

namespace ns1d {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double log_abs(const EvansEvaluation& e) { return std::log(std::abs(e.d_scaled)) + e.log_scale; }

/// Argument increment from a to b.
double arg_step(const EvansEvaluation& a, const EvansEvaluation& b) {
  return std::arg(b.d_scaled * std::conj(a.d_scaled));
}

}  // namespace

Contour Contour::semicircle(double M, double delta, std::size_t n0) {
  if (!(M > 0.0) || !(delta >= 0.0) || !(delta < M) || n0 < 4) {
    throw DomainError("contour needs M > 0, 0 <= delta < M and at least 4 nodes");
  }
  Contour c;
  c.M_ = M;
  c.delta_ = delta;
  c.t.resize(n0);
  for (std::size_t k = 0; k < n0; ++k) c.t[k] = static_cast<double>(k) / static_cast<double>(n0);
  return c;
}

Contour Contour::box(const Box& box, std::size_t n0) {
  if (!(box.width() > 0.0) || !(box.height() > 0.0) || n0 < 4) {
    throw DomainError("box contour needs positive width and height and at least 4 nodes");
  }
  Contour c;
  c.box_ = box;
  c.t.resize(n0);
  for (std::size_t k = 0; k < n0; ++k) c.t[k] = static_cast<double>(k) / static_cast<double>(n0);
  return c;
}

Complex Contour::point(double t) const {
  if (box_) {
    const Box& b = *box_;
    const double perimeter = 2.0 * (b.width() + b.height());
    double s = t * perimeter;
    if (s < b.width()) return {b.re_lo + s, b.im_lo};
    s -= b.width();
    if (s < b.height()) return {b.re_hi, b.im_lo + s};
    s -= b.height();
    if (s < b.width()) return {b.re_hi - s, b.im_hi};
    s -= b.width();
    return {b.re_lo, b.im_hi - std::min(s, b.height())};
  }
  const double theta0 = std::acos(-delta_ / M_);
  const double arc = 2.0 * theta0 * M_;
  const double half_chord = M_ * std::sin(theta0);
  const double s = t * (arc + 2.0 * half_chord);
  if (s < arc) return std::polar(M_, -theta0 + s / M_);
  return {-delta_, half_chord - std::min(s - arc, 2.0 * half_chord)};
}

std::vector<Complex> Contour::nodes() const {
  std::vector<Complex> out;
  out.reserve(t.size());
  for (const double s : t) out.push_back(point(s));
  return out;
}

Contour build_contour(double M, double delta, std::size_t n0) {
  return Contour::semicircle(M, delta, n0);
}

WindingResult adaptive_winding(const Contour& contour, const ScaledFunction& f,
                               const WindingOptions& options) {
  WindingResult out;
  out.t = contour.t;
  std::sort(out.t.begin(), out.t.end());
  out.t.erase(std::unique(out.t.begin(), out.t.end()), out.t.end());
  out.values.reserve(out.t.size());

  auto on_zero = [&](const EvansEvaluation& e) {
    return !(std::abs(e.d_scaled) >= options.floor) || !std::isfinite(e.log_scale);
  };
  for (const double s : out.t) {
    out.values.push_back(f(contour.point(s)));
    if (on_zero(out.values.back())) {
      out.note = "|D| below floor on the contour";
      out.offending = contour.point(s);
      return out;
    }
  }

  for (;;) {
    const std::size_t n = out.t.size();
    std::vector<std::size_t> coarse;
    for (std::size_t k = 0; k < n; ++k) {
      if (std::abs(arg_step(out.values[k], out.values[(k + 1) % n])) >= options.max_arg_step) {
        coarse.push_back(k);
      }
    }
    if (coarse.empty()) break;
    if (n + coarse.size() > options.max_nodes) {
      out.note = "refinement budget exhausted";
      return out;
    }
    std::vector<double> t;
    std::vector<EvansEvaluation> values;
    t.reserve(n + coarse.size());
    values.reserve(n + coarse.size());
    std::size_t next = 0;
    for (std::size_t k = 0; k < n; ++k) {
      t.push_back(out.t[k]);
      values.push_back(out.values[k]);
      if (next < coarse.size() && coarse[next] == k) {
        ++next;
        const double end = k + 1 < n ? out.t[k + 1] : 1.0;
        const double mid = 0.5 * (out.t[k] + end);
        if (!(mid > out.t[k] && mid < end)) {
          out.note = "contour nodes collapsed";
          out.offending = contour.point(out.t[k]);
          return out;
        }
        t.push_back(mid);
        values.push_back(f(contour.point(mid)));
        if (on_zero(values.back())) {
          out.note = "|D| below floor on the contour";
          out.offending = contour.point(mid);
          return out;
        }
      }
    }
    out.t = std::move(t);
    out.values = std::move(values);
  }

  const std::size_t n = out.t.size();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  out.min_scaled = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    out.total_arg += arg_step(out.values[k], out.values[(k + 1) % n]);
    const double l = log_abs(out.values[k]);
    lo = std::min(lo, l);
    hi = std::max(hi, l);
    out.min_scaled = std::min(out.min_scaled, std::abs(out.values[k].d_scaled));
  }
  out.min_relative = std::exp(lo - hi);
  const double turns = out.total_arg / kTwoPi;
  out.winding = static_cast<int>(std::lround(turns));
  if (std::abs(out.total_arg - kTwoPi * out.winding) > 1e-3) {
    out.note = "accumulated argument is not a multiple of 2 pi";
    return out;
  }
  out.conclusive = true;
  return out;
}

namespace {

class Locator {
 public:
  Locator(const ScaledFunction& f, const LocateOptions& options) : f_(f), options_(options) {}

  WindingResult winding_on(const Box& box) const {
    // Node spacing tied to the short side, so a zero near one long edge cannot
    // hide between two nodes.
    const double perimeter = 2.0 * (box.width() + box.height());
    const double per_side = std::min(box.width(), box.height()) / 8.0;
    const auto n = std::max(options_.box_nodes,
                            static_cast<std::size_t>(std::ceil(perimeter / per_side)));
    return adaptive_winding(Contour::box(box, n), f_, options_.winding);
  }

  void descend(const Box& box, const WindingResult& boundary, int depth, LocateResult& out) const {
    if (boundary.winding == 0 || !out.conclusive) return;
    const double diameter = std::hypot(box.width(), box.height());
    if (diameter < options_.tol_box || depth >= options_.max_depth) {
      out.roots.push_back(polish(box, boundary));
      return;
    }
    // Off-centre splits keep symmetric zeros (e.g. real ones) off the new edges.
    const double fr = 0.5 + 0.0123;
    const double fi = 0.5 - 0.0098;
    const double re_mid = box.re_lo + fr * box.width();
    const double im_mid = box.im_lo + fi * box.height();
    std::vector<Box> children;
    if (box.width() > 2.0 * box.height()) {
      children = {{box.re_lo, re_mid, box.im_lo, box.im_hi}, {re_mid, box.re_hi, box.im_lo, box.im_hi}};
    } else if (box.height() > 2.0 * box.width()) {
      children = {{box.re_lo, box.re_hi, box.im_lo, im_mid}, {box.re_lo, box.re_hi, im_mid, box.im_hi}};
    } else {
      children = {{box.re_lo, re_mid, box.im_lo, im_mid},
                  {re_mid, box.re_hi, box.im_lo, im_mid},
                  {box.re_lo, re_mid, im_mid, box.im_hi},
                  {re_mid, box.re_hi, im_mid, box.im_hi}};
    }
    std::vector<WindingResult> results;
    int total = 0;
    for (const Box& child : children) {
      results.push_back(winding_on(child));
      if (!results.back().conclusive) {
        out.conclusive = false;
        std::ostringstream os;
        os << "sub-box winding failed: " << results.back().note;
        out.note = os.str();
        return;
      }
      total += results.back().winding;
    }
    if (total != boundary.winding) {
      out.conclusive = false;
      out.note = "sub-box windings do not add up to the parent winding";
      return;
    }
    for (std::size_t k = 0; k < children.size(); ++k) descend(children[k], results[k], depth + 1, out);
  }

 private:
  Root polish(const Box& box, const WindingResult& boundary) const {
    double boundary_max = -std::numeric_limits<double>::infinity();
    for (const auto& v : boundary.values) boundary_max = std::max(boundary_max, log_abs(v));
    const double diameter = std::hypot(box.width(), box.height());

    const EvansEvaluation at_centre = f_(box.centre());
    const double ref = at_centre.log_scale;
    auto value = [&](const EvansEvaluation& e) { return e.d_scaled * std::exp(e.log_scale - ref); };

    Complex x0 = box.centre();
    Complex x1 = x0 + Complex(0.05, 0.03) * diameter;
    Complex f0 = value(at_centre);
    EvansEvaluation e1 = f_(x1);
    Complex f1 = value(e1);
    EvansEvaluation best = std::abs(f0) < std::abs(f1) ? at_centre : e1;
    Complex best_x = std::abs(f0) < std::abs(f1) ? x0 : x1;
    for (int it = 0; it < 60; ++it) {
      const Complex df = f1 - f0;
      if (df == Complex(0.0, 0.0)) break;
      const Complex x2 = x1 - f1 * (x1 - x0) / df;
      if (!std::isfinite(x2.real()) || !std::isfinite(x2.imag()) ||
          std::abs(x2 - box.centre()) > 2.0 * diameter) {
        break;
      }
      x0 = x1;
      f0 = f1;
      x1 = x2;
      e1 = f_(x1);
      f1 = value(e1);
      if (std::abs(f1) < std::abs(value(best))) {
        best = e1;
        best_x = x1;
      }
      if (std::abs(x1 - x0) <= 1e-13 * std::max(1.0, std::abs(x1))) break;
    }
    Root r;
    r.lambda = best_x;
    r.multiplicity = boundary.winding;
    r.residual = std::exp(log_abs(best) - boundary_max);
    return r;
  }

  const ScaledFunction& f_;
  const LocateOptions& options_;
};

}  // namespace

LocateResult locate_zeros(const ScaledFunction& f, const Box& box, const LocateOptions& options) {
  const Locator locator(f, options);
  LocateResult out;
  const WindingResult top = locator.winding_on(box);
  if (!top.conclusive) {
    out.conclusive = false;
    out.note = top.note;
    return out;
  }
  out.winding = top.winding;
  if (top.winding < 0) {
    out.conclusive = false;
    out.note = "negative winding on the box boundary";
    return out;
  }
  locator.descend(box, top, 0, out);
  std::sort(out.roots.begin(), out.roots.end(), [](const Root& a, const Root& b) {
    if (a.lambda.real() != b.lambda.real()) return a.lambda.real() > b.lambda.real();
    return a.lambda.imag() < b.lambda.imag();
  });
  return out;
}

}  // namespace ns1d
