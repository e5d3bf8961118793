#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ns1d/evans.hpp"

namespace ns1d {

/// Closed rectangle [re_lo, re_hi] x [im_lo, im_hi] in the lambda plane.
struct Box {
  double re_lo = 0.0;
  double re_hi = 1.0;
  double im_lo = -1.0;
  double im_hi = 1.0;

  double width() const { return re_hi - re_lo; }
  double height() const { return im_hi - im_lo; }
  Complex centre() const { return {0.5 * (re_lo + re_hi), 0.5 * (im_lo + im_hi)}; }
  Box conjugate() const { return {re_lo, re_hi, -im_hi, -im_lo}; }
};

/// Counterclockwise closed curve sampled at parameters t in [0, 1).
///
/// Either the arc {M e^{i theta}} restricted to Re >= -delta and closed by
/// the vertical segment on Re = -delta, or the boundary of a Box.
class Contour {
 public:
  static Contour semicircle(double M, double delta, std::size_t n0);
  static Contour box(const Box& box, std::size_t n0);

  Complex point(double t) const;
  std::vector<Complex> nodes() const;

  double radius() const { return M_; }
  double delta() const { return delta_; }
  const std::optional<Box>& rectangle() const { return box_; }

  std::vector<double> t;

 private:
  double M_ = 0.0;
  double delta_ = 0.0;
  std::optional<Box> box_;
};

/// Semicircular contour of radius M with straight edge on Re = -delta.
/// Throws DomainError unless M > 0, 0 <= delta < M and n0 >= 4.
Contour build_contour(double M, double delta, std::size_t n0 = 256);

/// An analytic function returned in scaled form d_scaled * exp(log_scale).
using ScaledFunction = std::function<EvansEvaluation(Complex)>;

struct WindingOptions {
  std::size_t max_nodes = std::size_t{1} << 14;
  double max_arg_step = 1.5707963267948966;
  /// Nodes with |d_scaled| below this are treated as lying on a zero.
  double floor = 1e-12;
};

struct WindingResult {
  int winding = 0;
  double total_arg = 0.0;
  bool conclusive = false;
  std::string note;
  std::optional<Complex> offending;
  std::vector<double> t;
  std::vector<EvansEvaluation> values;
  /// min |D| / max |D| over the refined nodes
  double min_relative = 0.0;
  double min_scaled = 0.0;
};

/// Argument principle with adaptive midpoint insertion until every
/// consecutive pair of values differs in argument by less than max_arg_step.
WindingResult adaptive_winding(const Contour& contour, const ScaledFunction& f,
                               const WindingOptions& options = {});

struct Root {
  Complex lambda{};
  /// |D(lambda)| relative to max |D| on the enclosing box boundary
  double residual = 0.0;
  int multiplicity = 1;
};

struct LocateOptions {
  WindingOptions winding;
  std::size_t box_nodes = 32;
  /// Boxes are split until their diameter is below this.
  double tol_box = 1e-3;
  int max_depth = 48;
};

struct LocateResult {
  std::vector<Root> roots;
  bool conclusive = true;
  std::string note;
  int winding = 0;
};

/// Recursive subdivision by winding numbers, then secant refinement of
/// each isolated zero.
LocateResult locate_zeros(const ScaledFunction& f, const Box& box,
                          const LocateOptions& options = {});

}  // namespace ns1d
