#include <Eigen/LU>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "ns1d/contour.hpp"
#include "ns1d/errors.hpp"
#include "ns1d/pencil.hpp"

using namespace ns1d;

namespace {

/// Product of (z - z_k) in scaled form.
ScaledFunction polynomial(std::vector<Complex> zeros) {
  return [zeros](Complex z) {
    EvansEvaluation e;
    e.lambda = z;
    e.d_scaled = 1.0;
    for (const Complex& zk : zeros) {
      const Complex f = z - zk;
      const double a = std::abs(f);
      if (a == 0.0) {
        e.d_scaled = 0.0;
        return e;
      }
      e.d_scaled *= f / a;
      e.log_scale += std::log(a);
    }
    return e;
  };
}

double signed_area(const std::vector<Complex>& z) {
  double s = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const Complex a = z[k], b = z[(k + 1) % z.size()];
    s += a.real() * b.imag() - b.real() * a.imag();
  }
  return 0.5 * s;
}

}  // namespace

TEST_CASE("semicircle of radius 10 through the origin") {
  const Contour c = build_contour(10.0, 0.0, 16);
  const auto z = c.nodes();
  REQUIRE(z.size() == 16);
  int on_arc = 0, on_axis = 0;
  for (const Complex& p : z) {
    const bool arc = std::abs(std::abs(p) - 10.0) < 1e-12 && p.real() >= -1e-12;
    const bool axis = std::abs(p.real()) < 1e-12 && std::abs(p.imag()) <= 10.0 + 1e-12;
    CHECK((arc || axis));
    on_arc += arc;
    on_axis += axis;
  }
  CHECK(on_arc > 0);
  CHECK(on_axis > 0);
  CHECK(signed_area(z) > 0.0);
  for (std::size_t k = 0; k < z.size(); ++k) CHECK(z[k] != z[(k + 1) % z.size()]);
  // arc length pi M, segment 2M
  const double arc_fraction = std::numbers::pi / (std::numbers::pi + 2.0);
  CHECK(std::abs(c.point(arc_fraction) - Complex(0.0, 10.0)) < 1e-12);
  CHECK(std::abs(c.point(0.0) - Complex(0.0, -10.0)) < 1e-12);
}

TEST_CASE("shifted straight edge") {
  const Contour c = build_contour(10.0, 0.05, 64);
  int on_edge = 0;
  for (const Complex& p : c.nodes()) {
    CHECK(p.real() >= -0.05 - 1e-12);
    on_edge += std::abs(p.real() + 0.05) < 1e-12;
  }
  CHECK(on_edge > 0);
  CHECK(c.delta() == 0.05);
}

TEST_CASE("coarse contours are valid and bad input is rejected") {
  CHECK(build_contour(1.0, 0.0, 4).nodes().size() == 4);
  CHECK_THROWS_AS(build_contour(1.0, 0.0, 3), DomainError);
  CHECK_THROWS_AS(build_contour(0.0, 0.0, 16), DomainError);
  CHECK_THROWS_AS(build_contour(1.0, 1.0, 16), DomainError);
  CHECK_THROWS_AS(build_contour(1.0, -0.1, 16), DomainError);
}

TEST_CASE("box traversal is counterclockwise") {
  const Box b{-1.0, 2.0, -0.5, 3.0};
  const auto z = Contour::box(b, 26).nodes();
  CHECK(signed_area(z) == doctest::Approx(b.width() * b.height()).epsilon(1e-12));
  CHECK(b.conjugate().im_lo == -3.0);
  CHECK(b.conjugate().im_hi == 0.5);
}

TEST_CASE("winding counts enclosed zeros of polynomials") {
  const Contour c = build_contour(10.0, 0.0, 16);
  CHECK(adaptive_winding(c, polynomial({{3.0, 1.0}})).winding == 1);
  CHECK(adaptive_winding(c, polynomial({{-3.0, 1.0}})).winding == 0);
  CHECK(adaptive_winding(c, polynomial({{2.0, 4.0}, {2.0, -4.0}, {-1.0, 0.0}, {11.0, 0.0}})).winding == 2);
  const auto coarse = adaptive_winding(build_contour(1.0, 0.0, 4), polynomial({{0.5, 0.0}}));
  CHECK(coarse.conclusive);
  CHECK(coarse.winding == 1);
  CHECK(coarse.t.size() > 4);
  const auto many = adaptive_winding(build_contour(1.0, 0.0, 64), polynomial(std::vector<Complex>(7, {0.5, 0.0})));
  CHECK(many.conclusive);
  CHECK(many.winding == 7);
  CHECK(std::abs(many.total_arg - 14.0 * std::numbers::pi) < 1e-9);
}

TEST_CASE("refinement keeps every argument step below the threshold") {
  const auto r = adaptive_winding(build_contour(10.0, 0.0, 16), polynomial({{1.0, 9.9}, {1.0, -9.9}}));
  REQUIRE(r.conclusive);
  CHECK(r.winding == 2);
  CHECK(r.t.size() > 16);
  for (std::size_t k = 0; k < r.values.size(); ++k) {
    const auto& a = r.values[k];
    const auto& b = r.values[(k + 1) % r.values.size()];
    CHECK(std::abs(std::arg(b.d_scaled * std::conj(a.d_scaled))) < std::numbers::pi / 2);
  }
}

TEST_CASE("zero on the contour is reported") {
  const auto r = adaptive_winding(build_contour(10.0, 0.0, 16), polynomial({{0.0, 0.0}}));
  CHECK_FALSE(r.conclusive);
  REQUIRE(r.offending);
  CHECK(std::abs(*r.offending) < 1e-12);
}

TEST_CASE("refinement budget") {
  WindingOptions opts;
  opts.max_nodes = 20;
  const auto r = adaptive_winding(build_contour(10.0, 0.0, 16),
                                  polynomial(std::vector<Complex>(12, {1.0, 0.0})), opts);
  CHECK_FALSE(r.conclusive);
  CHECK(r.note.find("budget") != std::string::npos);
}

TEST_CASE("locate zeros of a polynomial") {
  const std::vector<Complex> zeros{{-1.0, 2.0}, {-1.0, -2.0}, {0.3, 0.0}, {-2.5, 0.7}};
  const auto f = polynomial(zeros);
  const auto r = locate_zeros(f, {-3.0, 1.0, -3.0, 3.0});
  REQUIRE(r.conclusive);
  CHECK(r.winding == 4);
  REQUIRE(r.roots.size() == 4);
  CHECK(std::abs(r.roots[0].lambda - Complex(0.3, 0.0)) < 1e-10);
  for (const Root& root : r.roots) {
    double best = 1e300;
    for (const Complex& z : zeros) best = std::min(best, std::abs(root.lambda - z));
    CHECK(best < 1e-10);
    CHECK(root.multiplicity == 1);
    CHECK(root.residual < 1e-10);
  }
  CHECK(locate_zeros(f, {0.5, 3.0, -3.0, 3.0}).roots.empty());
}

TEST_CASE("double zero is reported with multiplicity two") {
  const auto r = locate_zeros(polynomial({{-0.4, 0.25}, {-0.4, 0.25}}), {-1.0, 1.0, -1.0, 1.0});
  REQUIRE(r.conclusive);
  REQUIRE(r.roots.size() == 1);
  CHECK(r.roots[0].multiplicity == 2);
  CHECK(std::abs(r.roots[0].lambda - Complex(-0.4, 0.25)) < 1e-6);
}

TEST_CASE("box and its reflection give conjugate roots") {
  const auto f = polynomial({{-1.0, 1.5}, {-1.0, -1.5}, {-0.7, 0.2}, {-0.7, -0.2}});
  const Box b{-2.0, 0.0, 0.1, 3.0};
  const auto up = locate_zeros(f, b);
  const auto down = locate_zeros(f, b.conjugate());
  REQUIRE(up.roots.size() == 2);
  REQUIRE(down.roots.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    const Complex z = up.roots[k].lambda;
    bool matched = false;
    for (const Root& w : down.roots) matched = matched || std::abs(w.lambda - std::conj(z)) < 1e-10;
    CHECK(matched);
  }
}

TEST_CASE("band LU determinant matches the dense LU") {
  std::mt19937 gen(7);
  std::normal_distribution<double> g;
  for (const auto [kl, ku] : {std::pair{4, 3}, std::pair{1, 1}, std::pair{2, 5}}) {
    BandMatrix<Complex> a(40, kl, ku);
    for (Eigen::Index j = 0; j < 40; ++j) {
      for (Eigen::Index i = std::max<Eigen::Index>(0, j - ku); i <= std::min<Eigen::Index>(39, j + kl); ++i) {
        a(i, j) = Complex(g(gen), g(gen));
      }
    }
    const Complex dense = a.dense().partialPivLu().determinant();
    const auto det = band_log_determinant(a);
    REQUIRE_FALSE(det.zero_pivot);
    CHECK(std::abs(det.log_abs - std::log(std::abs(dense))) < 1e-10);
    CHECK(std::abs(det.phase - dense / std::abs(dense)) < 1e-10);
  }
}

TEST_CASE("band LU of a real matrix and a singular one") {
  BandMatrix<double> a(3, 1, 1);
  a(0, 0) = 2.0;
  a(0, 1) = 1.0;
  a(1, 0) = 4.0;
  a(1, 1) = 1.0;
  a(1, 2) = 3.0;
  a(2, 1) = 5.0;
  a(2, 2) = 1.0;
  const double dense = a.dense().determinant();
  const auto det = band_log_determinant(a);
  CHECK(det.phase * std::exp(det.log_abs) == doctest::Approx(dense).epsilon(1e-14));

  BandMatrix<double> s(3, 1, 1);
  s(0, 0) = 1.0;
  s(1, 0) = 1.0;
  CHECK(band_log_determinant(s).zero_pivot.has_value());
}
