#pragma once

#include <Eigen/Core>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>

#include "ns1d/evans.hpp"

namespace ns1d {

/// Square band matrix in LAPACK gbtrf layout: entry (i, j) lives at
/// (kl + ku + i - j, j) of a (2 kl + ku + 1) x n array, leaving kl extra
/// rows for fill-in from row interchanges.
template <typename Scalar>
class BandMatrix {
 public:
  BandMatrix(Eigen::Index n, Eigen::Index kl, Eigen::Index ku)
      : n_(n), kl_(kl), ku_(ku), ab_(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(2 * kl + ku + 1, n)) {}

  Scalar& operator()(Eigen::Index i, Eigen::Index j) { return ab_(kl_ + ku_ + i - j, j); }
  const Scalar& operator()(Eigen::Index i, Eigen::Index j) const { return ab_(kl_ + ku_ + i - j, j); }

  Eigen::Index size() const { return n_; }
  Eigen::Index lower() const { return kl_; }
  Eigen::Index upper() const { return ku_; }
  void setZero() { ab_.setZero(); }

  /// Dense copy of the stored band (before factorization).
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dense() const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> d =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n_, n_);
    for (Eigen::Index j = 0; j < n_; ++j) {
      for (Eigen::Index i = std::max<Eigen::Index>(0, j - ku_); i <= std::min(n_ - 1, j + kl_); ++i) {
        d(i, j) = (*this)(i, j);
      }
    }
    return d;
  }

 private:
  Eigen::Index n_, kl_, ku_;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> ab_;
};

/// det = phase * exp(log_abs); singular when an exact zero pivot appears.
template <typename Scalar>
struct LogDeterminant {
  Scalar phase = Scalar(1);
  double log_abs = 0.0;
  std::optional<Eigen::Index> zero_pivot;
};

/// Determinant by LU with partial pivoting, overwriting `a` with its factors.
template <typename Scalar>
LogDeterminant<Scalar> band_log_determinant(BandMatrix<Scalar>& a) {
  using std::abs;
  LogDeterminant<Scalar> out;
  const Eigen::Index n = a.size();
  const Eigen::Index kl = a.lower();
  const Eigen::Index ku = a.upper();
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index last_row = std::min(n - 1, j + kl);
    const Eigen::Index last_col = std::min(n - 1, j + kl + ku);
    Eigen::Index p = j;
    double best = abs(a(j, j));
    for (Eigen::Index i = j + 1; i <= last_row; ++i) {
      if (abs(a(i, j)) > best) {
        best = abs(a(i, j));
        p = i;
      }
    }
    if (best == 0.0) {
      out.zero_pivot = j;
      out.phase = Scalar(0);
      return out;
    }
    if (p != j) {
      for (Eigen::Index c = j; c <= last_col; ++c) std::swap(a(p, c), a(j, c));
      out.phase = -out.phase;
    }
    const Scalar pivot = a(j, j);
    out.log_abs += std::log(best);
    out.phase *= pivot / best;
    for (Eigen::Index i = j + 1; i <= last_row; ++i) {
      const Scalar l = a(i, j) / pivot;
      if (l == Scalar(0)) continue;
      for (Eigen::Index c = j + 1; c <= last_col; ++c) a(i, c) -= l * a(j, c);
    }
    if ((j & 63) == 63) out.phase /= abs(out.phase);
  }
  out.phase /= abs(out.phase);
  return out;
}

/// lambda -> det(lambda S_h - L_h) for the finite-difference discretization
/// of the eigenvalue problem on N uniform cells.
///
/// Unknowns are interleaved as (r_0, v_0, r_1, v_1, ...). Interior rows use
/// centred differences, the density equation at x = 1 a one-sided
/// second-order difference, and r(0) = v(0) = v(1) = 0 replace their rows.
class PencilDeterminant {
 public:
  PencilDeterminant(const SteadyProfile& profile, std::size_t N);

  std::size_t cells() const { return N_; }
  Eigen::Index size() const { return 2 * static_cast<Eigen::Index>(N_ + 1); }

  /// Assembled lambda S_h - L_h.
  BandMatrix<Complex> assemble(Complex lambda) const;

  /// Scaled determinant: d_scaled is the unit phase, log_scale = log|det|.
  /// An exact zero pivot yields d_scaled = 0.
  EvansEvaluation operator()(Complex lambda) const;

 private:
  std::size_t N_;
  double nu_, m_, h_;
  Eigen::VectorXd rho_, u_, u_x_, dp_;
};

}  // namespace ns1d
