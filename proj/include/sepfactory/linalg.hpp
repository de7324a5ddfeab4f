#pragma once

// Dense complex linear algebra used by every other module: a cyclic Jacobi
// Hermitian eigensolver, a one-sided Jacobi SVD, PSD square roots,
// pseudoinverses, a phase-normalized QR factor and the usual norms.
//
// Everything is templated on the scalar and accepts Eigen expressions.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sepfactory/error.hpp"
#include "sepfactory/types.hpp"

namespace sepfactory {

template <typename Real>
struct Spectral {
  RealVector<Real> values;        // descending
  ComplexMatrix<Real> vectors;    // column i belongs to values(i)
  int sweeps = 0;
};

template <typename Real>
struct SingularSystem {
  ComplexMatrix<Real> u;          // m x k, k = min(m, n)
  RealVector<Real> values;        // descending, >= 0
  ComplexMatrix<Real> v;          // n x k
};

template <typename Real>
struct Norms {
  Real trace = 0;
  Real frobenius = 0;
  Real op = 0;
};

inline constexpr int kJacobiSweepBudget = 64;
inline constexpr double kJacobiOffDiagonalTol = 1e-14;
inline constexpr double kDefaultRankTol = 1e-10;

namespace detail {

template <typename Derived>
using RealOf = typename Eigen::NumTraits<typename Derived::Scalar>::Real;

template <typename Derived>
ComplexMatrix<RealOf<Derived>> to_complex(const Eigen::MatrixBase<Derived>& m) {
  return m.template cast<std::complex<RealOf<Derived>>>();
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* who) {
  if (!m.allFinite()) throw Error(ErrorCode::NonFinite, std::string(who) + ": non-finite entry");
}

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m, const char* who) {
  if (m.rows() != m.cols())
    throw Error(ErrorCode::DimensionMismatch,
                std::string(who) + ": expected a square matrix, got " + std::to_string(m.rows()) +
                    "x" + std::to_string(m.cols()));
}

// Unitary R acting on the (p, q) plane with R_pp = R_qq = c,
// R_pq = s * phase, R_qp = -s * conj(phase).
template <typename Real>
struct PlaneRotation {
  Real c;
  Real s;
  std::complex<Real> phase;
};

// Rotation that zeroes the off-diagonal entry of [[app, apq], [conj(apq), aqq]].
template <typename Real>
PlaneRotation<Real> annihilating_rotation(Real app, Real aqq, std::complex<Real> apq) {
  const Real mag = std::abs(apq);
  const std::complex<Real> phase = apq / mag;
  const Real theta = (aqq - app) / (2 * mag);
  Real t;
  if (std::abs(theta) > Real(1e150)) {
    t = 1 / (2 * theta);
  } else {
    t = 1 / (std::abs(theta) + std::sqrt(theta * theta + 1));
    if (theta < 0) t = -t;
  }
  const Real c = 1 / std::sqrt(t * t + 1);
  return {c, t * c, phase};
}

// m <- m * R, restricted to columns p and q.
template <typename Real>
void rotate_columns(ComplexMatrix<Real>& m, Index p, Index q, const PlaneRotation<Real>& r) {
  const std::complex<Real> sp = r.s * r.phase;
  const std::complex<Real> sq = r.s * std::conj(r.phase);
  for (Index k = 0; k < m.rows(); ++k) {
    const std::complex<Real> x = m(k, p);
    const std::complex<Real> y = m(k, q);
    m(k, p) = r.c * x - sq * y;
    m(k, q) = sp * x + r.c * y;
  }
}

// m <- R^dagger * m, restricted to rows p and q.
template <typename Real>
void rotate_rows(ComplexMatrix<Real>& m, Index p, Index q, const PlaneRotation<Real>& r) {
  const std::complex<Real> sp = r.s * r.phase;
  const std::complex<Real> sq = r.s * std::conj(r.phase);
  for (Index k = 0; k < m.cols(); ++k) {
    const std::complex<Real> x = m(p, k);
    const std::complex<Real> y = m(q, k);
    m(p, k) = r.c * x - sp * y;
    m(q, k) = sq * x + r.c * y;
  }
}

template <typename Real>
Real off_diagonal_norm(const ComplexMatrix<Real>& a) {
  Real sum = 0;
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      if (i != j) sum += std::norm(a(i, j));
  return std::sqrt(sum);
}

// Phase of the first component whose magnitude is not negligible, in [0, 2pi).
template <typename Real>
Real leading_phase(const ComplexVector<Real>& v) {
  const Real cutoff = Real(1e-12) * v.cwiseAbs().maxCoeff();
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > cutoff) {
      Real a = std::arg(v(i));
      return a < 0 ? a + 2 * Real(M_PI) : a;
    }
  }
  return 0;
}

// Rotate each column so that its largest-magnitude entry (first one on ties) is real positive.
template <typename Real>
void normalize_column_phases(ComplexMatrix<Real>& v) {
  for (Index j = 0; j < v.cols(); ++j) {
    Index best = 0;
    Real best_mag = -1;
    for (Index i = 0; i < v.rows(); ++i) {
      const Real mag = std::abs(v(i, j));
      if (mag > best_mag) {
        best_mag = mag;
        best = i;
      }
    }
    if (best_mag > 0) v.col(j) *= std::conj(v(best, j)) / best_mag;
  }
}

}  // namespace detail

/// ||M - M^dagger||_F
template <typename Derived>
detail::RealOf<Derived> hermiticity_defect(const Eigen::MatrixBase<Derived>& m) {
  const auto a = detail::to_complex(m);
  return (a - a.adjoint()).norm();
}

/// Spectral decomposition of a Hermitian matrix by cyclic Jacobi sweeps.
///
/// The input must satisfy ||M - M^dagger||_F <= tol * ||M||_F; the Hermitian
/// part is what gets diagonalized. Eigenvalues come back in descending
/// order; exact ties are ordered by the phase of the first significant
/// eigenvector component. Each eigenvector has its largest entry real positive.
template <typename Derived>
Spectral<detail::RealOf<Derived>> hermitian_eig(const Eigen::MatrixBase<Derived>& m,
                                                detail::RealOf<Derived> tol = 1e-10) {
  using Real = detail::RealOf<Derived>;
  detail::require_square(m, "hermitian_eig");
  detail::require_finite(m, "hermitian_eig");

  ComplexMatrix<Real> a = detail::to_complex(m);
  const Real scale = a.norm();
  if ((a - a.adjoint()).norm() > tol * scale)
    throw Error(ErrorCode::NotHermitian, "hermitian_eig: input is not Hermitian within tolerance");
  a = (a + a.adjoint()).eval() / Real(2);

  const Index n = a.rows();
  ComplexMatrix<Real> v = ComplexMatrix<Real>::Identity(n, n);
  // 1e-14 for double; floats stop at a few ulps instead
  const Real target = std::max(Real(kJacobiOffDiagonalTol), 8 * std::numeric_limits<Real>::epsilon()) * scale;

  int sweeps = 0;
  while (detail::off_diagonal_norm(a) > target) {
    if (sweeps == kJacobiSweepBudget)
      throw Error(ErrorCode::NoConvergence, "hermitian_eig: sweep budget exhausted");
    ++sweeps;
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) <= std::numeric_limits<Real>::min()) continue;
        const auto r = detail::annihilating_rotation(a(p, p).real(), a(q, q).real(), a(p, q));
        detail::rotate_columns(a, p, q, r);
        detail::rotate_rows(a, p, q, r);
        a(p, q) = a(q, p) = 0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        detail::rotate_columns(v, p, q, r);
      }
    }
  }

  detail::normalize_column_phases(v);

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::vector<Real> phases(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j)
    phases[static_cast<std::size_t>(j)] = detail::leading_phase<Real>(v.col(j));
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) {
    const Real li = a(i, i).real();
    const Real lj = a(j, j).real();
    if (li != lj) return li > lj;
    return phases[static_cast<std::size_t>(i)] < phases[static_cast<std::size_t>(j)];
  });

  Spectral<Real> out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    out.values(k) = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]).real();
    out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  out.sweeps = sweeps;
  return out;
}

/// Thin SVD by one-sided (Hestenes) Jacobi rotations, i.e. Jacobi on M^dagger M
/// carried out implicitly on the columns of M so small singular values keep
/// full relative accuracy.
template <typename Derived>
SingularSystem<detail::RealOf<Derived>> svd(const Eigen::MatrixBase<Derived>& m) {
  using Real = detail::RealOf<Derived>;
  detail::require_finite(m, "svd");

  if (m.rows() < m.cols()) {
    auto t = svd(detail::to_complex(m).adjoint().eval());
    std::swap(t.u, t.v);
    return t;
  }

  ComplexMatrix<Real> a = detail::to_complex(m);
  const Index n = a.cols();
  ComplexMatrix<Real> v = ComplexMatrix<Real>::Identity(n, n);
  const Real eps = std::numeric_limits<Real>::epsilon() * Real(std::max<Index>(n, 1));

  bool rotated = true;
  int sweeps = 0;
  while (rotated) {
    if (sweeps == kJacobiSweepBudget)
      throw Error(ErrorCode::NoConvergence, "svd: sweep budget exhausted");
    ++sweeps;
    rotated = false;
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const Real alpha = a.col(p).squaredNorm();
        const Real beta = a.col(q).squaredNorm();
        const std::complex<Real> gamma = a.col(p).dot(a.col(q));
        const Real mag = std::abs(gamma);
        if (mag <= std::numeric_limits<Real>::min() || mag <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const auto r = detail::annihilating_rotation(alpha, beta, gamma);
        detail::rotate_columns(a, p, q, r);
        detail::rotate_columns(v, p, q, r);
      }
    }
  }

  RealVector<Real> sigma(n);
  for (Index j = 0; j < n; ++j) sigma(j) = a.col(j).norm();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return sigma(i) > sigma(j); });

  SingularSystem<Real> out;
  out.u = ComplexMatrix<Real>::Zero(a.rows(), n);
  out.v.resize(n, n);
  out.values.resize(n);
  for (Index k = 0; k < n; ++k) {
    const Index j = order[static_cast<std::size_t>(k)];
    out.values(k) = sigma(j);
    out.v.col(k) = v.col(j);
    if (sigma(j) > 0) out.u.col(k) = a.col(j) / sigma(j);
  }
  return out;
}

/// Hermitian PSD square root. Eigenvalues in [-tol, 0) are clamped to zero;
/// the default tol is 1e-10 * ||M||_op.
template <typename Derived>
ComplexMatrix<detail::RealOf<Derived>> psd_sqrt(const Eigen::MatrixBase<Derived>& m,
                                                std::optional<detail::RealOf<Derived>> tol = {}) {
  using Real = detail::RealOf<Derived>;
  const auto spec = hermitian_eig(m);
  const Index n = spec.values.size();
  if (n == 0) return ComplexMatrix<Real>(0, 0);
  const Real op = spec.values.cwiseAbs().maxCoeff();
  const Real clamp = tol ? *tol : Real(1e-10) * op;
  if (spec.values(n - 1) < -clamp)
    throw Error(ErrorCode::NotPSD, "psd_sqrt: eigenvalue " + std::to_string(double(spec.values(n - 1))) +
                                       " below -tol");
  const RealVector<Real> roots = spec.values.cwiseMax(Real(0)).cwiseSqrt();
  ComplexMatrix<Real> r = spec.vectors * roots.asDiagonal() * spec.vectors.adjoint();
  return (r + r.adjoint()) / Real(2);
}

/// Moore-Penrose pseudoinverse; singular values at or below rank_tol * sigma_max are dropped.
template <typename Derived>
ComplexMatrix<detail::RealOf<Derived>> pinv(const Eigen::MatrixBase<Derived>& m,
                                            detail::RealOf<Derived> rank_tol = kDefaultRankTol) {
  using Real = detail::RealOf<Derived>;
  const auto s = svd(m);
  ComplexMatrix<Real> out = ComplexMatrix<Real>::Zero(m.cols(), m.rows());
  if (s.values.size() == 0 || s.values(0) == 0) return out;
  const Real cutoff = rank_tol * s.values(0);
  for (Index k = 0; k < s.values.size(); ++k) {
    if (s.values(k) <= cutoff) break;
    out.noalias() += (s.v.col(k) / s.values(k)) * s.u.col(k).adjoint();
  }
  return out;
}

/// Numerical rank at the given relative cutoff.
template <typename Derived>
Index numerical_rank(const Eigen::MatrixBase<Derived>& m, detail::RealOf<Derived> rank_tol = kDefaultRankTol) {
  const auto s = svd(m);
  if (s.values.size() == 0 || s.values(0) == 0) return 0;
  return (s.values.array() > rank_tol * s.values(0)).count();
}

/// Upper-triangular R with real non-negative diagonal and R^dagger R = M^dagger M.
template <typename Derived>
ComplexMatrix<detail::RealOf<Derived>> qr_upper(const Eigen::MatrixBase<Derived>& m) {
  using Real = detail::RealOf<Derived>;
  detail::require_square(m, "qr_upper");
  detail::require_finite(m, "qr_upper");
  const Index n = m.rows();
  Eigen::HouseholderQR<ComplexMatrix<Real>> qr(detail::to_complex(m));
  ComplexMatrix<Real> r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (Index i = 0; i < n; ++i) {
    const Real mag = std::abs(r(i, i));
    if (mag > 0) {
      r.row(i) *= std::conj(r(i, i)) / mag;
      r(i, i) = mag;
    } else {
      r(i, i) = 0;
    }
  }
  return r;
}

template <typename Derived>
Norms<detail::RealOf<Derived>> norms(const Eigen::MatrixBase<Derived>& m) {
  Norms<detail::RealOf<Derived>> out;
  out.frobenius = m.norm();
  if (m.size() == 0) return out;
  const auto s = svd(m);
  out.trace = s.values.sum();
  out.op = s.values(0);
  return out;
}

template <typename Derived>
detail::RealOf<Derived> trace_norm(const Eigen::MatrixBase<Derived>& m) {
  return norms(m).trace;
}

template <typename Derived>
detail::RealOf<Derived> op_norm(const Eigen::MatrixBase<Derived>& m) {
  return norms(m).op;
}

/// ||A B - B A||_F
template <typename DA, typename DB>
detail::RealOf<DA> commutator_residual(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  detail::require_square(a, "commutator_residual");
  detail::require_square(b, "commutator_residual");
  if (a.rows() != b.rows())
    throw Error(ErrorCode::DimensionMismatch, "commutator_residual: operands differ in size");
  const auto ca = detail::to_complex(a);
  const auto cb = detail::to_complex(b);
  return (ca * cb - cb * ca).norm();
}

/// ||[A, A^dagger]||_F
template <typename Derived>
detail::RealOf<Derived> normality_residual(const Eigen::MatrixBase<Derived>& a) {
  const auto ca = detail::to_complex(a);
  return commutator_residual(ca, ca.adjoint().eval());
}

}  // namespace sepfactory
