#pragma once

#include <complex>

#include <Eigen/Core>

namespace sepfactory {

using Index = Eigen::Index;

template <typename Real>
using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using ComplexVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using cplx = std::complex<double>;
using cmat = ComplexMatrix<double>;
using cvec = ComplexVector<double>;
using rvec = RealVector<double>;

}  // namespace sepfactory
