#pragma once

#include <complex>

#include <Eigen/Dense>

namespace floquet {

template <typename Real>
using CMatrixT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using CVectorT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

/// Dense complex matrix carrying every operator of the analysis.
using CMatrix = CMatrixT<double>;
using CVector = CVectorT<double>;
using RMatrix = Eigen::MatrixXd;
using Complex = std::complex<double>;

}  // namespace floquet
