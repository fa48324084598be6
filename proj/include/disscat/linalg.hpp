#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>

namespace disscat {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

/// Singular values in decreasing order (empty for an empty matrix).
RVector singular_values(const CMatrix& a);

/// Largest singular value.  Zero for empty matrices.
double norm2(const CMatrix& a);

/// Smallest singular value.  Zero for empty matrices.
double sigma_min(const CMatrix& a);

/// Smallest eigenvalue of the Hermitian part (A + A^*)/2.
double min_hermitian_part_eig(const CMatrix& a);

/// Spectral-norm distance of `a` from Hermitian: ||a - a^*|| / 2.
double hermitian_defect(const CMatrix& a);

/// Inverse through a full-pivoting LU; throws NumericalFailure when the
/// reciprocal condition estimate falls below `rcond_floor`.
CMatrix checked_inverse(const CMatrix& a, double rcond_floor = 1e-14);

/// Max-abs entry.
double max_abs(const CMatrix& a);

}  // namespace disscat
