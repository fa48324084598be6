#include "disscat/linalg.hpp"

#include "disscat/errors.hpp"

#include <algorithm>
#include <string>

namespace disscat {

RVector singular_values(const CMatrix& a) {
  if (a.size() == 0) return RVector{};
  if (std::min(a.rows(), a.cols()) <= 16) {
    Eigen::JacobiSVD<CMatrix> svd(a);
    return svd.singularValues();
  }
  Eigen::BDCSVD<CMatrix> svd(a);
  return svd.singularValues();
}

double norm2(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  return singular_values(a)(0);
}

double sigma_min(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  RVector s = singular_values(a);
  return s(s.size() - 1);
}

double min_hermitian_part_eig(const CMatrix& a) {
  CMatrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double hermitian_defect(const CMatrix& a) {
  return 0.5 * norm2(a - a.adjoint());
}

CMatrix checked_inverse(const CMatrix& a, double rcond_floor) {
  Eigen::FullPivLU<CMatrix> lu(a);
  const double rc = lu.rcond();
  if (!(rc > rcond_floor)) {
    throw NumericalFailure("matrix inverse: reciprocal condition " + std::to_string(rc), rc > 0 ? 1.0 / rc : 0.0);
  }
  return lu.inverse();
}

double max_abs(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

}  // namespace disscat
