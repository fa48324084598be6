#include <doctest.h>

#include "disscat/errors.hpp"
#include "disscat/scattering.hpp"

#include <Eigen/Eigenvalues>

using namespace disscat;

namespace {
const Model& r1() {
  static const Model m = builtin_model("rank1-gauss");
  return m;
}
double min_eig_hermitian(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (a + a.adjoint()));
  return es.eigenvalues().minCoeff();
}
}  // namespace

TEST_CASE("gamma blocks without potential equal the free fiber maps") {
  Model m = r1();
  m.K = CMatrix::Zero(1, 1);
  const GammaBlocks g = gamma_blocks(m, 2.0);
  CHECK(same_matrix(g.zvc_plus, m.z0c(2.0)));
  CHECK(same_matrix(g.zvg_plus, m.z0g(2.0)));
}

TEST_CASE("gamma blocks jump across the axis") {
  const Model& m = r1();
  const double lam = 1.7;
  const BoundaryData bd = boundary_data(m, lam);
  const GammaBlocks g = gamma_blocks(m, bd);
  CHECK(norm2(g.zvc_plus - g.zvc_minus) > 1e-3);
  const CMatrix stone = -2.0 * kPi * kI * g.z0g * m.K * g.zvg_plus.adjoint() * g.zvc_plus;
  CHECK(norm2((g.zvc_plus - g.zvc_minus) - stone) <= 1e-8);
  // Stone formula for the perturbed resolvent
  const CMatrix jump = bd.get(m, Factor::kC, Factor::kC, Resolvent::kRV, Side::kPlus) -
                       bd.get(m, Factor::kC, Factor::kC, Resolvent::kRV, Side::kMinus);
  CHECK(norm2(g.zvc_plus.adjoint() * g.zvc_plus - jump / (2.0 * kPi * kI)) <= 1e-10);
  CHECK(norm2(g.zvc_minus.adjoint() * g.zvc_minus - jump / (2.0 * kPi * kI)) <= 1e-10);
}

TEST_CASE("tiny potential barely moves the wave maps") {
  Model m = r1();
  m.K = CMatrix::Constant(1, 1, 1e-8);
  const GammaBlocks g = gamma_blocks(m, 2.3);
  CHECK(norm2(g.zvc_plus - m.z0c(2.3)) <= 1e-6);
}

TEST_CASE("S_V is the identity without potential and unitary otherwise") {
  Model m0 = r1();
  m0.K = CMatrix::Zero(1, 1);
  CHECK(same_matrix(s_v_matrix(m0, 2.0).s_v, CMatrix::Identity(1, 1)));
  for (const auto& name : {"rank1-gauss", "rank2-mixed"}) {
    const Model m = builtin_model(name);
    double worst = 0.0, forms = 0.0;
    for (double lam : interior_grid(m.lambda, 101)) {
      const SVResult sv = s_v_matrix(m, lam);
      worst = std::max(worst, norm2(sv.s_v.adjoint() * sv.s_v - CMatrix::Identity(m.k, m.k)));
      forms = std::max(forms, sv.form_residual);
    }
    CAPTURE(name);
    CHECK(worst <= 1e-8);
    CHECK(forms <= 1e-10);
  }
}

TEST_CASE("S reduces to S_V without absorption") {
  const Model f = builtin_model("free");
  const SMatrixResult r = s_matrix(f, 1.0);
  CHECK(same_matrix(r.s, CMatrix::Identity(1, 1)));
  Model m = r1();
  m.z0c = FiberMap::zero(1, 1, m.lambda);
  const SMatrixResult s = s_matrix(m, 2.2);
  CHECK(same_matrix(s.s, s.s_v));
  REQUIRE(s.s_inv.has_value());
  CHECK(norm2(*s.s_inv - s.s_v.adjoint()) <= 1e-12);
}

TEST_CASE("S is a contraction with a positive defect, forms agree") {
  for (const auto& name : {"rank1-gauss", "rank2-mixed"}) {
    CAPTURE(name);
    const Model m = builtin_model(name);
    const auto res = s_matrix_scan(m, interior_grid(m.lambda, 101));
    for (const auto& r : res) {
      CHECK(r.sigma_max <= 1.0 + 1e-9);
      CHECK(hermitian_defect(r.defect) <= 1e-12);
      CHECK(min_eig_hermitian(r.defect) >= -1e-10);
      CHECK(r.residuals.rf_forms <= 1e-10);
      CHECK(r.residuals.left_right <= 1e-8);
      REQUIRE(r.s_inv.has_value());
      CHECK(r.residuals.inverse_residual <= 1e-8);
      CHECK(r.residuals.inverse_forms <= 1e-10);
    }
  }
}

TEST_CASE("defect closed form without potential") {
  Model m = r1();
  m.K = CMatrix::Zero(1, 1);
  CHECK_THROWS_AS(defect_closed_form_v0(r1(), 2.0), InvalidInput);
  for (double lam : interior_grid(m.lambda, 101)) {
    const CMatrix closed = defect_closed_form_v0(m, lam);
    const SMatrixResult r = s_matrix(m, lam);
    CHECK(norm2(closed - r.defect) <= 1e-9);
    CHECK(min_eig_hermitian(closed) >= -1e-10);
  }
  const CMatrix z = defect_closed_form_v0(builtin_model("free"), 2.0);
  CHECK(max_abs(z) == 0.0);
}

TEST_CASE("tuned singularity: S is not invertible at lambda0") {
  const Model m = builtin_model("tuned-singularity");
  const double lam0 = m.metadata.at("lambda0");
  const SMatrixResult r = s_matrix(m, lam0);
  CHECK(r.singular);
  CHECK_FALSE(r.s_inv.has_value());
  CHECK(r.sigma_min <= 1e-6);
  CHECK_THROWS_AS(s_inverse(m, lam0), SpectralSingularity);
  CHECK_NOTHROW(s_inverse(m, lam0 + 0.1));
}

TEST_CASE("serial and parallel scans agree bitwise") {
  const Model& m = r1();
  const auto grid = interior_grid(m.lambda, 33);
  const auto a = s_matrix_scan(m, grid, Exec::kSerial);
  const auto b = s_matrix_scan(m, grid, Exec::kParallel);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(same_matrix(a[i].s, b[i].s));
}
