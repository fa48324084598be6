#include <doctest.h>

#include "disscat/errors.hpp"
#include "disscat/oracle.hpp"
#include "disscat/quadrature.hpp"
#include "disscat/scattering.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace disscat;

namespace {

const DiscretizedSystem& r1_200() {
  static const DiscretizedSystem sys = discretize(builtin_model("rank1-gauss"), 200);
  return sys;
}

const ScatteringOperator& r1_scatt() {
  static const ScatteringOperator so = scatt_operator(r1_200(), default_time_grid(r1_200()));
  return so;
}

Model boosted() {
  ModelParams p;
  p.g_c = 1.5;
  return builtin_model("rank1-gauss", p);
}

int numerical_rank(const CMatrix& a) {
  const RVector sv = singular_values(a);
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) r += sv[i] > 1e-10 * sv[0];
  return r;
}

}  // namespace

TEST_CASE("discretization rejects coarse grids") {
  CHECK_THROWS_AS(discretize(builtin_model("rank1-gauss"), 16), InvalidInput);
}

TEST_CASE("discretized operators have the expected structure") {
  const DiscretizedSystem& sys = r1_200();
  CHECK(sys.n == 200);
  CHECK(max_abs(sys.v - sys.v.adjoint()) <= 1e-14);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sys.cc);
  CHECK(es.eigenvalues().minCoeff() >= -1e-14);
  CHECK(numerical_rank(sys.v) == 1);
  CHECK(numerical_rank(sys.cc) == 1);

  // tr C^*C is the quadrature of |Z0(lam; C)|^2
  const Model& m = sys.model;
  const GaussRule dense = gauss_legendre(1500, m.lambda.lo, m.lambda.hi);
  double fine = 0.0;
  for (std::size_t i = 0; i < dense.nodes.size(); ++i) fine += dense.weights[i] * m.z0c(dense.nodes[i]).squaredNorm();
  CHECK(std::abs(sys.cc.trace().real() - fine) <= 1e-10 * fine);
  // H = H0 + V - i C^* C is dissipative
  const CMatrix im_part = (sys.h - sys.h.adjoint()) / (2.0 * kI);
  Eigen::SelfAdjointEigenSolver<CMatrix> ei(im_part);
  CHECK(ei.eigenvalues().maxCoeff() <= 1e-13);
  for (Eigen::Index i = 0; i < sys.eig_h.size(); ++i) CHECK(sys.eig_h[i].imag() <= 1e-12);
}

TEST_CASE("matrix resolvent oracle matches the boundary values") {
  const Model m = builtin_model("rank1-gauss");
  const DiscretizedSystem sys = discretize(m, 400, false);
  const double lam = m.lambda.mid();
  const BoundaryData bd = boundary_data(m, lam);
  struct Case {
    MatrixOp op;
    Resolvent res;
    Side side;
  };
  for (const Case c : {Case{MatrixOp::kR0, Resolvent::kR0, Side::kPlus}, Case{MatrixOp::kRV, Resolvent::kRV, Side::kPlus},
                       Case{MatrixOp::kRV, Resolvent::kRV, Side::kMinus}}) {
    const ExtrapolatedBlock eb = matrix_boundary_block(sys, Factor::kC, Factor::kC, c.op, lam, c.side);
    const CMatrix ref = bd.get(m, Factor::kC, Factor::kC, c.res, c.side);
    CHECK(norm2(eb.value - ref) <= 5e-3 * norm2(ref));
    CHECK(eb.eps.size() == 7);
  }
  const ExtrapolatedBlock full_plus = matrix_boundary_block(sys, Factor::kC, Factor::kC, MatrixOp::kRfull, lam, Side::kPlus);
  CHECK(norm2(full_plus.value - bd.crc_full_plus) <= 5e-3 * norm2(bd.crc_full_plus));
  REQUIRE(bd.crc_full_minus.has_value());
  const ExtrapolatedBlock full_minus =
      matrix_boundary_block(sys, Factor::kC, Factor::kC, MatrixOp::kRfull, lam, Side::kMinus);
  CHECK(norm2(full_minus.value - *bd.crc_full_minus) <= 5e-3 * norm2(*bd.crc_full_minus));

  CHECK_THROWS_AS(matrix_boundary_block(sys, Factor::kC, Factor::kC, MatrixOp::kR0, sys.nodes[1], Side::kPlus),
                  DomainError);
}

TEST_CASE("off-axis matrix resolvent agrees with the Cauchy transform") {
  const Model m = builtin_model("rank1-gauss");
  const DiscretizedSystem sys = discretize(m, 400);
  const cplx z(2.1, 0.5);
  const CMatrix ref = r0_block(m, Factor::kG, Factor::kC, z);
  CHECK(norm2(matrix_resolvent_block(sys, Factor::kG, Factor::kC, MatrixOp::kR0, z) - ref) <= 1e-10);
  // eigen cache and direct solve agree
  DiscretizedSystem bare = sys;
  bare.has_eigen = false;
  for (MatrixOp op : {MatrixOp::kRV, MatrixOp::kRfull}) {
    const CMatrix a = matrix_resolvent_block(sys, Factor::kC, Factor::kC, op, z);
    const CMatrix b = matrix_resolvent_block(bare, Factor::kC, Factor::kC, op, z);
    CHECK(norm2(a - b) <= 1e-10 * norm2(b));
  }
}

TEST_CASE("time kernel: parallel recurrence matches the serial reference") {
  const DiscretizedSystem& sys = r1_200();
  const TimeGrid tg = default_time_grid(sys);
  const CMatrix a = time_kernel_serial(sys.v, sys.eig_h, sys.h0.cast<cplx>(), tg);
  const CMatrix b = time_kernel_parallel(sys.v, sys.eig_h, sys.h0.cast<cplx>(), tg);
  CHECK(max_abs(a - b) <= 1e-12 * std::max(1.0, max_abs(a)));
}

TEST_CASE("time grid respects the horizon limits") {
  const DiscretizedSystem& sys = r1_200();
  const TimeGrid tg = default_time_grid(sys);
  CHECK(tg.t_max == doctest::Approx(0.2 / sys.mean_spacing()));
  CHECK(tg.steps % 2 == 0);
  CHECK(tg.dt * tg.steps == doctest::Approx(tg.t_max));
  CHECK_THROWS_AS(default_time_grid(sys, 0.3), InvalidInput);
  CHECK(window(0.0, 10.0) == 1.0);
  CHECK(window(8.0, 10.0) == 1.0);
  CHECK(window(10.0, 10.0) == doctest::Approx(0.0));
  CHECK(window(9.0, 10.0) == doctest::Approx(0.5));
}

TEST_CASE("free model: wave operators are the identity") {
  const DiscretizedSystem sys = discretize(builtin_model("free"), 64);
  const TimeGrid tg = default_time_grid(sys);
  const CMatrix id = CMatrix::Identity(sys.n, sys.n);
  CHECK(max_abs(wave_minus(sys, tg) - id) == 0.0);
  CHECK(max_abs(wave_plus(sys, tg) - id) == 0.0);
}

TEST_CASE("wave operators are contractions and intertwine") {
  const DiscretizedSystem& sys = r1_200();
  const ScatteringOperator& so = r1_scatt();
  CHECK(norm2(so.w_minus) <= 1.0 + 5e-2);
  CHECK(norm2(so.w_plus) <= 1.0 + 5e-2);
  CHECK(norm2(so.s) <= 1.0 + 5e-2);
  CHECK(intertwining_residual(sys, so.w_minus) <= 5e-2);
}

TEST_CASE("serial and parallel wave operators agree") {
  const DiscretizedSystem sys = discretize(builtin_model("rank1-gauss"), 64);
  const TimeGrid tg = default_time_grid(sys);
  CHECK(max_abs(wave_minus(sys, tg, Exec::kSerial) - wave_minus(sys, tg, Exec::kParallel)) <= 1e-10);
  CHECK(max_abs(wave_plus(sys, tg, Exec::kSerial) - wave_plus(sys, tg, Exec::kParallel)) <= 1e-10);
}

TEST_CASE("time-integrated S matches the stationary S on shell") {
  const std::vector<FiberComparison> cmp = compare_on_shell(r1_200(), r1_scatt(), 0.5);
  CHECK(cmp.size() == 100);
  double worst = 0.0;
  for (const auto& c : cmp) worst = std::max(worst, c.rel_error);
  CHECK(worst <= 5e-2);
  // S is nearly block diagonal
  CHECK(r1_scatt().max_offdiag <= 5e-2);
}

TEST_CASE("boosted absorption: one isolated complex eigenvalue") {
  const DiscretizedSystem sys = discretize(boosted(), 200);
  const TimeGrid tg = default_time_grid(sys);
  const CMatrix w = wave_minus(sys, tg);
  const SubspaceReport rep = subspaces(sys, tg.t_max, w);
  CHECK(rep.dim_hb == 0);
  CHECK(rep.dim_hp_h == 1);
  CHECK(rep.dim_hp_hstar == 1);
  REQUIRE(rep.isolated.size() == 1);
  CHECK(rep.isolated[0].imag() < -0.2);
  REQUIRE(rep.hd_decay_checks.size() == 1);
  CHECK(rep.hd_decay_checks[0].ok);
  CHECK(rep.ran_w_minus_angle <= 5e-2);

  // the quasi-bound state is absorbed
  Eigen::Index i;
  sys.eig_h.imag().minCoeff(&i);
  const CVector u = sys.p_h.col(i).normalized();
  const AbsorptionResult ar = absorption_probabilities(sys, u, 10.0 / std::abs(sys.eig_h[i].imag()));
  CHECK(ar.p_abs >= 0.99);
  CHECK(ar.converged);
}

TEST_CASE("default coupling has no isolated eigenvalues") {
  const DiscretizedSystem& sys = r1_200();
  const SubspaceReport rep = subspaces(sys, 10.0, r1_scatt().w_minus);
  CHECK(rep.dim_hb == 0);
  CHECK(rep.dim_hp_h == 0);
  CHECK(rep.ran_w_minus_angle <= 5e-2);
}

TEST_CASE("absorption probabilities") {
  const DiscretizedSystem& sys = r1_200();
  // a packet localized in energy where C is active
  CVector u = CVector::Zero(sys.n);
  for (int j = 0; j < sys.n; ++j) u[j] = std::exp(-0.5 * std::pow((sys.nodes[j] - 2.5) / 0.2, 2));
  u.normalize();
  const AbsorptionResult ar = absorption_probabilities(sys, u, default_time_grid(sys).t_max);
  CHECK(ar.p_scatt + ar.p_abs == doctest::Approx(1.0));
  CHECK(ar.p_abs > 0.0);
  for (std::size_t i = 1; i < ar.norms2.size(); ++i) CHECK(ar.norms2[i] <= ar.norms2[i - 1] + 1e-12);

  // no absorption: the evolution is unitary and nothing is lost
  Model m = builtin_model("rank1-gauss");
  m.z0c = FiberMap::zero(1, 1, m.lambda, 0.99);
  const DiscretizedSystem free_c = discretize(m, 64);
  CVector u2 = CVector::Ones(free_c.n).normalized();
  const AbsorptionResult none = absorption_probabilities(free_c, u2, 50.0);
  CHECK(none.p_scatt == 1.0);
  CHECK(none.p_abs == 0.0);
  CHECK_THROWS_AS(absorption_probabilities(free_c, 2.0 * u2, 1.0), InvalidInput);
}

TEST_CASE("propagator is a contraction semigroup") {
  const DiscretizedSystem sys = discretize(builtin_model("rank2-mixed"), 48);
  const std::vector<double> norms = propagator_norms(sys, {0.0, 0.5, 2.0, 10.0, 40.0});
  CHECK(norms[0] == doctest::Approx(1.0));
  for (double n : norms) CHECK(n <= 1.0 + 1e-8);
}

TEST_CASE("tuned singularity: the discretized S nearly vanishes on shell") {
  const DiscretizedSystem probe = discretize(builtin_model("rank1-gauss"), 200, false);
  Eigen::Index j0;
  (probe.nodes.array() - 2.0).abs().minCoeff(&j0);
  ModelParams p;
  p.lambda0 = probe.nodes[j0];
  const DiscretizedSystem sys = discretize(builtin_model("tuned-singularity", p), 200);
  const ScatteringOperator so = scatt_operator(sys, default_time_grid(sys));
  CHECK(singular_values(so.fibers[j0]).minCoeff() <= 1e-2);
  CHECK(norm2(so.s) <= 1.0 + 5e-2);
}
