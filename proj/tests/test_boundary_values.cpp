#include <doctest.h>

#include "disscat/boundary_values.hpp"
#include "disscat/errors.hpp"

#include <cmath>
#include <random>

using namespace disscat;

namespace {
const Model& r1() {
  static const Model m = builtin_model("rank1-gauss");
  return m;
}
const Model& tuned() {
  static const Model m = builtin_model("tuned-singularity");
  return m;
}
}  // namespace

TEST_CASE("constant density closed forms") {
  const Interval d{0.5, 3.0, 0.02};
  CMatrix a0(2, 2);
  a0 << 1.0, cplx(0.0, 2.0), -0.5, 3.0;
  const Density dens = [&](double) { return a0; };
  const cplx z(1.3, 0.2);
  const CMatrix off = cauchy_transform(dens, d, z);
  CHECK(max_abs(off - a0 * std::log((d.hi - z) / (d.lo - z))) <= 1e-11 * max_abs(off));
  const cplx zl(1.3, -0.2);
  CHECK(max_abs(cauchy_transform(dens, d, zl) - a0 * std::log((d.hi - zl) / (d.lo - zl))) <= 1e-11 * max_abs(off));
  const cplx far(7.0, 0.5);
  CHECK(max_abs(cauchy_transform(dens, d, far) - a0 * std::log((d.hi - far) / (d.lo - far))) <= 1e-11);

  const double mu = 1.1;
  const CMatrix on = cauchy_transform(dens, d, mu, Side::kPlus);
  const CMatrix expect = a0 * (std::log((d.hi - mu) / (mu - d.lo)) + kI * kPi);
  CHECK(max_abs(on - expect) <= 1e-11 * max_abs(expect));
  CHECK_THROWS_AS(cauchy_transform(dens, d, cplx(1.0, 0.0)), DomainError);
}

TEST_CASE("boundary value matches eps-extrapolated off-axis values") {
  const Model& m = r1();
  const Density dens = fiber_product(m, Factor::kG, Factor::kG);
  const double mu = m.lambda.mid();
  const CMatrix bv = cauchy_transform(dens, m.lambda, mu, Side::kPlus);
  // Richardson on eps_j = 1e-2 |Lambda| 2^-j: the error is a power series in eps
  const int levels = 7;
  std::vector<CMatrix> t(levels);
  for (int j = 0; j < levels; ++j)
    t[j] = cauchy_transform(dens, m.lambda, cplx(mu, 1e-2 * m.lambda.length() * std::ldexp(1.0, -j)));
  for (int order = 1; order < levels; ++order)
    for (int j = levels - 1; j >= order; --j) {
      const double f = std::ldexp(1.0, order);
      t[j] = (f * t[j] - t[j - 1]) / (f - 1.0);
    }
  CHECK(max_abs(t[levels - 1] - bv) <= 1e-6 * max_abs(bv));
}

TEST_CASE("free model compressions") {
  const Model m = builtin_model("free");
  CHECK(max_abs(r0_block(m, Factor::kC, Factor::kC, cplx(2.0, 0.1))) == 0.0);
  CHECK(max_abs(crc_full_plus(m, 2.0)) == 0.0);
  CHECK(max_abs(crc_full_minus(m, 2.0)) == 0.0);
}

TEST_CASE("r0 reflection and plemelj jumps") {
  const Model& m = r1();
  const cplx z(1.7, 0.3);
  const CMatrix a = r0_block(m, Factor::kG, Factor::kG, z);
  const CMatrix b = r0_block(m, Factor::kG, Factor::kG, std::conj(z));
  CHECK(max_abs(a - b.adjoint()) <= 1e-12);

  const Model m2 = builtin_model("rank2-mixed");
  for (const Model* mp : {&m, &m2}) {
    const Interval& d = mp->lambda;
    double worst = 0.0;
    for (int i = 0; i <= 100; ++i) {
      const double lam = d.lo + d.margin + (d.length() - 2 * d.margin) * i / 100.0;
      const BoundaryData bd = boundary_data(*mp, lam);
      for (Factor x : {Factor::kG, Factor::kC})
        for (Factor y : {Factor::kG, Factor::kC}) {
          const CMatrix jump = bd.get(*mp, x, y, Resolvent::kR0, Side::kPlus) - bd.get(*mp, x, y, Resolvent::kR0, Side::kMinus);
          const CMatrix zx = x == Factor::kG ? mp->z0g(lam) : mp->z0c(lam);
          const CMatrix zy = y == Factor::kG ? mp->z0g(lam) : mp->z0c(lam);
          worst = std::max(worst, max_abs(jump - 2.0 * kPi * kI * zx.adjoint() * zy));
        }
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("rv reduces to r0 without potential") {
  Model m = r1();
  m.K = CMatrix::Zero(1, 1);
  const BoundaryPoint p{1.9, Side::kPlus};
  CHECK(same_matrix(rv_block(m, Factor::kC, Factor::kC, p), r0_block(m, Factor::kC, Factor::kC, p)));
}

TEST_CASE("accretivity of I - i C R_V C^* in the closed upper half plane") {
  for (const auto& name : {"rank1-gauss", "rank2-mixed"}) {
    const Model m = builtin_model(name);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> re(m.lambda.lo - 1.0, m.lambda.hi + 1.0), im(0.0, 2.0);
    double worst = 1e300;
    for (int i = 0; i < 50; ++i) {
      const cplx z(re(rng), im(rng) + 1e-3);
      const CMatrix a = CMatrix::Identity(m.r, m.r) - kI * rv_block(m, Factor::kC, Factor::kC, z);
      worst = std::min(worst, min_hermitian_part_eig(a));
    }
    CHECK(worst >= 1.0 - 1e-10);
  }
}

TEST_CASE("PALH residual and finite plus-side values") {
  const Model& m = r1();
  for (double lam : {0.3, 1.0, 2.0, 3.1, 3.9}) {
    const BoundaryData bd = boundary_data(m, lam);
    CHECK(bd.palh_residual <= 1e-12);
    CHECK(bd.crc_full_plus.allFinite());
    REQUIRE(bd.crc_full_minus.has_value());
    CHECK(max_abs(*bd.crc_full_minus - crc_full_minus(m, lam)) <= 1e-12);
    CHECK(max_abs(bd.crc_full_plus - crc_full_plus(m, lam)) <= 1e-12);
  }
}

TEST_CASE("off-axis full compression agrees with the limit") {
  const Model& m = r1();
  const CMatrix near = crc_full(m, cplx(2.2, 1e-7));
  CHECK(max_abs(near - crc_full_plus(m, 2.2)) <= 1e-5);
}

TEST_CASE("tuned model is singular at its lambda0") {
  const Model& m = tuned();
  const double lam0 = m.metadata.at("lambda0");
  CHECK(lam0 == 2.0);
  CHECK(m.lambda.in_working_interior(lam0));
  try {
    crc_full_minus(m, lam0);
    FAIL("expected a spectral singularity");
  } catch (const SpectralSingularity& e) {
    CHECK(e.sigma_min() <= 1e-8);
    CHECK(e.lam() == lam0);
  }
  CHECK_NOTHROW(crc_full_plus(m, lam0));
}

TEST_CASE("boundary points outside the working interior") {
  const Model& m = r1();
  CHECK_THROWS_AS(boundary_data(m, 0.01), DomainError);
  CauchyOptions opts;
  opts.allow_outside_margin = true;
  CHECK_NOTHROW(boundary_data(m, 0.01, opts));
}
