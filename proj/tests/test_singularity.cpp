#include <doctest.h>

#include "disscat/errors.hpp"
#include "disscat/scattering.hpp"
#include "disscat/singularity.hpp"

#include <cmath>
#include <sstream>

using namespace disscat;

namespace {
const Model& tuned() {
  static const Model m = builtin_model("tuned-singularity");
  return m;
}
}  // namespace

TEST_CASE("A is the identity without absorption") {
  const Model f = builtin_model("free");
  CHECK(same_matrix(a_matrix(f, 2.0), CMatrix::Identity(1, 1)));
}

TEST_CASE("A(lam - i eps) converges to A(lam)") {
  const Model m = builtin_model("rank1-gauss");
  const double lam = 1.8;
  const CMatrix a0 = a_matrix(m, lam);
  std::vector<double> x, y;
  for (int j = 0; j < 8; ++j) {
    const double eps = 1e-2 * std::ldexp(1.0, -j);
    const CMatrix a = CMatrix::Identity(1, 1) - kI * rv_block(m, Factor::kC, Factor::kC, cplx(lam, -eps));
    x.push_back(std::log(eps));
    y.push_back(std::log(norm2(a - a0)));
  }
  const double slope = (y.back() - y.front()) / (x.back() - x.front());
  CHECK(slope >= 0.99 - 0.1);
}

TEST_CASE("limit from below matches the eps sequence") {
  const Model m = builtin_model("rank1-gauss");
  for (double lam : {0.7, 2.0, 3.2}) {
    const CMatrix lim = crc_full_minus(m, lam);
    const CMatrix near = crc_full(m, cplx(lam, -1e-8));
    CHECK(norm2(near - lim) <= 1e-6);
  }
}

TEST_CASE("small coupling keeps every point regular") {
  ModelParams p;
  p.g_c = 0.1;
  const Model m = builtin_model("rank1-gauss", p);
  double sup = 0.0;
  for (double lam : interior_grid(m.lambda, 64))
    sup = std::max(sup, norm2(rv_block(m, Factor::kC, Factor::kC, BoundaryPoint{lam, Side::kMinus})));
  REQUIRE(sup < 0.5);
  for (double lam : interior_grid(m.lambda, 64)) {
    const PointVerdict v = classify_point(m, lam);
    CHECK(v.status == PointStatus::kRegular);
    CHECK(v.sigma_min_a >= 0.5);
  }
}

TEST_CASE("classification agrees with S at the tuned point") {
  const Model& m = tuned();
  const double lam0 = m.metadata.at("lambda0");
  const PointVerdict v = classify_point(m, lam0);
  CHECK(v.status == PointStatus::kSingular);
  CHECK(v.sigma_min_a <= 1e-8);
  for (double lam : interior_grid(m.lambda, 40)) {
    const PointVerdict p = classify_point(m, lam);
    const SMatrixResult s = s_matrix(m, lam);
    CHECK((p.status == PointStatus::kSingular) == (s.sigma_min <= 1e-6));
    CHECK((p.status == PointStatus::kRegular) == s.s_inv.has_value());
  }
}

TEST_CASE("scan of the free and default models") {
  const auto f = scan(builtin_model("free"), 32);
  CHECK(f.singular_points.empty());
  CHECK(f.lo.verdict == EndVerdict::kBounded);
  CHECK(f.lo.sup == 0.0);
  const auto r = scan(builtin_model("rank1-gauss"), 64);
  CHECK(r.singular_points.empty());
  CHECK(r.finite_set);
  CHECK(r.min_sigma > 0.1);
  CHECK(r.lo.verdict == EndVerdict::kBounded);
  CHECK(r.hi.verdict == EndVerdict::kBounded);
  CHECK_THROWS_AS(scan(builtin_model("free"), 8), InvalidInput);
}

TEST_CASE("scan finds exactly the tuned singularity") {
  const Model& m = tuned();
  const auto rep = scan(m, 256);
  REQUIRE(rep.singular_points.size() == 1);
  CHECK(std::abs(rep.singular_points[0].lam - m.metadata.at("lambda0")) <= 1e-6);
  CHECK(rep.finite_set);
  const std::string csv = to_csv(rep);
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  CHECK(line == "lambda,sigma_min_A,cond_A,status");
  int singular_rows = 0, rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    singular_rows += line.ends_with(",singular");
  }
  CHECK(singular_rows == 1);
  CHECK(rows > 256);
  const auto j = to_json(rep);
  CHECK(j["singular_points"].size() == 1);
}

TEST_CASE("serial and parallel scans agree") {
  const Model& m = tuned();
  ScanOptions s;
  s.exec = Exec::kSerial;
  s.endpoints = false;
  ScanOptions p = s;
  p.exec = Exec::kParallel;
  CHECK(to_csv(scan(m, 48, s)) == to_csv(scan(m, 48, p)));
}

TEST_CASE("endpoints are regular when the fiber maps vanish linearly") {
  ModelParams p;
  p.envelope_power = 1;
  const Model m = builtin_model("rank1-gauss", p);
  CHECK(validate_model(m).ok);
  for (End e : {End::kLo, End::kHi}) {
    const EndpointResult r = endpoint_regularity(m, e);
    CHECK(r.verdict == EndVerdict::kBounded);
    CHECK(r.mu.size() == 14);
    CHECK(std::isfinite(r.sup));
  }
  const EndpointResult none = endpoint_regularity(builtin_model("free"), End::kLo);
  CHECK(none.verdict == EndVerdict::kBounded);
  CHECK(none.sup == 0.0);
}
