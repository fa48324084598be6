#include <doctest.h>

#include "disscat/errors.hpp"
#include "disscat/model.hpp"
#include "disscat/model_io.hpp"

#include <cmath>

using namespace disscat;

TEST_CASE("validator accepts a hermitian rank-one model") {
  Model m = builtin_model("rank1-gauss");
  m.K = CMatrix::Constant(1, 1, 1.0);
  const auto rep = validate_model(m);
  CHECK(rep.ok);
  CHECK(rep.violations.empty());
}

TEST_CASE("validator flags an anti-hermitian coupling") {
  Model m = builtin_model("rank1-gauss");
  m.K = CMatrix::Constant(1, 1, kI);
  const auto rep = validate_model(m);
  REQUIRE_FALSE(rep.ok);
  REQUIRE(rep.violations.size() == 1);
  CHECK(rep.violations[0].message == "K not Hermitian");
  CHECK(rep.violations[0].worst_value == doctest::Approx(1.0));
}

TEST_CASE("validator flags exponents and shapes") {
  Model m = builtin_model("rank1-gauss");
  m.z0g = FiberMap::zero(1, 1, m.lambda, 0.4);
  m.K = CMatrix::Zero(2, 2);
  const auto rep = validate_model(m);
  CHECK_FALSE(rep.ok);
  bool exp = false, shape = false;
  for (const auto& v : rep.violations) {
    exp |= v.code == "z0g-exponent";
    shape |= v.code == "K-shape";
  }
  CHECK(exp);
  CHECK(shape);
}

TEST_CASE("every zoo model validates") {
  for (const auto& name : builtin_model_names()) {
    CAPTURE(name);
    const Model m = builtin_model(name);
    CHECK(validate_model(m).ok);
  }
  CHECK(builtin_model("rank1-gauss").z0g.holder_exponent() == 0.99);
}

TEST_CASE("free model has zero coupling and absorption") {
  const Model m = builtin_model("free");
  CHECK(max_abs(m.K) == 0.0);
  CHECK(m.z0c.is_zero());
  CHECK(m.k == 1);
  CHECK(m.lambda.lo == 0.0);
  CHECK(m.lambda.hi == 4.0);
}

TEST_CASE("unknown model name") { CHECK_THROWS_AS(builtin_model("nope"), InvalidInput); }

TEST_CASE("fiber evaluation") {
  const Interval d = Interval::with_default_margin(0.0, 4.0);
  CMatrix a0(2, 1);
  a0 << cplx(1.0, 2.0), cplx(-0.5, 0.0);
  const FiberMap c = FiberMap::constant(a0, d);
  CHECK(same_matrix(c(0.3), a0));
  CHECK(same_matrix(c(4.0), a0));
  CHECK_THROWS_AS(c(4.5), DomainError);

  const FiberMap deg0(2, 1, d, 0.9, Chebyshev{{a0}});
  CHECK(same_matrix(deg0(0.0), a0));
  CHECK(same_matrix(deg0(4.0), a0));

  const Model m = builtin_model("rank1-gauss");
  const double mid = m.lambda.mid();
  const CMatrix v1 = m.z0g(mid);
  const CMatrix v2 = m.z0g(mid);
  CHECK(same_matrix(v1, v2));
  const double env = 1.0;  // envelope is 1 at the centre of Lambda
  const double expect = ModelParams{}.g_v * env * std::exp(-0.5 * std::pow((mid - 1.5) / 0.5, 2));
  CHECK(std::abs(v1(0, 0) - expect) <= 1e-14);
  const FiberMap cheb = to_chebyshev(m.z0g, 64);
  CHECK(std::abs(cheb(mid)(0, 0) - v1(0, 0)) <= 1e-14);
}

TEST_CASE("model json round trip is value identical") {
  for (const auto& name : {"rank1-gauss", "rank2-mixed", "free"}) {
    CAPTURE(name);
    const Model m = builtin_model(name);
    const auto j = model_to_json(m);
    const Model back = model_from_json(nlohmann::json::parse(j.dump()));
    CHECK(model_to_json(back) == j);
    CHECK(back.z0g == m.z0g);
    CHECK(back.z0c == m.z0c);
    CHECK(same_matrix(back.K, m.K));
  }
  Model m = builtin_model("rank1-gauss");
  m.z0c = to_chebyshev(m.z0c, 24);
  const Model back = model_from_json(nlohmann::json::parse(model_to_json(m).dump()));
  CHECK(back.z0c == m.z0c);
}

TEST_CASE("malformed model documents") {
  CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"k": 1})")), InvalidInput);
  auto j = model_to_json(builtin_model("rank1-gauss"));
  j["z0g"]["type"] = "spline";
  CHECK_THROWS_AS(model_from_json(j), InvalidInput);
}
