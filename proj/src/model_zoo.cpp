#include "disscat/boundary_values.hpp"
#include "disscat/errors.hpp"
#include "disscat/model.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <optional>

namespace disscat {

namespace {

constexpr double kZooHolder = 0.99;
constexpr int kCalibrationSweep = 48;

Interval zoo_interval(const ModelParams& p) {
  Interval d{p.lo, p.hi, p.margin};
  if (p.margin < 0.0) d = Interval::with_default_margin(p.lo, p.hi);
  if (!d.is_valid()) throw InvalidInput("model interval needs lo < hi and 0 < margin < (hi - lo)/4");
  return d;
}

ProfileTerm bump(double center, double width, int power, CMatrix coefficient) {
  if (power < 0) throw InvalidInput("envelope power must be >= 0");
  return ProfileTerm{Shape::kGauss, center, width, power, std::move(coefficient)};
}

CMatrix scalar(cplx v) { return CMatrix::Constant(1, 1, v); }

Model free_model(const ModelParams& p) {
  Model model;
  model.name = "free";
  model.lambda = zoo_interval(p);
  if (p.k < 1) throw InvalidInput("free model needs k >= 1");
  model.k = p.k;
  model.m = 1;
  model.r = 1;
  model.K = CMatrix::Zero(1, 1);
  model.z0g = FiberMap::zero(p.k, 1, model.lambda, kZooHolder);
  model.z0c = FiberMap::zero(p.k, 1, model.lambda, kZooHolder);
  return model;
}

Model rank1_gauss(const ModelParams& p) {
  Model model;
  model.name = "rank1-gauss";
  model.lambda = zoo_interval(p);
  model.K = scalar(1.0);
  model.z0g = FiberMap(1, 1, model.lambda, kZooHolder, ClosedForm{{bump(p.center_g, p.width_g, p.envelope_power, scalar(p.g_v))}});
  model.z0c = FiberMap(1, 1, model.lambda, kZooHolder, ClosedForm{{bump(p.center_c, p.width_c, p.envelope_power, scalar(p.g_c))}});
  model.metadata = {{"g_v", p.g_v}, {"g_c", p.g_c}, {"center_g", p.center_g}, {"center_c", p.center_c}};
  return model;
}

Model rank2_mixed(const ModelParams& p) {
  Model model;
  model.name = "rank2-mixed";
  model.lambda = zoo_interval(p);
  model.k = 2;
  model.m = 2;
  model.r = 1;
  model.K.resize(2, 2);
  model.K << 1.0, 0.3, 0.3, -0.5;
  const double len = model.lambda.length();
  CMatrix a(2, 2), b(2, 2), c(2, 1);
  a << p.g_v, 0.0, 0.2 * p.g_v, 0.0;
  b << 0.0, cplx(0.1, 0.2) * p.g_v, 0.0, p.g_v;
  c << p.g_c, cplx(0.0, 0.5) * p.g_c;
  const double lo = model.lambda.lo;
  ClosedForm g{{bump(lo + 0.35 * len, 0.15 * len, p.envelope_power, a), bump(lo + 0.6 * len, 0.2 * len, p.envelope_power, b)}};
  model.z0g = FiberMap(2, 2, model.lambda, kZooHolder, std::move(g));
  model.z0c = FiberMap(2, 1, model.lambda, kZooHolder, ClosedForm{{bump(p.center_c, p.width_c, p.envelope_power, c)}});
  model.metadata = {{"g_v", p.g_v}, {"g_c", p.g_c}};
  return model;
}

// Phi(center) = psi R_V(lam0 - i0) psi^* for the unit-coupling absorption
// bump centred at `center`.  A(lam0) = 1 - i g^2 Phi vanishes exactly when
// Re Phi = 0 and g^2 = -1 / Im Phi.
cplx unit_phi(const ModelParams& p, double center) {
  ModelParams q = p;
  q.g_c = 1.0;
  q.center_c = center;
  const Model probe = rank1_gauss(q);
  return rv_block(probe, Factor::kC, Factor::kC, BoundaryPoint{p.lambda0, Side::kMinus})(0, 0);
}

Model tuned_singularity(const ModelParams& p) {
  const Interval d = zoo_interval(p);
  if (!d.in_working_interior(p.lambda0)) throw InvalidInput("tuned-singularity: lambda0 must lie in the working interior");

  const double a = d.lo + 0.1 * d.length();
  const double b = d.hi - 0.1 * d.length();
  auto re_phi = [&](double c) { return unit_phi(p, c).real(); };

  // sweep for sign changes, keep the bracket closest to the requested centre
  std::optional<std::pair<double, double>> best;
  double x0 = a, f0 = re_phi(a);
  for (int i = 1; i <= kCalibrationSweep; ++i) {
    const double x1 = a + (b - a) * i / kCalibrationSweep;
    const double f1 = re_phi(x1);
    if (f0 == 0.0 || (f0 < 0.0) != (f1 < 0.0)) {
      auto dist = [&](const std::pair<double, double>& br) { return std::abs(0.5 * (br.first + br.second) - p.center_c); };
      std::pair<double, double> br{x0, x1};
      if (!best || dist(br) < dist(*best)) best = br;
    }
    x0 = x1;
    f0 = f1;
  }
  if (!best) throw NumericalFailure("tuned-singularity: no sign change of Re psi R_V psi^* over the centre sweep", 0.0);

  std::uintmax_t iters = 200;
  const auto root = boost::math::tools::toms748_solve(re_phi, best->first, best->second,
                                                      boost::math::tools::eps_tolerance<double>(52), iters);
  const double center = 0.5 * (root.first + root.second);
  const cplx phi = unit_phi(p, center);
  if (!(phi.imag() < 0.0)) throw NumericalFailure("tuned-singularity: Im psi R_V psi^* is not negative", phi.imag());
  const double g_c = std::sqrt(-1.0 / phi.imag());

  ModelParams q = p;
  q.center_c = center;
  q.g_c = g_c;
  Model model = rank1_gauss(q);
  model.name = "tuned-singularity";
  model.metadata["g_c"] = g_c;
  model.metadata["center_c"] = center;
  model.metadata["lambda0"] = p.lambda0;
  return model;
}

}  // namespace

std::vector<std::string> builtin_model_names() { return {"free", "rank1-gauss", "rank2-mixed", "tuned-singularity"}; }

Model builtin_model(const std::string& name, const ModelParams& params) {
  if (name == "free") return free_model(params);
  if (name == "rank1-gauss") return rank1_gauss(params);
  if (name == "rank2-mixed") return rank2_mixed(params);
  if (name == "tuned-singularity") return tuned_singularity(params);
  throw InvalidInput("unknown built-in model '" + name + "'");
}

}  // namespace disscat
