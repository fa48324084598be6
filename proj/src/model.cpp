#include "disscat/model.hpp"

#include <cmath>
#include <sstream>

namespace disscat {

namespace {

constexpr double kHermiticityTol = 1e-12;
constexpr int kHolderPairs = 1000;
constexpr unsigned long long kHolderSeed = 0x5eedULL;

void add(ValidationReport& rep, std::string code, std::string message, double worst) {
  rep.violations.push_back({std::move(code), std::move(message), worst});
}

}  // namespace

ValidationReport validate_model(const Model& model) {
  ValidationReport rep;
  const Interval& d = model.lambda;
  if (!d.is_valid()) add(rep, "interval", "need lo < hi and 0 < margin < (hi - lo)/4", d.margin);
  if (model.k < 1 || model.m < 1 || model.r < 1) add(rep, "dims", "k, m, r must be >= 1", 0.0);

  if (model.K.rows() != model.m || model.K.cols() != model.m) {
    add(rep, "K-shape", "K must be m x m", static_cast<double>(model.K.rows()));
  } else if (model.K.size() > 0) {
    const double scale = max_abs(model.K);
    const double anti = max_abs(0.5 * (model.K - model.K.adjoint()));
    rep.hermiticity_defect = scale > 0.0 ? anti / scale : 0.0;
    if (!model.K.allFinite()) add(rep, "K-finite", "K has non-finite entries", 0.0);
    if (rep.hermiticity_defect > kHermiticityTol) add(rep, "K-hermitian", "K not Hermitian", rep.hermiticity_defect);
  }

  auto check_map = [&](const FiberMap& f, const char* label, int rows, int cols, double& quotient) {
    if (f.rows() != rows || f.cols() != cols) {
      std::ostringstream os;
      os << label << " has shape " << f.rows() << "x" << f.cols() << ", expected " << rows << "x" << cols;
      add(rep, std::string(label) + "-shape", os.str(), 0.0);
      return;
    }
    if (!(f.domain() == d)) add(rep, std::string(label) + "-domain", std::string(label) + " domain differs from Lambda", 0.0);
    if (!d.is_valid()) return;
    const HolderSample hs = sample_holder_quotient(f, kHolderPairs, kHolderSeed);
    quotient = hs.max_quotient;
    if (!hs.all_finite || !std::isfinite(hs.max_quotient))
      add(rep, std::string(label) + "-holder", std::string(label) + " has non-finite samples or Hoelder quotient",
          hs.max_quotient);
  };
  check_map(model.z0g, "z0g", model.k, model.m, rep.holder_quotient_g);
  check_map(model.z0c, "z0c", model.k, model.r, rep.holder_quotient_c);

  const double s0 = model.z0g.holder_exponent();
  if (!(s0 > 0.5 && s0 <= 1.0)) add(rep, "z0g-exponent", "z0g Hoelder exponent must lie in (1/2, 1]", s0);
  const double s = model.z0c.holder_exponent();
  if (!(s > 0.0 && s < 1.0)) add(rep, "z0c-exponent", "z0c Hoelder exponent must lie in (0, 1)", s);

  rep.ok = rep.violations.empty();
  return rep;
}

}  // namespace disscat
