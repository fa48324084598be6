#pragma once

#include "disscat/fiber_map.hpp"
#include "disscat/linalg.hpp"

#include <map>
#include <string>
#include <vector>

namespace disscat {

/// Dissipative system H = H0 + V - i C^* C in the spectral representation
/// of H0: H0 is multiplication by lam on L^2(Lambda; C^k), V = G^* K G and
/// C enter only through the fiber maps Z0(lam; G) (k x m) and Z0(lam; C)
/// (k x r).
struct Model {
  std::string name = "custom";
  Interval lambda;
  int k = 1;
  int m = 1;
  int r = 1;
  CMatrix K;
  FiberMap z0g;
  FiberMap z0c;
  std::map<std::string, double> metadata;

  bool has_potential() const { return max_abs(K) != 0.0 && !z0g.is_zero(); }
  bool has_absorption() const { return !z0c.is_zero(); }
};

struct Violation {
  std::string code;
  std::string message;
  double worst_value = 0.0;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
  double holder_quotient_g = 0.0;
  double holder_quotient_c = 0.0;
  double hermiticity_defect = 0.0;
};

/// Checks the computable surrogates of the standing hypotheses.  Never throws.
ValidationReport validate_model(const Model& model);

/// Parameters of the built-in model zoo.  Fields irrelevant to a model are
/// ignored.
struct ModelParams {
  double lo = 0.0;
  double hi = 4.0;
  double margin = -1.0;  // < 0: 1e-2 (hi - lo)
  int k = 1;
  double g_v = 0.3;      // potential coupling
  double g_c = 0.35;     // absorption coupling
  double center_g = 1.5;
  double width_g = 0.5;
  double center_c = 2.5;
  double width_c = 0.6;
  double lambda0 = 2.0;  // tuned-singularity target
  int envelope_power = 2; // fiber maps vanish like (lam - lo)^p at the edges
};

/// Built-in models: "free", "rank1-gauss", "rank2-mixed", "tuned-singularity".
/// Throws InvalidInput for unknown names and NumericalFailure when the
/// tuned-singularity calibration cannot bracket a root.
Model builtin_model(const std::string& name, const ModelParams& params = {});

std::vector<std::string> builtin_model_names();

}  // namespace disscat
