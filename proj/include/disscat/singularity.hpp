#pragma once

#include "disscat/boundary_values.hpp"
#include "disscat/parallel.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace disscat {

enum class PointStatus { kRegular, kSingular };

const char* to_string(PointStatus s);

struct PointVerdict {
  double lam = 0.0;
  PointStatus status = PointStatus::kRegular;
  double sigma_min_a = 0.0;
  double cond_a = 0.0;
  double threshold = 0.0;
  std::string failure;  // non-empty when the evaluation itself failed
};

/// A(lam) = I - i C R_V(lam - i0) C^*.
CMatrix a_matrix(const Model& model, double lam, const CauchyOptions& opts = {});

/// Never throws; numerical failures are recorded in `failure` and the point
/// is reported singular.
PointVerdict classify_point(const Model& model, double lam, const CauchyOptions& opts = {});

enum class EndVerdict { kBounded, kUnbounded, kSkipped };
enum class End { kLo, kHi };

const char* to_string(EndVerdict v);

struct EndpointResult {
  EndVerdict verdict = EndVerdict::kSkipped;
  double exponent = 0.0;  // fitted alpha in ||C R(mu - i0) C^*|| ~ |mu - end|^-alpha
  double sup = 0.0;
  std::vector<double> mu;
  std::vector<double> norm;
};

/// Samples ||C R(mu - i0) C^*|| on mu_j -> end geometrically and fits the
/// growth exponent; bounded iff alpha <= 0.05.  Throws SpectralSingularity
/// if some mu_j is singular.
EndpointResult endpoint_regularity(const Model& model, End end, int samples = 14);

struct SingularPoint {
  double lam = 0.0;
  double sigma_min = 0.0;
};

struct SingularityReport {
  std::vector<double> grid;
  std::vector<PointVerdict> curve;
  std::vector<PointVerdict> refined;  // refined local minima, singular or not
  std::vector<SingularPoint> singular_points;
  EndpointResult lo, hi;
  bool finite_set = true;
  double min_sigma = 0.0;
};

struct ScanOptions {
  bool endpoints = true;
  double lam_tol = 1e-9;  // golden-section bracket width
  Exec exec = Exec::kParallel;
  std::optional<double> lo, hi;  // scan range, default the working interior
};

/// Uniform scan of the working interior with golden-section refinement of
/// every local minimum of sigma_min(A).
SingularityReport scan(const Model& model, int n_grid, const ScanOptions& opts = {});

/// Columns lambda,sigma_min_A,cond_A,status.  Grid rows and refined minima
/// are merged in increasing lambda.
std::string to_csv(const SingularityReport& rep);
nlohmann::json to_json(const SingularityReport& rep);

}  // namespace disscat
