#pragma once

#include "disscat/linalg.hpp"
#include "disscat/model.hpp"

#include <functional>
#include <optional>
#include <variant>

namespace disscat {

enum class Side { kPlus, kMinus };
enum class Factor { kG, kC };
enum class Resolvent { kR0, kRV };

/// lam +- i0 on the real axis.
struct BoundaryPoint {
  double lam;
  Side side;
};

/// Either an off-axis point z (Im z != 0) or a boundary point lam +- i0.
using EvalPoint = std::variant<cplx, BoundaryPoint>;

struct CauchyOptions {
  double rel_tol = 1e-11;
  int max_panels = 1 << 14;
  /// Boundary evaluations normally require lam in the working interior;
  /// endpoint probes relax this to the open interval (lo, hi).
  bool allow_outside_margin = false;
};

/// Matrix-valued density lam -> A(lam) on Lambda.
using Density = std::function<CMatrix(double)>;

/// Off-axis Cauchy transform  int_Lambda A(lam) / (lam - z) dlam,  Im z != 0.
CMatrix cauchy_transform(const Density& density, const Interval& domain, cplx z, const CauchyOptions& opts = {});

/// Principal value  PV int_Lambda A(lam) / (lam - mu) dlam  for mu in (lo, hi).
CMatrix principal_value(const Density& density, const Interval& domain, double mu, const CauchyOptions& opts = {});

/// Boundary value at mu +- i0: principal value plus (+-) i pi A(mu).
CMatrix cauchy_transform(const Density& density, const Interval& domain, double mu, Side side,
                         const CauchyOptions& opts = {});

/// Z0(lam; X)^dagger Z0(lam; Y), the density of X R0 Y^*.
Density fiber_product(const Model& model, Factor x, Factor y);

/// Density of the stacked compression W R0 W^*, W = [G; C]: a (m + r) square
/// matrix whose blocks are the four X R0 Y^* densities.
Density stacked_density(const Model& model);

/// W R0(at) W^* as an (m + r) x (m + r) matrix.
CMatrix stacked_r0(const Model& model, const EvalPoint& at, const CauchyOptions& opts = {});

/// W R_V W^* from W R0 W^* through the rank-m resolvent identity.  Throws
/// ExceptionalPoint when I + K G R0 G^* is singular.
CMatrix stacked_rv(const Model& model, const CMatrix& stacked_r0, double lam_for_error = 0.0);

/// W R W^* for the full dissipative H from W R0 W^*, treating V - i C^* C as
/// one factorized perturbation with coupling diag(K, -i I).
CMatrix stacked_full(const Model& model, const CMatrix& stacked_r0);

/// Extracts the X, Y block of a stacked (m + r) matrix.
CMatrix block(const Model& model, const CMatrix& stacked, Factor x, Factor y);

/// X R0 Y^* at z or lam +- i0.
CMatrix r0_block(const Model& model, Factor x, Factor y, const EvalPoint& at, const CauchyOptions& opts = {});

/// X R_V Y^* at z or lam +- i0.
CMatrix rv_block(const Model& model, Factor x, Factor y, const EvalPoint& at, const CauchyOptions& opts = {});

/// C R(z) C^* for the full H at an off-axis z (via C R_V C^*).
CMatrix crc_full(const Model& model, cplx z, const CauchyOptions& opts = {});

/// C R(lam + i0) C^* (r x r), computed from the free resolvent through the
/// combined factorization; always finite in the interior.
CMatrix crc_full_plus(const Model& model, double lam, const CauchyOptions& opts = {});

/// C R(lam - i0) C^* = -i [A(lam)^{-1} - I], A = I - i C R_V(lam - i0) C^*.
/// Throws SpectralSingularity when sigma_min(A) is below the threshold.
CMatrix crc_full_minus(const Model& model, double lam, const CauchyOptions& opts = {});

/// sigma_min(A(lam)) threshold: 1e-6 (1 + ||C R_V(lam - i0) C^*||).
double singularity_threshold(const CMatrix& crv_minus);

/// || (I + i CRC(+)) (I - i CR_VC(+)) - I ||.
double palh_residual(const CMatrix& crc_plus, const CMatrix& crvc_plus);

/// Every compressed boundary block at one lam.
struct BoundaryData {
  double lam = 0.0;
  CMatrix r0_plus, r0_minus;  // stacked W R0(lam +- i0) W^*
  CMatrix rv_plus, rv_minus;  // stacked W R_V(lam +- i0) W^*
  CMatrix crc_full_plus;
  std::optional<CMatrix> crc_full_minus;
  double sigma_min_a = 0.0;   // sigma_min of I - i C R_V(lam - i0) C^*
  double threshold = 0.0;
  double palh_residual = 0.0;

  CMatrix get(const Model& model, Factor x, Factor y, Resolvent op, Side side) const;
};

BoundaryData boundary_data(const Model& model, double lam, const CauchyOptions& opts = {});

}  // namespace disscat
