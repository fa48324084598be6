#pragma once

#include "disscat/boundary_values.hpp"
#include "disscat/parallel.hpp"

#include <optional>
#include <vector>

namespace disscat {

/// Fiber compressions of the perturbed wave maps at lam:
///   Z_V^pm(lam; X) = Z0(lam; X) - Z0(lam; G) K G R_V(lam +- i0) X^*.
struct GammaBlocks {
  double lam = 0.0;
  CMatrix z0g, z0c;            // k x m, k x r
  CMatrix zvg_plus, zvg_minus; // k x m
  CMatrix zvc_plus, zvc_minus; // k x r
};

GammaBlocks gamma_blocks(const Model& model, const BoundaryData& bd);
GammaBlocks gamma_blocks(const Model& model, double lam, const CauchyOptions& opts = {});

/// S_V(lam) in the free-resolvent form, with the distance to the R_V form.
struct SVResult {
  CMatrix s_v;
  double form_residual = 0.0;
};

SVResult s_v_matrix(const Model& model, double lam, const CauchyOptions& opts = {});

struct CrossCheck {
  double kuroda_forms = 0.0;  // two S_V forms
  double rf_forms = 0.0;      // S via C R C^* vs via C R_V C^*
  double left_right = 0.0;    // right- vs left-factored S
  double inverse_forms = 0.0; // two S^{-1} forms (regular points only)
  double inverse_residual = 0.0;  // ||S S^{-1} - I|| (regular points only)
};

struct SMatrixResult {
  double lam = 0.0;
  CMatrix s_v;
  CMatrix s;
  std::optional<CMatrix> s_inv;  // empty at a spectral singularity
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  CMatrix defect;                // I - S^* S
  double sigma_min_a = 0.0;      // sigma_min(I - i C R_V(lam - i0) C^*)
  bool singular = false;
  CrossCheck residuals;
};

/// S(lam) with both inverse forms when lam is regular.  Never throws
/// SpectralSingularity; `singular` is set instead.
SMatrixResult s_matrix(const Model& model, double lam, const CauchyOptions& opts = {});

/// S(lam)^{-1}.  Throws SpectralSingularity at a spectral singularity.
CMatrix s_inverse(const Model& model, double lam, const CauchyOptions& opts = {});

/// I - S^* S for a model without potential, in closed form:
///   4 pi Z0C (I + i C R0(lam - i0) C^*)^{-1} (I - i C R0(lam + i0) C^*)^{-1} Z0C^*.
/// Throws InvalidInput when K != 0.
CMatrix defect_closed_form_v0(const Model& model, double lam, const CauchyOptions& opts = {});

/// s_matrix on every lam of the grid.
std::vector<SMatrixResult> s_matrix_scan(const Model& model, const std::vector<double>& grid,
                                         Exec exec = Exec::kParallel, const CauchyOptions& opts = {});

/// n equally spaced points of the working interior, end points included.
std::vector<double> interior_grid(const Interval& d, int n);

}  // namespace disscat
