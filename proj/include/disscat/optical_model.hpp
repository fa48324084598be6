#pragma once

#include "disscat/linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace disscat {

enum class PotentialShape { kZero, kSquareWell, kGaussian, kWoodsSaxon };

/// Radial potential family.  Square well: depth on r < radius.  Gaussian:
/// depth exp(-(r / radius)^2).  Woods-Saxon: depth / (1 + exp((r - radius) /
/// diffuseness)).  "depth" is the signed value at the origin.
struct RadialPotential {
  PotentialShape shape = PotentialShape::kZero;
  double depth = 0.0;
  double radius = 1.0;
  double diffuseness = 0.5;

  double operator()(double r) const;
  /// Radius of a jump discontinuity, if any.
  std::optional<double> breakpoint() const;
  static RadialPotential square_well(double depth, double radius);
};

/// -u'' + [l(l+1)/r^2 + V(r) - i W(r)] u = lam u on (0, inf).  V and W are
/// taken as zero beyond r_match.
struct RadialProblem {
  int ell = 0;
  RadialPotential v, w;
  double r_match = 2.0;
  double r_min = 1e-6;
  double rtol = 1e-10;
};

/// Throws InvalidInput on negative W, non-decaying potentials at r_match or
/// a bad radial range.
void validate_problem(const RadialProblem& problem);

struct PartialWaveResult {
  double lam = 0.0;
  int ell = 0;
  cplx s{1.0, 0.0};
  double abs_s = 1.0;
  double residual = 0.0;  // |s(r_match) - s(r_match + quarter wavelength)|
};

/// Riccati-Bessel s_l(x) = x j_l(x) and c_l(x) = -x y_l(x) with derivatives.
struct Riccati {
  double s, ds, c, dc;
};
Riccati riccati(int ell, double x);

/// Integrates the radial equation outward from r_min (u ~ r^(l+1)) with an
/// adaptive Dormand-Prince scheme and matches at r_match to
/// alpha h^-(kr) + beta h^+(kr); s_l = -beta / alpha so that the free case
/// gives 1.  Throws DomainError for lam < 1e-3 and NumericalFailure when the
/// integration fails.
PartialWaveResult solve_partial_wave(const RadialProblem& problem, double lam);

/// Closed-form s_0 of the complex square well V0 - i W0 on r < R.
cplx square_well_s0(double v0, double w0, double radius, double lam);

/// Square well with s_0(lam0) = 0 (coherent perfect absorption).
struct CpaWell {
  double v0 = 0.0, w0 = 0.0, radius = 1.0, lam0 = 1.0;
  cplx kappa;  // interior wavenumber sqrt(lam0 - v0 + i w0)
};

/// Complex Newton on kappa cos(kappa R) + i k sin(kappa R) = 0 from a list of
/// starting points; returns the absorbing (W0 > 0) solution with the
/// shallowest well.  Throws NumericalFailure when none converges.
CpaWell cpa_square_well(double lam0, double radius);

struct ResonanceHit {
  int ell = 0;
  double lam_zero = 0.0;
  double abs_s = 0.0;
  bool is_zero = false;  // abs_s <= 1e-6
};

/// Zeros of s_l on the real axis: local minima of |s_l| over the grid are
/// refined by 1-D minimization to 1e-8 in lam; minima below 1e-3 are kept.
/// problem.ell is overridden by 0..ell_max.
std::vector<ResonanceHit> resonance_scan(const RadialProblem& problem, const std::vector<double>& lam_grid,
                                         int ell_max);

struct SMatrixSummary {
  double lam = 0.0;
  std::vector<cplx> entries;  // s_l repeated 2l + 1 times
  double sigma_min = 1.0, sigma_max = 1.0;
};

/// Diagonal S(lam) on the spherical harmonics with l <= ell_max.  Throws
/// InvalidInput when the results disagree on lam.
SMatrixSummary assemble_s_matrix(const std::vector<PartialWaveResult>& results);

struct InfinityVerdict {
  bool bounded = true;
  std::optional<double> exponent;  // fitted slope of log max_l |1 - s_l| vs log lam; empty when identically 0
  std::vector<double> lams, deviations;
};

/// Fits max_l |1 - s_l(lam)| ~ lam^p over the given energies; bounded iff
/// p <= -0.3.
InfinityVerdict infinity_regularity(const RadialProblem& problem, const std::vector<double>& lams, int ell_max);

/// n geometric energies from lam_min to lam_max.
std::vector<double> geometric_grid(double lam_min, double lam_max, int n);

/// CSV with header lambda,ell,re_s,im_s,abs_s,residual.
std::string partial_waves_csv(const std::vector<PartialWaveResult>& rows);

}  // namespace disscat
