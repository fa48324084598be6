#pragma once

#include "disscat/boundary_values.hpp"
#include "disscat/parallel.hpp"

#include <vector>

namespace disscat {

/// Finite realization of (H0, V, C^*C, H) on Gauss-Legendre nodes.  Basis
/// vector (j, a) -> index j k + a stands for sqrt(w_j)^{-1} times the
/// indicator of node j in fiber direction a.
struct DiscretizedSystem {
  Model model;
  RVector nodes, weights;
  int k = 1;
  int n = 0;          // N k
  RVector h0;         // diagonal of H0
  CMatrix g, c;       // discrete G (m x n) and C (r x n)
  CMatrix v, cc, h;   // V, C^*C, H = H0 + V - i C^*C

  // eigen caches, filled when requested
  bool has_eigen = false;
  CVector eig_h;      // eigenvalues of H
  CMatrix p_h;        // right eigenvectors (unit columns)
  CMatrix pinv_h;     // P^{-1}; its rows are left eigenvectors
  double cond_p = 0.0;
  RVector eig_hv;     // eigenvalues of H_V = H0 + V
  CMatrix u_hv;       // orthonormal eigenvectors of H_V

  double mean_spacing() const;
  /// Distance between the two nodes bracketing lam.
  double local_spacing(double lam) const;
};

/// Throws InvalidInput for n_nodes < 32.  With `eigen` the eigen caches are
/// filled; NumericalFailure when the eigenvector matrix of H has condition
/// number above 1e8.
DiscretizedSystem discretize(const Model& model, int n_nodes, bool eigen = true);

enum class MatrixOp { kR0, kRV, kRfull };

struct ExtrapolatedBlock {
  CMatrix value;
  double error_estimate = 0.0;  // absolute
  std::vector<double> eps;
};

/// X (H_op - lam -+ i eps)^{-1} Y^* extrapolated to eps = 0 from eps_j =
/// eps_min 2^{j/4}, j = 0..6, eps_min = 5 local level spacings.
ExtrapolatedBlock matrix_boundary_block(const DiscretizedSystem& sys, Factor x, Factor y, MatrixOp op, double lam,
                                        Side side);

/// Same compression at one off-axis point z.
CMatrix matrix_resolvent_block(const DiscretizedSystem& sys, Factor x, Factor y, MatrixOp op, cplx z);

/// Time grid for the windowed Cook integrals.
struct TimeGrid {
  double t_max = 0.0;
  double dt = 0.0;
  int steps = 0;  // even
};

/// T = t_factor / mean spacing (t_factor <= 0.25), dt = dt_factor / spread
/// of the eigenvalue differences.
TimeGrid default_time_grid(const DiscretizedSystem& sys, double t_factor = 0.2, double dt_factor = 0.1);

/// Smooth cut-off: 1 on [0, 0.8 T], cosine roll-off to 0 on [0.8 T, T].
double window(double t, double t_max);

/// out(a, b) = m(a, b) * int_0^T w(t) exp(-i (alpha_a - beta_b) t) dt by
/// composite Simpson.  The serial version is the plain reference; the
/// parallel one uses a rotation recurrence and OpenMP.
CMatrix time_kernel_serial(const CMatrix& m, const CVector& alpha, const CVector& beta, const TimeGrid& tg);
CMatrix time_kernel_parallel(const CMatrix& m, const CVector& alpha, const CVector& beta, const TimeGrid& tg);

/// W_-(H, H0) = I - i int w(t) e^{-itH} (V - i C^*C) e^{itH0} dt.
CMatrix wave_minus(const DiscretizedSystem& sys, const TimeGrid& tg, Exec exec = Exec::kParallel);

/// W_+(H0, H) = I - i int w(t) e^{itH0} (V - i C^*C) e^{-itH} dt.
CMatrix wave_plus(const DiscretizedSystem& sys, const TimeGrid& tg, Exec exec = Exec::kParallel);

struct ScatteringOperator {
  CMatrix w_minus, w_plus, s;
  std::vector<CMatrix> fibers;  // on-shell k x k matrix at every node
  double max_offdiag = 0.0;     // largest |S(i, j)| block norm, i != j
};

/// S(H, H0) = W_+ W_-.  The on-shell matrix at node j is read off from S
/// applied to fiber-constant vectors u_(i, a) = sqrt(w_i) delta_ab.
ScatteringOperator scatt_operator(const DiscretizedSystem& sys, const TimeGrid& tg, Exec exec = Exec::kParallel);

/// ||H W - W H0|| / ||H||.
double intertwining_residual(const DiscretizedSystem& sys, const CMatrix& w_minus);

struct DecayCheck {
  cplx eigval;
  double final_norm = 0.0;
  double bound = 0.0;  // e^{Im(eigval) T} (1 + 5e-2) plus a roundoff floor
  bool ok = false;
};

struct SubspaceReport {
  int dim_hb = 0;
  int dim_hp_h = 0;
  int dim_hp_hstar = 0;
  std::vector<cplx> isolated;  // isolated eigenvalues of H
  std::vector<DecayCheck> hd_decay_checks;
  double ran_w_minus_angle = 0.0;  // radians
};

/// Eigenvalues further than `iso_spacings` mean spacings from [lo, hi] are
/// isolated; real ones span H_b, the others H_p(H) (and, conjugated, H_p(H^*)).
SubspaceReport subspaces(const DiscretizedSystem& sys, double t_decay, const CMatrix& w_minus,
                         double iso_spacings = 10.0);

struct AbsorptionResult {
  double p_scatt = 1.0;
  double p_abs = 0.0;
  bool converged = true;
  std::vector<double> times, norms2;  // ||e^{-itH} u0||^2 samples
};

AbsorptionResult absorption_probabilities(const DiscretizedSystem& sys, const CVector& u0, double t_max,
                                          int samples = 200);

/// ||e^{-itH}|| from the matrix exponential (independent of the eigen cache).
std::vector<double> propagator_norms(const DiscretizedSystem& sys, const std::vector<double>& times);

/// Per-node comparison of on-shell fibers with a reference S(lam_j).
struct FiberComparison {
  double lam = 0.0;
  CMatrix oracle, reference;
  double rel_error = 0.0;
};

/// Compares the on-shell fibers of the middle `fraction` of the nodes with
/// the stationary S(lam_j).
std::vector<FiberComparison> compare_on_shell(const DiscretizedSystem& sys, const ScatteringOperator& so,
                                              double fraction = 0.5);

}  // namespace disscat
