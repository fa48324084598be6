#include "disscat/oracle.hpp"

#include "disscat/errors.hpp"
#include "disscat/quadrature.hpp"
#include "disscat/scattering.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace disscat {

namespace {

constexpr double kMaxEigenCond = 1e8;
constexpr int kEpsLevels = 7;
constexpr double kEpsFloorSpacings = 5.0;
constexpr double kEdgeSpacings = 3.0;

const CMatrix& factor_matrix(const DiscretizedSystem& sys, Factor f) { return f == Factor::kG ? sys.g : sys.c; }

}  // namespace

double DiscretizedSystem::mean_spacing() const { return model.lambda.length() / static_cast<double>(nodes.size()); }

double DiscretizedSystem::local_spacing(double lam) const {
  const auto* begin = nodes.data();
  const auto* end = begin + nodes.size();
  const auto* it = std::upper_bound(begin, end, lam);
  if (it == begin) return nodes[1] - nodes[0];
  if (it == end) return nodes[nodes.size() - 1] - nodes[nodes.size() - 2];
  return *it - *(it - 1);
}

DiscretizedSystem discretize(const Model& model, int n_nodes, bool eigen) {
  if (n_nodes < 32) throw InvalidInput("discretize needs n_nodes >= 32");
  DiscretizedSystem sys;
  sys.model = model;
  sys.k = model.k;
  sys.n = n_nodes * model.k;
  const GaussRule rule = gauss_legendre(n_nodes, model.lambda.lo, model.lambda.hi);
  sys.nodes = Eigen::Map<const RVector>(rule.nodes.data(), n_nodes);
  sys.weights = Eigen::Map<const RVector>(rule.weights.data(), n_nodes);

  const int k = model.k;
  sys.h0.resize(sys.n);
  sys.g.resize(model.m, sys.n);
  sys.c.resize(model.r, sys.n);
  for (int j = 0; j < n_nodes; ++j) {
    const double sw = std::sqrt(sys.weights[j]);
    sys.h0.segment(j * k, k).setConstant(sys.nodes[j]);
    sys.g.middleCols(j * k, k) = sw * model.z0g(sys.nodes[j]).adjoint();
    sys.c.middleCols(j * k, k) = sw * model.z0c(sys.nodes[j]).adjoint();
  }
  sys.v = sys.g.adjoint() * model.K * sys.g;
  sys.cc = sys.c.adjoint() * sys.c;
  sys.h = sys.v - kI * sys.cc;
  sys.h.diagonal() += sys.h0.cast<cplx>();

  if (eigen) {
    Eigen::ComplexEigenSolver<CMatrix> es(sys.h);
    if (es.info() != Eigen::Success) throw NumericalFailure("eigendecomposition of H failed", 0.0);
    sys.eig_h = es.eigenvalues();
    sys.p_h = es.eigenvectors();
    const RVector sv = singular_values(sys.p_h);
    sys.cond_p = sv(0) / sv(sv.size() - 1);
    if (!(sys.cond_p <= kMaxEigenCond)) {
      std::ostringstream os;
      os << "eigenvector matrix of H has condition number " << sys.cond_p
         << " (near-defective H); perturb the model slightly";
      throw NumericalFailure(os.str(), sys.cond_p);
    }
    sys.pinv_h = sys.p_h.partialPivLu().inverse();

    CMatrix hv = sys.v;
    hv.diagonal() += sys.h0.cast<cplx>();
    Eigen::SelfAdjointEigenSolver<CMatrix> hs(hv);
    sys.eig_hv = hs.eigenvalues();
    sys.u_hv = hs.eigenvectors();
    sys.has_eigen = true;
  }
  return sys;
}

CMatrix matrix_resolvent_block(const DiscretizedSystem& sys, Factor x, Factor y, MatrixOp op, cplx z) {
  const CMatrix& xm = factor_matrix(sys, x);
  const CMatrix& ym = factor_matrix(sys, y);
  if (op == MatrixOp::kR0) {
    const CVector d = (sys.h0.cast<cplx>().array() - z).inverse().matrix();
    return xm * d.asDiagonal() * ym.adjoint();
  }
  if (sys.has_eigen && op == MatrixOp::kRV) {
    const CVector d = (sys.eig_hv.cast<cplx>().array() - z).inverse().matrix();
    return (xm * sys.u_hv) * d.asDiagonal() * (sys.u_hv.adjoint() * ym.adjoint());
  }
  if (sys.has_eigen && op == MatrixOp::kRfull) {
    const CVector d = (sys.eig_h.array() - z).inverse().matrix();
    return (xm * sys.p_h) * d.asDiagonal() * (sys.pinv_h * ym.adjoint());
  }
  CMatrix a = sys.h;
  if (op == MatrixOp::kRV) {
    a = sys.v;
    a.diagonal() += sys.h0.cast<cplx>();
  }
  a.diagonal().array() -= z;
  return xm * a.partialPivLu().solve(ym.adjoint());
}

ExtrapolatedBlock matrix_boundary_block(const DiscretizedSystem& sys, Factor x, Factor y, MatrixOp op, double lam,
                                        Side side) {
  const double lo = sys.nodes[0], hi = sys.nodes[sys.nodes.size() - 1];
  const double spacing = sys.local_spacing(lam);
  if (!(lam - lo >= kEdgeSpacings * spacing && hi - lam >= kEdgeSpacings * spacing))
    throw DomainError("matrix boundary block needs lam at least 3 level spacings inside the node range");

  ExtrapolatedBlock out;
  const double eps_min = kEpsFloorSpacings * spacing;
  std::vector<CMatrix> t(kEpsLevels);
  for (int j = 0; j < kEpsLevels; ++j) {
    const double eps = eps_min * std::pow(2.0, 0.25 * j);
    out.eps.push_back(eps);
    const cplx z(lam, side == Side::kPlus ? eps : -eps);
    t[j] = matrix_resolvent_block(sys, x, y, op, z);
  }
  // Neville's scheme at eps = 0; p[i] holds the interpolant through points i..i+level
  auto neville = [&](int first, int count) {
    std::vector<CMatrix> p(t.begin() + first, t.begin() + first + count);
    for (int level = 1; level < count; ++level)
      for (int i = 0; i + level < count; ++i) {
        const double xi = out.eps[first + i], xj = out.eps[first + i + level];
        p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
      }
    return p[0];
  };
  out.value = neville(0, kEpsLevels);
  const CMatrix lower = neville(0, kEpsLevels - 1);
  out.error_estimate = max_abs(out.value - lower);
  const double scale = std::max(max_abs(out.value), 1e-300);
  if (out.value.size() > 0 && max_abs(out.value) > 0.0 && out.error_estimate > 0.1 * scale) {
    std::ostringstream os;
    os << "eps extrapolation is ill-conditioned at lam = " << lam << " (estimate " << out.error_estimate << ")";
    throw NumericalFailure(os.str(), out.error_estimate);
  }
  return out;
}

double window(double t, double t_max) {
  const double start = 0.8 * t_max;
  if (t <= start) return 1.0;
  if (t >= t_max) return 0.0;
  return 0.5 * (1.0 + std::cos(kPi * (t - start) / (t_max - start)));
}

TimeGrid default_time_grid(const DiscretizedSystem& sys, double t_factor, double dt_factor) {
  if (!(t_factor > 0.0 && t_factor <= 0.25)) throw InvalidInput("T factor must lie in (0, 0.25]");
  if (!(dt_factor > 0.0 && dt_factor <= 0.1)) throw InvalidInput("dt factor must lie in (0, 0.1]");
  TimeGrid tg;
  tg.t_max = t_factor / sys.mean_spacing();
  // spread of d_a - h_b over the spectrum of H and H0
  double spread = sys.h0.maxCoeff() - sys.h0.minCoeff();
  if (sys.has_eigen) {
    double re_lo = sys.h0.minCoeff(), re_hi = sys.h0.maxCoeff(), im = 0.0;
    for (Eigen::Index i = 0; i < sys.eig_h.size(); ++i) {
      re_lo = std::min(re_lo, sys.eig_h[i].real());
      re_hi = std::max(re_hi, sys.eig_h[i].real());
      im = std::max(im, std::abs(sys.eig_h[i].imag()));
    }
    spread = std::hypot(re_hi - re_lo, im);
  }
  const double dt = dt_factor / std::max(spread, 1e-12);
  tg.steps = static_cast<int>(std::ceil(tg.t_max / dt));
  tg.steps += tg.steps % 2;
  tg.steps = std::max(tg.steps, 2);
  tg.dt = tg.t_max / tg.steps;
  return tg;
}

namespace {

std::vector<double> simpson_window_weights(const TimeGrid& tg) {
  std::vector<double> c(tg.steps + 1);
  for (int i = 0; i <= tg.steps; ++i) {
    const double s = (i == 0 || i == tg.steps) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    c[i] = s * tg.dt / 3.0 * window(i * tg.dt, tg.t_max);
  }
  return c;
}

}  // namespace

CMatrix time_kernel_serial(const CMatrix& m, const CVector& alpha, const CVector& beta, const TimeGrid& tg) {
  const std::vector<double> c = simpson_window_weights(tg);
  CMatrix out(m.rows(), m.cols());
  for (Eigen::Index a = 0; a < m.rows(); ++a)
    for (Eigen::Index b = 0; b < m.cols(); ++b) {
      const cplx w = alpha[a] - beta[b];
      cplx acc = 0.0;
      for (int i = 0; i <= tg.steps; ++i) acc += c[i] * std::exp(-kI * w * (i * tg.dt));
      out(a, b) = m(a, b) * acc;
    }
  return out;
}

CMatrix time_kernel_parallel(const CMatrix& m, const CVector& alpha, const CVector& beta, const TimeGrid& tg) {
  constexpr int kReseed = 32;
  const std::vector<double> c = simpson_window_weights(tg);
  CMatrix out(m.rows(), m.cols());
  const long rows = static_cast<long>(m.rows());
#pragma omp parallel for schedule(static)
  for (long a = 0; a < rows; ++a)
    for (Eigen::Index b = 0; b < m.cols(); ++b) {
      const cplx w = alpha[a] - beta[b];
      const cplx step = std::exp(-kI * w * tg.dt);
      cplx acc = 0.0;
      cplx phase = 1.0;
      for (int i = 0; i <= tg.steps; ++i) {
        if (i % kReseed == 0) phase = std::exp(-kI * w * (i * tg.dt));
        acc += c[i] * phase;
        phase *= step;
      }
      out(a, b) = m(a, b) * acc;
    }
  return out;
}

namespace {

CMatrix kernel(const CMatrix& m, const CVector& alpha, const CVector& beta, const TimeGrid& tg, Exec exec) {
  return exec == Exec::kParallel ? time_kernel_parallel(m, alpha, beta, tg) : time_kernel_serial(m, alpha, beta, tg);
}

void require_eigen(const DiscretizedSystem& sys) {
  if (!sys.has_eigen) throw InvalidInput("operation needs the eigendecomposition of H");
}

}  // namespace

CMatrix wave_minus(const DiscretizedSystem& sys, const TimeGrid& tg, Exec exec) {
  require_eigen(sys);
  const CMatrix vprime = sys.v - kI * sys.cc;
  const CMatrix id = CMatrix::Identity(sys.n, sys.n);
  if (max_abs(vprime) == 0.0) return id;
  const CMatrix m = sys.pinv_h * vprime;
  return id - kI * sys.p_h * kernel(m, sys.eig_h, sys.h0.cast<cplx>(), tg, exec);
}

CMatrix wave_plus(const DiscretizedSystem& sys, const TimeGrid& tg, Exec exec) {
  require_eigen(sys);
  const CMatrix vprime = sys.v - kI * sys.cc;
  const CMatrix id = CMatrix::Identity(sys.n, sys.n);
  if (max_abs(vprime) == 0.0) return id;
  const CMatrix m = vprime * sys.p_h;
  const CVector alpha = -sys.h0.cast<cplx>();
  const CVector beta = -sys.eig_h;
  return id - kI * kernel(m, alpha, beta, tg, exec) * sys.pinv_h;
}

ScatteringOperator scatt_operator(const DiscretizedSystem& sys, const TimeGrid& tg, Exec exec) {
  ScatteringOperator so;
  so.w_minus = wave_minus(sys, tg, exec);
  so.w_plus = wave_plus(sys, tg, exec);
  so.s = so.w_plus * so.w_minus;

  const int k = sys.k;
  const int nn = static_cast<int>(sys.nodes.size());
  CMatrix u = CMatrix::Zero(sys.n, k);
  for (int i = 0; i < nn; ++i) u.block(i * k, 0, k, k) = std::sqrt(sys.weights[i]) * CMatrix::Identity(k, k);
  const CMatrix su = so.s * u;
  so.fibers.resize(nn);
  for (int j = 0; j < nn; ++j) so.fibers[j] = su.block(j * k, 0, k, k) / std::sqrt(sys.weights[j]);

  for (int i = 0; i < nn; ++i)
    for (int j = 0; j < nn; ++j)
      if (i != j) so.max_offdiag = std::max(so.max_offdiag, so.s.block(i * k, j * k, k, k).norm());
  return so;
}

double intertwining_residual(const DiscretizedSystem& sys, const CMatrix& w_minus) {
  const CMatrix lhs = sys.h * w_minus - w_minus * sys.h0.cast<cplx>().asDiagonal();
  return norm2(lhs) / norm2(sys.h);
}

SubspaceReport subspaces(const DiscretizedSystem& sys, double t_decay, const CMatrix& w_minus, double iso_spacings) {
  require_eigen(sys);
  SubspaceReport rep;
  const double lo = sys.model.lambda.lo, hi = sys.model.lambda.hi;
  const double cut = iso_spacings * sys.mean_spacing();
  std::vector<Eigen::Index> iso;
  for (Eigen::Index i = 0; i < sys.eig_h.size(); ++i) {
    const cplx z = sys.eig_h[i];
    const double dist = std::abs(z - std::clamp(z.real(), lo, hi));
    if (dist <= cut) continue;
    iso.push_back(i);
    rep.isolated.push_back(z);
    if (std::abs(z.imag()) <= 1e-10 * (1.0 + std::abs(z))) {
      ++rep.dim_hb;
    } else {
      ++rep.dim_hp_h;
    }
  }
  rep.dim_hp_hstar = rep.dim_hp_h;

  if (!iso.empty()) {
    const CMatrix prop = (CMatrix(-kI * t_decay * sys.h)).exp();
    for (Eigen::Index i : iso) {
      const cplx z = sys.eig_h[i];
      if (std::abs(z.imag()) <= 1e-10 * (1.0 + std::abs(z))) continue;
      const CVector v = sys.p_h.col(i).normalized();
      DecayCheck dc;
      dc.eigval = z;
      dc.final_norm = (prop * v).norm();
      // the floor covers roundoff once the exact decay drops below it
      dc.bound = std::exp(z.imag() * t_decay) * (1.0 + 5e-2) + 1e-10 * sys.cond_p;
      dc.ok = dc.final_norm <= dc.bound;
      rep.hd_decay_checks.push_back(dc);
    }
  }

  // Ran(W_-) against the orthogonal complement of the left eigenvectors of
  // the isolated eigenvalues
  const Eigen::Index d = static_cast<Eigen::Index>(iso.size());
  if (d > 0 && w_minus.size() > 0) {
    CMatrix psi(sys.n, d);
    for (Eigen::Index j = 0; j < d; ++j) psi.col(j) = sys.pinv_h.row(iso[j]).adjoint();
    Eigen::HouseholderQR<CMatrix> qr(psi);
    const CMatrix q = qr.householderQ() * CMatrix::Identity(sys.n, d);
    Eigen::BDCSVD<CMatrix> svd(w_minus, Eigen::ComputeFullU);
    const CMatrix top = svd.matrixU().leftCols(sys.n - d);
    const double s = std::min(1.0, norm2(q.adjoint() * top));
    rep.ran_w_minus_angle = std::asin(s);
  }
  return rep;
}

AbsorptionResult absorption_probabilities(const DiscretizedSystem& sys, const CVector& u0, double t_max, int samples) {
  if (std::abs(u0.norm() - 1.0) > 1e-12) throw InvalidInput("initial state must have unit norm");
  if (u0.size() != sys.n) throw InvalidInput("initial state has the wrong dimension");
  AbsorptionResult res;
  for (int i = 0; i <= samples; ++i) res.times.push_back(t_max * i / samples);
  if (max_abs(sys.cc) == 0.0) {
    // unitary evolution
    res.norms2.assign(res.times.size(), 1.0);
    res.p_scatt = 1.0;
    res.p_abs = 0.0;
    return res;
  }
  require_eigen(sys);
  const CVector coef = sys.pinv_h * u0;
  for (double t : res.times) {
    const CVector phase = (-kI * t * sys.eig_h.array()).exp().matrix();
    res.norms2.push_back((sys.p_h * phase.cwiseProduct(coef)).squaredNorm());
  }
  res.p_scatt = res.norms2.back();
  res.p_abs = 1.0 - res.p_scatt;
  const std::size_t tail = static_cast<std::size_t>(std::floor(0.9 * samples));
  res.converged = std::abs(res.norms2.back() - res.norms2[tail]) < 1e-3;
  return res;
}

std::vector<double> propagator_norms(const DiscretizedSystem& sys, const std::vector<double>& times) {
  std::vector<double> out;
  for (double t : times) out.push_back(norm2(CMatrix(-kI * t * sys.h).exp()));
  return out;
}

std::vector<FiberComparison> compare_on_shell(const DiscretizedSystem& sys, const ScatteringOperator& so,
                                              double fraction) {
  const int nn = static_cast<int>(sys.nodes.size());
  const int first = static_cast<int>(std::ceil(0.5 * (1.0 - fraction) * nn));
  const int last = static_cast<int>(std::floor(0.5 * (1.0 + fraction) * nn));
  std::vector<int> idx;
  for (int j = first; j < last; ++j) idx.push_back(j);
  return map_indexed<FiberComparison>(idx, [&](int j) {
    FiberComparison fc;
    fc.lam = sys.nodes[j];
    fc.oracle = so.fibers[j];
    fc.reference = s_matrix(sys.model, fc.lam).s;
    fc.rel_error = norm2(fc.oracle - fc.reference) / std::max(norm2(fc.reference), 1e-300);
    return fc;
  });
}

}  // namespace disscat
