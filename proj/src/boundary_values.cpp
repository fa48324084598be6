#include "disscat/boundary_values.hpp"

#include "disscat/errors.hpp"
#include "disscat/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace disscat {

namespace {

constexpr int kPanelOrder = 16;
constexpr int kInitialPanels = 4;
constexpr double kExceptionalTol = 1e-10;

const GaussRule& panel_rule() {
  static const GaussRule rule = gauss_legendre(kPanelOrder);
  return rule;
}

using Integrand = std::function<CMatrix(double)>;

CMatrix gl_panel(const Integrand& f, double a, double b) {
  const GaussRule& rule = panel_rule();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  CMatrix acc = rule.weights[0] * f(mid + half * rule.nodes[0]);
  for (int i = 1; i < kPanelOrder; ++i) acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * acc;
}

struct Segment {
  double a, b;
};

// Globally adaptive composite Gauss-Legendre over a union of segments: the
// panel with the largest error estimate (one panel vs. its two halves) is
// bisected until the summed estimate drops below the tolerance.
CMatrix adaptive_integrate(const Integrand& f, const std::vector<Segment>& segments, const CauchyOptions& opts) {
  struct Panel {
    double a, b;
    CMatrix left, right;
    double err;
  };
  auto make = [&](double a, double b, const CMatrix& whole) {
    const double m = 0.5 * (a + b);
    Panel p{a, b, gl_panel(f, a, m), gl_panel(f, m, b), 0.0};
    p.err = max_abs(p.left + p.right - whole);
    return p;
  };
  auto worse = [](const Panel& x, const Panel& y) { return x.err < y.err; };

  std::vector<Panel> heap;
  for (const auto& s : segments) {
    const double h = (s.b - s.a) / kInitialPanels;
    for (int i = 0; i < kInitialPanels; ++i) {
      const double a = s.a + i * h;
      const double b = (i + 1 == kInitialPanels) ? s.b : s.a + (i + 1) * h;
      heap.push_back(make(a, b, gl_panel(f, a, b)));
    }
  }
  std::make_heap(heap.begin(), heap.end(), worse);

  auto totals = [&](CMatrix& sum, double& err) {
    sum = CMatrix::Zero(heap.front().left.rows(), heap.front().left.cols());
    err = 0.0;
    for (const auto& p : heap) {
      sum += p.left + p.right;
      err += p.err;
    }
  };
  CMatrix sum;
  double err = 0.0;
  totals(sum, err);
  int panels = static_cast<int>(heap.size());
  while (err > opts.rel_tol * max_abs(sum)) {
    if (panels >= opts.max_panels) {
      std::ostringstream os;
      os << "cauchy quadrature did not converge within " << opts.max_panels << " panels (residual " << err << ")";
      throw NumericalFailure(os.str(), err);
    }
    std::pop_heap(heap.begin(), heap.end(), worse);
    Panel p = std::move(heap.back());
    heap.pop_back();
    const double m = 0.5 * (p.a + p.b);
    sum -= p.left + p.right;
    err -= p.err;
    if (p.b - p.a < 1e-15 * std::max(1.0, std::abs(m))) {
      // too narrow to bisect; accept as is
      sum += p.left + p.right;
      p.err = 0.0;
      heap.push_back(std::move(p));
      std::push_heap(heap.begin(), heap.end(), worse);
    } else {
      for (Panel c : {make(p.a, m, p.left), make(m, p.b, p.right)}) {
        sum += c.left + c.right;
        err += c.err;
        heap.push_back(std::move(c));
        std::push_heap(heap.begin(), heap.end(), worse);
      }
      ++panels;
    }
    if (panels % 512 == 0) totals(sum, err);
  }
  return sum;
}

void require_boundary_point(const Interval& d, double mu, const CauchyOptions& opts) {
  const bool ok = opts.allow_outside_margin ? d.open_contains(mu) : d.in_working_interior(mu);
  if (!ok) {
    std::ostringstream os;
    os.precision(17);
    os << "boundary value requested at lam = " << mu << " outside the "
       << (opts.allow_outside_margin ? "open spectrum" : "working interior");
    throw DomainError(os.str());
  }
}

int dim_of(const Model& model, Factor f) { return f == Factor::kG ? model.m : model.r; }
int offset_of(const Model& model, Factor f) { return f == Factor::kG ? 0 : model.m; }

}  // namespace

CMatrix cauchy_transform(const Density& density, const Interval& domain, cplx z, const CauchyOptions& opts) {
  if (z.imag() == 0.0) throw DomainError("off-axis cauchy transform needs Im z != 0");
  const double lo = domain.lo, hi = domain.hi;
  const double x = z.real();
  if (x > lo && x < hi) {
    // subtract A(x): the remainder is bounded near the real point x
    const CMatrix ax = density(x);
    Integrand f = [&](double lam) -> CMatrix { return (density(lam) - ax) / (lam - z); };
    CMatrix out = adaptive_integrate(f, {{lo, x}, {x, hi}}, opts);
    out += (std::log(cplx(hi) - z) - std::log(cplx(lo) - z)) * ax;
    return out;
  }
  Integrand f = [&](double lam) -> CMatrix { return density(lam) / (lam - z); };
  return adaptive_integrate(f, {{lo, hi}}, opts);
}

CMatrix principal_value(const Density& density, const Interval& domain, double mu, const CauchyOptions& opts) {
  if (!domain.open_contains(mu)) throw DomainError("principal value needs lo < mu < hi");
  const CMatrix amu = density(mu);
  Integrand f = [&](double lam) -> CMatrix { return (density(lam) - amu) / (lam - mu); };
  CMatrix out = adaptive_integrate(f, {{domain.lo, mu}, {mu, domain.hi}}, opts);
  out += std::log((domain.hi - mu) / (mu - domain.lo)) * amu;
  return out;
}

CMatrix cauchy_transform(const Density& density, const Interval& domain, double mu, Side side,
                         const CauchyOptions& opts) {
  CMatrix pv = principal_value(density, domain, mu, opts);
  const cplx plemelj = (side == Side::kPlus ? 1.0 : -1.0) * kI * kPi;
  return pv + plemelj * density(mu);
}

Density fiber_product(const Model& model, Factor x, Factor y) {
  const FiberMap& fx = x == Factor::kG ? model.z0g : model.z0c;
  const FiberMap& fy = y == Factor::kG ? model.z0g : model.z0c;
  return [&fx, &fy](double lam) -> CMatrix { return fx.eval_unchecked(lam).adjoint() * fy.eval_unchecked(lam); };
}

Density stacked_density(const Model& model) {
  return [&model](double lam) -> CMatrix {
    CMatrix z(model.k, model.m + model.r);
    z.leftCols(model.m) = model.z0g.eval_unchecked(lam);
    z.rightCols(model.r) = model.z0c.eval_unchecked(lam);
    return z.adjoint() * z;
  };
}

CMatrix stacked_r0(const Model& model, const EvalPoint& at, const CauchyOptions& opts) {
  const Density dens = stacked_density(model);
  if (const auto* z = std::get_if<cplx>(&at)) return cauchy_transform(dens, model.lambda, *z, opts);
  const auto& bp = std::get<BoundaryPoint>(at);
  require_boundary_point(model.lambda, bp.lam, opts);
  return cauchy_transform(dens, model.lambda, bp.lam, bp.side, opts);
}

CMatrix stacked_rv(const Model& model, const CMatrix& s0, double lam_for_error) {
  const int m = model.m;
  const CMatrix grg = s0.topLeftCorner(m, m);
  const CMatrix id = CMatrix::Identity(m, m);
  const CMatrix t = id + model.K * grg;
  const double smin = sigma_min(t);
  if (smin < kExceptionalTol * (1.0 + norm2(model.K * grg))) {
    std::ostringstream os;
    os.precision(17);
    os << "I + K G R0 G^* singular at lam = " << lam_for_error << " (sigma_min " << smin
       << "): embedded eigenvalue of H_V";
    throw ExceptionalPoint(os.str(), lam_for_error, smin);
  }
  const CMatrix left = s0.leftCols(m);  // W R0 G^*
  const CMatrix right = s0.topRows(m);  // G R0 W^*
  return s0 - left * t.partialPivLu().solve(model.K * right);
}

CMatrix stacked_full(const Model& model, const CMatrix& s0) {
  const int n = model.m + model.r;
  CMatrix ktilde = CMatrix::Zero(n, n);
  ktilde.topLeftCorner(model.m, model.m) = model.K;
  ktilde.bottomRightCorner(model.r, model.r) = -kI * CMatrix::Identity(model.r, model.r);
  const CMatrix t = CMatrix::Identity(n, n) + ktilde * s0;
  return s0 - s0 * t.partialPivLu().solve(ktilde * s0);
}

CMatrix block(const Model& model, const CMatrix& stacked, Factor x, Factor y) {
  return stacked.block(offset_of(model, x), offset_of(model, y), dim_of(model, x), dim_of(model, y));
}

CMatrix r0_block(const Model& model, Factor x, Factor y, const EvalPoint& at, const CauchyOptions& opts) {
  return block(model, stacked_r0(model, at, opts), x, y);
}

namespace {
double lam_of(const EvalPoint& at) {
  if (const auto* z = std::get_if<cplx>(&at)) return z->real();
  return std::get<BoundaryPoint>(at).lam;
}
}  // namespace

CMatrix rv_block(const Model& model, Factor x, Factor y, const EvalPoint& at, const CauchyOptions& opts) {
  const CMatrix s0 = stacked_r0(model, at, opts);
  return block(model, stacked_rv(model, s0, lam_of(at)), x, y);
}

CMatrix crc_full(const Model& model, cplx z, const CauchyOptions& opts) {
  const CMatrix rv = stacked_rv(model, stacked_r0(model, z, opts), z.real());
  const CMatrix b = block(model, rv, Factor::kC, Factor::kC);
  const CMatrix a = CMatrix::Identity(model.r, model.r) - kI * b;
  // C R C^* = C R_V C^* (I - i C R_V C^*)^{-1}
  return a.transpose().partialPivLu().solve(b.transpose()).transpose();
}

CMatrix crc_full_plus(const Model& model, double lam, const CauchyOptions& opts) {
  const CMatrix s0 = stacked_r0(model, BoundaryPoint{lam, Side::kPlus}, opts);
  const CMatrix full = stacked_full(model, s0);
  const CMatrix out = block(model, full, Factor::kC, Factor::kC);
  if (!out.allFinite()) throw NumericalFailure("C R(lam + i0) C^* is not finite", 0.0);
  return out;
}

double singularity_threshold(const CMatrix& crv_minus) { return 1e-6 * (1.0 + norm2(crv_minus)); }

CMatrix crc_full_minus(const Model& model, double lam, const CauchyOptions& opts) {
  const CMatrix s0 = stacked_r0(model, BoundaryPoint{lam, Side::kMinus}, opts);
  const CMatrix b = block(model, stacked_rv(model, s0, lam), Factor::kC, Factor::kC);
  const CMatrix a = CMatrix::Identity(model.r, model.r) - kI * b;
  const double smin = sigma_min(a);
  if (smin < singularity_threshold(b)) {
    std::ostringstream os;
    os.precision(17);
    os << "spectral singularity at lam = " << lam << ": sigma_min(I - i C R_V(lam - i0) C^*) = " << smin;
    throw SpectralSingularity(os.str(), lam, smin);
  }
  return -kI * (a.inverse() - CMatrix::Identity(model.r, model.r));
}

double palh_residual(const CMatrix& crc_plus, const CMatrix& crvc_plus) {
  const auto n = crc_plus.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  return norm2((id + kI * crc_plus) * (id - kI * crvc_plus) - id);
}

CMatrix BoundaryData::get(const Model& model, Factor x, Factor y, Resolvent op, Side side) const {
  const CMatrix& s = op == Resolvent::kR0 ? (side == Side::kPlus ? r0_plus : r0_minus)
                                          : (side == Side::kPlus ? rv_plus : rv_minus);
  return block(model, s, x, y);
}

BoundaryData boundary_data(const Model& model, double lam, const CauchyOptions& opts) {
  require_boundary_point(model.lambda, lam, opts);
  BoundaryData bd;
  bd.lam = lam;
  const Density dens = stacked_density(model);
  const CMatrix pv = principal_value(dens, model.lambda, lam, opts);
  const CMatrix jump = kI * kPi * dens(lam);
  bd.r0_plus = pv + jump;
  bd.r0_minus = pv - jump;
  bd.rv_plus = stacked_rv(model, bd.r0_plus, lam);
  bd.rv_minus = stacked_rv(model, bd.r0_minus, lam);
  bd.crc_full_plus = block(model, stacked_full(model, bd.r0_plus), Factor::kC, Factor::kC);

  const int r = model.r;
  const CMatrix id = CMatrix::Identity(r, r);
  const CMatrix crv_plus = block(model, bd.rv_plus, Factor::kC, Factor::kC);
  const CMatrix crv_minus = block(model, bd.rv_minus, Factor::kC, Factor::kC);
  bd.palh_residual = palh_residual(bd.crc_full_plus, crv_plus);
  const CMatrix a = id - kI * crv_minus;
  bd.sigma_min_a = sigma_min(a);
  bd.threshold = singularity_threshold(crv_minus);
  if (bd.sigma_min_a >= bd.threshold) bd.crc_full_minus = -kI * (a.inverse() - id);
  return bd;
}

}  // namespace disscat
