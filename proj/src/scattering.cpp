#include "disscat/scattering.hpp"

#include "disscat/errors.hpp"

#include <sstream>

namespace disscat {

GammaBlocks gamma_blocks(const Model& model, const BoundaryData& bd) {
  GammaBlocks g;
  g.lam = bd.lam;
  g.z0g = model.z0g(bd.lam);
  g.z0c = model.z0c(bd.lam);
  const CMatrix zk = g.z0g * model.K;
  g.zvg_plus = g.z0g - zk * bd.get(model, Factor::kG, Factor::kG, Resolvent::kRV, Side::kPlus);
  g.zvg_minus = g.z0g - zk * bd.get(model, Factor::kG, Factor::kG, Resolvent::kRV, Side::kMinus);
  g.zvc_plus = g.z0c - zk * bd.get(model, Factor::kG, Factor::kC, Resolvent::kRV, Side::kPlus);
  g.zvc_minus = g.z0c - zk * bd.get(model, Factor::kG, Factor::kC, Resolvent::kRV, Side::kMinus);
  return g;
}

GammaBlocks gamma_blocks(const Model& model, double lam, const CauchyOptions& opts) {
  return gamma_blocks(model, boundary_data(model, lam, opts));
}

namespace {

struct SVForms {
  CMatrix form1, form2;
};

SVForms s_v_forms(const Model& model, const BoundaryData& bd, const CMatrix& z0g) {
  const int k = model.k, m = model.m;
  const CMatrix id_k = CMatrix::Identity(k, k);
  const CMatrix id_m = CMatrix::Identity(m, m);
  const CMatrix grvg = bd.get(model, Factor::kG, Factor::kG, Resolvent::kRV, Side::kPlus);
  const CMatrix gr0g = bd.get(model, Factor::kG, Factor::kG, Resolvent::kR0, Side::kPlus);
  SVForms f;
  f.form1 = id_k - 2.0 * kPi * kI * z0g * (id_m - model.K * grvg) * model.K * z0g.adjoint();
  f.form2 = id_k - 2.0 * kPi * kI * z0g * (id_m + model.K * gr0g).partialPivLu().solve(model.K) * z0g.adjoint();
  return f;
}

}  // namespace

SVResult s_v_matrix(const Model& model, double lam, const CauchyOptions& opts) {
  const BoundaryData bd = boundary_data(model, lam, opts);
  const SVForms f = s_v_forms(model, bd, model.z0g(lam));
  return {f.form2, norm2(f.form1 - f.form2)};
}

SMatrixResult s_matrix(const Model& model, double lam, const CauchyOptions& opts) {
  const BoundaryData bd = boundary_data(model, lam, opts);
  const GammaBlocks g = gamma_blocks(model, bd);
  const int k = model.k, r = model.r;
  const CMatrix id_k = CMatrix::Identity(k, k);
  const CMatrix id_r = CMatrix::Identity(r, r);

  SMatrixResult res;
  res.lam = lam;
  const SVForms sv = s_v_forms(model, bd, g.z0g);
  res.s_v = sv.form2;
  res.residuals.kuroda_forms = norm2(sv.form1 - sv.form2);

  const CMatrix crvc_plus = bd.get(model, Factor::kC, Factor::kC, Resolvent::kRV, Side::kPlus);
  const CMatrix a_plus = id_r - kI * crvc_plus;
  const CMatrix x_plus = id_k - 2.0 * kPi * g.zvc_plus * a_plus.partialPivLu().solve(g.zvc_plus.adjoint());
  res.s = x_plus * res.s_v;

  const CMatrix b_plus = id_r + kI * bd.crc_full_plus;
  const CMatrix s_form1 = (id_k - 2.0 * kPi * g.zvc_plus * b_plus * g.zvc_plus.adjoint()) * res.s_v;
  res.residuals.rf_forms = norm2(s_form1 - res.s);
  const CMatrix s_left = res.s_v * (id_k - 2.0 * kPi * g.zvc_minus * b_plus * g.zvc_minus.adjoint());
  res.residuals.left_right = norm2(s_left - res.s);

  const RVector sv_s = singular_values(res.s);
  res.sigma_max = sv_s(0);
  res.sigma_min = sv_s(sv_s.size() - 1);
  res.defect = id_k - res.s.adjoint() * res.s;

  res.sigma_min_a = bd.sigma_min_a;
  res.singular = !bd.crc_full_minus.has_value();
  if (!res.singular) {
    const CMatrix crvc_minus = bd.get(model, Factor::kC, Factor::kC, Resolvent::kRV, Side::kMinus);
    const CMatrix a_minus = id_r - kI * crvc_minus;
    const CMatrix sv_inv = res.s_v.inverse();
    const CMatrix inv_bis = sv_inv * (id_k + 2.0 * kPi * g.zvc_plus * a_minus.partialPivLu().solve(g.zvc_plus.adjoint()));
    // C R(lam - i0) C^* through the combined factorization, independent of A(lam)
    const CMatrix crc_minus = block(model, stacked_full(model, bd.r0_minus), Factor::kC, Factor::kC);
    const CMatrix inv_1 = sv_inv * (id_k + 2.0 * kPi * g.zvc_plus * (id_r + kI * crc_minus) * g.zvc_plus.adjoint());
    res.residuals.inverse_forms = norm2(inv_bis - inv_1);
    res.residuals.inverse_residual = norm2(res.s * inv_bis - id_k);
    res.s_inv = inv_bis;
  }
  return res;
}

CMatrix s_inverse(const Model& model, double lam, const CauchyOptions& opts) {
  SMatrixResult res = s_matrix(model, lam, opts);
  if (!res.s_inv) {
    std::ostringstream os;
    os.precision(17);
    os << "S(lam) is not invertible at lam = " << lam << ": spectral singularity (sigma_min(A) = " << res.sigma_min_a
       << ")";
    throw SpectralSingularity(os.str(), lam, res.sigma_min_a);
  }
  return *res.s_inv;
}

CMatrix defect_closed_form_v0(const Model& model, double lam, const CauchyOptions& opts) {
  if (max_abs(model.K) != 0.0) throw InvalidInput("defect closed form requires K = 0");
  const BoundaryData bd = boundary_data(model, lam, opts);
  const CMatrix id_r = CMatrix::Identity(model.r, model.r);
  const CMatrix p = id_r - kI * bd.get(model, Factor::kC, Factor::kC, Resolvent::kR0, Side::kPlus);
  const CMatrix q = id_r + kI * bd.get(model, Factor::kC, Factor::kC, Resolvent::kR0, Side::kMinus);
  const CMatrix z0c = model.z0c(lam);
  const CMatrix mid = q.partialPivLu().solve(p.partialPivLu().solve(z0c.adjoint()));
  return 4.0 * kPi * z0c * mid;
}

std::vector<SMatrixResult> s_matrix_scan(const Model& model, const std::vector<double>& grid, Exec exec,
                                         const CauchyOptions& opts) {
  return map_indexed<SMatrixResult>(grid, [&](double lam) { return s_matrix(model, lam, opts); }, exec);
}

std::vector<double> interior_grid(const Interval& d, int n) {
  if (n < 2) throw InvalidInput("grid needs at least 2 points");
  std::vector<double> g(n);
  const double a = d.lo + d.margin, b = d.hi - d.margin;
  for (int i = 0; i < n; ++i) g[i] = a + (b - a) * i / (n - 1);
  g.back() = b;
  return g;
}

}  // namespace disscat
