#include "disscat/fiber_map.hpp"

#include "disscat/errors.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace disscat {

namespace {

void check_term_shapes(const ClosedForm& cf, int rows, int cols) {
  for (const auto& t : cf.terms) {
    if (t.coefficient.rows() != rows || t.coefficient.cols() != cols)
      throw InvalidInput("closed-form fiber term has wrong coefficient shape");
    if (t.shape == Shape::kGauss && !(t.width > 0.0)) throw InvalidInput("gauss term needs width > 0");
    if (t.envelope_power < 0) throw InvalidInput("envelope_power must be >= 0");
  }
}

}  // namespace

FiberMap::FiberMap(int rows, int cols, Interval domain, double holder_exponent, ClosedForm rep)
    : rows_(rows), cols_(cols), domain_(domain), holder_exponent_(holder_exponent), rep_(std::move(rep)) {
  if (rows < 0 || cols < 0) throw InvalidInput("fiber map dimensions must be non-negative");
  check_term_shapes(std::get<ClosedForm>(rep_), rows, cols);
}

FiberMap::FiberMap(int rows, int cols, Interval domain, double holder_exponent, Chebyshev rep)
    : rows_(rows), cols_(cols), domain_(domain), holder_exponent_(holder_exponent), rep_(std::move(rep)) {
  const auto& cheb = std::get<Chebyshev>(rep_);
  if (cheb.coefficients.empty()) throw InvalidInput("chebyshev fiber map needs at least one coefficient");
  for (const auto& c : cheb.coefficients)
    if (c.rows() != rows || c.cols() != cols) throw InvalidInput("chebyshev coefficient has wrong shape");
}

FiberMap FiberMap::zero(int rows, int cols, Interval domain, double holder_exponent) {
  return FiberMap(rows, cols, domain, holder_exponent, ClosedForm{});
}

FiberMap FiberMap::constant(const CMatrix& value, Interval domain, double holder_exponent) {
  ClosedForm cf;
  cf.terms.push_back(ProfileTerm{Shape::kConstant, 0.0, 1.0, 0, value});
  return FiberMap(static_cast<int>(value.rows()), static_cast<int>(value.cols()), domain, holder_exponent,
                  std::move(cf));
}

double profile_value(const ProfileTerm& term, const Interval& domain, double lam) {
  double v = 1.0;
  if (term.envelope_power > 0) {
    const double len = domain.hi - domain.lo;
    const double env = 4.0 * (lam - domain.lo) * (domain.hi - lam) / (len * len);
    v = std::pow(env, term.envelope_power);
  }
  if (term.shape == Shape::kGauss) {
    const double d = (lam - term.center) / term.width;
    v *= std::exp(-0.5 * d * d);
  }
  return v;
}

CMatrix FiberMap::operator()(double lam) const {
  if (!domain_.contains(lam)) {
    std::ostringstream os;
    os.precision(17);
    os << "fiber map evaluated at lam = " << lam << " outside [" << domain_.lo << ", " << domain_.hi << "]";
    throw DomainError(os.str());
  }
  return eval_unchecked(lam);
}

CMatrix FiberMap::eval_unchecked(double lam) const {
  CMatrix out = CMatrix::Zero(rows_, cols_);
  if (const auto* cf = std::get_if<ClosedForm>(&rep_)) {
    for (const auto& t : cf->terms) out += profile_value(t, domain_, lam) * t.coefficient;
    return out;
  }
  const auto& c = std::get<Chebyshev>(rep_).coefficients;
  const double t = (2.0 * lam - domain_.lo - domain_.hi) / (domain_.hi - domain_.lo);
  // Clenshaw
  CMatrix b1 = CMatrix::Zero(rows_, cols_);
  CMatrix b2 = CMatrix::Zero(rows_, cols_);
  for (std::size_t n = c.size() - 1; n >= 1; --n) {
    CMatrix b0 = 2.0 * t * b1 - b2 + c[n];
    b2 = std::move(b1);
    b1 = std::move(b0);
  }
  out = t * b1 - b2 + c[0];
  return out;
}

bool FiberMap::is_zero() const {
  if (const auto* cf = std::get_if<ClosedForm>(&rep_)) {
    for (const auto& t : cf->terms)
      if (max_abs(t.coefficient) != 0.0) return false;
    return true;
  }
  for (const auto& c : std::get<Chebyshev>(rep_).coefficients)
    if (max_abs(c) != 0.0) return false;
  return true;
}

FiberMap to_chebyshev(const FiberMap& map, int degree) {
  if (degree < 0) throw DomainError("to_chebyshev: degree must be >= 0");
  const int n = degree + 1;
  const Interval& d = map.domain();
  std::vector<CMatrix> samples;
  std::vector<double> theta(n);
  samples.reserve(n);
  for (int j = 0; j < n; ++j) {
    theta[j] = kPi * (j + 0.5) / n;
    const double t = std::cos(theta[j]);
    samples.push_back(map.eval_unchecked(d.mid() + 0.5 * d.length() * t));
  }
  Chebyshev cheb;
  cheb.coefficients.assign(n, CMatrix::Zero(map.rows(), map.cols()));
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) cheb.coefficients[k] += std::cos(k * theta[j]) * samples[j];
    cheb.coefficients[k] *= (k == 0 ? 1.0 : 2.0) / n;
  }
  return FiberMap(map.rows(), map.cols(), d, map.holder_exponent(), std::move(cheb));
}

HolderSample sample_holder_quotient(const FiberMap& map, int pairs, unsigned long long seed) {
  HolderSample out;
  const Interval& d = map.domain();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(d.lo + d.margin, d.hi - d.margin);
  const double s = map.holder_exponent();
  for (int i = 0; i < pairs; ++i) {
    const double a = u(rng);
    const double b = u(rng);
    if (a == b) continue;
    const CMatrix ma = map.eval_unchecked(a);
    const CMatrix mb = map.eval_unchecked(b);
    if (!ma.allFinite() || !mb.allFinite()) {
      out.all_finite = false;
      continue;
    }
    out.max_value = std::max({out.max_value, norm2(ma), norm2(mb)});
    const double q = norm2(ma - mb) / std::pow(std::abs(a - b), s);
    if (!std::isfinite(q)) out.all_finite = false;
    out.max_quotient = std::max(out.max_quotient, q);
  }
  return out;
}

}  // namespace disscat
