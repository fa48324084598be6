#include "disscat/optical_model.hpp"

#include "disscat/errors.hpp"
#include "disscat/format.hpp"
#include "disscat/parallel.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace disscat {

namespace {

constexpr double kThresholdGuard = 1e-3;
constexpr double kDecayTol = 1e-10;
constexpr double kKeepBelow = 1e-3;
constexpr double kZeroBelow = 1e-6;
constexpr int kBrentBits = 30;

using State = std::array<cplx, 2>;

// alpha h^-(kr) + beta h^+(kr) = u, with h^+- = c +- i s
cplx match(int ell, double k, double r, const State& u) {
  const Riccati f = riccati(ell, k * r);
  const cplx hm(f.c, -f.s), hp(f.c, f.s);
  const cplx dhm = k * cplx(f.dc, -f.ds), dhp = k * cplx(f.dc, f.ds);
  const cplx det = hm * dhp - hp * dhm;
  const cplx alpha = (u[0] * dhp - hp * u[1]) / det;
  const cplx beta = (hm * u[1] - u[0] * dhm) / det;
  return -beta / alpha;
}

}  // namespace

double RadialPotential::operator()(double r) const {
  switch (shape) {
    case PotentialShape::kZero:
      return 0.0;
    case PotentialShape::kSquareWell:
      return r < radius ? depth : 0.0;
    case PotentialShape::kGaussian:
      return depth * std::exp(-(r / radius) * (r / radius));
    case PotentialShape::kWoodsSaxon:
      return depth / (1.0 + std::exp((r - radius) / diffuseness));
  }
  return 0.0;
}

std::optional<double> RadialPotential::breakpoint() const {
  if (shape == PotentialShape::kSquareWell) return radius;
  return std::nullopt;
}

RadialPotential RadialPotential::square_well(double depth, double radius) {
  return RadialPotential{PotentialShape::kSquareWell, depth, radius, 0.5};
}

void validate_problem(const RadialProblem& p) {
  if (p.ell < 0) throw InvalidInput("ell must be >= 0");
  if (!(p.r_min > 0.0 && p.r_match > p.r_min)) throw InvalidInput("need 0 < r_min < r_match");
  if (!(p.rtol > 0.0 && p.rtol < 1e-2)) throw InvalidInput("ODE tolerance must lie in (0, 1e-2)");
  for (const RadialPotential* q : {&p.v, &p.w}) {
    if (!(q->radius > 0.0 && q->diffuseness > 0.0)) throw InvalidInput("potential radius and diffuseness must be > 0");
  }
  for (int i = 0; i <= 1000; ++i) {
    const double r = p.r_min + (p.r_match - p.r_min) * i / 1000.0;
    if (p.w(r) < 0.0) throw InvalidInput("absorptive potential W must be >= 0");
  }
  const double tail = std::abs(p.v(p.r_match)) + std::abs(p.w(p.r_match));
  if (!(tail < kDecayTol)) {
    std::ostringstream os;
    os << "potentials have not decayed at r_match = " << p.r_match << " (|V| + |W| = " << tail << ")";
    throw InvalidInput(os.str());
  }
}

Riccati riccati(int ell, double x) {
  if (ell < 0 || !(x > 0.0)) throw DomainError("riccati needs ell >= 0 and x > 0");
  if (ell == 0) return {std::sin(x), std::cos(x), std::cos(x), -std::sin(x)};
  const unsigned l = static_cast<unsigned>(ell);
  const double s = x * std::sph_bessel(l, x), s1 = x * std::sph_bessel(l - 1, x);
  const double c = -x * std::sph_neumann(l, x), c1 = -x * std::sph_neumann(l - 1, x);
  return {s, s1 - ell / x * s, c, c1 - ell / x * c};
}

PartialWaveResult solve_partial_wave(const RadialProblem& p, double lam) {
  if (!(lam >= kThresholdGuard)) throw DomainError("partial waves need lam >= 1e-3 (threshold excluded)");
  validate_problem(p);
  namespace ode = boost::numeric::odeint;
  const double k = std::sqrt(lam);
  const double ll = p.ell * (p.ell + 1.0);
  auto rhs = [&](const State& x, State& dx, double r) {
    const cplx pot = r < p.r_match ? cplx(p.v(r), -p.w(r)) : cplx(0.0);
    dx[0] = x[1];
    dx[1] = (ll / (r * r) + pot - lam) * x[0];
  };

  // regular start u = r^(l+1) (1 + a r^2), scaled by r_min^-(l+1)
  const double r0 = p.r_min;
  const cplx a = (cplx(p.v(0.0), -p.w(0.0)) - lam) / (2.0 * (2.0 * p.ell + 3.0));
  State x{1.0 + a * r0 * r0, ((p.ell + 1.0) + (p.ell + 3.0) * a * r0 * r0) / r0};

  std::vector<double> stops;
  if (auto bp = p.v.breakpoint(); bp && *bp > r0 && *bp < p.r_match) stops.push_back(*bp);
  if (auto bp = p.w.breakpoint(); bp && *bp > r0 && *bp < p.r_match) stops.push_back(*bp);
  std::sort(stops.begin(), stops.end());
  stops.push_back(p.r_match);

  auto stepper = ode::make_controlled(0.0, p.rtol, ode::runge_kutta_dopri5<State, double, State, double>());
  double r = r0;
  auto advance = [&](double to) {
    try {
      ode::integrate_adaptive(stepper, rhs, x, r, to, std::min(1e-3, 0.1 * r0 + 1e-9));
    } catch (const std::exception& e) {
      throw NumericalFailure(std::string("radial integration failed: ") + e.what(), r);
    }
    if (!std::isfinite(std::abs(x[0])) || !std::isfinite(std::abs(x[1])))
      throw NumericalFailure("radial integration overflowed", r);
    // rescale to keep the linear solution in range
    const double scale = std::abs(x[0]) + std::abs(x[1]) / k;
    x[0] /= scale;
    x[1] /= scale;
    r = to;
  };
  for (double stop : stops) advance(stop);

  PartialWaveResult res;
  res.lam = lam;
  res.ell = p.ell;
  res.s = match(p.ell, k, r, x);
  advance(r + 0.5 * kPi / k);
  res.residual = std::abs(match(p.ell, k, r, x) - res.s);
  res.abs_s = std::abs(res.s);
  return res;
}

cplx square_well_s0(double v0, double w0, double radius, double lam) {
  if (!(lam > 0.0) || !(radius > 0.0)) throw DomainError("square well needs lam > 0 and R > 0");
  if (w0 < 0.0) throw InvalidInput("square well absorption must be >= 0");
  const double k = std::sqrt(lam);
  cplx kappa = std::sqrt(cplx(lam - v0, w0));
  if (kappa.imag() < 0.0) kappa = -kappa;
  // log-derivative of sin(kappa r) at R, written without the cotangent poles
  const cplx sn = std::sin(kappa * radius), cs = std::cos(kappa * radius);
  const cplx ik(0.0, k);
  return std::exp(-2.0 * ik * radius) * (kappa * cs + ik * sn) / (kappa * cs - ik * sn);
}

CpaWell cpa_square_well(double lam0, double radius) {
  if (!(lam0 > 0.0) || !(radius > 0.0)) throw DomainError("CPA tuning needs lam0 > 0 and R > 0");
  const double k = std::sqrt(lam0);
  const cplx ik(0.0, k);
  auto f = [&](cplx q) { return q * std::cos(q * radius) + ik * std::sin(q * radius); };
  auto df = [&](cplx q) {
    return std::cos(q * radius) - q * radius * std::sin(q * radius) + ik * radius * std::cos(q * radius);
  };
  std::optional<CpaWell> best;
  for (int i = 1; i <= 16; ++i) {
    for (double im : {0.05, 0.2, 0.5, 1.0}) {
      cplx q(0.5 * i, im);
      bool ok = false;
      for (int it = 0; it < 60; ++it) {
        const cplx step = f(q) / df(q);
        q -= step;
        if (!std::isfinite(std::abs(q))) break;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(q))) {
          ok = true;
          break;
        }
      }
      if (!ok || std::abs(f(q)) > 1e-12 * (1.0 + std::abs(q))) continue;
      if (q.imag() < 0.0) q = -q;
      const cplx q2 = q * q;
      CpaWell w{lam0 - q2.real(), q2.imag(), radius, lam0, q};
      if (!(w.w0 > 1e-8)) continue;
      if (!best || std::abs(q) < std::abs(best->kappa)) best = w;
    }
  }
  if (!best) throw NumericalFailure("CPA tuning: no absorbing square-well solution found", 0.0);
  return *best;
}

std::vector<ResonanceHit> resonance_scan(const RadialProblem& problem, const std::vector<double>& grid, int ell_max) {
  if (ell_max < 0) throw InvalidInput("ell_max must be >= 0");
  if (grid.size() < 3) throw InvalidInput("resonance scan needs at least 3 grid points");
  if (!std::is_sorted(grid.begin(), grid.end())) throw InvalidInput("resonance grid must be ascending");
  std::vector<ResonanceHit> hits;
  for (int ell = 0; ell <= ell_max; ++ell) {
    RadialProblem p = problem;
    p.ell = ell;
    auto abs_s = [&](double lam) { return solve_partial_wave(p, lam).abs_s; };
    const std::vector<double> a = map_indexed<double>(grid, abs_s);
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
      if (!(a[i] <= a[i - 1] && a[i] <= a[i + 1])) continue;
      if (std::max(a[i - 1], a[i + 1]) - a[i] <= 1e-9) continue;  // flat, e.g. |s| = 1
      std::uintmax_t iters = 200;
      const auto m = boost::math::tools::brent_find_minima(abs_s, grid[i - 1], grid[i + 1], kBrentBits, iters);
      if (m.second > kKeepBelow) continue;
      hits.push_back({ell, m.first, m.second, m.second <= kZeroBelow});
    }
  }
  return hits;
}

SMatrixSummary assemble_s_matrix(const std::vector<PartialWaveResult>& results) {
  SMatrixSummary out;
  if (results.empty()) return out;
  out.lam = results.front().lam;
  out.sigma_min = std::numeric_limits<double>::infinity();
  out.sigma_max = 0.0;
  for (const auto& r : results) {
    if (std::abs(r.lam - out.lam) > 1e-12 * std::max(1.0, out.lam))
      throw InvalidInput("assemble_s_matrix: partial waves at different energies");
    for (int m = 0; m < 2 * r.ell + 1; ++m) out.entries.push_back(r.s);
    out.sigma_min = std::min(out.sigma_min, std::abs(r.s));
    out.sigma_max = std::max(out.sigma_max, std::abs(r.s));
  }
  return out;
}

InfinityVerdict infinity_regularity(const RadialProblem& problem, const std::vector<double>& lams, int ell_max) {
  InfinityVerdict v;
  v.lams = lams;
  for (double lam : lams) {
    double dev = 0.0;
    for (int ell = 0; ell <= ell_max; ++ell) {
      RadialProblem p = problem;
      p.ell = ell;
      dev = std::max(dev, std::abs(1.0 - solve_partial_wave(p, lam).s));
    }
    v.deviations.push_back(dev);
  }
  // least-squares slope of log dev against log lam
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < lams.size(); ++i) {
    if (!(v.deviations[i] > 1e-8)) continue;  // below solver accuracy
    const double x = std::log(lams[i]), y = std::log(v.deviations[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return v;  // identically zero: trivially bounded
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  v.exponent = slope;
  v.bounded = slope <= -0.3;
  return v;
}

std::vector<double> geometric_grid(double lam_min, double lam_max, int n) {
  if (!(lam_min > 0.0 && lam_max > lam_min) || n < 2) throw InvalidInput("geometric grid needs 0 < lam_min < lam_max, n >= 2");
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lam_min * std::pow(lam_max / lam_min, static_cast<double>(i) / (n - 1));
  out.back() = lam_max;
  return out;
}

std::string partial_waves_csv(const std::vector<PartialWaveResult>& rows) {
  std::ostringstream os;
  os << "lambda,ell,re_s,im_s,abs_s,residual\n";
  for (const auto& r : rows)
    os << fmt17(r.lam) << ',' << r.ell << ',' << fmt17(r.s.real()) << ',' << fmt17(r.s.imag()) << ','
       << fmt17(r.abs_s) << ',' << fmt17(r.residual) << '\n';
  return os.str();
}

}  // namespace disscat
