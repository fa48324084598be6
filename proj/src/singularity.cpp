#include "disscat/singularity.hpp"

#include "disscat/errors.hpp"
#include "disscat/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace disscat {

const char* to_string(PointStatus s) { return s == PointStatus::kRegular ? "regular" : "singular"; }

const char* to_string(EndVerdict v) {
  switch (v) {
    case EndVerdict::kBounded: return "bounded";
    case EndVerdict::kUnbounded: return "unbounded";
    default: return "skipped";
  }
}

CMatrix a_matrix(const Model& model, double lam, const CauchyOptions& opts) {
  const CMatrix b = rv_block(model, Factor::kC, Factor::kC, BoundaryPoint{lam, Side::kMinus}, opts);
  return CMatrix::Identity(model.r, model.r) - kI * b;
}

PointVerdict classify_point(const Model& model, double lam, const CauchyOptions& opts) {
  PointVerdict v;
  v.lam = lam;
  try {
    const CMatrix b = rv_block(model, Factor::kC, Factor::kC, BoundaryPoint{lam, Side::kMinus}, opts);
    const CMatrix a = CMatrix::Identity(model.r, model.r) - kI * b;
    const RVector sv = singular_values(a);
    v.sigma_min_a = sv(sv.size() - 1);
    v.cond_a = v.sigma_min_a > 0.0 ? sv(0) / v.sigma_min_a : std::numeric_limits<double>::infinity();
    v.threshold = singularity_threshold(b);
    v.status = v.sigma_min_a < v.threshold ? PointStatus::kSingular : PointStatus::kRegular;
  } catch (const Error& e) {
    v.status = PointStatus::kSingular;
    v.sigma_min_a = std::numeric_limits<double>::quiet_NaN();
    v.cond_a = std::numeric_limits<double>::infinity();
    v.failure = e.what();
  }
  return v;
}

namespace {

// Golden-section search for a minimum of f on [a, b].
template <class F>
double golden_min(F&& f, double a, double b, double tol) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

double sigma_or_nan(const PointVerdict& v) { return v.failure.empty() ? v.sigma_min_a : std::nan(""); }

}  // namespace

EndpointResult endpoint_regularity(const Model& model, End end, int samples) {
  EndpointResult res;
  if (!model.has_absorption()) {
    res.verdict = EndVerdict::kBounded;
    return res;
  }
  const Interval& d = model.lambda;
  CauchyOptions opts;
  opts.allow_outside_margin = true;
  for (int j = 0; j < samples; ++j) {
    const double delta = 0.1 * d.length() * std::ldexp(1.0, -j);
    const double mu = end == End::kLo ? d.lo + delta : d.hi - delta;
    const double n = norm2(crc_full_minus(model, mu, opts));
    res.mu.push_back(mu);
    res.norm.push_back(n);
    res.sup = std::max(res.sup, n);
  }
  // least-squares slope of log norm vs -log delta over the second half
  const int first = samples / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int j = first; j < samples; ++j) {
    const double delta = std::abs(res.mu[j] - (end == End::kLo ? d.lo : d.hi));
    const double x = -std::log(delta);
    const double y = std::log(std::max(res.norm[j], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  const double den = cnt * sxx - sx * sx;
  res.exponent = den != 0.0 ? (cnt * sxy - sx * sy) / den : 0.0;
  res.verdict = res.exponent <= 0.05 ? EndVerdict::kBounded : EndVerdict::kUnbounded;
  return res;
}

SingularityReport scan(const Model& model, int n_grid, const ScanOptions& opts) {
  if (n_grid < 16) throw InvalidInput("singularity scan needs n_grid >= 16");
  SingularityReport rep;
  rep.grid.resize(n_grid);
  const Interval& d = model.lambda;
  const double a = opts.lo.value_or(d.lo + d.margin), b = opts.hi.value_or(d.hi - d.margin);
  if (!(d.in_working_interior(a) && d.in_working_interior(b) && a < b))
    throw DomainError("scan range must be an increasing pair inside the working interior");
  for (int i = 0; i < n_grid; ++i) rep.grid[i] = a + (b - a) * i / (n_grid - 1);
  rep.grid.back() = b;

  rep.curve = map_indexed<PointVerdict>(rep.grid, [&](double lam) { return classify_point(model, lam); }, opts.exec);

  // local minima of sigma_min(A) on the grid, bracketed by their neighbours
  std::vector<std::pair<double, double>> brackets;
  for (int i = 0; i < n_grid; ++i) {
    const double s = sigma_or_nan(rep.curve[i]);
    if (std::isnan(s)) continue;
    const double left = i > 0 ? sigma_or_nan(rep.curve[i - 1]) : std::numeric_limits<double>::infinity();
    const double right = i + 1 < n_grid ? sigma_or_nan(rep.curve[i + 1]) : std::numeric_limits<double>::infinity();
    if (s <= left && s < right) brackets.emplace_back(rep.grid[std::max(i - 1, 0)], rep.grid[std::min(i + 1, n_grid - 1)]);
  }
  rep.refined = map_indexed<PointVerdict>(
      brackets,
      [&](const std::pair<double, double>& br) {
        auto f = [&](double lam) {
          const PointVerdict v = classify_point(model, lam);
          return v.failure.empty() ? v.sigma_min_a : 0.0;
        };
        return classify_point(model, golden_min(f, br.first, br.second, opts.lam_tol));
      },
      opts.exec);

  rep.min_sigma = std::numeric_limits<double>::infinity();
  for (const auto& v : rep.curve)
    if (v.failure.empty()) rep.min_sigma = std::min(rep.min_sigma, v.sigma_min_a);
  for (const auto& v : rep.refined) {
    if (v.failure.empty()) rep.min_sigma = std::min(rep.min_sigma, v.sigma_min_a);
    if (v.status == PointStatus::kSingular) rep.singular_points.push_back({v.lam, v.sigma_min_a});
  }
  // singular grid points with no refined minimum nearby (e.g. failures)
  for (const auto& v : rep.curve) {
    if (v.status != PointStatus::kSingular) continue;
    const bool covered = std::any_of(rep.singular_points.begin(), rep.singular_points.end(), [&](const SingularPoint& p) {
      return std::abs(p.lam - v.lam) <= 2.0 * (b - a) / (n_grid - 1);
    });
    if (!covered) rep.singular_points.push_back({v.lam, v.sigma_min_a});
  }
  std::sort(rep.singular_points.begin(), rep.singular_points.end(),
            [](const SingularPoint& x, const SingularPoint& y) { return x.lam < y.lam; });
  rep.finite_set = static_cast<int>(rep.singular_points.size()) < n_grid / 4;

  if (opts.endpoints) {
    for (End e : {End::kLo, End::kHi}) {
      EndpointResult r;
      try {
        r = endpoint_regularity(model, e);
      } catch (const Error&) {
        r.verdict = EndVerdict::kSkipped;
      }
      (e == End::kLo ? rep.lo : rep.hi) = r;
    }
  }
  return rep;
}

std::string to_csv(const SingularityReport& rep) {
  std::vector<const PointVerdict*> rows;
  for (const auto& v : rep.curve) rows.push_back(&v);
  for (const auto& v : rep.refined) {
    // a refined minimum that coincides with a grid point adds nothing
    const bool dup = std::any_of(rep.curve.begin(), rep.curve.end(), [&](const PointVerdict& g) {
      return std::abs(g.lam - v.lam) <= 1e-6 && g.status == v.status;
    });
    if (!dup) rows.push_back(&v);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const PointVerdict* x, const PointVerdict* y) { return x->lam < y->lam; });
  std::ostringstream os;
  os << "lambda,sigma_min_A,cond_A,status\n";
  for (const auto* v : rows)
    os << fmt17(v->lam) << ',' << fmt17(v->sigma_min_a) << ',' << fmt17(v->cond_a) << ',' << to_string(v->status) << '\n';
  return os.str();
}

nlohmann::json to_json(const SingularityReport& rep) {
  using nlohmann::json;
  json j;
  json pts = json::array();
  for (const auto& p : rep.singular_points) pts.push_back({{"lam_refined", p.lam}, {"sigma_min", p.sigma_min}});
  j["singular_points"] = pts;
  auto endj = [](const EndpointResult& e) {
    return json{{"verdict", to_string(e.verdict)}, {"exponent", e.exponent}, {"sup", e.sup}};
  };
  j["endpoint_verdicts"] = {{"lo", endj(rep.lo)}, {"hi", endj(rep.hi)}};
  j["finite_set"] = rep.finite_set;
  j["min_sigma_min_A"] = rep.min_sigma;
  j["n_grid"] = rep.grid.size();
  json fails = json::array();
  for (const auto& v : rep.curve)
    if (!v.failure.empty()) fails.push_back({{"lam", v.lam}, {"error", v.failure}});
  j["failures"] = fails;
  return j;
}

}  // namespace disscat
