#pragma once

#include "disscat/linalg.hpp"

#include <string>
#include <variant>
#include <vector>

namespace disscat {

/// Spectrum Lambda = [lo, hi] of H0 with the evaluation margin used to
/// define the working interior [lo + margin, hi - margin].
struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double margin = 0.01;

  static Interval with_default_margin(double lo, double hi) { return {lo, hi, 1e-2 * (hi - lo)}; }

  double length() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double lam) const { return lam >= lo && lam <= hi; }
  bool open_contains(double lam) const { return lam > lo && lam < hi; }
  bool in_working_interior(double lam) const { return lam >= lo + margin && lam <= hi - margin; }
  /// lo < hi and 0 < margin < (hi - lo)/4.
  bool is_valid() const { return lo < hi && margin > 0.0 && margin < 0.25 * (hi - lo); }

  bool operator==(const Interval&) const = default;
};

/// Exact (bitwise value) equality, including shape.
inline bool same_matrix(const CMatrix& a, const CMatrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

/// Scalar profile used by closed-form fiber maps:
///   profile(lam) = envelope(lam)^envelope_power * shape(lam)
/// with envelope = 4 (lam - lo)(hi - lam) / (hi - lo)^2 and shape either 1
/// or a Gaussian exp(-(lam - center)^2 / (2 width^2)).
enum class Shape { kConstant, kGauss };

struct ProfileTerm {
  Shape shape = Shape::kConstant;
  double center = 0.0;
  double width = 1.0;
  int envelope_power = 0;
  CMatrix coefficient;  // rows x cols

  bool operator==(const ProfileTerm& o) const {
    return shape == o.shape && center == o.center && width == o.width && envelope_power == o.envelope_power &&
           same_matrix(coefficient, o.coefficient);
  }
};

struct ClosedForm {
  std::vector<ProfileTerm> terms;
  bool operator==(const ClosedForm&) const = default;
};

/// Chebyshev expansion: M(lam) = sum_n coefficients[n] T_n(t), t in [-1, 1].
struct Chebyshev {
  std::vector<CMatrix> coefficients;
  bool operator==(const Chebyshev& o) const {
    if (coefficients.size() != o.coefficients.size()) return false;
    for (std::size_t i = 0; i < coefficients.size(); ++i)
      if (!same_matrix(coefficients[i], o.coefficients[i])) return false;
    return true;
  }
};

/// Matrix-valued map lam -> M(lam) on an interval.  Immutable.
class FiberMap {
 public:
  FiberMap() = default;
  FiberMap(int rows, int cols, Interval domain, double holder_exponent, ClosedForm rep);
  FiberMap(int rows, int cols, Interval domain, double holder_exponent, Chebyshev rep);

  static FiberMap zero(int rows, int cols, Interval domain, double holder_exponent = 0.99);
  static FiberMap constant(const CMatrix& value, Interval domain, double holder_exponent = 0.99);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const Interval& domain() const { return domain_; }
  double holder_exponent() const { return holder_exponent_; }
  bool is_chebyshev() const { return std::holds_alternative<Chebyshev>(rep_); }
  const ClosedForm* closed_form() const { return std::get_if<ClosedForm>(&rep_); }
  const Chebyshev* chebyshev() const { return std::get_if<Chebyshev>(&rep_); }

  /// M(lam).  Throws DomainError outside the closed domain.
  CMatrix operator()(double lam) const;

  /// Same as operator() without the domain check (lam may be any real).
  CMatrix eval_unchecked(double lam) const;

  /// True when every coefficient is exactly zero.
  bool is_zero() const;

  bool operator==(const FiberMap&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  Interval domain_{};
  double holder_exponent_ = 1.0;
  std::variant<ClosedForm, Chebyshev> rep_;
};

/// Scalar profile value of one closed-form term.
double profile_value(const ProfileTerm& term, const Interval& domain, double lam);

/// Re-expands `map` in Chebyshev polynomials of the given degree by
/// interpolation at Chebyshev points of the first kind.
FiberMap to_chebyshev(const FiberMap& map, int degree);

/// Hoelder quotient statistics on random pairs of the working interior.
struct HolderSample {
  double max_quotient = 0.0;
  double max_value = 0.0;
  bool all_finite = true;
};

HolderSample sample_holder_quotient(const FiberMap& map, int pairs, unsigned long long seed);

}  // namespace disscat
