#pragma once

#include <stdexcept>
#include <string>

namespace disscat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of an operation (e.g. lambda outside Lambda).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed model, config or file.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure did not reach its target.  `residual` carries the
/// achieved error estimate or condition number, whichever is meaningful.
class NumericalFailure : public Error {
 public:
  NumericalFailure(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// I + K G R0(lam +- i0) G^* is singular: H_V has an embedded eigenvalue.
class ExceptionalPoint : public Error {
 public:
  ExceptionalPoint(const std::string& what, double lam, double sigma_min)
      : Error(what), lam_(lam), sigma_min_(sigma_min) {}
  double lam() const noexcept { return lam_; }
  double sigma_min() const noexcept { return sigma_min_; }

 private:
  double lam_;
  double sigma_min_;
};

/// I - i C R_V(lam - i0) C^* is numerically non-invertible.
class SpectralSingularity : public Error {
 public:
  SpectralSingularity(const std::string& what, double lam, double sigma_min)
      : Error(what), lam_(lam), sigma_min_(sigma_min) {}
  double lam() const noexcept { return lam_; }
  double sigma_min() const noexcept { return sigma_min_; }

 private:
  double lam_;
  double sigma_min_;
};

}  // namespace disscat
