#pragma once

#include <exception>
#include <optional>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace disscat {

enum class Exec { kSerial, kParallel };

/// Sets the OpenMP worker count; n <= 0 keeps the runtime default.
inline void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// out[i] = f(xs[i]).  Each index is computed independently, so serial and
/// parallel runs give bit-identical results.  The exception of the lowest
/// failing index is rethrown after the loop.
template <class T, class X, class F>
std::vector<T> map_indexed(const std::vector<X>& xs, F&& f, Exec exec = Exec::kParallel) {
  const long n = static_cast<long>(xs.size());
  std::vector<std::optional<T>> tmp(xs.size());
  std::vector<std::exception_ptr> errors(xs.size());
  if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
      try {
        tmp[i].emplace(f(xs[i]));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    for (long i = 0; i < n; ++i) {
      try {
        tmp[i].emplace(f(xs[i]));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<T> out;
  out.reserve(xs.size());
  for (auto& v : tmp) out.push_back(std::move(*v));
  return out;
}

}  // namespace disscat
