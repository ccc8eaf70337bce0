#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <type_traits>

#include <omp.h>

namespace fracoam {

inline void set_num_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

inline int num_threads() { return omp_get_max_threads(); }

/// Runs body(i) for i in [0, n). Iterations must write disjoint outputs;
/// reductions happen afterwards in index order so results do not depend on
/// the thread count.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
}

/// Neumaier-compensated sum in a fixed order.
template <class T>
T ordered_sum(std::span<const T> xs) {
  T sum{};
  T comp{};
  for (const T& x : xs) {
    T t = sum + x;
    if constexpr (std::is_floating_point_v<T>) {
      if (std::abs(sum) >= std::abs(x))
        comp += (sum - t) + x;
      else
        comp += (x - t) + sum;
    } else {
      // complex: compensate real and imaginary parts independently
      auto fix = [](double s, double v, double tt) {
        return std::abs(s) >= std::abs(v) ? (s - tt) + v : (v - tt) + s;
      };
      comp += T{fix(sum.real(), x.real(), t.real()), fix(sum.imag(), x.imag(), t.imag())};
    }
    sum = t;
  }
  return sum + comp;
}

}  // namespace fracoam
