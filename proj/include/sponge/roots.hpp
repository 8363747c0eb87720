#pragma once

#include <functional>

namespace sponge {

/// Root of a strictly decreasing f on [lo, hi] with f(lo) >= 0 >= f(hi).
/// Plain bisection, fixed iteration count so results are reproducible.
inline double bisect_decreasing(const std::function<double(double)>& f, double lo, double hi,
                                int iterations = 64) {
  for (int k = 0; k < iterations; ++k) {
    double mid = 0.5 * (lo + hi);
    if (f(mid) > 0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace sponge
