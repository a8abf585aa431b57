#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace zop {

// Flat real-valued parameter store shared by every optimizable object
// (generator weights or a raw benchmark point). Dimension is fixed for the
// lifetime of a run.
using ParameterVector = std::vector<double>;

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline ParameterVector zeros(std::size_t dim) {
  return ParameterVector(dim, 0.0);
}

}  // namespace zop
