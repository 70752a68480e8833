#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "numerics.hpp"
#include "rng.hpp"

namespace testing {

using afrelay::Complex;
using afrelay::ComplexMatrix;
using afrelay::RandomStream;

inline ComplexMatrix gaussian(int rows, int cols, RandomStream& rng) {
  ComplexMatrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = rng.complex_normal(1.0);
  return m;
}

inline ComplexMatrix random_pd(int n, RandomStream& rng, double floor = 0.1) {
  const ComplexMatrix b = gaussian(n, n, rng);
  ComplexMatrix a = b * b.adjoint();
  a.diagonal().array() += floor;
  return a;
}

inline double rel_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

inline Complex unit(double phase) { return std::polar(1.0, phase); }

}  // namespace testing
