#pragma once

// Helpers shared by the unit tests: seeded draws and small oracles that do
// not reuse the library code under test.

#include <cmath>
#include <random>
#include <vector>

#include "inflam/grid.hpp"

namespace testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline inflam::Field random_field(const inflam::Grid& g, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  inflam::Field f(g);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = uniform(rng, lo, hi);
  return f;
}

// Weighted inner product with explicit trapezoid weights.
inline double weighted_dot(const inflam::Field& a, const inflam::Field& b) {
  const auto& g = a.grid();
  double s = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    const double wy = (j == 0 || j == g.ny - 1) ? 0.5 : 1.0;
    for (int i = 0; i < g.nx; ++i) {
      const double wx = (i == 0 || i == g.nx - 1) ? 0.5 : 1.0;
      s += wx * wy * a(i, j) * b(i, j);
    }
  }
  return s * g.dx * g.dy;
}

// Five-point Laplacian with mirrored ghost values, written out directly.
inline double reference_laplacian(const inflam::Field& f, int i, int j) {
  const auto& g = f.grid();
  auto at = [&](int ii, int jj) {
    if (ii < 0) ii = 1;
    if (ii >= g.nx) ii = g.nx - 2;
    if (jj < 0) jj = 1;
    if (jj >= g.ny) jj = g.ny - 2;
    return f(ii, jj);
  };
  return (at(i + 1, j) - 2 * at(i, j) + at(i - 1, j)) / (g.dx * g.dx) +
         (at(i, j + 1) - 2 * at(i, j) + at(i, j - 1)) / (g.dy * g.dy);
}

}  // namespace testing
