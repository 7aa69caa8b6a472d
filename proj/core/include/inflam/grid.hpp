#pragma once

// Uniform node-centred discretization of the unit square with zero-flux
// boundaries. Boundary nodes own half (edges) or a quarter (corners) of a
// cell, which makes every flux-form operator below exactly conservative under
// the trapezoidal quadrature.

#include <cstddef>
#include <span>
#include <vector>

namespace inflam {

struct Grid {
  int nx = 0;
  int ny = 0;
  double dx = 0.0;
  double dy = 0.0;

  // Grid on (0,1)^2 with n nodes per direction; throws ConfigError for n < 3.
  static Grid unit_square(int nx, int ny);
  static Grid unit_square(int n) { return unit_square(n, n); }

  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
  }
  double x(int i) const { return i * dx; }
  double y(int j) const { return j * dy; }

  // Trapezoid weight of node (i, j) including dx*dy.
  double weight(int i, int j) const;

  bool operator==(const Grid&) const = default;
};

// Scalar values at the nodes of a grid, row-major with y ascending.
class Field {
 public:
  Field() = default;
  explicit Field(const Grid& grid, double value = 0.0) : grid_(grid), values_(grid.size(), value) {}
  Field(const Grid& grid, std::vector<double> values);

  template <class F>
  static Field from_function(const Grid& grid, F&& f) {
    Field out(grid);
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) out(i, j) = f(grid.x(i), grid.y(j));
    return out;
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }
  double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
  double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  double min() const;
  double max() const;
  double max_abs() const;
  bool all_finite() const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);

 private:
  Grid grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

// Axis-aligned box inside the unit square, e.g. the portal field.
struct Region {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;

  // Throws ConfigError unless the box has positive area inside [0,1]^2.
  void validate() const;
  double area() const { return (x_max - x_min) * (y_max - y_min); }
  bool contains(double x, double y) const;

  bool operator==(const Region&) const = default;
};

struct SymmetricMatrix2 {
  double a11 = 1.0;
  double a12 = 0.0;
  double a22 = 1.0;

  bool positive_definite() const { return a11 > 0.0 && a11 * a22 - a12 * a12 > 0.0; }
  double min_eigenvalue() const;
};

// Per-node diffusion tensor A(x).
class AnisotropyMap {
 public:
  AnisotropyMap() = default;
  AnisotropyMap(const Grid& grid, std::vector<SymmetricMatrix2> entries);
  static AnisotropyMap uniform(const Grid& grid, SymmetricMatrix2 a);

  template <class F>
  static AnisotropyMap from_function(const Grid& grid, F&& f) {
    std::vector<SymmetricMatrix2> e(grid.size());
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) e[grid.index(i, j)] = f(grid.x(i), grid.y(j));
    return AnisotropyMap(grid, std::move(e));
  }

  const Grid& grid() const { return grid_; }
  const SymmetricMatrix2& operator[](std::size_t k) const { return entries_[k]; }

  // Index of the first node violating positive definiteness, or -1.
  long first_indefinite_node() const;
  double min_eigenvalue() const;

 private:
  Grid grid_;
  std::vector<SymmetricMatrix2> entries_;
};

// Five-point Laplacian with reflected ghost nodes (df/dn = 0).
Field laplacian_neumann(const Field& f);

// div(d * A(x) grad f), face-averaged coefficients, zero boundary flux.
// Throws ConfigError if A is not positive definite or d < 0.
Field aniso_diffusion(const Field& f, const AnisotropyMap& a, double d);

// -div(d_chem * carrier * grad attractant) with the carrier upwinded along
// the attractant gradient; zero boundary flux. Throws ConfigError if d_chem < 0.
Field chemotaxis_div(const Field& carrier, const Field& attractant, double d_chem);

// Trapezoidal rule over the unit square.
double integrate_domain(const Field& f);
double integrate_domain(const Grid& grid, std::span<const double> values);

// Normalized indicator of theta: zero outside, unit integral.
Field chi_theta(const Grid& grid, const Region& theta);

// Span-based kernels used by the method-of-lines right-hand side. They add
// scale * operator(f) into out.
namespace kernels {
void add_laplacian(const Grid& g, std::span<const double> f, double scale, std::span<double> out);
void add_aniso_diffusion(const Grid& g, std::span<const double> f, const AnisotropyMap& a, double scale,
                         std::span<double> out);
void add_chemotaxis(const Grid& g, std::span<const double> carrier, std::span<const double> attractant,
                    double scale, std::span<double> out);
// Carrier-free variant: flux d * grad(attractant), i.e. -d * laplacian.
void add_gradient_drift(const Grid& g, std::span<const double> attractant, double scale, std::span<double> out);
}  // namespace kernels

}  // namespace inflam
