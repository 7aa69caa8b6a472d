#include "inflam/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "inflam/errors.hpp"

namespace inflam {

namespace {

constexpr double kBoxTol = 1e-12;

inline double volume_factor(int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; }

void check_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw ConfigError(std::string(what) + ": fields live on different grids");
}

}  // namespace

Grid Grid::unit_square(int nx, int ny) {
  if (nx < 3 || ny < 3)
    throw ConfigError("grid needs at least 3 nodes per direction, got " + std::to_string(nx) + "x" +
                      std::to_string(ny));
  return Grid{nx, ny, 1.0 / (nx - 1), 1.0 / (ny - 1)};
}

double Grid::weight(int i, int j) const { return volume_factor(i, nx) * volume_factor(j, ny) * dx * dy; }

Field::Field(const Grid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw ConfigError("field has " + std::to_string(values_.size()) + " values, grid has " +
                      std::to_string(grid_.size()) + " nodes");
}

double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool Field::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Field& Field::operator+=(const Field& other) {
  check_same_grid(grid_, other.grid_, "operator+=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  check_same_grid(grid_, other.grid_, "operator-=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

void Region::validate() const {
  const bool inside = x_min >= -kBoxTol && y_min >= -kBoxTol && x_max <= 1.0 + kBoxTol && y_max <= 1.0 + kBoxTol;
  if (!(x_min < x_max) || !(y_min < y_max) || !inside)
    throw ConfigError("region must be a box of positive area inside [0,1]^2");
}

bool Region::contains(double x, double y) const {
  return x >= x_min - kBoxTol && x <= x_max + kBoxTol && y >= y_min - kBoxTol && y <= y_max + kBoxTol;
}

double SymmetricMatrix2::min_eigenvalue() const {
  const double mean = 0.5 * (a11 + a22);
  const double half_diff = 0.5 * (a11 - a22);
  return mean - std::sqrt(half_diff * half_diff + a12 * a12);
}

AnisotropyMap::AnisotropyMap(const Grid& grid, std::vector<SymmetricMatrix2> entries)
    : grid_(grid), entries_(std::move(entries)) {
  if (entries_.size() != grid_.size()) throw ConfigError("anisotropy map size does not match grid");
}

AnisotropyMap AnisotropyMap::uniform(const Grid& grid, SymmetricMatrix2 a) {
  return AnisotropyMap(grid, std::vector<SymmetricMatrix2>(grid.size(), a));
}

long AnisotropyMap::first_indefinite_node() const {
  for (std::size_t k = 0; k < entries_.size(); ++k)
    if (!entries_[k].positive_definite()) return static_cast<long>(k);
  return -1;
}

double AnisotropyMap::min_eigenvalue() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& e : entries_) m = std::min(m, e.min_eigenvalue());
  return m;
}

namespace kernels {

void add_laplacian(const Grid& g, std::span<const double> f, double scale, std::span<double> out) {
  const double cx = scale / (g.dx * g.dx);
  const double cy = scale / (g.dy * g.dy);
  for (int j = 0; j < g.ny; ++j) {
    const double vy = cy / volume_factor(j, g.ny);
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      const double vx = cx / volume_factor(i, g.nx);
      double sx = 0.0;
      if (i > 0) sx += f[k - 1] - f[k];
      if (i < g.nx - 1) sx += f[k + 1] - f[k];
      double sy = 0.0;
      if (j > 0) sy += f[k - g.nx] - f[k];
      if (j < g.ny - 1) sy += f[k + g.nx] - f[k];
      out[k] += vx * sx + vy * sy;
    }
  }
}

void add_aniso_diffusion(const Grid& g, std::span<const double> f, const AnisotropyMap& a, double scale,
                         std::span<double> out) {
  const int nx = g.nx;
  const int ny = g.ny;
  // Normal-direction derivatives at nodes, used for the cross terms on faces.
  auto ddy = [&](int i, int j) {
    const std::size_t k = g.index(i, j);
    if (j == 0) return (f[k + nx] - f[k]) / g.dy;
    if (j == ny - 1) return (f[k] - f[k - nx]) / g.dy;
    return (f[k + nx] - f[k - nx]) / (2.0 * g.dy);
  };
  auto ddx = [&](int i, int j) {
    const std::size_t k = g.index(i, j);
    if (i == 0) return (f[k + 1] - f[k]) / g.dx;
    if (i == nx - 1) return (f[k] - f[k - 1]) / g.dx;
    return (f[k + 1] - f[k - 1]) / (2.0 * g.dx);
  };

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const std::size_t k = g.index(i, j);
      const double a11 = 0.5 * (a[k].a11 + a[k + 1].a11);
      const double a12 = 0.5 * (a[k].a12 + a[k + 1].a12);
      const double flux = a11 * (f[k + 1] - f[k]) / g.dx;
      const double cross = a12 == 0.0 ? 0.0 : a12 * 0.5 * (ddy(i, j) + ddy(i + 1, j));
      const double face = scale * (flux + cross) / g.dx;
      out[k] += face / volume_factor(i, nx);
      out[k + 1] -= face / volume_factor(i + 1, nx);
    }
  }
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = g.index(i, j);
      const std::size_t up = k + static_cast<std::size_t>(nx);
      const double a22 = 0.5 * (a[k].a22 + a[up].a22);
      const double a12 = 0.5 * (a[k].a12 + a[up].a12);
      const double flux = a22 * (f[up] - f[k]) / g.dy;
      const double cross = a12 == 0.0 ? 0.0 : a12 * 0.5 * (ddx(i, j) + ddx(i, j + 1));
      const double face = scale * (flux + cross) / g.dy;
      out[k] += face / volume_factor(j, ny);
      out[up] -= face / volume_factor(j + 1, ny);
    }
  }
}

void add_chemotaxis(const Grid& g, std::span<const double> carrier, std::span<const double> attractant,
                    double scale, std::span<double> out) {
  const int nx = g.nx;
  const int ny = g.ny;
  // Face flux G = carrier_upwind * grad(attractant); out -= scale * div G.
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const std::size_t k = g.index(i, j);
      const double grad = (attractant[k + 1] - attractant[k]) / g.dx;
      const double c = grad > 0.0 ? carrier[k] : carrier[k + 1];
      const double face = scale * c * grad / g.dx;
      out[k] -= face / volume_factor(i, nx);
      out[k + 1] += face / volume_factor(i + 1, nx);
    }
  }
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = g.index(i, j);
      const std::size_t up = k + static_cast<std::size_t>(nx);
      const double grad = (attractant[up] - attractant[k]) / g.dy;
      const double c = grad > 0.0 ? carrier[k] : carrier[up];
      const double face = scale * c * grad / g.dy;
      out[k] -= face / volume_factor(j, ny);
      out[up] += face / volume_factor(j + 1, ny);
    }
  }
}

void add_gradient_drift(const Grid& g, std::span<const double> attractant, double scale, std::span<double> out) {
  add_laplacian(g, attractant, -scale, out);
}

}  // namespace kernels

Field laplacian_neumann(const Field& f) {
  Field out(f.grid());
  kernels::add_laplacian(f.grid(), f.values(), 1.0, out.values());
  return out;
}

Field aniso_diffusion(const Field& f, const AnisotropyMap& a, double d) {
  if (d < 0.0) throw ConfigError("diffusion coefficient must be non-negative");
  if (!(a.grid() == f.grid())) throw ConfigError("anisotropy map and field live on different grids");
  if (const long bad = a.first_indefinite_node(); bad >= 0)
    throw ConfigError("anisotropy matrix is not positive definite at node " + std::to_string(bad));
  Field out(f.grid());
  if (d > 0.0) kernels::add_aniso_diffusion(f.grid(), f.values(), a, d, out.values());
  return out;
}

Field chemotaxis_div(const Field& carrier, const Field& attractant, double d_chem) {
  if (d_chem < 0.0) throw ConfigError("chemotaxis coefficient must be non-negative");
  check_same_grid(carrier.grid(), attractant.grid(), "chemotaxis_div");
  Field out(carrier.grid());
  if (d_chem > 0.0) kernels::add_chemotaxis(carrier.grid(), carrier.values(), attractant.values(), d_chem, out.values());
  return out;
}

double integrate_domain(const Grid& g, std::span<const double> values) {
  double sum = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    const double wy = volume_factor(j, g.ny);
    double row = 0.0;
    for (int i = 0; i < g.nx; ++i) row += volume_factor(i, g.nx) * values[g.index(i, j)];
    sum += wy * row;
  }
  return sum * g.dx * g.dy;
}

double integrate_domain(const Field& f) { return integrate_domain(f.grid(), f.values()); }

Field chi_theta(const Grid& grid, const Region& theta) {
  theta.validate();
  Field chi = Field::from_function(grid, [&](double x, double y) { return theta.contains(x, y) ? 1.0 : 0.0; });
  const double mass = integrate_domain(chi);
  if (mass <= 0.0) throw ConfigError("portal region contains no grid nodes");
  chi *= 1.0 / mass;
  return chi;
}

}  // namespace inflam
