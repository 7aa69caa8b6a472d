#include <doctest.h>

#include <cmath>
#include <numbers>

#include "inflam/errors.hpp"
#include "inflam/grid.hpp"
#include "support.hpp"

using namespace inflam;
using std::numbers::pi;

namespace {

double laplacian_error(int n) {
  const Grid g = Grid::unit_square(n);
  const Field f = Field::from_function(g, [](double x, double y) { return std::cos(pi * x) * std::cos(pi * y); });
  const Field lap = laplacian_neumann(f);
  double err = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) err = std::max(err, std::abs(lap(i, j) + 2 * pi * pi * f(i, j)));
  return err;
}

}  // namespace

TEST_CASE("grid geometry and trapezoid weights") {
  const Grid g = Grid::unit_square(21);
  CHECK(g.size() == 441);
  CHECK(g.dx == doctest::Approx(0.05));
  CHECK(g.weight(0, 0) == doctest::Approx(0.25 * 0.0025));
  CHECK(g.weight(0, 5) == doctest::Approx(0.5 * 0.0025));
  CHECK(g.weight(3, 5) == doctest::Approx(0.0025));
  CHECK_THROWS_AS(Grid::unit_square(2), ConfigError);
}

TEST_CASE("trapezoid quadrature is exact for bilinear functions") {
  const Grid g = Grid::unit_square(13, 9);
  const Field f = Field::from_function(g, [](double x, double y) { return 2.0 - 3.0 * x + 0.5 * y + 4.0 * x * y; });
  CHECK(integrate_domain(f) == doctest::Approx(2.0 - 1.5 + 0.25 + 1.0).epsilon(1e-13));
}

TEST_CASE("laplacian matches the mirrored-ghost stencil at every node") {
  std::mt19937_64 rng(7);
  const Grid g = Grid::unit_square(9, 7);
  const Field f = testing::random_field(g, rng);
  const Field lap = laplacian_neumann(f);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) CHECK(lap(i, j) == doctest::Approx(testing::reference_laplacian(f, i, j)));
}

TEST_CASE("laplacian is second order on the cosine eigenmode") {
  const double e21 = laplacian_error(21);
  const double e41 = laplacian_error(41);
  CHECK(e21 / e41 >= 3.5);
}

TEST_CASE("laplacian eigenvalue on the discrete cosine mode") {
  // cos(pi x) is an exact eigenvector of the mirrored stencil.
  const Grid g = Grid::unit_square(21);
  const Field f = Field::from_function(g, [](double x, double) { return std::cos(pi * x); });
  const Field lap = laplacian_neumann(f);
  const double mu = 4.0 / (g.dx * g.dx) * std::pow(std::sin(pi * g.dx / 2), 2);
  for (std::size_t k = 0; k < f.size(); ++k) CHECK(lap[k] == doctest::Approx(-mu * f[k]).epsilon(1e-10).scale(1.0));
}

TEST_CASE("flux-form operators conserve mass (property, 50 random fields)") {
  std::mt19937_64 rng(11);
  const Grid g = Grid::unit_square(17, 13);
  const auto a = AnisotropyMap::from_function(g, [](double x, double y) {
    return SymmetricMatrix2{1.0 + 0.5 * x, 0.2 * y, 1.0 + 0.3 * y};
  });
  for (int trial = 0; trial < 50; ++trial) {
    const Field f = testing::random_field(g, rng);
    const Field c = testing::random_field(g, rng);
    CHECK(std::abs(integrate_domain(laplacian_neumann(f))) < 1e-11);
    CHECK(std::abs(integrate_domain(aniso_diffusion(f, a, 0.7))) < 1e-11);
    CHECK(std::abs(integrate_domain(chemotaxis_div(c, f, 1.3))) < 1e-11);
  }
}

TEST_CASE("laplacian is symmetric and non-positive in the weighted inner product (property)") {
  std::mt19937_64 rng(3);
  const Grid g = Grid::unit_square(11);
  for (int trial = 0; trial < 30; ++trial) {
    const Field u = testing::random_field(g, rng, -1, 1);
    const Field v = testing::random_field(g, rng, -1, 1);
    const double uv = testing::weighted_dot(u, laplacian_neumann(v));
    const double vu = testing::weighted_dot(laplacian_neumann(u), v);
    CHECK(uv == doctest::Approx(vu).epsilon(1e-10));
    CHECK(testing::weighted_dot(u, laplacian_neumann(u)) <= 1e-12);
  }
}

TEST_CASE("isotropic tensor reproduces the scaled laplacian") {
  std::mt19937_64 rng(5);
  const Grid g = Grid::unit_square(12);
  const Field f = testing::random_field(g, rng);
  const Field lap = laplacian_neumann(f);
  const Field an = aniso_diffusion(f, AnisotropyMap::uniform(g, {1.0, 0.0, 1.0}), 0.8);
  for (std::size_t k = 0; k < f.size(); ++k) CHECK(an[k] == doctest::Approx(0.8 * lap[k]).scale(1.0));
}

TEST_CASE("anisotropic diffusion converges on a space-dependent diagonal tensor") {
  // div((1+0.5x) f_x, f_y) for f = cos(pi x) cos(pi y); zero normal flux holds exactly.
  // The conservative boundary flux sees the coefficient half a cell inside, so
  // the x-boundary nodes are first order while the interior is second order.
  struct Errors {
    double interior = 0.0;
    double boundary = 0.0;
  };
  auto error = [](int n) {
    const Grid g = Grid::unit_square(n);
    const Field f = Field::from_function(g, [](double x, double y) { return std::cos(pi * x) * std::cos(pi * y); });
    const auto a = AnisotropyMap::from_function(g, [](double x, double) { return SymmetricMatrix2{1.0 + 0.5 * x, 0.0, 1.0}; });
    const Field out = aniso_diffusion(f, a, 1.0);
    Errors e;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double x = g.x(i), y = g.y(j);
        const double exact = -0.5 * pi * std::sin(pi * x) * std::cos(pi * y) - (2.0 + 0.5 * x) * pi * pi * f(i, j);
        double& slot = (i == 0 || i == n - 1) ? e.boundary : e.interior;
        slot = std::max(slot, std::abs(out(i, j) - exact));
      }
    return e;
  };
  const Errors coarse = error(21), fine = error(41);
  CHECK(coarse.interior / fine.interior >= 3.5);
  CHECK(coarse.boundary / fine.boundary >= 1.8);
}

TEST_CASE("anisotropic diffusion with cross terms is consistent in the interior") {
  // f = x^2 y^2 / 4 style test with constant tensor: div(A grad f) = a11 f_xx + 2 a12 f_xy + a22 f_yy.
  auto error = [](int n) {
    const Grid g = Grid::unit_square(n);
    const Field f = Field::from_function(g, [](double x, double y) { return std::cos(pi * x) * std::cos(pi * y); });
    const auto a = AnisotropyMap::uniform(g, {1.0, 0.3, 0.8});
    const Field out = aniso_diffusion(f, a, 1.0);
    double err = 0.0;
    for (int j = 2; j < n - 2; ++j)
      for (int i = 2; i < n - 2; ++i) {
        const double x = g.x(i), y = g.y(j);
        const double fxy = pi * pi * std::sin(pi * x) * std::sin(pi * y);
        const double exact = -(1.0 + 0.8) * pi * pi * f(i, j) + 2 * 0.3 * fxy;
        err = std::max(err, std::abs(out(i, j) - exact));
      }
    return err;
  };
  CHECK(error(21) / error(41) >= 3.0);
}

TEST_CASE("chemotaxis with a constant carrier is a scaled laplacian") {
  std::mt19937_64 rng(9);
  const Grid g = Grid::unit_square(10);
  const Field attractant = testing::random_field(g, rng);
  const Field carrier(g, 2.0);
  const Field out = chemotaxis_div(carrier, attractant, 0.5);
  const Field lap = laplacian_neumann(attractant);
  for (std::size_t k = 0; k < out.size(); ++k) CHECK(out[k] == doctest::Approx(-1.0 * lap[k]).scale(1.0));
}

TEST_CASE("upwinded chemotaxis never drains an empty node (property)") {
  std::mt19937_64 rng(13);
  const Grid g = Grid::unit_square(9);
  for (int trial = 0; trial < 40; ++trial) {
    Field carrier = testing::random_field(g, rng);
    const Field attractant = testing::random_field(g, rng);
    std::vector<std::size_t> empty;
    for (std::size_t k = 0; k < carrier.size(); ++k)
      if (testing::uniform(rng, 0, 1) < 0.3) {
        carrier[k] = 0.0;
        empty.push_back(k);
      }
    const Field out = chemotaxis_div(carrier, attractant, 1.0);
    for (auto k : empty) CHECK(out[k] >= -1e-14);
  }
}

TEST_CASE("normalized portal indicator") {
  const Grid g = Grid::unit_square(21);
  const Region theta{0.8, 1.0, 0.0, 0.2};
  const Field chi = chi_theta(g, theta);
  CHECK(integrate_domain(chi) == doctest::Approx(1.0));
  // Nodes x in {0.8..1.0}, y in {0..0.2}: 4.5 cells each way under trapezoid weights.
  const double mass = (4.5 * g.dx) * (4.5 * g.dy);
  CHECK(chi(20, 0) == doctest::Approx(1.0 / mass));
  CHECK(chi(16, 4) == doctest::Approx(1.0 / mass));
  CHECK(chi(15, 4) == 0.0);
  CHECK(chi(16, 5) == 0.0);
  CHECK_THROWS_AS(chi_theta(g, Region{0.81, 0.84, 0.01, 0.04}), ConfigError);
  CHECK_THROWS_AS(Region({0.5, 0.4, 0.0, 1.0}).validate(), ConfigError);
}

TEST_CASE("operator preconditions") {
  const Grid g = Grid::unit_square(5);
  const Field f(g, 1.0);
  CHECK_THROWS_AS(aniso_diffusion(f, AnisotropyMap::uniform(g, {1.0, 2.0, 1.0}), 1.0), ConfigError);
  CHECK_THROWS_AS(aniso_diffusion(f, AnisotropyMap::uniform(g, {1.0, 0.0, 1.0}), -1.0), ConfigError);
  CHECK_THROWS_AS(chemotaxis_div(f, f, -0.1), ConfigError);
  CHECK(AnisotropyMap::uniform(g, {1.0, 2.0, 1.0}).first_indefinite_node() == 0);
  CHECK(SymmetricMatrix2{2.0, 1.0, 2.0}.min_eigenvalue() == doctest::Approx(1.0));
}

TEST_CASE("span kernels accumulate scaled operators") {
  std::mt19937_64 rng(21);
  const Grid g = Grid::unit_square(8);
  const Field f = testing::random_field(g, rng);
  std::vector<double> out(g.size(), 1.0);
  kernels::add_laplacian(g, f.values(), 0.5, out);
  const Field lap = laplacian_neumann(f);
  for (std::size_t k = 0; k < out.size(); ++k) CHECK(out[k] == doctest::Approx(1.0 + 0.5 * lap[k]).scale(1.0));

  std::vector<double> drift(g.size(), 0.0);
  kernels::add_gradient_drift(g, f.values(), 2.0, drift);
  for (std::size_t k = 0; k < out.size(); ++k) CHECK(drift[k] == doctest::Approx(-2.0 * lap[k]).scale(1.0));
}
