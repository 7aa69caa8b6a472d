#include <doctest.h>

#include <cmath>
#include <numbers>

#include "inflam/analysis.hpp"
#include "inflam/errors.hpp"
#include "inflam/presets.hpp"
#include "support.hpp"

using namespace inflam;
using std::numbers::pi;

namespace {

// Trajectory with one component whose field is f(t) at samples 0..t_end.
template <class F>
Trajectory synthetic(const Grid& g, double t_end, int samples, F&& field_at) {
  Trajectory tr;
  tr.components = {"q1"};
  tr.grid = g;
  tr.l1.resize(1);
  tr.linf.resize(1);
  for (int k = 0; k <= samples; ++k) {
    const double t = t_end * k / samples;
    const Field f = field_at(t);
    tr.times.push_back(t);
    tr.l1[0].push_back(integrate_domain(f));
    tr.linf[0].push_back(f.max_abs());
    if (k == samples) {
      tr.final_state.t = t;
      tr.final_state.names = {"q1"};
      tr.final_state.fields = {f};
    }
  }
  return tr;
}

ModelDefinition pure_diffusion(double d) {
  ModelDefinition m;
  m.name = "heat";
  m.components = {{"u", ComponentRole::Virus}};
  m.parameters = {{"d", d}};
  m.taxis_terms.push_back({TaxisKind::Diffusion, "u", {"d", d}, {}, true, {}});
  return m;
}

}  // namespace

TEST_CASE("inhomogeneity index") {
  const Grid g = Grid::unit_square(21);
  CHECK(inhomogeneity_index(Field(g, 0.7)) == 0.0);
  CHECK(inhomogeneity_index(Field(g, 0.0)) == 0.0);
  CHECK(inhomogeneity_index(Field::from_function(g, [](double x, double) { return x; })) == 1.0);
  // (1.5 - 0.5) / 1.5; the nodes include x = 0 and x = 1.
  const Field c = Field::from_function(g, [](double x, double) { return 1.0 + 0.5 * std::cos(pi * x); });
  CHECK(inhomogeneity_index(c) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("inhomogeneity index is scale invariant and bounded (property)") {
  std::mt19937_64 rng(99);
  const Grid g = Grid::unit_square(9);
  for (int trial = 0; trial < 100; ++trial) {
    Field f = testing::random_field(g, rng, 0.0, 5.0);
    const double idx = inhomogeneity_index(f);
    CHECK(idx >= 0.0);
    CHECK(idx <= 1.0);
    const double alpha = testing::uniform(rng, 1e-3, 1e3);
    f *= alpha;
    CHECK(inhomogeneity_index(f) == doctest::Approx(idx).epsilon(1e-12));
  }
}

TEST_CASE("synthetic healing and chronic trajectories") {
  const Grid g = Grid::unit_square(11);
  const auto healing = synthetic(g, 10.0, 100, [&](double t) { return Field(g, std::exp(-1.5 * t)); });
  const auto c1 = classify(healing);
  CHECK(c1.label == CourseLabel::Healing);
  CHECK(c1.final_virus_linf < 1e-6);

  const auto chronic = synthetic(g, 10.0, 100, [&](double) {
    return Field::from_function(g, [](double x, double) { return 0.3 * (1.0 + (x < 0.5 ? 1.0 : 0.0)); });
  });
  const auto c2 = classify(chronic);
  CHECK(c2.label == CourseLabel::Chronic);
  CHECK(c2.tail_drift == 0.0);
  CHECK(c2.inhomogeneity == doctest::Approx(0.5));
  CHECK(c2.thresholds.healing_linf == 1e-3);

  const auto homogeneous = synthetic(g, 10.0, 100, [&](double) { return Field(g, 0.4); });
  CHECK(classify(homogeneous).label == CourseLabel::Undetermined);

  const auto drifting = synthetic(g, 10.0, 100, [&](double t) {
    return Field::from_function(g, [t](double x, double) { return (0.2 + 0.01 * t) * (1.0 + x); });
  });
  const auto c4 = classify(drifting);
  CHECK(c4.label == CourseLabel::Undetermined);
  CHECK(c4.tail_drift > 1e-3);
}

TEST_CASE("too short a tail window is undetermined with a diagnostic") {
  const Grid g = Grid::unit_square(5);
  const auto one = synthetic(g, 1.0, 1, [&](double) { return Field(g, 0.5); });
  const auto c = classify(one);
  CHECK(c.label == CourseLabel::Undetermined);
  CHECK_FALSE(c.diagnostic.empty());
}

TEST_CASE("raising the healing threshold never turns healing into chronic (property)") {
  std::mt19937_64 rng(4);
  const Grid g = Grid::unit_square(7);
  for (int trial = 0; trial < 40; ++trial) {
    const double level = std::pow(10.0, testing::uniform(rng, -5, 0));
    const double rate = testing::uniform(rng, 0.0, 1.0);
    const auto tr = synthetic(g, 10.0, 50, [&](double t) {
      return Field::from_function(g, [&](double x, double) { return level * std::exp(-rate * t) * (1.0 + x); });
    });
    ClassifierThresholds th;
    th.healing_linf = 1e-5;
    CourseLabel prev = classify(tr, th).label;
    for (double h : {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0}) {
      th.healing_linf = h;
      const CourseLabel now = classify(tr, th).label;
      if (prev == CourseLabel::Healing) CHECK(now == CourseLabel::Healing);
      prev = now;
    }
  }
}

TEST_CASE("spectral norm against closed forms") {
  CHECK(spectral_norm({{3.0, 0.0}, {0.0, -4.0}}) == doctest::Approx(4.0));
  // [[1,1],[0,1]]: sigma_max = (1 + sqrt 5) / 2.
  CHECK(spectral_norm({{1.0, 1.0}, {0.0, 1.0}}) == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0));
  CHECK(spectral_norm({{0.0, 0.0}, {0.0, 0.0}}) == 0.0);
  // Rank one u v^T has norm |u||v|.
  CHECK(spectral_norm({{2.0, 4.0, 4.0}, {1.0, 2.0, 2.0}, {0.0, 0.0, 0.0}}) == doctest::Approx(std::sqrt(5.0) * 3.0));
}

TEST_CASE("sigma criterion for zero reaction and pure diffusion") {
  const auto rep = sigma_criterion(pure_diffusion(0.5), 256);
  CHECK(rep.lambda == doctest::Approx(pi * pi));
  CHECK(std::abs(rep.sigma - pi * pi / 2.0) <= 1e-6);
  CHECK(rep.m_est == 0.0);
  CHECK(rep.applicable);
  CHECK(rep.sigma == doctest::Approx(rep.lambda * rep.d_min - rep.m_est).epsilon(1e-12));
}

TEST_CASE("discrete eigenvalue lies just below pi^2") {
  const auto rep = sigma_criterion(pure_diffusion(0.5), 8);
  CHECK(rep.lambda_discrete <= pi * pi);
  CHECK(rep.lambda_discrete >= pi * pi - 0.3);
  // Cross-check against the operator itself on its first cosine mode.
  const Grid g = Grid::unit_square(21);
  const Field f = Field::from_function(g, [](double x, double) { return std::cos(pi * x); });
  CHECK(-laplacian_neumann(f)(3, 3) / f(3, 3) == doctest::Approx(rep.lambda_discrete));
}

TEST_CASE("sigma criterion on the presets") {
  const auto m3 = sigma_criterion(preset(3, Course::Chronic), 1024);
  CHECK(m3.applicable);
  CHECK(m3.sigma < 0.0);
  CHECK(m3.truncated);
  CHECK(m3.d_min == doctest::Approx(0.6));
  CHECK_FALSE(sigma_criterion(preset(1, Course::Healing), 256).applicable);
  CHECK_FALSE(sigma_criterion(preset(2, Course::Chronic), 256).applicable);
  CHECK_THROWS_AS(sigma_criterion(preset(3, Course::Chronic), 0), ConfigError);
}

TEST_CASE("a larger sample budget never lowers the Jacobian estimate (property)") {
  const auto model = preset(2, Course::Chronic);
  double prev = -1.0;
  for (std::size_t budget : {16u, 64u, 256u, 1024u}) {
    const auto rep = sigma_criterion(model, budget, 3);
    CHECK(rep.m_est >= prev);
    prev = rep.m_est;
  }
}

TEST_CASE("anisotropic diffusion contributes its smallest eigenvalue") {
  auto m = pure_diffusion(0.0);
  m.parameters["e"] = 2.0;
  AnisotropySpec a;
  a.a11 = {1.0, 0.0, 0.0};
  a.a12 = {0.5, 0.0, 0.0};
  a.a22 = {1.0, 0.0, 0.0};
  m.taxis_terms.push_back({TaxisKind::AnisoDiffusion, "u", {"e", 2.0}, {}, true, a});
  // 2 * [[1, .5], [.5, 1]] has eigenvalues 1 and 3.
  CHECK(sigma_criterion(m, 8).d_min == doctest::Approx(1.0));
}
