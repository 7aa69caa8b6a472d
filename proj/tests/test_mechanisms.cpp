#include <doctest.h>

#include <cmath>

#include "inflam/errors.hpp"
#include "inflam/mechanisms.hpp"
#include "support.hpp"

using namespace inflam;

namespace {

// A valid term for `kind` on components named after their roles; the
// target is the self/virus/killer input as the kind requires.
MechanismTerm make_term(MechanismKind kind, std::mt19937_64& rng) {
  const auto& info = kind_info(kind);
  MechanismTerm t;
  t.kind = kind;
  for (auto role : info.input_roles) t.inputs.emplace_back(role == "self" ? "s" : std::string(role));
  switch (info.group) {
    case MechanismGroup::Growth:
    case MechanismGroup::Killing: t.target = "virus"; break;
    default: t.target = "s"; break;
  }
  for (auto p : info.params) t.params[std::string(p)] = {"", testing::uniform(rng, 0.2, 3.0)};
  if (kind == MechanismKind::M1_Allee) {
    t.params["eps"].value = testing::uniform(rng, 0.01, 0.1);
    t.params["C"].value = testing::uniform(rng, 0.5, 2.0);
    t.params["kappa"].value = testing::uniform(rng, 0.005, 0.05);
  }
  return t;
}

PointState draw_state(std::mt19937_64& rng) {
  return {{"virus", testing::uniform(rng, 0.01, 2.0)},
          {"helper", testing::uniform(rng, 0.01, 5.0)},
          {"killer", testing::uniform(rng, 0.01, 5.0)},
          {"s", testing::uniform(rng, 0.01, 5.0)}};
}

}  // namespace

TEST_CASE("catalog lists every kind once with consistent metadata") {
  const auto& kinds = all_mechanism_kinds();
  CHECK(kinds.size() == 18);
  for (auto k : kinds) {
    const auto& info = kind_info(k);
    CHECK(info.kind == k);
    CHECK(parse_mechanism_kind(info.name) == k);
    CHECK(!info.params.empty());
    CHECK(info.params.front() == "a");
  }
  CHECK(!parse_mechanism_kind("M7_Unknown").has_value());
  CHECK(kind_info(MechanismKind::M2_Global).nonlocal);
  CHECK(kind_info(MechanismKind::M2_GlobalSaturated).nonlocal);
  CHECK_FALSE(kind_info(MechanismKind::M2_LocalBounded).nonlocal);
}

TEST_CASE("analytic derivatives agree with central differences for every kind (100 draws each)") {
  std::mt19937_64 rng(2024);
  for (auto kind : all_mechanism_kinds()) {
    CAPTURE(kind_info(kind).name);
    for (int draw = 0; draw < 100; ++draw) {
      const MechanismTerm t = make_term(kind, rng);
      REQUIRE_NOTHROW(t.validate());
      const PointState state = draw_state(rng);
      NonlocalValues nl{{"chi_theta", testing::uniform(rng, 0.0, 25.0)},
                        {"virus_integral", testing::uniform(rng, 0.0, 1.0)}};
      const bool global = kind_info(kind).nonlocal;
      for (const auto& [name, value] : state) {
        if (std::find(t.inputs.begin(), t.inputs.end(), name) == t.inputs.end()) continue;
        const double analytic = eval_term_derivative(t, name, state, {}, nl);
        const double h = 1e-6;
        auto shifted = [&](double dh) {
          PointState s = state;
          s[name] += dh;
          NonlocalValues n = nl;
          // A spatially uniform change of the virus shifts its integral over the unit square equally.
          if (global && name == "virus") n["virus_integral"] += dh;
          return eval_term(t, s, {}, n);
        };
        const double fd = (shifted(h) - shifted(-h)) / (2 * h);
        CAPTURE(name);
        CHECK(std::abs(analytic - fd) <= std::max(1e-6, 1e-4 * std::abs(analytic)));
      }
    }
  }
}

TEST_CASE("reaction functions match their closed forms") {
  MechanismTerm allee{MechanismKind::M1_Allee, "q1", {"q1"},
                      {{"a", {"", 1.0}}, {"C", {"", 1.0}}, {"eps", {"", 0.05}}, {"kappa", {"", 0.01}}}};
  const double q = 0.4;
  CHECK(eval_term(allee, {{"q1", q}}, {}, {}) == doctest::Approx(q * (1 - q) * (q - 0.05) / (q + 0.01)));
  CHECK(eval_term(allee, {{"q1", 0.0}}, {}, {}) == 0.0);
  CHECK(eval_term(allee, {{"q1", 1.0}}, {}, {}) == doctest::Approx(0.0).scale(1.0));
  CHECK(eval_term(allee, {{"q1", 0.03}}, {}, {}) < 0.0);  // below the Allee threshold

  MechanismTerm sat{MechanismKind::M2_GlobalSaturated, "Th", {"q1", "Th"}, {{"a", {"", 2.0}}, {"C", {"", 8.0}}}};
  const NonlocalValues nl{{"chi_theta", 25.0}, {"virus_integral", 0.5}};
  CHECK(eval_term(sat, {{"q1", 0.3}, {"Th", 3.0}}, {}, nl) == doctest::Approx(2.0 * 25.0 * 5.0 * 0.5));

  MechanismTerm decay{MechanismKind::M6_VirusDependent, "q2", {"q1", "q2"}, {{"a", {"", 0.2}}, {"C", {"", 1.0}}}};
  CHECK(eval_term(decay, {{"q1", 0.25}, {"q2", 2.0}}, {}, {}) == doctest::Approx(-0.2 * 2.0 * 0.75));

  MechanismTerm constant{MechanismKind::ND_Constant, "q3", {"q3"}, {{"a", {"", 0.6}}}};
  CHECK(eval_term(constant, {{"q3", 0.1}}, {}, {}) == doctest::Approx(-0.6));
  CHECK(eval_term(constant, {{"q3", 0.0}}, {}, {}) == 0.0);
  CHECK(eval_term_derivative(constant, "q3", {{"q3", 0.1}}, {}, {}) == 0.0);
}

TEST_CASE("derivative sums over inputs sharing the component") {
  // M3_Product with virus = helper = the same component: d(a q^2)/dq = 2 a q.
  MechanismTerm t{MechanismKind::M3_Product, "c", {"x", "x"}, {{"a", {"", 1.5}}}};
  CHECK(eval_term_derivative(t, "x", {{"x", 0.4}}, {}, {}) == doctest::Approx(2 * 1.5 * 0.4));
  CHECK(eval_term_derivative(t, "other", {{"x", 0.4}}, {}, {}) == 0.0);
}

TEST_CASE("term validation rejects malformed terms") {
  auto term = [](MechanismKind k, std::string target, std::vector<std::string> in,
                 std::map<std::string, ParamSlot> p) { return MechanismTerm{k, std::move(target), std::move(in), std::move(p)}; };
  CHECK_THROWS_AS(term(MechanismKind::M1_Logistic, "q1", {"q1", "q2"}, {{"a", {"", 1}}, {"C", {"", 1}}}).validate(),
                  ConfigError);
  CHECK_THROWS_AS(term(MechanismKind::M1_Logistic, "q1", {"q1"}, {{"a", {"", 1}}}).validate(), ConfigError);
  CHECK_THROWS_AS(term(MechanismKind::M1_Logistic, "q1", {"q1"}, {{"a", {"", 1}}, {"C", {"", -1}}}).validate(),
                  ConfigError);
  CHECK_THROWS_AS(
      term(MechanismKind::M1_Logistic, "q1", {"q1"}, {{"a", {"", 1}}, {"C", {"", 1}}, {"eps", {"", 1}}}).validate(),
      ConfigError);
  CHECK_THROWS_AS(term(MechanismKind::M6_NaturalDecay, "q2", {"q3"}, {{"a", {"", 1}}}).validate(), ConfigError);
  CHECK_THROWS_AS(term(MechanismKind::M1_Allee, "q1", {"q1"},
                       {{"a", {"", 1}}, {"C", {"", 1}}, {"eps", {"", 2}}, {"kappa", {"", 0.1}}})
                      .validate(),
                  ConfigError);
  CHECK_NOTHROW(term(MechanismKind::M5_Bilinear, "q1", {"q1", "q2"}, {{"a", {"", 0.0}}}).validate());
  CHECK_THROWS_AS(eval_term(term(MechanismKind::M2_Global, "q2", {"q1"}, {{"a", {"", 1}}}), {{"q1", 1.0}}, {}, {}),
                  ConfigError);
}
