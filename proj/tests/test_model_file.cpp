#include <doctest.h>

#include "inflam/errors.hpp"
#include "inflam/model_file.hpp"
#include "inflam/presets.hpp"

using namespace inflam;

namespace {

const char* kSmall = R"(# two components
[model]
name = small

[parameters]
a = 1.5
C = 2
d = 0.4

[component]
name = v
role = virus

[component]
name = t
role = tcell

[reaction]
kind = M1_Logistic
target = v
inputs = v
a = a
C = C

[reaction]
kind = M6_NaturalDecay
target = t
inputs = t
a = 0.25   # literal

[taxis]
kind = diffusion
target = v
coefficient = d

[taxis]
kind = chemotaxis
target = t
coefficient = d
attractant = v
)";

int parse_error_line(const std::string& text, std::string* field = nullptr) {
  try {
    parse_model(text);
  } catch (const ParseError& e) {
    if (field) *field = e.field();
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("exported presets re-parse to equal definitions") {
  for (int id : {1, 2, 3})
    for (auto course : {Course::Healing, Course::Chronic}) {
      const auto m = preset(id, course);
      const auto text = export_model(m);
      const auto back = parse_model(text);
      CHECK(back == m);
      CHECK(export_model(back) == text);
    }
}

TEST_CASE("hand-written model parses") {
  const auto m = parse_model(kSmall);
  CHECK(m.name == "small");
  REQUIRE(m.components.size() == 2);
  CHECK(m.components[1].role == ComponentRole::TCell);
  REQUIRE(m.reaction_terms.size() == 2);
  CHECK(m.reaction_terms[0].params.at("C").name == "C");
  CHECK(m.reaction_terms[1].params.at("a").name.empty());
  CHECK(m.reaction_terms[1].params.at("a").value == 0.25);
  CHECK(m.taxis_terms[1].carrier_dependent);
  CHECK(m.theta == Region{0.8, 1.0, 0.0, 0.2});
}

TEST_CASE("overrides section updates bound slots") {
  const auto m = parse_model(std::string(kSmall) + "\n[overrides]\nd = 0.9\n");
  CHECK(m.parameters.at("d") == 0.9);
  CHECK(m.taxis_terms[0].coefficient.value == 0.9);
  CHECK(m.taxis_terms[1].coefficient.value == 0.9);
}

TEST_CASE("parse errors cite line and field") {
  std::string field;
  CHECK(parse_error_line("[model]\nname = x\n[bogus]\n", &field) == 3);
  CHECK(field == "bogus");
  CHECK(parse_error_line("[parameters]\na = one\n", &field) == 2);
  CHECK(field == "a");
  CHECK(parse_error_line("[component]\nname = v\nrole = bacterium\n", &field) == 3);
  CHECK(field == "role");
  CHECK(parse_error_line("name = x\n") == 1);
  CHECK(parse_error_line("[model]\njust text\n") == 2);
  CHECK(parse_error_line("[model]\nname = a\nname = b\n") == 3);

  std::string text = kSmall;
  const auto pos = text.find("a = a\n");
  text.replace(pos, 6, "a = nosuch\n");
  CHECK(parse_error_line(text, &field) == 22);
  CHECK(field == "a");

  CHECK(parse_error_line(std::string(kSmall) + "\n[overrides]\nzz = 1\n", &field) > 0);
  CHECK(field == "zz");
  CHECK(parse_error_line("[reaction]\nkind = M1_Logistic\ntarget = v\ninputs = v\na = 1\n", &field) == 1);
  CHECK(field == "C");
  CHECK(parse_error_line("[reaction]\nkind = M1_Logistic\ntarget = v\ninputs = v\na = 1\nC = 1\nkappa = 1\n",
                         &field) == 7);
}

TEST_CASE("structurally invalid files raise configuration errors") {
  std::string text = kSmall;
  text.replace(text.find("attractant = v"), 14, "attractant = w");
  CHECK_THROWS_AS(parse_model(text), ConfigError);
  CHECK_THROWS_AS(load_model_file("/nonexistent/model.txt"), ConfigError);
}

TEST_CASE("anisotropy and carrier flags survive the round trip") {
  auto m = preset(2, Course::Healing);
  for (auto& t : m.taxis_terms)
    if (t.kind == TaxisKind::Chemotaxis) t.carrier_dependent = false;
  m.parameters["e"] = 0.1;
  TaxisTerm an{TaxisKind::AnisoDiffusion, "q1", {"e", 0.1}, {}, true, {}};
  an.anisotropy.a11 = {1.0, 0.25, -0.125};
  an.anisotropy.a12 = {0.1, 0.0, 0.3};
  m.taxis_terms.push_back(an);
  m.theta = {0.0, 0.3, 0.7, 1.0};
  CHECK(parse_model(export_model(m)) == m);
}
