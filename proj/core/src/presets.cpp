#include "inflam/presets.hpp"

#include <string>

#include "inflam/errors.hpp"

namespace inflam {

namespace {

class Builder {
 public:
  explicit Builder(std::string name) { model_.name = std::move(name); }

  Builder& component(std::string name, ComponentRole role) {
    model_.components.push_back({std::move(name), role});
    return *this;
  }

  Builder& param(const std::string& name, double value) {
    model_.parameters[name] = value;
    return *this;
  }

  // roles: list of (role, parameter name) pairs
  Builder& reaction(MechanismKind kind, std::string target, std::vector<std::string> inputs,
                    std::initializer_list<std::pair<const char*, const char*>> roles) {
    MechanismTerm t;
    t.kind = kind;
    t.target = std::move(target);
    t.inputs = std::move(inputs);
    for (auto [role, pname] : roles) t.params[role] = slot(pname);
    model_.reaction_terms.push_back(std::move(t));
    return *this;
  }

  Builder& diffusion(std::string target, const char* pname) {
    TaxisTerm t;
    t.kind = TaxisKind::Diffusion;
    t.target = std::move(target);
    t.coefficient = slot(pname);
    model_.taxis_terms.push_back(std::move(t));
    return *this;
  }

  Builder& aniso(std::string target, const char* pname, AnisotropySpec a) {
    TaxisTerm t;
    t.kind = TaxisKind::AnisoDiffusion;
    t.target = std::move(target);
    t.coefficient = slot(pname);
    t.anisotropy = a;
    model_.taxis_terms.push_back(std::move(t));
    return *this;
  }

  Builder& chemotaxis(std::string target, std::string attractant, const char* pname) {
    TaxisTerm t;
    t.kind = TaxisKind::Chemotaxis;
    t.target = std::move(target);
    t.attractant = std::move(attractant);
    t.coefficient = slot(pname);
    model_.taxis_terms.push_back(std::move(t));
    return *this;
  }

  ModelDefinition build() {
    model_.validate();
    return std::move(model_);
  }

 private:
  ParamSlot slot(const char* pname) {
    const auto it = model_.parameters.find(pname);
    if (it == model_.parameters.end()) throw ConfigError(std::string("preset references unknown parameter ") + pname);
    return {pname, it->second};
  }

  ModelDefinition model_;
};

using K = MechanismKind;
using R = ComponentRole;

// Values shared by every model that includes the mechanism.
void shared_parameters(Builder& b) {
  b.param("a1", 1.0).param("C1", 1.0).param("eps", 0.05).param("kappa", 0.01).param("d1_ctc", 0.6);
}

void virus_growth(Builder& b, const std::string& killer) {
  b.reaction(K::M1_Allee, "q1", {"q1"}, {{"a", "a1"}, {"C", "C1"}, {"eps", "eps"}, {"kappa", "kappa"}})
      .reaction(K::M5_Bilinear, "q1", {"q1", killer}, {{"a", "a5"}});
}

ModelDefinition model1(Course course) {
  Builder b("model1");
  b.component("q1", R::Virus).component("Th", R::Helper).component("Tc", R::Killer).component("q3", R::Cytokine);
  shared_parameters(b);
  b.param("d1_ecs", 0.0)
      .param("a2h", 2.0)
      .param("CTh", 8.0)
      .param("a6h", 0.2)
      .param("a6c", 0.2)
      .param("dTh_diff", 0.9)
      .param("CTc", 15.0)
      .param("a3", 0.8)
      .param("a_nd", 0.6)
      .param("d3_diff", 0.5)
      .param("a5", 2.0)
      .param("a2c", 2.0)
      .param("dTc_chem", course == Course::Healing ? 1.0 : 8.0);
  virus_growth(b, "Tc");
  b.reaction(K::M2_GlobalSaturated, "Th", {"q1", "Th"}, {{"a", "a2h"}, {"C", "CTh"}})
      .reaction(K::M6_VirusDependent, "Th", {"q1", "Th"}, {{"a", "a6h"}, {"C", "C1"}})
      .reaction(K::M2_GlobalSaturated, "Tc", {"q1", "Tc"}, {{"a", "a2c"}, {"C", "CTc"}})
      .reaction(K::M6_VirusDependent, "Tc", {"q1", "Tc"}, {{"a", "a6c"}, {"C", "C1"}})
      .reaction(K::M3_Product, "q3", {"q1", "Th"}, {{"a", "a3"}})
      .reaction(K::ND_Linear, "q3", {"q3"}, {{"a", "a_nd"}});
  b.diffusion("q1", "d1_ctc")
      .aniso("q1", "d1_ecs", default_anisotropy())
      .diffusion("Th", "dTh_diff")
      .chemotaxis("Tc", "q3", "dTc_chem")
      .diffusion("q3", "d3_diff");
  return b.build();
}

ModelDefinition model2(Course course) {
  Builder b("model2");
  b.component("q1", R::Virus).component("q2", R::TCell).component("q3", R::Cytokine);
  shared_parameters(b);
  b.param("a5", course == Course::Healing ? 1.0 : 0.5)
      .param("a2", 2.0)
      .param("a6", 0.2)
      .param("d2_diff", 0.9)
      .param("d2_chem", 1.0)
      .param("a3", 0.8)
      .param("a_nd", 0.6)
      .param("d3_diff", 0.5);
  virus_growth(b, "q2");
  b.reaction(K::M2_Global, "q2", {"q1"}, {{"a", "a2"}})
      .reaction(K::M6_VirusDependent, "q2", {"q1", "q2"}, {{"a", "a6"}, {"C", "C1"}})
      .reaction(K::M3_VirusOnly, "q3", {"q1"}, {{"a", "a3"}})
      .reaction(K::ND_Linear, "q3", {"q3"}, {{"a", "a_nd"}});
  b.diffusion("q1", "d1_ctc").diffusion("q2", "d2_diff").chemotaxis("q2", "q3", "d2_chem").diffusion("q3", "d3_diff");
  return b.build();
}

ModelDefinition model3(Course course) {
  Builder b("model3");
  b.component("q1", R::Virus).component("q2", R::TCell);
  shared_parameters(b);
  b.param("a5", 0.5).param("a2", course == Course::Healing ? 2.0 : 0.7).param("a6", 0.2).param("d2_diff", 0.9);
  virus_growth(b, "q2");
  b.reaction(K::M2_Global, "q2", {"q1"}, {{"a", "a2"}})
      .reaction(K::M6_VirusDependent, "q2", {"q1", "q2"}, {{"a", "a6"}, {"C", "C1"}});
  b.diffusion("q1", "d1_ctc").diffusion("q2", "d2_diff");
  return b.build();
}

}  // namespace

std::string_view to_string(Course c) { return c == Course::Healing ? "healing" : "chronic"; }

std::optional<Course> parse_course(std::string_view s) {
  if (s == "healing") return Course::Healing;
  if (s == "chronic") return Course::Chronic;
  return std::nullopt;
}

AnisotropySpec default_anisotropy() {
  AnisotropySpec a;
  a.a11 = {1.0, 0.5, 0.0};
  a.a12 = {0.2, 0.0, 0.0};
  a.a22 = {1.0, 0.0, 0.0};
  return a;
}

ModelDefinition preset(int model_id, Course course) {
  switch (model_id) {
    case 1: return model1(course);
    case 2: return model2(course);
    case 3: return model3(course);
    default: throw ConfigError("unknown model id " + std::to_string(model_id) + " (expected 1, 2 or 3)");
  }
}

}  // namespace inflam
