#include "inflam/model.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>

#include "inflam/errors.hpp"

namespace inflam {

namespace {

constexpr std::array<std::pair<ComponentRole, std::string_view>, 5> kRoleNames{{
    {ComponentRole::Virus, "virus"},
    {ComponentRole::TCell, "tcell"},
    {ComponentRole::Helper, "helper"},
    {ComponentRole::Killer, "killer"},
    {ComponentRole::Cytokine, "cytokine"},
}};

constexpr std::array<std::pair<TaxisKind, std::string_view>, 3> kTaxisNames{{
    {TaxisKind::Diffusion, "diffusion"},
    {TaxisKind::AnisoDiffusion, "aniso_diffusion"},
    {TaxisKind::Chemotaxis, "chemotaxis"},
}};

double affine(const std::array<double, 3>& c, double x, double y) { return c[0] + c[1] * x + c[2] * y; }

double initial_value(ComponentRole role) {
  switch (role) {
    case ComponentRole::Virus: return 1.0;
    case ComponentRole::Cytokine: return 0.1;
    default: return 0.0;
  }
}

}  // namespace

std::string_view to_string(ComponentRole role) {
  for (auto [r, s] : kRoleNames)
    if (r == role) return s;
  return "?";
}

std::optional<ComponentRole> parse_component_role(std::string_view s) {
  for (auto [r, name] : kRoleNames)
    if (name == s) return r;
  return std::nullopt;
}

std::string_view to_string(TaxisKind kind) {
  for (auto [k, s] : kTaxisNames)
    if (k == kind) return s;
  return "?";
}

std::optional<TaxisKind> parse_taxis_kind(std::string_view s) {
  for (auto [k, name] : kTaxisNames)
    if (name == s) return k;
  return std::nullopt;
}

SymmetricMatrix2 AnisotropySpec::at(double x, double y) const {
  return {affine(a11, x, y), affine(a12, x, y), affine(a22, x, y)};
}

AnisotropyMap AnisotropySpec::on(const Grid& grid) const {
  return AnisotropyMap::from_function(grid, [this](double x, double y) { return at(x, y); });
}

std::optional<std::size_t> ModelDefinition::component_index(std::string_view n) const {
  for (std::size_t k = 0; k < components.size(); ++k)
    if (components[k].name == n) return k;
  return std::nullopt;
}

const Component* ModelDefinition::component(std::string_view n) const {
  const auto k = component_index(n);
  return k ? &components[*k] : nullptr;
}

std::vector<std::string> ModelDefinition::validation_errors() const {
  std::vector<std::string> errors;
  if (components.empty()) errors.push_back("model declares no components");

  std::set<std::string> seen;
  for (const auto& c : components) {
    if (c.name.empty()) errors.push_back("component with empty name");
    if (!seen.insert(c.name).second) errors.push_back("duplicate component '" + c.name + "'");
  }

  auto declared = [&](const std::string& n) { return component(n) != nullptr; };
  auto check_slot = [&](const ParamSlot& slot, const std::string& where) {
    if (slot.name.empty()) return;
    const auto it = parameters.find(slot.name);
    if (it == parameters.end())
      errors.push_back(where + ": parameter '" + slot.name + "' is not declared");
    else if (it->second != slot.value)
      errors.push_back(where + ": parameter '" + slot.name + "' is out of sync with the parameter table");
  };

  for (const auto& term : reaction_terms) {
    const std::string where = std::string(kind_info(term.kind).name) + " term on '" + term.target + "'";
    if (!declared(term.target)) errors.push_back(where + ": target is not a declared component");
    for (const auto& in : term.inputs)
      if (!declared(in)) errors.push_back(where + ": input '" + in + "' is not a declared component");
    try {
      term.validate();
    } catch (const ConfigError& e) {
      errors.push_back(e.what());
    }
    for (const auto& [role, slot] : term.params) check_slot(slot, where);
  }

  std::set<std::string> chemotaxis_targets;
  for (const auto& taxis : taxis_terms) {
    const std::string where = std::string(to_string(taxis.kind)) + " term on '" + taxis.target + "'";
    if (!declared(taxis.target)) errors.push_back(where + ": target is not a declared component");
    if (!(taxis.coefficient.value >= 0.0) || !std::isfinite(taxis.coefficient.value))
      errors.push_back(where + ": coefficient must be non-negative");
    check_slot(taxis.coefficient, where);
    if (taxis.kind == TaxisKind::Chemotaxis) {
      if (!declared(taxis.attractant))
        errors.push_back(where + ": attractant '" + taxis.attractant + "' is not a declared component");
      if (!chemotaxis_targets.insert(taxis.target).second)
        errors.push_back(where + ": more than one chemotaxis term on the same target");
    }
  }

  try {
    theta.validate();
  } catch (const ConfigError& e) {
    errors.push_back(std::string("portal region: ") + e.what());
  }
  return errors;
}

void ModelDefinition::validate() const {
  const auto errors = validation_errors();
  if (errors.empty()) return;
  std::string msg = "model '" + name + "' is invalid:";
  for (const auto& e : errors) msg += "\n  - " + e;
  throw ConfigError(msg);
}

void ModelDefinition::set_parameter(const std::string& pname, double value) {
  auto it = parameters.find(pname);
  if (it == parameters.end()) throw ConfigError("unknown parameter '" + pname + "' in model '" + name + "'");
  it->second = value;
  for (auto& term : reaction_terms)
    for (auto& [role, slot] : term.params)
      if (slot.name == pname) slot.value = value;
  for (auto& taxis : taxis_terms)
    if (taxis.coefficient.name == pname) taxis.coefficient.value = value;
}

const Field& SystemState::field(std::string_view n) const {
  for (std::size_t k = 0; k < names.size(); ++k)
    if (names[k] == n) return fields[k];
  throw ConfigError("state has no component '" + std::string(n) + "'");
}

Field& SystemState::field(std::string_view n) {
  return const_cast<Field&>(static_cast<const SystemState&>(*this).field(n));
}

std::vector<double> SystemState::pack() const {
  std::vector<double> flat;
  flat.reserve(fields.size() * (fields.empty() ? 0 : fields.front().size()));
  for (const auto& f : fields) flat.insert(flat.end(), f.values().begin(), f.values().end());
  return flat;
}

SystemState SystemState::unpack(double t, const std::vector<std::string>& names, const Grid& grid,
                                std::span<const double> flat) {
  SystemState s;
  s.t = t;
  s.names = names;
  const std::size_t n = grid.size();
  for (std::size_t c = 0; c < names.size(); ++c) {
    auto part = flat.subspan(c * n, n);
    s.fields.emplace_back(grid, std::vector<double>(part.begin(), part.end()));
  }
  return s;
}

double SystemState::min_value() const {
  double m = fields.front().min();
  for (const auto& f : fields) m = std::min(m, f.min());
  return m;
}

RhsFunction::RhsFunction(Grid grid, std::vector<std::string> components, Kernel kernel)
    : grid_(grid), components_(std::move(components)), kernel_(std::move(kernel)) {}

std::vector<Field> RhsFunction::evaluate(const SystemState& state) const {
  const auto y = state.pack();
  if (y.size() != dimension()) throw ConfigError("state does not match the right-hand side layout");
  std::vector<double> dy(y.size(), 0.0);
  (*this)(state.t, y, dy);
  return SystemState::unpack(state.t, components_, grid_, dy).fields;
}

namespace {

struct ResolvedTerm {
  MechanismKind kind;
  TermCoefficients coeff;
  std::size_t target;
  std::array<std::size_t, 3> inputs{};
  std::size_t arity = 0;
  bool nonlocal = false;
};

struct ResolvedTaxis {
  TaxisKind kind;
  double coefficient;
  std::size_t target;
  std::size_t attractant = 0;
  bool carrier_dependent = true;
  AnisotropyMap anisotropy;
};

struct AssembledModel {
  Grid grid;
  std::size_t ncomp = 0;
  std::vector<ResolvedTerm> terms;
  std::vector<ResolvedTaxis> taxis;
  Field chi;
  std::vector<std::size_t> integrated;  // components whose integral nonlocal terms read

  void operator()(double, std::span<const double> y, std::span<double> dy) const {
    const std::size_t n = grid.size();
    std::fill(dy.begin(), dy.end(), 0.0);

    std::array<double, 8> integrals{};
    for (std::size_t c : integrated) integrals[c] = integrate_domain(grid, y.subspan(c * n, n));

    for (const auto& t : terms) {
      NonlocalInputs nl;
      if (t.nonlocal) nl.virus_integral = integrals[t.inputs[0]];
      double* out = dy.data() + t.target * n;
      std::array<double, 3> in{};
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t r = 0; r < t.arity; ++r) in[r] = y[t.inputs[r] * n + k];
        if (t.nonlocal) {
          nl.chi = chi[k];
          if (nl.chi == 0.0) continue;
        }
        out[k] += term_value(t.kind, t.coeff, std::span<const double>(in.data(), t.arity), nl);
      }
    }

    for (const auto& t : taxis) {
      if (t.coefficient == 0.0) continue;
      auto out = dy.subspan(t.target * n, n);
      auto self = y.subspan(t.target * n, n);
      switch (t.kind) {
        case TaxisKind::Diffusion: kernels::add_laplacian(grid, self, t.coefficient, out); break;
        case TaxisKind::AnisoDiffusion: kernels::add_aniso_diffusion(grid, self, t.anisotropy, t.coefficient, out); break;
        case TaxisKind::Chemotaxis: {
          auto attractant = y.subspan(t.attractant * n, n);
          if (t.carrier_dependent)
            kernels::add_chemotaxis(grid, self, attractant, t.coefficient, out);
          else
            kernels::add_gradient_drift(grid, attractant, t.coefficient, out);
          break;
        }
      }
    }
  }
};

}  // namespace

RhsFunction assemble_rhs(const ModelDefinition& model, const Grid& grid) {
  model.validate();
  if (model.components.size() > 8) throw ConfigError("at most 8 components are supported");

  auto assembled = std::make_shared<AssembledModel>();
  assembled->grid = grid;
  assembled->ncomp = model.components.size();
  assembled->chi = chi_theta(grid, model.theta);

  for (const auto& term : model.reaction_terms) {
    ResolvedTerm r;
    r.kind = term.kind;
    r.coeff = TermCoefficients::of(term);
    r.target = *model.component_index(term.target);
    r.arity = term.inputs.size();
    for (std::size_t k = 0; k < r.arity; ++k) r.inputs[k] = *model.component_index(term.inputs[k]);
    r.nonlocal = kind_info(term.kind).nonlocal;
    if (r.nonlocal &&
        std::find(assembled->integrated.begin(), assembled->integrated.end(), r.inputs[0]) ==
            assembled->integrated.end())
      assembled->integrated.push_back(r.inputs[0]);
    assembled->terms.push_back(r);
  }

  for (const auto& taxis : model.taxis_terms) {
    ResolvedTaxis r;
    r.kind = taxis.kind;
    r.coefficient = taxis.coefficient.value;
    r.target = *model.component_index(taxis.target);
    if (taxis.kind == TaxisKind::Chemotaxis) r.attractant = *model.component_index(taxis.attractant);
    r.carrier_dependent = taxis.carrier_dependent;
    if (taxis.kind == TaxisKind::AnisoDiffusion) {
      r.anisotropy = taxis.anisotropy.on(grid);
      if (const long bad = r.anisotropy.first_indefinite_node(); bad >= 0)
        throw ConfigError("anisotropy matrix is not positive definite at node " + std::to_string(bad));
    }
    assembled->taxis.push_back(std::move(r));
  }

  std::vector<std::string> names;
  for (const auto& c : model.components) names.push_back(c.name);
  return RhsFunction(grid, std::move(names),
                     [assembled](double t, std::span<const double> y, std::span<double> dy) { (*assembled)(t, y, dy); });
}

SystemState initial_state(const ModelDefinition& model, const Grid& grid) {
  SystemState s;
  s.t = 0.0;
  for (const auto& c : model.components) {
    s.names.push_back(c.name);
    s.fields.emplace_back(grid, initial_value(c.role));
  }
  return s;
}

}  // namespace inflam
