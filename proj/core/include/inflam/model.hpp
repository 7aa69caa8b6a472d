#pragma once

// Model definitions: components, reaction terms and taxis terms of one member
// of the inflammation model family, and their method-of-lines right-hand side.

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "inflam/grid.hpp"
#include "inflam/mechanisms.hpp"

namespace inflam {

enum class ComponentRole { Virus, TCell, Helper, Killer, Cytokine };

std::string_view to_string(ComponentRole role);
std::optional<ComponentRole> parse_component_role(std::string_view s);

// True for the roles covered by the T-cell requirements.
inline bool is_tcell_role(ComponentRole r) {
  return r == ComponentRole::TCell || r == ComponentRole::Helper || r == ComponentRole::Killer;
}

struct Component {
  std::string name;
  ComponentRole role = ComponentRole::Virus;

  bool operator==(const Component&) const = default;
};

// A(x) with every entry affine in the coordinates: entry = c0 + cx*x + cy*y.
struct AnisotropySpec {
  std::array<double, 3> a11{1.0, 0.0, 0.0};
  std::array<double, 3> a12{0.0, 0.0, 0.0};
  std::array<double, 3> a22{1.0, 0.0, 0.0};

  SymmetricMatrix2 at(double x, double y) const;
  AnisotropyMap on(const Grid& grid) const;

  bool operator==(const AnisotropySpec&) const = default;
};

enum class TaxisKind { Diffusion, AnisoDiffusion, Chemotaxis };

std::string_view to_string(TaxisKind kind);
std::optional<TaxisKind> parse_taxis_kind(std::string_view s);

struct TaxisTerm {
  TaxisKind kind = TaxisKind::Diffusion;
  std::string target;
  ParamSlot coefficient;
  // Chemotaxis only. A carrier-free flux d * grad(attractant) is representable
  // so that models violating the carrier requirement can be checked.
  std::string attractant;
  bool carrier_dependent = true;
  // AnisoDiffusion only.
  AnisotropySpec anisotropy;

  bool operator==(const TaxisTerm&) const = default;
};

struct ModelDefinition {
  std::string name;
  std::vector<Component> components;
  std::vector<MechanismTerm> reaction_terms;
  std::vector<TaxisTerm> taxis_terms;
  Region theta{0.8, 1.0, 0.0, 0.2};
  std::map<std::string, double> parameters;

  std::optional<std::size_t> component_index(std::string_view name) const;
  const Component* component(std::string_view name) const;

  // Every violated structural invariant, empty when the model is well formed.
  std::vector<std::string> validation_errors() const;
  // Throws ConfigError listing every violation.
  void validate() const;

  // Updates a named parameter and every term slot bound to it.
  // Throws ConfigError for unknown names.
  void set_parameter(const std::string& name, double value);

  bool operator==(const ModelDefinition&) const = default;
};

// Component fields at one time; all fields share one grid.
struct SystemState {
  double t = 0.0;
  std::vector<std::string> names;
  std::vector<Field> fields;

  const Grid& grid() const { return fields.front().grid(); }
  const Field& field(std::string_view name) const;
  Field& field(std::string_view name);

  std::vector<double> pack() const;
  static SystemState unpack(double t, const std::vector<std::string>& names, const Grid& grid,
                            std::span<const double> flat);
  double min_value() const;
};

// Semi-discrete right-hand side on the flat state (components stacked in
// declaration order, each grid.size() long).
class RhsFunction {
 public:
  using Kernel = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

  RhsFunction(Grid grid, std::vector<std::string> components, Kernel kernel);

  const Grid& grid() const { return grid_; }
  const std::vector<std::string>& components() const { return components_; }
  std::size_t dimension() const { return grid_.size() * components_.size(); }

  void operator()(double t, std::span<const double> y, std::span<double> dydt) const { kernel_(t, y, dydt); }
  std::vector<Field> evaluate(const SystemState& state) const;

 private:
  Grid grid_;
  std::vector<std::string> components_;
  Kernel kernel_;
};

// Validates the model and builds its right-hand side; chi_theta is
// precomputed and the virus integral is refreshed once per evaluation.
RhsFunction assemble_rhs(const ModelDefinition& model, const Grid& grid);

// Constant initial fields: virus 1, T cells 0, cytokines 0.1.
SystemState initial_state(const ModelDefinition& model, const Grid& grid);

}  // namespace inflam
