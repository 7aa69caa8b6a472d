#pragma once

// Catalog of reaction-function variants for the inflammation model family,
// each with its analytic partial derivatives.

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace inflam {

enum class MechanismKind {
  M1_Unbounded,
  M1_Logistic,
  M1_Allee,
  M2_LocalUnbounded,
  M2_LocalBounded,
  M2_Global,
  M2_GlobalSaturated,
  M3_VirusOnly,
  M3_HelperOnly,
  M3_Product,
  M3_HelperBounded,
  M3_ProductBounded,
  M5_Linear,
  M5_Bilinear,
  M6_NaturalDecay,
  M6_VirusDependent,
  ND_Linear,
  ND_Constant,
};

// Which biological mechanism a kind implements.
enum class MechanismGroup { Growth, Production, Cytokine, Killing, TCellDecay, NaturalDecay };

// Input roles a kind reads, in the order of MechanismTerm::inputs.
//   virus  - the virus component
//   helper - T helper cells (or undivided T cells)
//   killer - cytotoxic T cells (or undivided T cells)
//   self   - the term's own target component
struct KindInfo {
  MechanismKind kind;
  std::string_view name;
  MechanismGroup group;
  std::vector<std::string_view> input_roles;
  std::vector<std::string_view> params;  // subset of {a, C, eps, kappa}
  bool nonlocal;                         // reads chi_theta and the virus integral
};

const KindInfo& kind_info(MechanismKind kind);
const std::vector<MechanismKind>& all_mechanism_kinds();
std::optional<MechanismKind> parse_mechanism_kind(std::string_view name);

// A parameter value, optionally bound to a named model parameter so that
// overrides propagate. An empty name marks a literal.
struct ParamSlot {
  std::string name;
  double value = 0.0;

  bool operator==(const ParamSlot&) const = default;
};

struct MechanismTerm {
  MechanismKind kind = MechanismKind::M1_Unbounded;
  std::string target;
  std::vector<std::string> inputs;
  std::map<std::string, ParamSlot> params;

  double param(std::string_view role) const;
  // Throws ConfigError on arity, role or parameter violations.
  void validate() const;

  bool operator==(const MechanismTerm&) const = default;
};

// Resolved numeric coefficients of a term.
struct TermCoefficients {
  double a = 0.0;
  double capacity = 0.0;
  double eps = 0.0;
  double kappa = 0.0;

  static TermCoefficients of(const MechanismTerm& term);
};

// Values of the nonlocal inputs at one point: the normalized portal
// indicator and the domain integral of the virus.
struct NonlocalInputs {
  double chi = 0.0;
  double virus_integral = 0.0;
};

// Raw kernels on role-ordered inputs.
double term_value(MechanismKind kind, const TermCoefficients& c, std::span<const double> in,
                  const NonlocalInputs& nl);
// Partial derivative with respect to input role `role`. For the global M2
// variants the virus derivative is taken along a spatially uniform
// perturbation, i.e. with respect to the virus integral on the unit square.
double term_partial(MechanismKind kind, const TermCoefficients& c, std::span<const double> in, std::size_t role,
                    const NonlocalInputs& nl);

using PointState = std::map<std::string, double>;
struct Coordinates {
  double x = 0.0;
  double y = 0.0;
};
// Keys: "virus_integral", "chi_theta".
using NonlocalValues = std::map<std::string, double>;

inline constexpr std::string_view kVirusIntegralKey = "virus_integral";
inline constexpr std::string_view kChiThetaKey = "chi_theta";

// Pointwise reaction rate. Throws ConfigError for missing inputs.
double eval_term(const MechanismTerm& term, const PointState& state, Coordinates x, const NonlocalValues& nonlocal);

// Analytic partial derivative of the term with respect to component `wrt`.
// ND_Constant is treated as piecewise constant (derivative 0).
double eval_term_derivative(const MechanismTerm& term, std::string_view wrt, const PointState& state, Coordinates x,
                            const NonlocalValues& nonlocal);

}  // namespace inflam
