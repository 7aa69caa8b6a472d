#include "inflam/mechanisms.hpp"

#include <algorithm>
#include <cmath>

#include "inflam/errors.hpp"

namespace inflam {

namespace {

using K = MechanismKind;
using G = MechanismGroup;

const std::vector<KindInfo>& catalog() {
  static const std::vector<KindInfo> table = {
      {K::M1_Unbounded, "M1_Unbounded", G::Growth, {"virus"}, {"a"}, false},
      {K::M1_Logistic, "M1_Logistic", G::Growth, {"virus"}, {"a", "C"}, false},
      {K::M1_Allee, "M1_Allee", G::Growth, {"virus"}, {"a", "C", "eps", "kappa"}, false},
      {K::M2_LocalUnbounded, "M2_LocalUnbounded", G::Production, {"virus"}, {"a"}, false},
      {K::M2_LocalBounded, "M2_LocalBounded", G::Production, {"virus", "self"}, {"a", "C"}, false},
      {K::M2_Global, "M2_Global", G::Production, {"virus"}, {"a"}, true},
      {K::M2_GlobalSaturated, "M2_GlobalSaturated", G::Production, {"virus", "self"}, {"a", "C"}, true},
      {K::M3_VirusOnly, "M3_VirusOnly", G::Cytokine, {"virus"}, {"a"}, false},
      {K::M3_HelperOnly, "M3_HelperOnly", G::Cytokine, {"helper"}, {"a"}, false},
      {K::M3_Product, "M3_Product", G::Cytokine, {"virus", "helper"}, {"a"}, false},
      {K::M3_HelperBounded, "M3_HelperBounded", G::Cytokine, {"helper", "self"}, {"a", "C"}, false},
      {K::M3_ProductBounded, "M3_ProductBounded", G::Cytokine, {"virus", "helper", "self"}, {"a", "C"}, false},
      {K::M5_Linear, "M5_Linear", G::Killing, {"killer"}, {"a"}, false},
      {K::M5_Bilinear, "M5_Bilinear", G::Killing, {"virus", "killer"}, {"a"}, false},
      {K::M6_NaturalDecay, "M6_NaturalDecay", G::TCellDecay, {"self"}, {"a"}, false},
      {K::M6_VirusDependent, "M6_VirusDependent", G::TCellDecay, {"virus", "self"}, {"a", "C"}, false},
      {K::ND_Linear, "ND_Linear", G::NaturalDecay, {"self"}, {"a"}, false},
      {K::ND_Constant, "ND_Constant", G::NaturalDecay, {"self"}, {"a"}, false},
  };
  return table;
}

// Allee growth a q (C - q)(q - eps) / (q + kappa) and its derivative.
double allee(const TermCoefficients& c, double q) {
  return c.a * q * (c.capacity - q) * (q - c.eps) / (q + c.kappa);
}

double allee_derivative(const TermCoefficients& c, double q) {
  const double u = q * (c.capacity - q) * (q - c.eps);
  const double du = (c.capacity - 2.0 * q) * (q - c.eps) + q * (c.capacity - q);
  const double den = q + c.kappa;
  return c.a * (du * den - u) / (den * den);
}

}  // namespace

const KindInfo& kind_info(MechanismKind kind) { return catalog()[static_cast<std::size_t>(kind)]; }

const std::vector<MechanismKind>& all_mechanism_kinds() {
  static const std::vector<MechanismKind> kinds = [] {
    std::vector<MechanismKind> out;
    for (const auto& info : catalog()) out.push_back(info.kind);
    return out;
  }();
  return kinds;
}

std::optional<MechanismKind> parse_mechanism_kind(std::string_view name) {
  for (const auto& info : catalog())
    if (info.name == name) return info.kind;
  return std::nullopt;
}

double MechanismTerm::param(std::string_view role) const {
  const auto it = params.find(std::string(role));
  if (it == params.end())
    throw ConfigError(std::string(kind_info(kind).name) + " term is missing parameter '" + std::string(role) + "'");
  return it->second.value;
}

void MechanismTerm::validate() const {
  const KindInfo& info = kind_info(kind);
  const std::string where = std::string(info.name) + " term on '" + target + "'";
  if (target.empty()) throw ConfigError(where + ": empty target");
  if (inputs.size() != info.input_roles.size())
    throw ConfigError(where + ": expects " + std::to_string(info.input_roles.size()) + " inputs, got " +
                      std::to_string(inputs.size()));
  for (std::size_t r = 0; r < inputs.size(); ++r) {
    if (info.input_roles[r] == "self" && inputs[r] != target)
      throw ConfigError(where + ": input '" + inputs[r] + "' must be the target itself");
  }
  // Growth and virus-dependent killing act on the virus they read.
  if (info.group == G::Growth && inputs[0] != target)
    throw ConfigError(where + ": growth must target its own virus input");
  if (kind == K::M5_Bilinear && inputs[0] != target)
    throw ConfigError(where + ": killing must target its virus input");
  if (kind == K::M5_Bilinear && inputs[0] == inputs[1])
    throw ConfigError(where + ": virus and killer inputs must differ");
  for (auto p : info.params) {
    const double v = param(p);
    // Rates may be switched off; capacities and thresholds must be positive.
    const bool ok = p == "a" ? v >= 0.0 : v > 0.0;
    if (!ok || !std::isfinite(v))
      throw ConfigError(where + ": parameter '" + std::string(p) + "' must be " + (p == "a" ? "non-negative" : "positive") +
                        ", got " + std::to_string(v));
  }
  for (const auto& [role, slot] : params) {
    if (std::find(info.params.begin(), info.params.end(), role) == info.params.end())
      throw ConfigError(where + ": unexpected parameter '" + role + "'");
  }
  if (kind == K::M1_Allee && !(param("eps") < param("C")))
    throw ConfigError(where + ": Allee threshold eps must lie below the capacity C");
}

TermCoefficients TermCoefficients::of(const MechanismTerm& term) {
  TermCoefficients c;
  auto get = [&](const char* role) {
    const auto it = term.params.find(role);
    return it == term.params.end() ? 0.0 : it->second.value;
  };
  c.a = get("a");
  c.capacity = get("C");
  c.eps = get("eps");
  c.kappa = get("kappa");
  return c;
}

double term_value(MechanismKind kind, const TermCoefficients& c, std::span<const double> in,
                  const NonlocalInputs& nl) {
  switch (kind) {
    case K::M1_Unbounded: return c.a * in[0];
    case K::M1_Logistic: return c.a * in[0] * (c.capacity - in[0]);
    case K::M1_Allee: return allee(c, in[0]);
    case K::M2_LocalUnbounded: return c.a * in[0];
    case K::M2_LocalBounded: return c.a * in[0] * (c.capacity - in[1]);
    case K::M2_Global: return c.a * nl.chi * nl.virus_integral;
    case K::M2_GlobalSaturated: return c.a * nl.chi * (c.capacity - in[1]) * nl.virus_integral;
    case K::M3_VirusOnly: return c.a * in[0];
    case K::M3_HelperOnly: return c.a * in[0];
    case K::M3_Product: return c.a * in[0] * in[1];
    case K::M3_HelperBounded: return c.a * in[0] * (c.capacity - in[1]);
    case K::M3_ProductBounded: return c.a * in[0] * in[1] * (c.capacity - in[2]);
    case K::M5_Linear: return -c.a * in[0];
    case K::M5_Bilinear: return -c.a * in[0] * in[1];
    case K::M6_NaturalDecay: return -c.a * in[0];
    case K::M6_VirusDependent: return -c.a * in[1] * (c.capacity - in[0]);
    case K::ND_Linear: return -c.a * in[0];
    case K::ND_Constant: return in[0] > 0.0 ? -c.a : 0.0;
  }
  return 0.0;
}

double term_partial(MechanismKind kind, const TermCoefficients& c, std::span<const double> in, std::size_t role,
                    const NonlocalInputs& nl) {
  switch (kind) {
    case K::M1_Unbounded: return c.a;
    case K::M1_Logistic: return c.a * (c.capacity - 2.0 * in[0]);
    case K::M1_Allee: return allee_derivative(c, in[0]);
    case K::M2_LocalUnbounded: return c.a;
    case K::M2_LocalBounded: return role == 0 ? c.a * (c.capacity - in[1]) : -c.a * in[0];
    case K::M2_Global: return c.a * nl.chi;
    case K::M2_GlobalSaturated:
      return role == 0 ? c.a * nl.chi * (c.capacity - in[1]) : -c.a * nl.chi * nl.virus_integral;
    case K::M3_VirusOnly: return c.a;
    case K::M3_HelperOnly: return c.a;
    case K::M3_Product: return role == 0 ? c.a * in[1] : c.a * in[0];
    case K::M3_HelperBounded: return role == 0 ? c.a * (c.capacity - in[1]) : -c.a * in[0];
    case K::M3_ProductBounded:
      if (role == 0) return c.a * in[1] * (c.capacity - in[2]);
      if (role == 1) return c.a * in[0] * (c.capacity - in[2]);
      return -c.a * in[0] * in[1];
    case K::M5_Linear: return -c.a;
    case K::M5_Bilinear: return role == 0 ? -c.a * in[1] : -c.a * in[0];
    case K::M6_NaturalDecay: return -c.a;
    case K::M6_VirusDependent: return role == 0 ? c.a * in[1] : -c.a * (c.capacity - in[0]);
    case K::ND_Linear: return -c.a;
    case K::ND_Constant: return 0.0;
  }
  return 0.0;
}

namespace {

struct Gathered {
  std::array<double, 3> in{};
  NonlocalInputs nl;
};

Gathered gather(const MechanismTerm& term, const PointState& state, const NonlocalValues& nonlocal) {
  const KindInfo& info = kind_info(term.kind);
  if (term.inputs.size() != info.input_roles.size())
    throw ConfigError(std::string(info.name) + " term has wrong input arity");
  Gathered g;
  for (std::size_t r = 0; r < term.inputs.size(); ++r) {
    const auto it = state.find(term.inputs[r]);
    if (it == state.end())
      throw ConfigError(std::string(info.name) + " term needs component '" + term.inputs[r] +
                        "' which is missing from the point state");
    g.in[r] = it->second;
  }
  if (info.nonlocal) {
    const auto integral = nonlocal.find(std::string(kVirusIntegralKey));
    const auto chi = nonlocal.find(std::string(kChiThetaKey));
    if (integral == nonlocal.end() || chi == nonlocal.end())
      throw ConfigError(std::string(info.name) + " term needs nonlocal values '" + std::string(kVirusIntegralKey) +
                        "' and '" + std::string(kChiThetaKey) + "'");
    g.nl.virus_integral = integral->second;
    g.nl.chi = chi->second;
  }
  return g;
}

}  // namespace

double eval_term(const MechanismTerm& term, const PointState& state, Coordinates, const NonlocalValues& nonlocal) {
  const Gathered g = gather(term, state, nonlocal);
  return term_value(term.kind, TermCoefficients::of(term), std::span(g.in).first(term.inputs.size()), g.nl);
}

double eval_term_derivative(const MechanismTerm& term, std::string_view wrt, const PointState& state, Coordinates,
                            const NonlocalValues& nonlocal) {
  const Gathered g = gather(term, state, nonlocal);
  const auto coeff = TermCoefficients::of(term);
  const auto in = std::span<const double>(g.in).first(term.inputs.size());
  double sum = 0.0;
  for (std::size_t r = 0; r < term.inputs.size(); ++r)
    if (term.inputs[r] == wrt) sum += term_partial(term.kind, coeff, in, r, g.nl);
  return sum;
}

}  // namespace inflam
