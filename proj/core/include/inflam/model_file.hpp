#pragma once

// Plain-text model description. Sections open with a bracketed header and
// hold `key = value` lines; `#` starts a comment.
//
//   [model]       name
//   [theta]       x_min, x_max, y_min, y_max
//   [parameters]  <name> = <number>            (one per line)
//   [component]   name, role                   (repeatable)
//   [reaction]    kind, target, inputs (comma list), and one line per
//                 parameter role (a, C, eps, kappa) holding either a
//                 declared parameter name or a literal number  (repeatable)
//   [taxis]       kind, target, coefficient; chemotaxis adds attractant and
//                 optional carrier_dependent (true|false); aniso_diffusion
//                 adds a11, a12, a22 as "c0, cx, cy"        (repeatable)
//   [overrides]   <name> = <number>, applied after the parameter table
//
// Component roles: virus, tcell, helper, killer, cytokine. Reaction kinds are
// the mechanism catalog names (M1_Allee, ...); taxis kinds are diffusion,
// aniso_diffusion and chemotaxis.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "inflam/model.hpp"

namespace inflam {

// Throws ParseError (line, field) for syntax and schema errors and
// ConfigError when the assembled model is invalid.
ModelDefinition parse_model(std::string_view text);
ModelDefinition load_model_file(const std::filesystem::path& path);

// Canonical text that parse_model maps back to an equal definition.
std::string export_model(const ModelDefinition& model);

}  // namespace inflam
