#pragma once

#include <optional>
#include <string_view>

#include "inflam/model.hpp"

namespace inflam {

enum class Course { Healing, Chronic };

std::string_view to_string(Course c);
std::optional<Course> parse_course(std::string_view s);

// The three reference models with the shared parameter table and the
// course-specific values. Throws ConfigError for ids outside {1, 2, 3}.
//
//   1: virus, T helper, cytotoxic T cells, cytokines; chemotactic T_c
//   2: virus, T cells, cytokines; T cells diffuse and follow cytokines
//   3: virus, T cells
ModelDefinition preset(int model_id, Course course);

// Default A(x) for extracellular virus transport.
AnisotropySpec default_anisotropy();

}  // namespace inflam
