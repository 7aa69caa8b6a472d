#include "inflam/model_file.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "inflam/errors.hpp"

namespace inflam {

namespace {

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
};

struct Section {
  std::string name;
  int line = 0;
  std::vector<Entry> entries;

  const Entry* find(std::string_view key) const {
    for (const auto& e : entries)
      if (e.key == key) return &e;
    return nullptr;
  }

  const Entry& require(std::string_view key) const {
    if (const auto* e = find(key)) return *e;
    throw ParseError(line, std::string(key), "missing required key in [" + name + "]");
  }

  void allow_only(std::initializer_list<std::string_view> keys, const std::vector<std::string_view>& extra = {}) const {
    for (const auto& e : entries) {
      const bool known = std::find(keys.begin(), keys.end(), e.key) != keys.end() ||
                         std::find(extra.begin(), extra.end(), e.key) != extra.end();
      if (!known) throw ParseError(e.line, e.key, "unknown key in [" + name + "]");
    }
  }
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> to_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) return std::nullopt;
  return v;
}

double number(const Entry& e) {
  if (auto v = to_number(e.value)) return *v;
  throw ParseError(e.line, e.key, "expected a number, got '" + e.value + "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::vector<Section> tokenize(std::string_view text) {
  std::vector<Section> sections;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError(line, "section", "unterminated section header");
      sections.push_back({trim(std::string_view(s).substr(1, s.size() - 2)), line, {}});
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError(line, s, "expected 'key = value'");
    if (sections.empty()) throw ParseError(line, trim(s.substr(0, eq)), "entry outside any section");
    Entry e{trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line};
    if (e.key.empty()) throw ParseError(line, "key", "empty key");
    if (sections.back().find(e.key)) throw ParseError(line, e.key, "duplicate key in [" + sections.back().name + "]");
    sections.back().entries.push_back(std::move(e));
  }
  return sections;
}

ParamSlot slot(const Entry& e, const std::map<std::string, double>& params) {
  if (auto v = to_number(e.value)) return {"", *v};
  const auto it = params.find(e.value);
  if (it == params.end()) throw ParseError(e.line, e.key, "unknown parameter '" + e.value + "'");
  return {e.value, it->second};
}

bool boolean(const Entry& e) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  throw ParseError(e.line, e.key, "expected true or false");
}

std::array<double, 3> affine(const Entry& e) {
  const auto parts = split_list(e.value);
  if (parts.size() != 3) throw ParseError(e.line, e.key, "expected three coefficients 'c0, cx, cy'");
  std::array<double, 3> out{};
  for (std::size_t k = 0; k < 3; ++k) {
    auto v = to_number(parts[k]);
    if (!v) throw ParseError(e.line, e.key, "expected a number, got '" + parts[k] + "'");
    out[k] = *v;
  }
  return out;
}

std::string num(double v) { return fmt::format("{}", v); }

std::string slot_text(const ParamSlot& s) { return s.name.empty() ? num(s.value) : s.name; }

}  // namespace

ModelDefinition parse_model(std::string_view text) {
  const auto sections = tokenize(text);
  ModelDefinition m;
  m.name = "custom";

  // Parameters first so references resolve regardless of section order.
  for (const auto& s : sections) {
    if (s.name != "parameters") continue;
    for (const auto& e : s.entries) {
      if (m.parameters.count(e.key)) throw ParseError(e.line, e.key, "parameter declared twice");
      m.parameters[e.key] = number(e);
    }
  }

  const Section* overrides = nullptr;
  for (const auto& s : sections) {
    if (s.name == "parameters") continue;
    if (s.name == "model") {
      s.allow_only({"name"});
      m.name = s.require("name").value;
    } else if (s.name == "theta") {
      s.allow_only({"x_min", "x_max", "y_min", "y_max"});
      m.theta = {number(s.require("x_min")), number(s.require("x_max")), number(s.require("y_min")),
                 number(s.require("y_max"))};
    } else if (s.name == "component") {
      s.allow_only({"name", "role"});
      const auto& role = s.require("role");
      const auto r = parse_component_role(role.value);
      if (!r) throw ParseError(role.line, "role", "unknown component role '" + role.value + "'");
      m.components.push_back({s.require("name").value, *r});
    } else if (s.name == "reaction") {
      const auto& kind = s.require("kind");
      const auto k = parse_mechanism_kind(kind.value);
      if (!k) throw ParseError(kind.line, "kind", "unknown mechanism kind '" + kind.value + "'");
      s.allow_only({"kind", "target", "inputs"}, kind_info(*k).params);
      MechanismTerm t;
      t.kind = *k;
      t.target = s.require("target").value;
      t.inputs = split_list(s.require("inputs").value);
      for (auto p : kind_info(*k).params) t.params[std::string(p)] = slot(s.require(p), m.parameters);
      m.reaction_terms.push_back(std::move(t));
    } else if (s.name == "taxis") {
      const auto& kind = s.require("kind");
      const auto k = parse_taxis_kind(kind.value);
      if (!k) throw ParseError(kind.line, "kind", "unknown taxis kind '" + kind.value + "'");
      TaxisTerm t;
      t.kind = *k;
      t.target = s.require("target").value;
      t.coefficient = slot(s.require("coefficient"), m.parameters);
      if (*k == TaxisKind::Chemotaxis) {
        s.allow_only({"kind", "target", "coefficient", "attractant", "carrier_dependent"});
        t.attractant = s.require("attractant").value;
        if (const auto* cd = s.find("carrier_dependent")) t.carrier_dependent = boolean(*cd);
      } else if (*k == TaxisKind::AnisoDiffusion) {
        s.allow_only({"kind", "target", "coefficient", "a11", "a12", "a22"});
        t.anisotropy.a11 = affine(s.require("a11"));
        t.anisotropy.a12 = affine(s.require("a12"));
        t.anisotropy.a22 = affine(s.require("a22"));
      } else {
        s.allow_only({"kind", "target", "coefficient"});
      }
      m.taxis_terms.push_back(std::move(t));
    } else if (s.name == "overrides") {
      overrides = &s;
    } else {
      throw ParseError(s.line, s.name, "unknown section");
    }
  }

  if (overrides) {
    for (const auto& e : overrides->entries) {
      if (!m.parameters.count(e.key)) throw ParseError(e.line, e.key, "override of an undeclared parameter");
      m.set_parameter(e.key, number(e));
    }
  }
  m.validate();
  return m;
}

ModelDefinition load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

std::string export_model(const ModelDefinition& m) {
  std::string out;
  auto line = [&out](std::string_view key, const std::string& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  out += "[model]\n";
  line("name", m.name);
  out += "\n[theta]\n";
  line("x_min", num(m.theta.x_min));
  line("x_max", num(m.theta.x_max));
  line("y_min", num(m.theta.y_min));
  line("y_max", num(m.theta.y_max));
  out += "\n[parameters]\n";
  for (const auto& [name, value] : m.parameters) line(name, num(value));
  for (const auto& c : m.components) {
    out += "\n[component]\n";
    line("name", c.name);
    line("role", std::string(to_string(c.role)));
  }
  for (const auto& t : m.reaction_terms) {
    out += "\n[reaction]\n";
    line("kind", std::string(kind_info(t.kind).name));
    line("target", t.target);
    std::string inputs;
    for (std::size_t k = 0; k < t.inputs.size(); ++k) inputs += (k ? ", " : "") + t.inputs[k];
    line("inputs", inputs);
    for (auto p : kind_info(t.kind).params) line(p, slot_text(t.params.at(std::string(p))));
  }
  for (const auto& t : m.taxis_terms) {
    out += "\n[taxis]\n";
    line("kind", std::string(to_string(t.kind)));
    line("target", t.target);
    line("coefficient", slot_text(t.coefficient));
    if (t.kind == TaxisKind::Chemotaxis) {
      line("attractant", t.attractant);
      line("carrier_dependent", t.carrier_dependent ? "true" : "false");
    }
    if (t.kind == TaxisKind::AnisoDiffusion) {
      auto aff = [](const std::array<double, 3>& a) { return fmt::format("{}, {}, {}", a[0], a[1], a[2]); };
      line("a11", aff(t.anisotropy.a11));
      line("a12", aff(t.anisotropy.a12));
      line("a22", aff(t.anisotropy.a22));
    }
  }
  return out;
}

}  // namespace inflam
