#pragma once

#include <stdexcept>
#include <string>

namespace inflam {

// Invalid model, term, grid or run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Model-file syntax or schema error, located by line and field.
class ParseError : public ConfigError {
 public:
  ParseError(int line, std::string field, const std::string& message)
      : ConfigError("line " + std::to_string(line) + " [" + field + "]: " + message),
        line_(line),
        field_(std::move(field)) {}

  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

}  // namespace inflam
