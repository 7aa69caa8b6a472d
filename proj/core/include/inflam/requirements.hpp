#pragma once

// Sampling-based verification of the feasibility requirements R.1.1-R.3.6
// on an assembled model. A failed rule carries a witness point that
// reproduces the violation; a passed rule is evidence, not a proof.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "inflam/mechanisms.hpp"
#include "inflam/model.hpp"

namespace inflam {

struct SampleSpec {
  std::size_t points_per_rule = 1024;
  std::uint64_t seed = 1;
};

enum class Verdict { Pass, Fail, NotApplicable };

std::string_view to_string(Verdict v);

struct Witness {
  std::string component;  // component the violated rule concerns
  PointState state;
  double chi = 0.0;
  double virus_integral = 0.0;
  double value = 0.0;  // offending value of the tested quantity
};

struct RuleResult {
  std::string id;
  Verdict verdict = Verdict::NotApplicable;
  std::optional<Witness> witness;
  std::size_t samples_used = 0;
  std::string detail;
};

struct RequirementReport {
  std::string model;
  SampleSpec sampler;
  std::vector<RuleResult> rules;  // one per id, in requirement order

  const RuleResult& rule(std::string_view id) const;
  std::size_t count(Verdict v) const;
  std::vector<std::string> failed() const;
  bool all_applicable_pass() const { return count(Verdict::Fail) == 0; }
};

// R.1.1 ... R.3.6 in order.
const std::vector<std::string>& requirement_ids();

// Per-component sampling box: the capacity when a term bounds the component,
// otherwise ten times the largest capacity in the model.
struct ComponentBox {
  std::string name;
  double upper = 1.0;
  bool bounded = false;
};
std::vector<ComponentBox> sampling_boxes(const ModelDefinition& model);

// Throws ConfigError for an invalid model or a zero sampling budget.
RequirementReport check_requirements(const ModelDefinition& model, const SampleSpec& sampler);

// Smallest C = box bound * 2^k (k <= 20) beyond which the reaction sum of
// `component` is strictly decreasing in that component; empty if none is
// found or the component uses ND_Constant.
std::optional<double> decay_bound(const ModelDefinition& model, const std::string& component,
                                  const SampleSpec& sampler);

// Low-discrepancy points in [0,1)^dim: Halton sequence with a seeded
// Cranley-Patterson rotation.
class QuasiRandom {
 public:
  QuasiRandom(std::size_t dim, std::uint64_t seed);
  std::vector<double> point(std::size_t index) const;
  std::size_t dimension() const { return shift_.size(); }

 private:
  std::vector<double> shift_;
};

}  // namespace inflam
