#pragma once

// Run orchestration behind the command-line tool and the report writers.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "inflam/analysis.hpp"
#include "inflam/presets.hpp"
#include "inflam/requirements.hpp"
#include "inflam/solver.hpp"

namespace inflam {

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitConfigError = 2, kExitSolverFailure = 3 };

struct RunConfig {
  // Either a preset (id + course) or a model file.
  std::optional<int> preset_id;
  Course course = Course::Healing;
  std::optional<std::filesystem::path> model_file;

  int grid_n = 21;
  SolverConfig solver;  // solver.t_end is the run horizon (default 80)
  std::filesystem::path out_dir = "out";
  std::vector<double> snapshot_times;
  std::vector<std::pair<std::string, double>> overrides;
  std::uint64_t seed = 1;
  bool sigma = false;
  std::size_t check_points = 1024;
  std::size_t sigma_points = 4096;
  ClassifierThresholds thresholds;

  // Throws ConfigError.
  void validate() const;
};

// Preset or parsed file with the overrides applied.
ModelDefinition resolve_model(const RunConfig& cfg);

// Parses "name=value".
std::pair<std::string, double> parse_override(const std::string& text);
// Parses "0,16,40".
std::vector<double> parse_time_list(const std::string& text);

// Writes norms.csv, snapshots, requirements.txt, classification.txt and,
// when requested, sigma.txt into cfg.out_dir. Diagnostics go to `log`.
int run(const RunConfig& cfg, std::ostream& log);

// Writes requirements.txt; exit 0 iff every applicable rule passes.
int check(const RunConfig& cfg, std::ostream& log);

void write_norms_csv(const Trajectory& traj, std::ostream& out);
void write_snapshot(const SystemState& state, std::size_t component, std::ostream& out);
std::string snapshot_filename(const std::string& component, double t);
void write_requirements(const RequirementReport& report, std::ostream& out);
void write_sigma(const SigmaReport& report, std::ostream& out);
void write_classification(const CourseClassification& c, const Trajectory& traj, std::ostream& out);

}  // namespace inflam
