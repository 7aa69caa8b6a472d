#pragma once

// Time integration of the semi-discrete system. The explicit mode is the
// Dormand-Prince 5(4) pair; the implicit mode is a variable-order BDF (1-5)
// whose nonlinear systems are solved by Newton-GMRES with finite-difference
// Jacobian-vector products. Auto mode starts explicit and switches once the
// problem turns out to be stiff.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "inflam/model.hpp"

namespace inflam {

enum class SolverMode { AdaptiveExplicit, ImplicitStiff, Auto };

std::string_view to_string(SolverMode m);
std::optional<SolverMode> parse_solver_mode(std::string_view s);

struct SolverConfig {
  double t_end = 80.0;
  double rel_tol = 1e-6;
  double abs_tol = 1e-9;
  double dt_init = 1e-4;
  double dt_min = 1e-12;
  double dt_max = 5.0;
  SolverMode mode = SolverMode::Auto;
  // Norm sample times; empty means 801 equally spaced samples on [0, t_end].
  std::vector<double> output_times;
  std::vector<double> snapshot_times;
  bool clip_negative = true;

  // Throws ConfigError on violated bounds or times outside [0, t_end].
  void validate() const;
};

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
  std::size_t newton_failures = 0;
  std::size_t switches = 0;  // explicit -> implicit transitions
  std::vector<double> clamped_mass;  // per component, integrated over the domain
  double min_accepted_value = 0.0;  // smallest value after any accepted step
};

struct Trajectory {
  std::vector<std::string> components;
  Grid grid;
  std::vector<double> times;
  std::vector<std::vector<double>> l1;    // [component][sample]
  std::vector<std::vector<double>> linf;  // [component][sample]
  std::vector<double> sample_min;         // smallest value over all components per sample
  std::vector<SystemState> snapshots;
  SystemState final_state;
  StepStats stats;

  std::size_t component_index(std::string_view name) const;
};

// Step-size underflow or a non-finite right-hand side; carries everything
// produced up to the failure.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, Trajectory partial, std::string component = {})
      : std::runtime_error(what), partial_(std::move(partial)), component_(std::move(component)) {}

  const Trajectory& partial() const { return partial_; }
  const std::string& component() const { return component_; }

 private:
  Trajectory partial_;
  std::string component_;
};

Trajectory integrate(const RhsFunction& rhs, const SystemState& s0, const SolverConfig& cfg);

// Dominant Jacobian eigenvalue magnitude by power iteration on
// finite-difference directional derivatives (20 iterations, fixed start).
double stiffness_probe(const RhsFunction& rhs, const SystemState& s);

}  // namespace inflam
