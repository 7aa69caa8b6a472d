#pragma once

// Post-processing of trajectories: course classification, spatial
// inhomogeneity and the sigma = lambda*d - M leveling criterion.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "inflam/grid.hpp"
#include "inflam/model.hpp"
#include "inflam/requirements.hpp"
#include "inflam/solver.hpp"

namespace inflam {

struct ClassifierThresholds {
  double healing_linf = 1e-3;      // final virus sup-norm below this: healing
  double tail_drift = 1e-3;        // relative virus L1 change over the tail window
  double persistence_linf = 1e-2;  // final virus sup-norm at least this: persistent
  double inhomogeneity = 0.05;
  double tail_fraction = 0.2;  // final fraction of the time span forming the tail window
};

enum class CourseLabel { Healing, Chronic, Undetermined };

std::string_view to_string(CourseLabel l);

struct CourseClassification {
  CourseLabel label = CourseLabel::Undetermined;
  std::string virus;
  double final_virus_linf = 0.0;
  double final_virus_l1 = 0.0;
  // |L1(t_end) - L1(t_end - window)| / L1(t_end) of the virus.
  double tail_drift = 0.0;
  // Max-min spread of the virus L1 over the tail window relative to its mean.
  double tail_range = 0.0;
  // Largest inhomogeneity index over all components at t_end, and the virus' own.
  double inhomogeneity = 0.0;
  std::string inhomogeneity_component;
  double virus_inhomogeneity = 0.0;
  ClassifierThresholds thresholds;
  std::string diagnostic;
};

// The virus component defaults to "q1", else the first component.
CourseClassification classify(const Trajectory& traj, const ClassifierThresholds& thresholds = {},
                              std::string_view virus = {});

// (max - min) / max for max > 0, else 0.
double inhomogeneity_index(const Field& f);

struct SigmaReport {
  double lambda = 0.0;           // first nonzero Neumann eigenvalue of the unit square
  double lambda_discrete = 0.0;  // same for the 5-point operator on the reference grid
  double d_min = 0.0;
  double m_est = 0.0;
  double sigma = 0.0;
  bool applicable = true;  // false when any chemotaxis term is present
  bool truncated = false;  // some box edge is a search bound rather than a capacity
  std::vector<ComponentBox> box;
  std::size_t samples = 0;
  PointState worst_state;  // where the Jacobian norm peaks
  std::vector<std::string> notes;
};

// Jacobian norms are sampled over the box at `sample_budget` quasi-random
// states; nonlocal terms use chi = 1/|Theta| and a spatially uniform virus.
SigmaReport sigma_criterion(const ModelDefinition& model, std::size_t sample_budget, std::uint64_t seed = 1,
                            int reference_grid_n = 21);

// Largest singular value of a small dense row-major matrix.
double spectral_norm(const std::vector<std::vector<double>>& m);

}  // namespace inflam
