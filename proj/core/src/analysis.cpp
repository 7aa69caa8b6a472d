#include "inflam/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "inflam/errors.hpp"

namespace inflam {

namespace {

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
std::vector<double> symmetric_eigenvalues(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  return ev;
}

}  // namespace

std::string_view to_string(CourseLabel l) {
  switch (l) {
    case CourseLabel::Healing: return "Healing";
    case CourseLabel::Chronic: return "Chronic";
    case CourseLabel::Undetermined: return "Undetermined";
  }
  return "?";
}

double inhomogeneity_index(const Field& f) {
  const double hi = f.max();
  if (!(hi > 0.0)) return 0.0;
  return std::clamp((hi - f.min()) / hi, 0.0, 1.0);
}

CourseClassification classify(const Trajectory& traj, const ClassifierThresholds& thresholds, std::string_view virus) {
  CourseClassification out;
  out.thresholds = thresholds;
  if (traj.components.empty() || traj.times.empty()) {
    out.diagnostic = "empty trajectory";
    return out;
  }
  if (virus.empty()) {
    const bool has_q1 = std::find(traj.components.begin(), traj.components.end(), "q1") != traj.components.end();
    virus = has_q1 ? std::string_view("q1") : std::string_view(traj.components.front());
  }
  const std::size_t v = traj.component_index(virus);
  out.virus = std::string(virus);

  const auto& l1 = traj.l1[v];
  out.final_virus_linf = traj.linf[v].back();
  out.final_virus_l1 = l1.back();

  for (std::size_t c = 0; c < traj.final_state.fields.size(); ++c) {
    const double idx = inhomogeneity_index(traj.final_state.fields[c]);
    if (c == v) out.virus_inhomogeneity = idx;
    if (idx > out.inhomogeneity || out.inhomogeneity_component.empty()) {
      out.inhomogeneity = idx;
      out.inhomogeneity_component = traj.final_state.names[c];
    }
  }

  const double t_end = traj.times.back();
  const double window_start = t_end - thresholds.tail_fraction * (t_end - traj.times.front());
  const auto first = static_cast<std::size_t>(
      std::lower_bound(traj.times.begin(), traj.times.end(), window_start - 1e-12) - traj.times.begin());
  const bool tail_ok = first + 1 < traj.times.size();
  if (tail_ok) {
    const double ref = std::abs(l1.back());
    out.tail_drift = ref > 0.0 ? std::abs(l1.back() - l1[first]) / ref : 0.0;
    const auto [lo, hi] = std::minmax_element(l1.begin() + static_cast<long>(first), l1.end());
    double mean = 0.0;
    for (std::size_t k = first; k < l1.size(); ++k) mean += l1[k];
    mean /= static_cast<double>(l1.size() - first);
    out.tail_range = mean > 0.0 ? (*hi - *lo) / mean : 0.0;
  }

  if (out.final_virus_linf < thresholds.healing_linf) {
    out.label = CourseLabel::Healing;
  } else if (!tail_ok) {
    out.diagnostic = "trajectory has fewer than two samples in the tail window";
  } else if (out.tail_drift < thresholds.tail_drift && out.final_virus_linf >= thresholds.persistence_linf &&
             out.inhomogeneity >= thresholds.inhomogeneity) {
    out.label = CourseLabel::Chronic;
  } else {
    if (out.tail_drift >= thresholds.tail_drift) out.diagnostic = "virus not settled in the tail window";
    else if (out.final_virus_linf < thresholds.persistence_linf) out.diagnostic = "virus neither cleared nor persistent";
    else out.diagnostic = "final state is spatially homogeneous";
  }
  return out;
}

double spectral_norm(const std::vector<std::vector<double>>& m) {
  const std::size_t n = m.size();
  if (n == 0) return 0.0;
  const std::size_t cols = m.front().size();
  std::vector<std::vector<double>> mtm(cols, std::vector<double>(cols, 0.0));
  for (std::size_t i = 0; i < cols; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      for (std::size_t k = 0; k < n; ++k) mtm[i][j] += m[k][i] * m[k][j];
  const auto ev = symmetric_eigenvalues(mtm);
  return std::sqrt(std::max(0.0, *std::max_element(ev.begin(), ev.end())));
}

SigmaReport sigma_criterion(const ModelDefinition& model, std::size_t sample_budget, std::uint64_t seed,
                            int reference_grid_n) {
  model.validate();
  if (sample_budget == 0) throw ConfigError("sigma criterion needs a positive sample budget");
  SigmaReport rep;
  const double pi = std::numbers::pi;
  rep.lambda = pi * pi;
  const Grid ref = Grid::unit_square(reference_grid_n);
  rep.lambda_discrete = 4.0 / (ref.dx * ref.dx) * std::pow(std::sin(pi * ref.dx / 2.0), 2);

  const std::size_t nc = model.components.size();

  // Smallest eigenvalue of the total diffusion tensor per component.
  rep.d_min = std::numeric_limits<double>::infinity();
  for (const auto& comp : model.components) {
    double iso = 0.0;
    std::vector<const TaxisTerm*> aniso;
    for (const auto& t : model.taxis_terms) {
      if (t.target != comp.name) continue;
      if (t.kind == TaxisKind::Diffusion) iso += t.coefficient.value;
      if (t.kind == TaxisKind::AnisoDiffusion) aniso.push_back(&t);
    }
    double d = iso;
    if (!aniso.empty()) {
      d = std::numeric_limits<double>::infinity();
      for (int j = 0; j < ref.ny; ++j)
        for (int i = 0; i < ref.nx; ++i) {
          SymmetricMatrix2 m{iso, 0.0, iso};
          for (const auto* t : aniso) {
            const auto a = t->anisotropy.at(ref.x(i), ref.y(j));
            m.a11 += t->coefficient.value * a.a11;
            m.a12 += t->coefficient.value * a.a12;
            m.a22 += t->coefficient.value * a.a22;
          }
          d = std::min(d, m.min_eigenvalue());
        }
    }
    rep.d_min = std::min(rep.d_min, d);
  }
  if (!std::isfinite(rep.d_min)) rep.d_min = 0.0;

  for (const auto& t : model.taxis_terms)
    if (t.kind == TaxisKind::Chemotaxis) rep.applicable = false;
  if (!rep.applicable) rep.notes.push_back("chemotaxis present: the leveling theorem does not cover this model");

  // Invariant box; unbounded components are truncated at the decay bound.
  const SampleSpec spec{std::max<std::size_t>(sample_budget, 64), seed};
  rep.box = sampling_boxes(model);
  for (auto& b : rep.box) {
    if (b.bounded) continue;
    rep.truncated = true;
    if (const auto c = decay_bound(model, b.name, spec)) {
      b.upper = *c;
      rep.notes.push_back("box for '" + b.name + "' truncated at the decay bound C=" + std::to_string(*c));
    } else {
      rep.notes.push_back("box for '" + b.name + "' truncated at the fallback bound " + std::to_string(b.upper));
    }
  }

  bool nonlocal = false;
  for (const auto& t : model.reaction_terms) nonlocal = nonlocal || kind_info(t.kind).nonlocal;
  if (nonlocal)
    rep.notes.push_back("nonlocal terms enter with chi = 1/|Theta| and a spatially uniform virus (surrogate bound)");

  std::string virus;
  for (const auto& c : model.components)
    if (c.role == ComponentRole::Virus && virus.empty()) virus = c.name;

  const QuasiRandom qr(nc, seed);
  std::vector<std::vector<double>> jac(nc, std::vector<double>(nc));
  NonlocalValues nl;
  nl[std::string(kChiThetaKey)] = 1.0 / model.theta.area();
  for (std::size_t k = 0; k < sample_budget; ++k) {
    const auto u = qr.point(k + 1);
    PointState state;
    for (std::size_t c = 0; c < nc; ++c) state[rep.box[c].name] = u[c] * rep.box[c].upper;
    nl[std::string(kVirusIntegralKey)] = virus.empty() ? 0.0 : state[virus];
    for (auto& row : jac) std::fill(row.begin(), row.end(), 0.0);
    for (const auto& t : model.reaction_terms) {
      const std::size_t i = *model.component_index(t.target);
      for (std::size_t j = 0; j < nc; ++j)
        jac[i][j] += eval_term_derivative(t, model.components[j].name, state, {}, nl);
    }
    const double norm = spectral_norm(jac);
    if (norm > rep.m_est || k == 0) {
      rep.m_est = norm;
      rep.worst_state = state;
    }
  }
  rep.samples = sample_budget;
  rep.sigma = rep.lambda * rep.d_min - rep.m_est;
  return rep;
}

}  // namespace inflam
