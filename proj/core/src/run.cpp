#include "inflam/run.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fmt/ranges.h>

#include <fstream>
#include <ostream>
#include <sstream>

#include "inflam/errors.hpp"
#include "inflam/model_file.hpp"

namespace inflam {

namespace {

std::string real(double v) { return fmt::format("{:.17g}", v); }

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw ConfigError("cannot write " + p.string());
  return out;
}

void write_artifacts(const RunConfig& cfg, const Trajectory& traj) {
  {
    auto out = open_out(cfg.out_dir / "norms.csv");
    write_norms_csv(traj, out);
  }
  for (const auto& snap : traj.snapshots) {
    for (std::size_t c = 0; c < snap.names.size(); ++c) {
      auto out = open_out(cfg.out_dir / snapshot_filename(snap.names[c], snap.t));
      write_snapshot(snap, c, out);
    }
  }
}

std::string state_text(const PointState& s) {
  std::string out;
  for (const auto& [k, v] : s) out += fmt::format("{}{}={:.6g}", out.empty() ? "" : " ", k, v);
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (preset_id.has_value() == model_file.has_value())
    throw ConfigError("exactly one of a preset model or a model file is required");
  if (grid_n < 3) throw ConfigError("grid n must be at least 3");
  if (check_points == 0 || sigma_points == 0) throw ConfigError("sample budgets must be positive");
  SolverConfig s = solver;
  s.snapshot_times = snapshot_times;
  s.validate();
}

ModelDefinition resolve_model(const RunConfig& cfg) {
  ModelDefinition m = cfg.preset_id ? preset(*cfg.preset_id, cfg.course) : load_model_file(*cfg.model_file);
  for (const auto& [name, value] : cfg.overrides) m.set_parameter(name, value);
  m.validate();
  return m;
}

std::pair<std::string, double> parse_override(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + text + "' is not name=value");
  const std::string value = text.substr(eq + 1);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) throw ConfigError("override '" + text + "' has a non-numeric value");
  return {text.substr(0, eq), v};
}

std::vector<double> parse_time_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0) throw ConfigError("invalid time '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::string snapshot_filename(const std::string& component, double t) {
  return fmt::format("snapshot_{}_t{}.txt", component, t);
}

void write_norms_csv(const Trajectory& traj, std::ostream& out) {
  out << "t";
  for (const auto& c : traj.components) out << ',' << c << "_L1," << c << "_Linf";
  out << '\n';
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out << real(traj.times[k]);
    for (std::size_t c = 0; c < traj.components.size(); ++c)
      out << ',' << real(traj.l1[c][k]) << ',' << real(traj.linf[c][k]);
    out << '\n';
  }
}

void write_snapshot(const SystemState& state, std::size_t component, std::ostream& out) {
  const Field& f = state.fields.at(component);
  const Grid& g = f.grid();
  fmt::print(out, "# t={} component={} nx={} ny={}\n", state.t, state.names[component], g.nx, g.ny);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) out << (i ? " " : "") << real(f(i, j));
    out << '\n';
  }
}

void write_requirements(const RequirementReport& report, std::ostream& out) {
  fmt::print(out, "model: {}\n", report.model);
  fmt::print(out, "sampler: {} points per rule, seed {}\n", report.sampler.points_per_rule, report.sampler.seed);
  fmt::print(out, "summary: {} pass, {} fail, {} not-applicable\n", report.count(Verdict::Pass),
             report.count(Verdict::Fail), report.count(Verdict::NotApplicable));
  for (const auto& r : report.rules) {
    fmt::print(out, "{} {} samples={} {}\n", r.id, to_string(r.verdict), r.samples_used, r.detail);
    if (r.witness)
      fmt::print(out, "  witness: component={} {} chi={:.6g} virus_integral={:.6g} value={:.6g}\n",
                 r.witness->component, state_text(r.witness->state), r.witness->chi, r.witness->virus_integral,
                 r.witness->value);
  }
}

void write_sigma(const SigmaReport& r, std::ostream& out) {
  fmt::print(out, "lambda = {}\n", real(r.lambda));
  fmt::print(out, "lambda_discrete = {}\n", real(r.lambda_discrete));
  fmt::print(out, "d_min = {}\n", real(r.d_min));
  fmt::print(out, "M_est = {}\n", real(r.m_est));
  fmt::print(out, "sigma = {}\n", real(r.sigma));
  fmt::print(out, "applicable = {}\n", r.applicable);
  fmt::print(out, "truncated = {}\n", r.truncated);
  fmt::print(out, "samples = {}\n", r.samples);
  for (const auto& b : r.box) fmt::print(out, "box {} = [0, {}]{}\n", b.name, real(b.upper), b.bounded ? "" : " (truncated)");
  fmt::print(out, "worst_state = {}\n", state_text(r.worst_state));
  for (const auto& n : r.notes) fmt::print(out, "note: {}\n", n);
}

void write_classification(const CourseClassification& c, const Trajectory& traj, std::ostream& out) {
  fmt::print(out, "label = {}\n", to_string(c.label));
  fmt::print(out, "virus = {}\n", c.virus);
  fmt::print(out, "final_virus_linf = {}\n", real(c.final_virus_linf));
  fmt::print(out, "final_virus_l1 = {}\n", real(c.final_virus_l1));
  fmt::print(out, "tail_drift = {}\n", real(c.tail_drift));
  fmt::print(out, "tail_range = {}\n", real(c.tail_range));
  fmt::print(out, "inhomogeneity = {} ({})\n", real(c.inhomogeneity), c.inhomogeneity_component);
  fmt::print(out, "virus_inhomogeneity = {}\n", real(c.virus_inhomogeneity));
  fmt::print(out, "thresholds: healing_linf={} tail_drift={} persistence_linf={} inhomogeneity={} tail_fraction={}\n",
             c.thresholds.healing_linf, c.thresholds.tail_drift, c.thresholds.persistence_linf,
             c.thresholds.inhomogeneity, c.thresholds.tail_fraction);
  fmt::print(out, "steps: accepted={} rejected={} switches={} rhs_evaluations={}\n", traj.stats.accepted,
             traj.stats.rejected, traj.stats.switches, traj.stats.rhs_evaluations);
  for (std::size_t k = 0; k < traj.components.size(); ++k)
    fmt::print(out, "clamped_mass {} = {}\n", traj.components[k], real(traj.stats.clamped_mass[k]));
  if (!c.diagnostic.empty()) fmt::print(out, "diagnostic = {}\n", c.diagnostic);
}

int run(const RunConfig& cfg, std::ostream& log) {
  ModelDefinition model;
  std::optional<RhsFunction> rhs;
  SolverConfig scfg = cfg.solver;
  try {
    cfg.validate();
    model = resolve_model(cfg);
    rhs = assemble_rhs(model, Grid::unit_square(cfg.grid_n));
    scfg.snapshot_times = cfg.snapshot_times;
    std::filesystem::create_directories(cfg.out_dir);

    const auto report = check_requirements(model, {cfg.check_points, cfg.seed});
    auto out = open_out(cfg.out_dir / "requirements.txt");
    write_requirements(report, out);
    if (!report.all_applicable_pass())
      fmt::print(log, "warning: model violates requirements: {}\n", fmt::join(report.failed(), ", "));
  } catch (const std::exception& e) {
    fmt::print(log, "error: {}\n", e.what());
    return kExitConfigError;
  }

  Trajectory traj;
  try {
    traj = integrate(*rhs, initial_state(model, rhs->grid()), scfg);
  } catch (const IntegrationError& e) {
    fmt::print(log, "integration failed: {}\n", e.what());
    try {
      write_artifacts(cfg, e.partial());
    } catch (const std::exception& w) {
      fmt::print(log, "error: {}\n", w.what());
    }
    return kExitSolverFailure;
  } catch (const ConfigError& e) {
    fmt::print(log, "error: {}\n", e.what());
    return kExitConfigError;
  }

  try {
    write_artifacts(cfg, traj);
    const auto cls = classify(traj, cfg.thresholds);
    auto out = open_out(cfg.out_dir / "classification.txt");
    write_classification(cls, traj, out);
    fmt::print(log, "{}: {} (final virus Linf {:.3g})\n", model.name, to_string(cls.label), cls.final_virus_linf);
    if (cfg.sigma) {
      const auto rep = sigma_criterion(model, cfg.sigma_points, cfg.seed, cfg.grid_n);
      auto s = open_out(cfg.out_dir / "sigma.txt");
      write_sigma(rep, s);
      fmt::print(log, "sigma = {:.6g} (applicable: {})\n", rep.sigma, rep.applicable);
    }
  } catch (const std::exception& e) {
    fmt::print(log, "error: {}\n", e.what());
    return kExitConfigError;
  }
  return kExitOk;
}

int check(const RunConfig& cfg, std::ostream& log) {
  try {
    if (cfg.preset_id.has_value() == cfg.model_file.has_value())
      throw ConfigError("exactly one of a preset model or a model file is required");
    const ModelDefinition model = resolve_model(cfg);
    const auto report = check_requirements(model, {cfg.check_points, cfg.seed});
    std::filesystem::create_directories(cfg.out_dir);
    auto out = open_out(cfg.out_dir / "requirements.txt");
    write_requirements(report, out);
    write_requirements(report, log);
    return report.all_applicable_pass() ? kExitOk : kExitCheckFailed;
  } catch (const std::exception& e) {
    fmt::print(log, "error: {}\n", e.what());
    return kExitConfigError;
  }
}

}  // namespace inflam
