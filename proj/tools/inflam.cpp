// Command-line front end: run presets or model files, check requirements,
// export presets as model files.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "inflam/errors.hpp"
#include "inflam/model_file.hpp"
#include "inflam/run.hpp"

namespace {

struct Options {
  int model = 0;
  std::string course = "healing";
  std::string file;
  int grid_n = 21;
  double t_end = 80.0;
  std::string snapshots;
  std::vector<std::string> sets;
  std::string out = "out";
  std::uint64_t seed = 1;
  bool sigma = false;
  std::string mode = "auto";
  double rel_tol = 1e-6;
  double abs_tol = 1e-9;
};

void add_source(CLI::App* app, Options& o) {
  app->add_option("--model", o.model, "preset model id")->check(CLI::Range(1, 3));
  app->add_option("--course", o.course, "preset course")->check(CLI::IsMember({"healing", "chronic"}));
  app->add_option("--file", o.file, "model description file");
  app->add_option("--set", o.sets, "parameter override name=value (repeatable)");
  app->add_option("--out", o.out, "output directory");
  app->add_option("--seed", o.seed, "seed of the quasi-random samplers");
}

inflam::RunConfig to_config(const Options& o) {
  inflam::RunConfig cfg;
  if (o.model != 0) cfg.preset_id = o.model;
  if (!o.file.empty()) cfg.model_file = o.file;
  cfg.course = *inflam::parse_course(o.course);
  cfg.grid_n = o.grid_n;
  cfg.solver.t_end = o.t_end;
  cfg.solver.rel_tol = o.rel_tol;
  cfg.solver.abs_tol = o.abs_tol;
  const auto mode = inflam::parse_solver_mode(o.mode);
  if (!mode) throw inflam::ConfigError("unknown solver mode '" + o.mode + "'");
  cfg.solver.mode = *mode;
  if (!o.snapshots.empty()) cfg.snapshot_times = inflam::parse_time_list(o.snapshots);
  for (const auto& s : o.sets) cfg.overrides.push_back(inflam::parse_override(s));
  cfg.out_dir = o.out;
  cfg.seed = o.seed;
  cfg.sigma = o.sigma;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reaction-diffusion-chemotaxis models of virus infections in liver tissue"};
  app.require_subcommand(1);
  Options o;

  auto* run = app.add_subcommand("run", "integrate a model and write norms, snapshots and reports");
  add_source(run, o);
  run->add_option("--grid-n", o.grid_n, "grid nodes per direction");
  run->add_option("--t-end", o.t_end, "final time");
  run->add_option("--snapshots", o.snapshots, "comma-separated snapshot times");
  run->add_option("--mode", o.mode, "solver mode")->check(CLI::IsMember({"auto", "adaptive_explicit", "implicit_stiff"}));
  run->add_option("--rtol", o.rel_tol, "relative tolerance");
  run->add_option("--atol", o.abs_tol, "absolute tolerance");
  run->add_flag("--sigma", o.sigma, "also write the sigma-criterion report");

  auto* check = app.add_subcommand("check", "verify the model requirements");
  add_source(check, o);
  check->add_option("path", o.file, "model description file");

  std::string export_path;
  auto* exp = app.add_subcommand("export", "write a preset as a model description file");
  exp->add_option("--model", o.model, "preset model id")->required()->check(CLI::Range(1, 3));
  exp->add_option("--course", o.course, "preset course")->check(CLI::IsMember({"healing", "chronic"}));
  exp->add_option("--output", export_path, "destination (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : inflam::kExitConfigError;
  }

  try {
    if (*exp) {
      const auto text = inflam::export_model(inflam::preset(o.model, *inflam::parse_course(o.course)));
      if (export_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(export_path);
        if (!out) throw inflam::ConfigError("cannot write " + export_path);
        out << text;
      }
      return inflam::kExitOk;
    }
    const auto cfg = to_config(o);
    if (*run) return inflam::run(cfg, std::cerr);
    return inflam::check(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return inflam::kExitConfigError;
  }
}
