// Command-line driver for the Cosserat membrane shell experiments.

#include <cstdint>
#include <exception>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cosserat/experiment.hpp"
#include "cosserat/fem.hpp"
#include "cosserat/mesh.hpp"
#include "cosserat/optimizer.hpp"
#include "cosserat/verify.hpp"

namespace {

using namespace cosserat;

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides, bool quiet) {
  ExperimentConfig cfg = read_config(config_path);
  for (const auto& o : overrides) apply_override(cfg, o);
  cfg.validate();
  if (!quiet) {
    fmt::print("level {} ({} triangles), r = {}, L_c = {}, mu_c/mu = {}, method {}\n", cfg.refinement_level,
               6 << (2 * cfg.refinement_level), cfg.r, *cfg.L_c, *cfg.mu_c_ratio, to_string(cfg.method));
  }
  const ExperimentResult res = run_experiment(cfg);
  fmt::print("{} after {} iterations ({:.1f} s): energy {:.10g}, |grad| {:.3e}, residuals m {:.3e} R {:.3e}\n",
             res.stats.converged ? "converged" : "iteration cap reached", res.stats.iterations, res.stats.wall_time,
             res.energy.total, res.stats.final_grad_norm, res.residual_m, res.residual_R);
  fmt::print("wrinkles: max sign changes {}, max amplitude {:.4e}\n", res.wrinkles.max_sign_changes(),
             res.wrinkles.max_amplitude);
  for (const auto& w : res.wrinkles.warnings) fmt::print(stderr, "warning: {}\n", w);
  fmt::print("wrote {0}_nodes.csv, {0}.vtk, {0}_summary.txt\n", cfg.output_prefix);
  return res.exit_code;
}

int cmd_verify() {
  const auto results = run_verification();
  bool ok = true;
  for (const auto& r : results) {
    fmt::print("{:<40} {}  {}\n", r.name, r.passed ? "PASS" : "FAIL", r.detail);
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

int cmd_grad_check(int level, std::uint64_t seed) {
  const Mesh mesh = make_disk_mesh(level);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  MaterialParams p;
  p.mu_c = p.mu;
  p.L_c = 0.1;
  ShellState s = initial_state(mesh, 0.95);
  for (int i = 0; i < mesh.node_count(); ++i) {
    if (!mesh.is_boundary(i)) s.m[i] += 0.02 * Vec3(n(rng), n(rng), n(rng));
    s.R[i] = exp_so3(0.2 * Vec3(n(rng), n(rng), n(rng)));
  }
  GradientCheckOptions o;
  o.seed = seed;
  o.fixed = dirichlet_mask(mesh, BoundaryCondition::radial(0.95));
  const double err = check_gradient(mesh, s, p, {}, 1e-6, o);
  const bool ok = err <= 1e-5;
  fmt::print("gradient check on level {} (seed {}): max relative error {:.3e} {}\n", level, seed, err,
             ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}

int cmd_residual(const std::string& state_path, const std::string& config_path) {
  const ExperimentConfig cfg = read_config(config_path);
  cfg.validate();
  const Mesh mesh = make_disk_mesh(cfg.refinement_level);
  const ShellState s = read_state_csv(state_path, mesh);
  const MaterialParams p = cfg.material();
  const NodalLoad f = constant_load(mesh, cfg.force);
  const DirichletMask fixed = dirichlet_mask(mesh, BoundaryCondition::radial(cfg.r));
  const NodalGradient g = assemble_gradient(mesh, s, p, f, fixed);
  const EnergyReport e = assemble_energy(mesh, s, p, f);
  fmt::print("energy {:.17g}\nweak force residual (max node norm) {:.6e}\nweak moment residual (max node norm) {:.6e}\n",
             e.total, g.max_node_norm_m(), g.max_node_norm_R());
  return 0;
}

int cmd_mesh(int level, const std::string& out) {
  const Mesh mesh = make_disk_mesh(level);
  write_mesh(mesh, out);
  fmt::print("wrote {} ({} nodes, {} triangles)\n", out, mesh.node_count(), mesh.triangle_count());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flat Cosserat membrane shell: energy minimization and verification"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Radial compression experiment on the unit disk");
  run->add_option("--config", config_path, "Configuration file (key = value)")->required();
  run->add_option("--set", overrides, "Override a configuration key (key=value)");
  run->add_flag("--quiet", quiet, "Suppress the preamble");

  auto* verify = app.add_subcommand("verify", "Run the identity and consistency suites");

  int level = 2;
  std::uint64_t seed = 1;
  auto* grad = app.add_subcommand("grad-check", "Compare the assembled gradient with finite differences");
  grad->add_option("--level", level, "Mesh refinement level")->check(CLI::Range(0, 6));
  grad->add_option("--seed", seed, "Random seed");

  std::string state_path;
  auto* residual = app.add_subcommand("residual", "Evaluate weak Euler-Lagrange residuals of a stored state");
  residual->add_option("--state", state_path, "prefix_nodes.csv")->required();
  residual->add_option("--config", config_path, "Configuration used for the run")->required();

  std::string mesh_out;
  int mesh_level = 2;
  auto* mesh = app.add_subcommand("mesh", "Write a disk mesh");
  mesh->add_option("--level", mesh_level, "Refinement level")->check(CLI::Range(0, 8));
  mesh->add_option("--out", mesh_out, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(config_path, overrides, quiet);
    if (*verify) return cmd_verify();
    if (*grad) return cmd_grad_check(level, seed);
    if (*residual) return cmd_residual(state_path, config_path);
    if (*mesh) return cmd_mesh(mesh_level, mesh_out);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 1;
}
