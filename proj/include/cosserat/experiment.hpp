#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cosserat/fem.hpp"
#include "cosserat/material.hpp"
#include "cosserat/optimizer.hpp"

namespace cosserat {

/// Radial-compression experiment on the unit disk.
struct ExperimentConfig {
  double mu = 2.7191e4;
  double lambda = 4.4364e4;
  std::optional<double> mu_c_ratio;  // mu_c = ratio * mu; required
  std::optional<double> L_c;         // required
  double r = 0.9;
  int refinement_level = 3;
  std::optional<ShearMean> shear_mean;  // default follows the variant
  Variant variant = Variant::gamma_limit;
  CurvatureModel curvature = CurvatureModel::uni_constant;
  double b1 = 1.0, b2 = 1.0, b3 = 1.0;
  double grad_tol = 1e-6;
  int max_iters = 50000;
  std::string output_prefix = "shell";
  std::uint64_t seed = 0;
  Method method = Method::trust_region;
  double jitter = 0.0;
  Vec3 force = Vec3::Zero();  // constant body force
  int rings = 8;

  /// Sets one key from its textual value; throws std::invalid_argument.
  void set(const std::string& key, const std::string& value);
  /// Expands to material parameters and validates them.
  MaterialParams material() const;
  SolveOptions solve_options() const;
  void validate() const;
};

/// Reads "key = value" lines; '#' starts a comment.
ExperimentConfig read_config(const std::string& path);
/// Applies "key=value".
void apply_override(ExperimentConfig& config, const std::string& assignment);

struct WrinkleMetric {
  std::vector<double> ring_radii;
  std::vector<int> sign_changes;
  double max_amplitude = 0.0;
  std::vector<std::string> warnings;

  int max_sign_changes() const;
};

/// Sign alternations of m3 - (band mean of m3) along ring_count node bands
/// at reference radii j/ring_count * (largest interior radius), ordered by
/// angle. Targets that snap to an already counted ring are dropped.
/// max_amplitude is the largest deviation of m3 from the least-squares plane
/// over (m1, m2).
WrinkleMetric wrinkle_metric(const ShellState& state, const Mesh& mesh, int ring_count);

struct ExperimentResult {
  ShellState state;
  SolveStats stats;
  EnergyReport energy;
  WrinkleMetric wrinkles;
  double residual_m = 0.0;  // max node norm of the weak force residual
  double residual_R = 0.0;  // max node norm of the weak moment residual
  int exit_code = 0;        // 0 converged, 2 iteration cap
};

/// Builds the mesh, minimizes from the cap and, if write is set, writes
/// prefix_nodes.csv, prefix.vtk and prefix_summary.txt.
ExperimentResult run_experiment(const ExperimentConfig& config, bool write = true);

NodalLoad constant_load(const Mesh& mesh, const Vec3& f);

void write_outputs(const ShellState& state, const Mesh& mesh, const std::string& prefix);
void write_summary(const ExperimentConfig& config, const ExperimentResult& result, const std::string& path);
/// Reads prefix_nodes.csv back; checks the reference coordinates against mesh.
ShellState read_state_csv(const std::string& path, const Mesh& mesh);

}  // namespace cosserat
