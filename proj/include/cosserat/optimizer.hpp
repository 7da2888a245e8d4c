#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <stdexcept>
#include <vector>

#include "cosserat/fem.hpp"

namespace cosserat {

enum class Method { gradient_descent, trust_region };

Method parse_method(std::string_view s);
std::string to_string(Method m);

struct SolveOptions {
  double grad_tol = 1e-6;
  int max_iters = 50000;
  Method method = Method::trust_region;
  // gradient descent
  double step0 = 1e-6;
  double armijo_c = 1e-4;
  double shrink = 0.5;
  int max_halvings = 60;
  // trust region (Levenberg-Marquardt)
  double sigma0 = 1e-3;
  // symmetry-breaking perturbation of the initial rotations
  double jitter = 0.0;
  std::uint64_t seed = 0;
  /// Called after every accepted iteration with (iteration, energy, gradient norm).
  std::function<void(int, double, double)> progress;

  void validate() const;
};

struct SolveStats {
  int iterations = 0;
  double final_energy = 0.0;
  double final_grad_norm = 0.0;
  std::vector<double> energy_history;  // entry k: energy after k accepted steps
  double wall_time = 0.0;              // seconds
  bool converged = false;
  int negative_curvature_steps = 0;
};

struct SolveResult {
  ShellState state;
  SolveStats stats;
};

/// Thrown when no decrease can be found; carries the last state.
class StagnationError : public std::runtime_error {
 public:
  StagnationError(const std::string& what, ShellState state) : std::runtime_error(what), state_(std::move(state)) {}
  const ShellState& state() const { return state_; }

 private:
  ShellState state_;
};

/// m <- m + step dm, R_i <- R_i exp(step Anti(v_i)).
ShellState retract(const ShellState& state, const std::vector<Vec3>& direction_m,
                   const std::vector<Vec3>& direction_R, double step);

/// Minimizes the discrete energy over positions and rotations with the
/// positions of boundary nodes prescribed by bc.
SolveResult minimize(const ShellState& state0, const Mesh& mesh, const MaterialParams& p, const NodalLoad& f,
                     const BoundaryCondition& bc, const SolveOptions& opts);

struct GradientCheckOptions {
  int max_coordinates = 400;  // subsample above this many free coordinates
  std::uint64_t seed = 1;
  DirichletMask fixed;
};

/// max_i |g_i - fd_i| / (|fd_i| + 1e-3 max_j |fd_j| + 1e-10 (mu + mu_c + |lambda|) |omega|)
/// over free coordinates, comparing assemble_gradient with central differences.
double check_gradient(const Mesh& mesh, const ShellState& state, const MaterialParams& p, const NodalLoad& f,
                      double h_fd, const GradientCheckOptions& opts = {});

/// Same, against a caller-supplied gradient.
double check_gradient(const Mesh& mesh, const ShellState& state, const MaterialParams& p, const NodalLoad& f,
                      double h_fd, const NodalGradient& gradient, const GradientCheckOptions& opts = {});

}  // namespace cosserat
