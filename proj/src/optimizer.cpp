#include "cosserat/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/SparseCholesky>
#include <fmt/format.h>

namespace cosserat {

namespace {

using Eigen::VectorXd;

VectorXd to_vector(const NodalGradient& g) {
  VectorXd out(6 * g.m.size());
  for (std::size_t i = 0; i < g.m.size(); ++i) {
    out.segment<3>(6 * i) = g.m[i];
    out.segment<3>(6 * i + 3) = g.R[i];
  }
  return out;
}

ShellState retract_vector(const ShellState& s, const VectorXd& p, double step) {
  const std::size_t n = s.m.size();
  std::vector<Vec3> dm(n), dv(n);
  for (std::size_t i = 0; i < n; ++i) {
    dm[i] = p.segment<3>(6 * i);
    dv[i] = p.segment<3>(6 * i + 3);
  }
  return retract(s, dm, dv, step);
}

ShellState jitter_rotations(const ShellState& s, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vec3> dm(s.m.size(), Vec3::Zero()), dv(s.m.size());
  for (auto& v : dv) v = Vec3(normal(rng), normal(rng), normal(rng));
  return retract(s, dm, dv, amplitude);
}

// Factorization of H + shift * D, positive definite on success.
struct ShiftedFactor {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  bool positive_definite = false;
  double min_pivot = 0.0;
};

void factor(ShiftedFactor& f, const Eigen::SparseMatrix<double>& h, const VectorXd& d, double shift) {
  Eigen::SparseMatrix<double> a = h;
  if (shift != 0.0) {
    for (int i = 0; i < a.rows(); ++i) a.coeffRef(i, i) += shift * d(i);
  }
  f.ldlt.compute(a);
  if (f.ldlt.info() != Eigen::Success) {
    f.positive_definite = false;
    f.min_pivot = -1.0;
    return;
  }
  const VectorXd& piv = f.ldlt.vectorD();
  f.min_pivot = piv.minCoeff();
  f.positive_definite = f.min_pivot > 0.0 && piv.allFinite();
}

SolveStats finish(SolveStats stats, const Mesh& mesh, const ShellState& s, const MaterialParams& p, const NodalLoad& f,
                  double gnorm, std::chrono::steady_clock::time_point t0) {
  stats.final_energy = assemble_energy(mesh, s, p, f).total;
  stats.final_grad_norm = gnorm;
  stats.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return stats;
}

SolveResult gradient_descent(ShellState s, const Mesh& mesh, const MaterialParams& p, const NodalLoad& f,
                             const DirichletMask& fixed, const SolveOptions& opts,
                             std::chrono::steady_clock::time_point t0) {
  SolveStats stats;
  double energy = assemble_energy(mesh, s, p, f).total;
  stats.energy_history.push_back(energy);
  VectorXd g = to_vector(assemble_gradient(mesh, s, p, f, fixed));
  double step = opts.step0;
  while (true) {
    const double gnorm = g.norm();
    if (gnorm <= opts.grad_tol) {
      stats.converged = true;
      return {s, finish(stats, mesh, s, p, f, gnorm, t0)};
    }
    if (stats.iterations >= opts.max_iters) return {s, finish(stats, mesh, s, p, f, gnorm, t0)};
    double t = 2.0 * step;
    bool accepted = false;
    for (int k = 0; k <= opts.max_halvings; ++k, t *= opts.shrink) {
      ShellState trial = retract_vector(s, g, -t);
      const double de = energy_difference(mesh, s, trial, p, f);
      if (de <= -opts.armijo_c * t * gnorm * gnorm) {
        s = std::move(trial);
        energy += de;
        step = t;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw StagnationError(
          fmt::format("line search found no decrease after {} halvings (iteration {}, |g| = {:.3e})",
                      opts.max_halvings, stats.iterations, gnorm),
          s);
    }
    ++stats.iterations;
    stats.energy_history.push_back(energy);
    g = to_vector(assemble_gradient(mesh, s, p, f, fixed));
    if (opts.progress) opts.progress(stats.iterations, energy, g.norm());
  }
}

SolveResult trust_region(ShellState s, const Mesh& mesh, const MaterialParams& p, const NodalLoad& f,
                         const DirichletMask& fixed, const SolveOptions& opts,
                         std::chrono::steady_clock::time_point t0) {
  SolveStats stats;
  double energy = assemble_energy(mesh, s, p, f).total;
  stats.energy_history.push_back(energy);
  VectorXd g = to_vector(assemble_gradient(mesh, s, p, f, fixed));
  double sigma = opts.sigma0;
  double nc_radius = 1e-2;
  std::mt19937_64 rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  ShiftedFactor fac;

  while (true) {
    const double gnorm = g.norm();
    const Eigen::SparseMatrix<double> h = assemble_hessian(mesh, s, p, fixed);
    VectorXd d = h.diagonal().cwiseAbs();
    const double dmax = std::max(d.maxCoeff(), 1e-300);
    d = d.cwiseMax(1e-12 * dmax);

    factor(fac, h, d, 0.0);
    const bool indefinite = !fac.positive_definite && fac.min_pivot < -1e-12 * dmax;

    // Shift until H + sigma D is positive definite.
    double shift = fac.positive_definite ? sigma : std::max(sigma, 1e-8);
    factor(fac, h, d, shift);
    while (!fac.positive_definite) {
      shift *= 4.0;
      if (shift > 1e20) throw StagnationError("trust region: no positive definite shift found", s);
      factor(fac, h, d, shift);
    }

    // Direction of negative curvature by inverse iteration on the shifted matrix.
    std::optional<VectorXd> z;
    if (indefinite) {
      VectorXd w(h.rows());
      for (int i = 0; i < w.size(); ++i) w(i) = (i % 6 < 3 && !fixed.empty() && fixed[i / 6]) ? 0.0 : normal(rng);
      for (int k = 0; k < 12; ++k) {
        w = fac.ldlt.solve(w);
        w /= w.norm();
      }
      const double curvature = w.dot(h * w);
      if (curvature < -1e-10 * dmax) {
        if (w.dot(g) > 0.0) w = -w;
        z = w;
      }
    }

    if (gnorm <= opts.grad_tol && !z) {
      stats.converged = true;
      return {s, finish(stats, mesh, s, p, f, gnorm, t0)};
    }
    if (stats.iterations >= opts.max_iters) return {s, finish(stats, mesh, s, p, f, gnorm, t0)};

    bool accepted = false;
    if (z) {
      for (int k = 0; k < 30 && !accepted; ++k) {
        const VectorXd step = nc_radius * *z;
        ShellState trial = retract_vector(s, step, 1.0);
        const double de = energy_difference(mesh, s, trial, p, f);
        if (de < 0.0) {
          s = std::move(trial);
          energy += de;
          nc_radius = std::min(2.0 * nc_radius, 1.0);
          ++stats.negative_curvature_steps;
          accepted = true;
        } else {
          nc_radius *= 0.25;
        }
      }
      if (!accepted && gnorm <= opts.grad_tol) {
        stats.converged = true;
        return {s, finish(stats, mesh, s, p, f, gnorm, t0)};
      }
    }

    for (int attempt = 0; attempt < 60 && !accepted; ++attempt) {
      if (attempt > 0) factor(fac, h, d, shift);
      while (!fac.positive_definite) {
        shift *= 4.0;
        if (shift > 1e20) throw StagnationError("trust region: no positive definite shift found", s);
        factor(fac, h, d, shift);
      }
      const VectorXd step = fac.ldlt.solve(-g);
      const double predicted = -(g.dot(step) + 0.5 * step.dot(h * step));
      if (!(predicted > 0.0) || !step.allFinite()) {
        shift = std::max(4.0 * shift, 1e-8);
        fac.positive_definite = false;
        continue;
      }
      ShellState trial = retract_vector(s, step, 1.0);
      const double de = energy_difference(mesh, s, trial, p, f);
      const double rho = -de / predicted;
      if (rho > 1e-4 && de <= 0.0) {
        s = std::move(trial);
        energy += de;
        accepted = true;
        if (rho > 0.75) shift *= 0.25;
        if (rho < 0.25) shift *= 4.0;
        sigma = std::max(shift, 1e-12);
      } else {
        shift = std::max(4.0 * shift, 1e-8);
        fac.positive_definite = false;
      }
    }
    if (!accepted) {
      throw StagnationError(
          fmt::format("trust region: no acceptable step (iteration {}, |g| = {:.3e})", stats.iterations, gnorm), s);
    }
    ++stats.iterations;
    stats.energy_history.push_back(energy);
    g = to_vector(assemble_gradient(mesh, s, p, f, fixed));
    if (opts.progress) opts.progress(stats.iterations, energy, g.norm());
  }
}

}  // namespace

Method parse_method(std::string_view s) {
  if (s == "gradient_descent") return Method::gradient_descent;
  if (s == "trust_region") return Method::trust_region;
  throw std::invalid_argument(fmt::format("unknown method '{}' (expected gradient_descent|trust_region)", s));
}

std::string to_string(Method m) { return m == Method::gradient_descent ? "gradient_descent" : "trust_region"; }

void SolveOptions::validate() const {
  if (!(grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be positive");
  if (max_iters < 0) throw std::invalid_argument("max_iters must be nonnegative");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw std::invalid_argument("armijo_c must lie in (0, 1)");
  if (!(shrink > 0.0 && shrink < 1.0)) throw std::invalid_argument("shrink must lie in (0, 1)");
  if (!(step0 > 0.0)) throw std::invalid_argument("step0 must be positive");
  if (jitter < 0.0) throw std::invalid_argument("jitter must be nonnegative");
  if (max_halvings < 0) throw std::invalid_argument("max_halvings must be nonnegative");
  if (!(sigma0 > 0.0)) throw std::invalid_argument("sigma0 must be positive");
}

ShellState retract(const ShellState& state, const std::vector<Vec3>& direction_m, const std::vector<Vec3>& direction_R,
                   double step) {
  if (direction_m.size() != state.m.size() || direction_R.size() != state.R.size()) {
    throw std::invalid_argument("retract: direction size does not match the state");
  }
  ShellState out = state;
  for (std::size_t i = 0; i < state.m.size(); ++i) {
    out.m[i] += step * direction_m[i];
    const Vec3 v = step * direction_R[i];
    if (v.squaredNorm() == 0.0) continue;
    const Mat3& r = state.R[i].matrix();
    const Mat3 next = r + r * expm1_so3(v);
    out.R[i] = Rotation::orthogonality_defect(next) > 1e-13 ? polar_project(next) : Rotation(next);
  }
  return out;
}

SolveResult minimize(const ShellState& state0, const Mesh& mesh, const MaterialParams& p, const NodalLoad& f,
                     const BoundaryCondition& bc, const SolveOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  opts.validate();
  p.validate();
  check_state(mesh, state0);
  const DirichletMask fixed = dirichlet_mask(mesh, bc);
  ShellState s = apply_boundary(state0, bc, mesh);
  if (opts.jitter > 0.0) s = jitter_rotations(s, opts.jitter, opts.seed);
  if (opts.method == Method::gradient_descent) return gradient_descent(std::move(s), mesh, p, f, fixed, opts, t0);
  return trust_region(std::move(s), mesh, p, f, fixed, opts, t0);
}

double check_gradient(const Mesh& mesh, const ShellState& state, const MaterialParams& p, const NodalLoad& f,
                      double h_fd, const GradientCheckOptions& opts) {
  return check_gradient(mesh, state, p, f, h_fd, assemble_gradient(mesh, state, p, f, opts.fixed), opts);
}

double check_gradient(const Mesh& mesh, const ShellState& state, const MaterialParams& p, const NodalLoad& f,
                      double h_fd, const NodalGradient& gradient, const GradientCheckOptions& opts) {
  if (!(h_fd >= 1e-8 && h_fd <= 1e-3)) throw std::invalid_argument("check_gradient: h_fd must lie in [1e-8, 1e-3]");
  check_state(mesh, state);
  const VectorXd g = to_vector(gradient);
  std::vector<int> coords;
  for (int i = 0; i < mesh.node_count(); ++i) {
    for (int k = 0; k < 6; ++k) {
      if (k < 3 && !opts.fixed.empty() && opts.fixed[i]) continue;
      coords.push_back(6 * i + k);
    }
  }
  if (opts.max_coordinates > 0 && static_cast<int>(coords.size()) > opts.max_coordinates) {
    std::mt19937_64 rng(opts.seed);
    std::shuffle(coords.begin(), coords.end(), rng);
    coords.resize(opts.max_coordinates);
    std::sort(coords.begin(), coords.end());
  }
  auto perturbed = [&](int dof, double t) {
    ShellState s = state;
    const int i = dof / 6, k = dof % 6;
    if (k < 3) {
      s.m[i](k) += t;
    } else {
      Vec3 v = Vec3::Zero();
      v(k - 3) = t;
      s.R[i] = Rotation(Mat3(state.R[i].matrix() + state.R[i].matrix() * expm1_so3(v)));
    }
    return s;
  };
  std::vector<double> fd(coords.size());
  for (std::size_t c = 0; c < coords.size(); ++c) {
    const double ep = energy_difference(mesh, state, perturbed(coords[c], h_fd), p, f);
    const double em = energy_difference(mesh, state, perturbed(coords[c], -h_fd), p, f);
    fd[c] = (ep - em) / (2.0 * h_fd);
  }
  double fd_max = 0.0;
  for (double x : fd) fd_max = std::max(fd_max, std::abs(x));
  // Rounding floor: gradients of order 1e-10 of the stiffness scale are noise.
  const double floor = 1e-10 * (p.mu + p.mu_c + std::abs(p.lambda)) * mesh.total_area();
  double err = 0.0;
  for (std::size_t c = 0; c < coords.size(); ++c) {
    err = std::max(err, std::abs(g(coords[c]) - fd[c]) / (std::abs(fd[c]) + 1e-3 * fd_max + floor));
  }
  return err;
}

}  // namespace cosserat
