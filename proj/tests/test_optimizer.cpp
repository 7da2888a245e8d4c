#include <cmath>

#include <doctest.h>

#include "cosserat/fem.hpp"
#include "cosserat/mesh.hpp"
#include "cosserat/optimizer.hpp"
#include "support.hpp"

using namespace testing;

namespace {

MaterialParams reference_params(double L_c) {
  MaterialParams p;
  p.mu_c = p.mu;
  p.L_c = L_c;
  return p;
}

double max_defect(const ShellState& s) {
  double d = 0.0;
  for (const Rotation& r : s.R) d = std::max(d, Rotation::orthogonality_defect(r.matrix()));
  return d;
}

bool non_increasing(const std::vector<double>& h) {
  for (std::size_t k = 1; k < h.size(); ++k) {
    if (h[k] > h[k - 1]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("retraction") {
  const Mesh mesh = make_disk_mesh(2);
  Random r(157);
  ShellState s = initial_state(mesh, 0.9);
  const int n = mesh.node_count();
  std::vector<Vec3> dm(n), dr(n), zero(n, Vec3::Zero());
  for (int i = 0; i < n; ++i) {
    dm[i] = r.vec();
    dr[i] = r.vec();
  }
  const ShellState same = retract(s, dm, dr, 0.0);
  for (int i = 0; i < n; ++i) {
    CHECK(same.m[i] == s.m[i]);
    CHECK(same.R[i].matrix() == s.R[i].matrix());
  }
  const ShellState moved = retract(s, dm, zero, 0.3);
  for (int i = 0; i < n; ++i) {
    CHECK(moved.R[i].matrix() == s.R[i].matrix());
    CHECK((moved.m[i] - (s.m[i] + 0.3 * dm[i])).norm() <= 1e-15);
  }
  const ShellState turned = retract(s, zero, dr, 5.0);
  CHECK(max_defect(turned) <= 1e-12);
  for (int i = 0; i < n; ++i) CHECK(rel(turned.R[i].matrix(), (s.R[i] * exp_so3(5.0 * dr[i])).matrix()) <= 1e-12);

  for (int k = 0; k < 2000; ++k) s = retract(s, dm, dr, r.uniform(-2.0, 2.0));
  CHECK(max_defect(s) <= 1e-10);
  CHECK_THROWS_AS(retract(s, std::vector<Vec3>(3), dr, 1.0), std::invalid_argument);
}

TEST_CASE("solve options validation") {
  SolveOptions o;
  CHECK_NOTHROW(o.validate());
  o.grad_tol = 0.0;
  CHECK_THROWS_AS(o.validate(), std::invalid_argument);
  o = SolveOptions{};
  o.armijo_c = 1.0;
  CHECK_THROWS_AS(o.validate(), std::invalid_argument);
  o = SolveOptions{};
  o.shrink = 0.0;
  CHECK_THROWS_AS(o.validate(), std::invalid_argument);
  o = SolveOptions{};
  o.jitter = -1.0;
  CHECK_THROWS_AS(o.validate(), std::invalid_argument);
  CHECK(parse_method(to_string(Method::gradient_descent)) == Method::gradient_descent);
  CHECK_THROWS_AS(parse_method("newton"), std::invalid_argument);
}

TEST_CASE("identity configuration is a minimizer") {
  const Mesh mesh = make_disk_mesh(2);
  for (const Method m : {Method::trust_region, Method::gradient_descent}) {
    SolveOptions o;
    o.method = m;
    const SolveResult res = minimize(reference_state(mesh), mesh, reference_params(1e-3), {}, BoundaryCondition::radial(1.0), o);
    CHECK(res.stats.converged);
    CHECK(res.stats.iterations <= 1);
    CHECK(std::abs(res.stats.final_energy) <= 1e-10);
  }
}

TEST_CASE("compressed disk on level 2") {
  const Mesh mesh = make_disk_mesh(2);
  const MaterialParams p = reference_params(1e-3);
  const ShellState cap = initial_state(mesh, 0.95);
  SolveOptions o;
  const SolveResult res = minimize(cap, mesh, p, {}, BoundaryCondition::radial(0.95), o);
  CHECK(res.stats.converged);
  CHECK(res.stats.final_grad_norm <= 1e-6);
  CHECK(res.stats.final_energy < assemble_energy(mesh, cap, p).total);
  CHECK(non_increasing(res.stats.energy_history));
  CHECK(res.stats.energy_history.size() == static_cast<std::size_t>(res.stats.iterations) + 1);
  CHECK(rel(res.stats.energy_history.back(), res.stats.final_energy) <= 1e-9);
  CHECK(max_defect(res.state) <= 1e-10);
  for (int i : mesh.boundary_nodes()) {
    const Vec2 x = mesh.nodes()[i];
    CHECK((res.state.m[i] - Vec3(0.95 * x.x(), 0.95 * x.y(), 0.0)).norm() <= 1e-15);
  }
  const DirichletMask fixed = dirichlet_mask(mesh, BoundaryCondition::radial(0.95));
  const NodalGradient g = assemble_gradient(mesh, res.state, p, {}, fixed);
  CHECK(g.max_node_norm_m() <= 1e-5);
  CHECK(g.max_node_norm_R() <= 1e-5);
}

TEST_CASE("gradient descent decreases the energy monotonically") {
  const Mesh mesh = make_disk_mesh(1);
  MaterialParams p;
  p.mu = p.mu_c = 1.0;
  p.lambda = 1.0;
  p.L_c = 0.3;
  SolveOptions o;
  o.method = Method::gradient_descent;
  o.grad_tol = 1e-8;
  o.max_iters = 20000;
  const ShellState cap = initial_state(mesh, 0.9);
  const SolveResult res = minimize(cap, mesh, p, {}, BoundaryCondition::radial(0.9), o);
  CHECK(res.stats.converged);
  CHECK(non_increasing(res.stats.energy_history));
  CHECK(res.stats.final_energy < assemble_energy(mesh, cap, p).total);

  // both methods reach the same stationary energy from the same start
  SolveOptions t;
  t.grad_tol = 1e-8;
  const SolveResult tr = minimize(cap, mesh, p, {}, BoundaryCondition::radial(0.9), t);
  CHECK(tr.stats.converged);
  CHECK(rel(tr.stats.final_energy, res.stats.final_energy) <= 1e-8);
}

TEST_CASE("iteration cap and stagnation") {
  const Mesh mesh = make_disk_mesh(2);
  const MaterialParams p = reference_params(1e-3);
  SolveOptions o;
  o.max_iters = 3;
  const SolveResult capped = minimize(initial_state(mesh, 0.9), mesh, p, {}, BoundaryCondition::radial(0.9), o);
  CHECK_FALSE(capped.stats.converged);
  CHECK(capped.stats.iterations == 3);

  SolveOptions g;
  g.method = Method::gradient_descent;
  g.step0 = 1e6;
  g.max_halvings = 0;
  try {
    minimize(initial_state(mesh, 0.9), mesh, p, {}, BoundaryCondition::radial(0.9), g);
    CHECK_MESSAGE(false, "expected a stagnation error");
  } catch (const StagnationError& e) {
    CHECK(e.state().size() == mesh.node_count());
  }
}

TEST_CASE("minimization is equivariant under a constant rotation") {
  const Mesh mesh = make_disk_mesh(2);
  const MaterialParams p = reference_params(1e-2);
  Random r(163);
  const Rotation q = r.rotation();
  const ShellState cap = initial_state(mesh, 0.9);
  ShellState qcap = cap;
  std::vector<Vec3> boundary(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i) {
    qcap.m[i] = q * cap.m[i];
    qcap.R[i] = q * cap.R[i];
    boundary[i] = qcap.m[i];
  }
  SolveOptions o;
  o.grad_tol = 1e-8;
  const SolveResult a = minimize(cap, mesh, p, {}, BoundaryCondition::radial(0.9), o);
  const SolveResult b = minimize(qcap, mesh, p, {}, BoundaryCondition::fixed_to(boundary), o);
  CHECK(a.stats.converged);
  CHECK(b.stats.converged);
  CHECK(rel(a.stats.final_energy, b.stats.final_energy) <= 1e-8);
}

TEST_CASE("seeded jitter is reproducible") {
  const Mesh mesh = make_disk_mesh(1);
  const MaterialParams p = reference_params(1e-2);
  SolveOptions o;
  o.jitter = 0.05;
  o.seed = 42;
  const ShellState cap = initial_state(mesh, 0.9);
  const SolveResult a = minimize(cap, mesh, p, {}, BoundaryCondition::radial(0.9), o);
  const SolveResult b = minimize(cap, mesh, p, {}, BoundaryCondition::radial(0.9), o);
  CHECK(a.stats.iterations == b.stats.iterations);
  for (int i = 0; i < mesh.node_count(); ++i) {
    CHECK(a.state.m[i] == b.state.m[i]);
    CHECK(a.state.R[i].matrix() == b.state.R[i].matrix());
  }
}

TEST_CASE("gradient check detects a corrupted gradient") {
  const Mesh mesh = make_disk_mesh(2);
  MaterialParams p;
  p.mu = p.mu_c = 1.0;
  p.lambda = 0.5;
  p.L_c = 0.2;
  Random r(167);
  ShellState s = initial_state(mesh, 0.95);
  for (int i = 0; i < mesh.node_count(); ++i) {
    if (!mesh.is_boundary(i)) s.m[i] += 0.02 * r.vec();
    s.R[i] = exp_so3(0.2 * r.vec());
  }
  GradientCheckOptions opts;
  opts.max_coordinates = 0;  // every coordinate
  const NodalGradient g = assemble_gradient(mesh, s, p);
  CHECK(check_gradient(mesh, s, p, {}, 1e-6, g, opts) <= 1e-5);
  for (const int node : {0, 7, 30}) {
    NodalGradient bad = g;
    bad.R[node](1) += 1e-3;
    CHECK(check_gradient(mesh, s, p, {}, 1e-6, bad, opts) > 1e-4);
    bad = g;
    bad.m[node](2) += 1e-3;
    CHECK(check_gradient(mesh, s, p, {}, 1e-6, bad, opts) > 1e-4);
  }
  CHECK_THROWS_AS(check_gradient(mesh, s, p, {}, 1e-2, g, opts), std::invalid_argument);
}
