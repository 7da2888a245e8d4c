#pragma once

// P1 discretization of the shell energy. Positions m and rotation matrices R
// are interpolated linearly (R componentwise). The membrane term is
// mass-lumped, i.e. evaluated at the three vertices with the nodal rotation
// and weight area/3, so that the energy is an explicit polynomial in the nodal
// values. The uni-constant curvature term uses the elementwise constant DR.
//
// Tangent coordinates: node i carries (u_i, v_i) with m_i + u_i and
// R_i exp(Anti(v_i)); gradients and Hessians are taken in these coordinates
// at (u, v) = 0. Global dof index: 6 i + k for u, 6 i + 3 + k for v.

#include <functional>
#include <vector>

#include <Eigen/Sparse>

#include "cosserat/energy.hpp"
#include "cosserat/material.hpp"
#include "cosserat/mesh.hpp"
#include "cosserat/so3.hpp"

namespace cosserat {

struct ShellState {
  std::vector<Vec3> m;
  std::vector<Rotation> R;

  int size() const { return static_cast<int>(m.size()); }
};

/// Per-node body force; empty means no load.
using NodalLoad = std::vector<Vec3>;
/// Nonzero entries mark nodes whose position is prescribed.
using DirichletMask = std::vector<char>;

struct BoundaryCondition {
  enum class Kind { radial_compression, fixed, free };
  Kind kind = Kind::free;
  double r = 1.0;             // radial_compression
  std::vector<Vec3> values;   // fixed: one value per node (only boundary entries used)

  static BoundaryCondition radial(double r);
  static BoundaryCondition fixed_to(std::vector<Vec3> values);
  static BoundaryCondition none() { return {}; }
};

struct EnergyReport {
  double total = 0.0;
  double stretch = 0.0;
  double drill = 0.0;
  double transverse_shear = 0.0;
  double elongation = 0.0;
  double curvature = 0.0;
  double load = 0.0;
};

struct ElementGradients {
  Mat32 dm;
  Mat3 dxr;
  Mat3 dyr;
  Rotation rc;  // polar factor of the nodal average
};

/// Nodal gradient in tangent coordinates.
struct NodalGradient {
  std::vector<Vec3> m;
  std::vector<Vec3> R;

  double norm() const;
  double max_node_norm_m() const;
  double max_node_norm_R() const;
};

void check_state(const Mesh& mesh, const ShellState& state);

/// Throws std::invalid_argument for r outside (0, 1] or size mismatch.
ShellState apply_boundary(const ShellState& state, const BoundaryCondition& bc, const Mesh& mesh);
DirichletMask dirichlet_mask(const Mesh& mesh, const BoundaryCondition& bc);

/// Cap (x, y, 0.1 - 0.1 |x|) inside, (r x, r y, 0) on the boundary, R = id.
ShellState initial_state(const Mesh& mesh, double r);
/// m = (x, y, 0), R = id.
ShellState reference_state(const Mesh& mesh);

ElementGradients element_gradients(const Mesh& mesh, const ShellState& state, int element);

/// +sum over elements of area/3 sum_a <f_a, m_a>.
double load_potential(const std::vector<Vec3>& m, const NodalLoad& f, const Mesh& mesh);

EnergyReport assemble_energy(const Mesh& mesh, const ShellState& state, const MaterialParams& p,
                             const NodalLoad& f = {});

/// Diagnostic: one-point quadrature with the projected centroid rotation.
EnergyReport assemble_energy_centroid(const Mesh& mesh, const ShellState& state, const MaterialParams& p,
                                      const NodalLoad& f = {});

/// E(to) - E(from) evaluated from the state increments, free of the
/// cancellation in subtracting two totals.
double energy_difference(const Mesh& mesh, const ShellState& from, const ShellState& to, const MaterialParams& p,
                         const NodalLoad& f = {});

/// Exact gradient of assemble_energy; m-entries of masked nodes are zero.
NodalGradient assemble_gradient(const Mesh& mesh, const ShellState& state, const MaterialParams& p,
                                const NodalLoad& f = {}, const DirichletMask& fixed = {});

/// Hessian of the pulled-back energy in tangent coordinates. Rows and columns
/// of masked m-dofs are replaced by the identity.
Eigen::SparseMatrix<double> assemble_hessian(const Mesh& mesh, const ShellState& state, const MaterialParams& p,
                                             const DirichletMask& fixed = {});

/// Weak force balance residual: node i gets int <S, D phi_i> + int <f, phi_i>.
std::vector<Vec3> el_residual_m_weak(const Mesh& mesh, const ShellState& state, const MaterialParams& p,
                                     const NodalLoad& f = {}, const DirichletMask& fixed = {});
/// Weak moment balance residual in axial coordinates.
std::vector<Vec3> el_residual_R_weak(const Mesh& mesh, const ShellState& state, const MaterialParams& p);

/// Number of assembly threads: SHELL_THREADS if set, else hardware concurrency.
int assembly_threads();
/// Runs body(i) for i in [0, n) on assembly_threads() threads.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace cosserat
