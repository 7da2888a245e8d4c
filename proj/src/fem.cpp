#include "cosserat/fem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

#include <fmt/format.h>

#include "cosserat/jet.hpp"

namespace cosserat {

namespace {

using Grad32 = Eigen::Matrix<double, 3, 2>;
using Vec18 = Eigen::Matrix<double, 18, 1>;
using Mat18 = Eigen::Matrix<double, 18, 18>;

void check_load(const Mesh& mesh, const NodalLoad& f) {
  if (!f.empty() && static_cast<int>(f.size()) != mesh.node_count()) {
    throw std::invalid_argument(fmt::format("load has {} entries, mesh has {} nodes", f.size(), mesh.node_count()));
  }
}

void check_mask(const Mesh& mesh, const DirichletMask& fixed) {
  if (!fixed.empty() && static_cast<int>(fixed.size()) != mesh.node_count()) {
    throw std::invalid_argument(fmt::format("Dirichlet mask has {} entries, mesh has {} nodes", fixed.size(), mesh.node_count()));
  }
}

// Local coordinates of one membrane evaluation: u of the three vertices
// (indices 3k + i) followed by v of the evaluation vertex (9 + i).
constexpr int kMembraneVars = 12;
// Curvature: v of the three vertices (3k + i).
constexpr int kCurvatureVars = 9;

int membrane_to_element(int j, int a) { return j < 9 ? 6 * (j / 3) + j % 3 : 6 * a + 3 + (j - 9); }
int curvature_to_element(int j) { return 6 * (j / 3) + 3 + j % 3; }

template <class J>
Mat3T<J> perturbed_rotation(const Mat3& r, int first_index) {
  Vec3T<J> v;
  for (int i = 0; i < 3; ++i) v(i) = J::variable(0.0, first_index + i);
  return r.cast<J>() * exp_so3_second_order<J>(v);
}

template <class J>
J membrane_local(const Mesh& mesh, int e, const ShellState& s, int a, const EnergyCoefficients& c) {
  const auto& t = mesh.triangles()[e];
  const Grad32& g = mesh.shape_gradients(e);
  Mat32T<J> dm;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 2; ++j) {
      J x(g(0, j) * s.m[t[0]](i) + g(1, j) * s.m[t[1]](i) + g(2, j) * s.m[t[2]](i));
      for (int k = 0; k < 3; ++k) x.g[3 * k + i] = g(k, j);
      dm(i, j) = x;
    }
  }
  const Mat3T<J> r = perturbed_rotation<J>(s.R[t[a]].matrix(), 9);
  const MembraneStrain<J> st = membrane_strain<J>(r, dm);
  return membrane_form<J>(st, st, c);
}

template <class J>
J curvature_local(const Mesh& mesh, int e, const ShellState& s, const EnergyCoefficients& c) {
  const auto& t = mesh.triangles()[e];
  const Grad32& g = mesh.shape_gradients(e);
  std::array<Mat3T<J>, 3> r;
  for (int k = 0; k < 3; ++k) r[k] = perturbed_rotation<J>(s.R[t[k]].matrix(), 3 * k);
  Mat3T<J> dx = Mat3T<J>::Zero(), dy = Mat3T<J>::Zero();
  for (int k = 0; k < 3; ++k) {
    dx += r[k] * g(k, 0);
    dy += r[k] * g(k, 1);
  }
  if (c.curvature == CurvatureModel::uni_constant) return gradient_form<J>(dx, dy, dx, dy, c);
  J sum(0.0);
  for (int k = 0; k < 3; ++k) {
    const Mat32T<J> w = wryness_strain<J>(r[k], dx, dy);
    sum += wryness_form<J>(w, w, c);
  }
  return sum / 3.0;
}

struct ElementFields {
  Mat32 dm;
  Mat3 dxr, dyr;
};

ElementFields fields(const Mesh& mesh, int e, const std::vector<Vec3>& m, const std::vector<Mat3>& r) {
  const auto& t = mesh.triangles()[e];
  const Grad32& g = mesh.shape_gradients(e);
  ElementFields f;
  f.dm.setZero();
  f.dxr.setZero();
  f.dyr.setZero();
  for (int k = 0; k < 3; ++k) {
    f.dm += m[t[k]] * g.row(k);
    f.dxr += r[t[k]] * g(k, 0);
    f.dyr += r[t[k]] * g(k, 1);
  }
  return f;
}

std::vector<Mat3> matrices(const ShellState& s) {
  std::vector<Mat3> out(s.R.size());
  for (std::size_t i = 0; i < s.R.size(); ++i) out[i] = s.R[i].matrix();
  return out;
}

// Parts in EnergyReport order: stretch, drill, transverse shear, elongation, curvature, load.
using Parts = std::array<double, 6>;

Parts element_parts(const Mesh& mesh, int e, const ShellState& s, const std::vector<Mat3>& r,
                    const EnergyCoefficients& c, const NodalLoad& f) {
  const auto& t = mesh.triangles()[e];
  const double w = mesh.area(e) / 3.0;
  const ElementFields fe = fields(mesh, e, s.m, r);
  Parts p{};
  for (int a = 0; a < 3; ++a) {
    const MembraneStrain<double> st = membrane_strain<double>(r[t[a]], fe.dm);
    const auto mp = membrane_form_parts(st, st, c);
    for (int k = 0; k < 4; ++k) p[k] += w * mp[k];
  }
  if (c.curvature == CurvatureModel::uni_constant) {
    p[4] = mesh.area(e) * gradient_form<double>(fe.dxr, fe.dyr, fe.dxr, fe.dyr, c);
  } else {
    for (int a = 0; a < 3; ++a) {
      const Mat32 g = wryness_strain<double>(r[t[a]], fe.dxr, fe.dyr);
      p[4] += w * wryness_form<double>(g, g, c);
    }
  }
  if (!f.empty()) {
    for (int a = 0; a < 3; ++a) p[5] += w * f[t[a]].dot(s.m[t[a]]);
  }
  return p;
}

EnergyReport sum_parts(const std::vector<Parts>& parts) {
  Parts acc{};
  for (const Parts& p : parts) {
    for (int k = 0; k < 6; ++k) acc[k] += p[k];
  }
  EnergyReport r;
  r.stretch = acc[0];
  r.drill = acc[1];
  r.transverse_shear = acc[2];
  r.elongation = acc[3];
  r.curvature = acc[4];
  r.load = acc[5];
  r.total = acc[0] + acc[1] + acc[2] + acc[3] + acc[4] + acc[5];
  return r;
}

Vec18 element_gradient(const Mesh& mesh, int e, const ShellState& s, const EnergyCoefficients& c, const NodalLoad& f) {
  using J = ad::Jet1<kMembraneVars>;
  using K = ad::Jet1<kCurvatureVars>;
  Vec18 out = Vec18::Zero();
  const double w = mesh.area(e) / 3.0;
  for (int a = 0; a < 3; ++a) {
    const J val = membrane_local<J>(mesh, e, s, a, c);
    for (int j = 0; j < kMembraneVars; ++j) out(membrane_to_element(j, a)) += w * val.g[j];
  }
  const K cv = curvature_local<K>(mesh, e, s, c);
  for (int j = 0; j < kCurvatureVars; ++j) out(curvature_to_element(j)) += mesh.area(e) * cv.g[j];
  if (!f.empty()) {
    const auto& t = mesh.triangles()[e];
    for (int a = 0; a < 3; ++a) out.segment<3>(6 * a) += w * f[t[a]];
  }
  return out;
}

Mat18 element_hessian(const Mesh& mesh, int e, const ShellState& s, const EnergyCoefficients& c) {
  using J = ad::Jet2<kMembraneVars>;
  using K = ad::Jet2<kCurvatureVars>;
  Mat18 out = Mat18::Zero();
  const double w = mesh.area(e) / 3.0;
  for (int a = 0; a < 3; ++a) {
    const J val = membrane_local<J>(mesh, e, s, a, c);
    for (int i = 0; i < kMembraneVars; ++i) {
      for (int j = 0; j < kMembraneVars; ++j) {
        out(membrane_to_element(i, a), membrane_to_element(j, a)) += w * val.hessian(i, j);
      }
    }
  }
  const K cv = curvature_local<K>(mesh, e, s, c);
  for (int i = 0; i < kCurvatureVars; ++i) {
    for (int j = 0; j < kCurvatureVars; ++j) {
      out(curvature_to_element(i), curvature_to_element(j)) += mesh.area(e) * cv.hessian(i, j);
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

int assembly_threads() {
  if (const char* env = std::getenv("SHELL_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int n, const std::function<void(int)>& body) {
  const int threads = std::min(assembly_threads(), std::max(1, n / 64));
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = t; i < n; i += threads) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

double NodalGradient::norm() const {
  double s = 0.0;
  for (const Vec3& v : m) s += v.squaredNorm();
  for (const Vec3& v : R) s += v.squaredNorm();
  return std::sqrt(s);
}

double NodalGradient::max_node_norm_m() const {
  double s = 0.0;
  for (const Vec3& v : m) s = std::max(s, v.norm());
  return s;
}

double NodalGradient::max_node_norm_R() const {
  double s = 0.0;
  for (const Vec3& v : R) s = std::max(s, v.norm());
  return s;
}

void check_state(const Mesh& mesh, const ShellState& state) {
  if (state.m.size() != state.R.size() || state.size() != mesh.node_count()) {
    throw std::invalid_argument(fmt::format("state has {} positions and {} rotations, mesh has {} nodes", state.m.size(),
                                            state.R.size(), mesh.node_count()));
  }
}

BoundaryCondition BoundaryCondition::radial(double r) {
  BoundaryCondition bc;
  bc.kind = Kind::radial_compression;
  bc.r = r;
  return bc;
}

BoundaryCondition BoundaryCondition::fixed_to(std::vector<Vec3> values) {
  BoundaryCondition bc;
  bc.kind = Kind::fixed;
  bc.values = std::move(values);
  return bc;
}

ShellState apply_boundary(const ShellState& state, const BoundaryCondition& bc, const Mesh& mesh) {
  check_state(mesh, state);
  ShellState out = state;
  switch (bc.kind) {
    case BoundaryCondition::Kind::free:
      break;
    case BoundaryCondition::Kind::radial_compression:
      if (!(bc.r > 0.0 && bc.r <= 1.0)) throw std::invalid_argument(fmt::format("compression radius must be in (0, 1], got {}", bc.r));
      for (int i : mesh.boundary_nodes()) {
        const Vec2& x = mesh.nodes()[i];
        out.m[i] = Vec3(bc.r * x.x(), bc.r * x.y(), 0.0);
      }
      break;
    case BoundaryCondition::Kind::fixed:
      if (static_cast<int>(bc.values.size()) != mesh.node_count()) {
        throw std::invalid_argument("fixed boundary condition needs one value per node");
      }
      for (int i : mesh.boundary_nodes()) out.m[i] = bc.values[i];
      break;
  }
  return out;
}

DirichletMask dirichlet_mask(const Mesh& mesh, const BoundaryCondition& bc) {
  DirichletMask mask(mesh.node_count(), 0);
  if (bc.kind != BoundaryCondition::Kind::free) {
    for (int i : mesh.boundary_nodes()) mask[i] = 1;
  }
  return mask;
}

ShellState reference_state(const Mesh& mesh) {
  ShellState s;
  s.m.reserve(mesh.node_count());
  for (const Vec2& x : mesh.nodes()) s.m.emplace_back(x.x(), x.y(), 0.0);
  s.R.assign(mesh.node_count(), Rotation::identity());
  return s;
}

ShellState initial_state(const Mesh& mesh, double r) {
  if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument(fmt::format("compression radius must be in (0, 1], got {}", r));
  ShellState s = reference_state(mesh);
  for (int i = 0; i < mesh.node_count(); ++i) {
    const Vec2& x = mesh.nodes()[i];
    s.m[i] = Vec3(x.x(), x.y(), 0.1 - 0.1 * x.norm());
  }
  return apply_boundary(s, BoundaryCondition::radial(r), mesh);
}

ElementGradients element_gradients(const Mesh& mesh, const ShellState& state, int element) {
  check_state(mesh, state);
  if (element < 0 || element >= mesh.triangle_count()) {
    throw std::out_of_range(fmt::format("element index {} out of range", element));
  }
  const auto& t = mesh.triangles()[element];
  const Grad32& g = mesh.shape_gradients(element);
  Mat32 dm = Mat32::Zero();
  Mat3 dx = Mat3::Zero(), dy = Mat3::Zero(), mean = Mat3::Zero();
  for (int k = 0; k < 3; ++k) {
    dm += state.m[t[k]] * g.row(k);
    dx += state.R[t[k]].matrix() * g(k, 0);
    dy += state.R[t[k]].matrix() * g(k, 1);
    mean += state.R[t[k]].matrix() / 3.0;
  }
  return {dm, dx, dy, polar_project(mean)};
}

double load_potential(const std::vector<Vec3>& m, const NodalLoad& f, const Mesh& mesh) {
  if (f.empty()) return 0.0;
  check_load(mesh, f);
  if (static_cast<int>(m.size()) != mesh.node_count()) throw std::invalid_argument("load_potential: size mismatch");
  double sum = 0.0;
  for (int e = 0; e < mesh.triangle_count(); ++e) {
    const auto& t = mesh.triangles()[e];
    double s = 0.0;
    for (int a = 0; a < 3; ++a) s += f[t[a]].dot(m[t[a]]);
    sum += mesh.area(e) / 3.0 * s;
  }
  return sum;
}

EnergyReport assemble_energy(const Mesh& mesh, const ShellState& state, const MaterialParams& p, const NodalLoad& f) {
  check_state(mesh, state);
  check_load(mesh, f);
  const EnergyCoefficients c = EnergyCoefficients::from(p);
  const std::vector<Mat3> r = matrices(state);
  std::vector<Parts> parts(mesh.triangle_count());
  parallel_for(mesh.triangle_count(), [&](int e) { parts[e] = element_parts(mesh, e, state, r, c, f); });
  return sum_parts(parts);
}

EnergyReport assemble_energy_centroid(const Mesh& mesh, const ShellState& state, const MaterialParams& p,
                                      const NodalLoad& f) {
  check_state(mesh, state);
  check_load(mesh, f);
  const EnergyCoefficients c = EnergyCoefficients::from(p);
  std::vector<Parts> parts(mesh.triangle_count());
  parallel_for(mesh.triangle_count(), [&](int e) {
    const ElementGradients eg = element_gradients(mesh, state, e);
    const double a = mesh.area(e);
    const MembraneStrain<double> st = membrane_strain<double>(eg.rc.matrix(), eg.dm);
    const auto mp = membrane_form_parts(st, st, c);
    Parts out{};
    for (int k = 0; k < 4; ++k) out[k] = a * mp[k];
    if (c.curvature == CurvatureModel::uni_constant) {
      out[4] = a * gradient_form<double>(eg.dxr, eg.dyr, eg.dxr, eg.dyr, c);
    } else {
      const Mat32 g = wryness_strain<double>(eg.rc.matrix(), eg.dxr, eg.dyr);
      out[4] = a * wryness_form<double>(g, g, c);
    }
    if (!f.empty()) {
      const auto& t = mesh.triangles()[e];
      for (int k = 0; k < 3; ++k) out[5] += a / 3.0 * f[t[k]].dot(state.m[t[k]]);
    }
    parts[e] = out;
  });
  return sum_parts(parts);
}

double energy_difference(const Mesh& mesh, const ShellState& from, const ShellState& to, const MaterialParams& p,
                         const NodalLoad& f) {
  check_state(mesh, from);
  check_state(mesh, to);
  check_load(mesh, f);
  const EnergyCoefficients c = EnergyCoefficients::from(p);
  const std::vector<Mat3> r0 = matrices(from);
  const std::vector<Mat3> r1 = matrices(to);
  std::vector<Vec3> dm(mesh.node_count());
  std::vector<Mat3> dr(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i) {
    dm[i] = to.m[i] - from.m[i];
    dr[i] = r1[i] - r0[i];
  }
  std::vector<double> delta(mesh.triangle_count());
  parallel_for(mesh.triangle_count(), [&](int e) {
    const auto& t = mesh.triangles()[e];
    const double w = mesh.area(e) / 3.0;
    const ElementFields f0 = fields(mesh, e, from.m, r0);
    const ElementFields f1 = fields(mesh, e, to.m, r1);
    const ElementFields df = fields(mesh, e, dm, dr);
    double d = 0.0;
    for (int a = 0; a < 3; ++a) {
      const int i = t[a];
      const MembraneStrain<double> ds = membrane_strain_difference<double>(r0[i], f0.dm, dr[i], df.dm);
      const MembraneStrain<double> ss = membrane_strain<double>(r0[i], f0.dm) + membrane_strain<double>(r1[i], f1.dm);
      d += w * membrane_form<double>(ds, ss, c);
    }
    if (c.curvature == CurvatureModel::uni_constant) {
      d += mesh.area(e) * gradient_form<double>(df.dxr, df.dyr, Mat3(f0.dxr + f1.dxr), Mat3(f0.dyr + f1.dyr), c);
    } else {
      for (int a = 0; a < 3; ++a) {
        const int i = t[a];
        // Gamma(R, DR) is bilinear: increment = Gamma(dR, DR') + Gamma(R, dDR).
        Mat32 dg;
        dg.col(0) = axl_of_skew_part<double>(Mat3(dr[i].transpose() * f1.dxr + r0[i].transpose() * df.dxr));
        dg.col(1) = axl_of_skew_part<double>(Mat3(dr[i].transpose() * f1.dyr + r0[i].transpose() * df.dyr));
        const Mat32 gs = wryness_strain<double>(r0[i], f0.dxr, f0.dyr) + wryness_strain<double>(r1[i], f1.dxr, f1.dyr);
        d += w * wryness_form<double>(dg, gs, c);
      }
    }
    if (!f.empty()) {
      for (int a = 0; a < 3; ++a) d += w * f[t[a]].dot(dm[t[a]]);
    }
    delta[e] = d;
  });
  double sum = 0.0;
  for (double d : delta) sum += d;
  return sum;
}

NodalGradient assemble_gradient(const Mesh& mesh, const ShellState& state, const MaterialParams& p,
                                const NodalLoad& f, const DirichletMask& fixed) {
  check_state(mesh, state);
  check_load(mesh, f);
  check_mask(mesh, fixed);
  const EnergyCoefficients c = EnergyCoefficients::from(p);
  std::vector<Vec18> local(mesh.triangle_count());
  parallel_for(mesh.triangle_count(), [&](int e) { local[e] = element_gradient(mesh, e, state, c, f); });
  NodalGradient g;
  g.m.assign(mesh.node_count(), Vec3::Zero());
  g.R.assign(mesh.node_count(), Vec3::Zero());
  for (int e = 0; e < mesh.triangle_count(); ++e) {
    const auto& t = mesh.triangles()[e];
    for (int a = 0; a < 3; ++a) {
      g.m[t[a]] += local[e].segment<3>(6 * a);
      g.R[t[a]] += local[e].segment<3>(6 * a + 3);
    }
  }
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    if (fixed[i]) g.m[i].setZero();
  }
  return g;
}

Eigen::SparseMatrix<double> assemble_hessian(const Mesh& mesh, const ShellState& state, const MaterialParams& p,
                                             const DirichletMask& fixed) {
  check_state(mesh, state);
  check_mask(mesh, fixed);
  const EnergyCoefficients c = EnergyCoefficients::from(p);
  std::vector<Mat18> local(mesh.triangle_count());
  parallel_for(mesh.triangle_count(), [&](int e) { local[e] = element_hessian(mesh, e, state, c); });
  const int n = 6 * mesh.node_count();
  auto is_fixed = [&](int dof) { return !fixed.empty() && dof % 6 < 3 && fixed[dof / 6]; };
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(mesh.triangle_count()) * 324 + n);
  for (int e = 0; e < mesh.triangle_count(); ++e) {
    const auto& t = mesh.triangles()[e];
    for (int i = 0; i < 18; ++i) {
      const int gi = 6 * t[i / 6] + i % 6;
      if (is_fixed(gi)) continue;
      for (int j = 0; j < 18; ++j) {
        const int gj = 6 * t[j / 6] + j % 6;
        if (is_fixed(gj) || local[e](i, j) == 0.0) continue;
        trip.emplace_back(gi, gj, local[e](i, j));
      }
    }
  }
  for (int d = 0; d < n; ++d) {
    if (is_fixed(d)) trip.emplace_back(d, d, 1.0);
  }
  Eigen::SparseMatrix<double> h(n, n);
  h.setFromTriplets(trip.begin(), trip.end());
  return h;
}

std::vector<Vec3> el_residual_m_weak(const Mesh& mesh, const ShellState& state, const MaterialParams& p,
                                     const NodalLoad& f, const DirichletMask& fixed) {
  return assemble_gradient(mesh, state, p, f, fixed).m;
}

std::vector<Vec3> el_residual_R_weak(const Mesh& mesh, const ShellState& state, const MaterialParams& p) {
  return assemble_gradient(mesh, state, p).R;
}

}  // namespace cosserat
