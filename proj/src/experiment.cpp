#include "cosserat/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <fmt/os.h>

namespace cosserat {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw std::invalid_argument(fmt::format("config key '{}': '{}' is not a finite number", key, text));
  }
  return v;
}

long long parse_int(const std::string& key, const std::string& text) {
  long long v = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw std::invalid_argument(fmt::format("config key '{}': '{}' is not an integer", key, text));
  }
  return v;
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "mu") mu = parse_double(key, v);
  else if (key == "lambda") lambda = parse_double(key, v);
  else if (key == "mu_c_ratio") mu_c_ratio = parse_double(key, v);
  else if (key == "L_c") L_c = parse_double(key, v);
  else if (key == "r") r = parse_double(key, v);
  else if (key == "refinement_level") refinement_level = static_cast<int>(parse_int(key, v));
  else if (key == "shear_mean") shear_mean = parse_shear_mean(v);
  else if (key == "variant") variant = parse_variant(v);
  else if (key == "curvature") curvature = parse_curvature_model(v);
  else if (key == "b1") b1 = parse_double(key, v);
  else if (key == "b2") b2 = parse_double(key, v);
  else if (key == "b3") b3 = parse_double(key, v);
  else if (key == "grad_tol") grad_tol = parse_double(key, v);
  else if (key == "max_iters") max_iters = static_cast<int>(parse_int(key, v));
  else if (key == "output_prefix") output_prefix = v;
  else if (key == "seed") seed = static_cast<std::uint64_t>(parse_int(key, v));
  else if (key == "method") method = parse_method(v);
  else if (key == "jitter") jitter = parse_double(key, v);
  else if (key == "rings") rings = static_cast<int>(parse_int(key, v));
  else if (key == "force") {
    std::istringstream in(v);
    std::string a, b, c, extra;
    if (!(in >> a >> b >> c) || (in >> extra)) throw std::invalid_argument("config key 'force': expected three numbers");
    force = Vec3(parse_double(key, a), parse_double(key, b), parse_double(key, c));
  } else {
    throw std::invalid_argument(fmt::format("unknown config key '{}'", key));
  }
}

MaterialParams ExperimentConfig::material() const {
  if (!mu_c_ratio) throw std::invalid_argument("config: mu_c_ratio is required");
  if (!L_c) throw std::invalid_argument("config: L_c is required");
  MaterialParams p;
  p.mu = mu;
  p.lambda = lambda;
  p.mu_c = *mu_c_ratio * mu;
  p.L_c = *L_c;
  p.b1 = b1;
  p.b2 = b2;
  p.b3 = b3;
  p.variant = variant;
  p.curvature = curvature;
  p.shear_mean = shear_mean.value_or(variant == Variant::gamma_limit ? ShearMean::harmonic : ShearMean::arithmetic);
  p.validate();
  return p;
}

SolveOptions ExperimentConfig::solve_options() const {
  SolveOptions o;
  o.grad_tol = grad_tol;
  o.max_iters = max_iters;
  o.method = method;
  o.jitter = jitter;
  o.seed = seed;
  o.validate();
  return o;
}

void ExperimentConfig::validate() const {
  material();
  solve_options();
  if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument(fmt::format("config: r must lie in (0, 1], got {}", r));
  if (refinement_level < 0 || refinement_level > 8) throw std::invalid_argument("config: refinement_level must lie in [0, 8]");
  if (rings < 1) throw std::invalid_argument("config: rings must be at least 1");
  if (output_prefix.empty()) throw std::invalid_argument("config: output_prefix must not be empty");
}

ExperimentConfig read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open config '{}'", path));
  ExperimentConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument(fmt::format("{}:{}: expected 'key = value'", path, lineno));
    try {
      c.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(fmt::format("{}:{}: {}", path, lineno, e.what()));
    }
  }
  return c;
}

void apply_override(ExperimentConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw std::invalid_argument(fmt::format("override '{}' is not key=value", assignment));
  config.set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

// ---------------------------------------------------------------------------

int WrinkleMetric::max_sign_changes() const {
  int best = 0;
  for (int c : sign_changes) best = std::max(best, c);
  return best;
}

WrinkleMetric wrinkle_metric(const ShellState& state, const Mesh& mesh, int ring_count) {
  check_state(mesh, state);
  if (ring_count < 1) throw std::invalid_argument("wrinkle_metric: ring_count must be at least 1");
  const int n = mesh.node_count();
  std::vector<double> radius(n);
  for (int i = 0; i < n; ++i) radius[i] = mesh.nodes()[i].norm();

  double r_max = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!mesh.is_boundary(i)) r_max = std::max(r_max, radius[i]);
  }
  std::vector<double> distinct = radius;
  std::sort(distinct.begin(), distinct.end());
  std::vector<double> gaps;
  for (std::size_t i = 1; i < distinct.size(); ++i) {
    if (distinct[i] - distinct[i - 1] > 1e-9) gaps.push_back(distinct[i] - distinct[i - 1]);
  }
  double half_width = 0.0;
  if (!gaps.empty()) {
    std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
    half_width = 0.5 * gaps[gaps.size() / 2];
  }

  // Deviations below this are rounding noise, relative to the deformed size.
  double extent = 0.0;
  for (const Vec3& m : state.m) extent = std::max(extent, m.norm());
  const double zero_tol = 1e-9 * std::max(extent, 1e-300);

  WrinkleMetric w;
  double last_center = -1.0;
  for (int j = 1; j <= ring_count; ++j) {
    const double target = r_max * j / ring_count;
    // Snap to the nearest occurring radius so that a band never straddles two rings.
    const double center = *std::min_element(distinct.begin(), distinct.end(), [&](double a, double b) {
      return std::abs(a - target) < std::abs(b - target);
    });
    if (std::abs(center - last_center) <= 1e-9) continue;  // coarse mesh, same ring again
    last_center = center;
    std::vector<std::pair<double, double>> band;  // (angle, m3)
    for (int i = 0; i < n; ++i) {
      if (std::abs(radius[i] - center) < half_width) {
        const Vec2& x = mesh.nodes()[i];
        band.emplace_back(std::atan2(x.y(), x.x()), state.m[i].z());
      }
    }
    if (band.size() < 2) {
      w.warnings.push_back(fmt::format("ring at radius {:.6g} has {} nodes; skipped", center, band.size()));
      continue;
    }
    std::sort(band.begin(), band.end());
    double mean = 0.0;
    for (const auto& b : band) mean += b.second;
    mean /= static_cast<double>(band.size());
    std::vector<int> signs;
    for (const auto& b : band) {
      const double d = b.second - mean;
      if (std::abs(d) > zero_tol) signs.push_back(d > 0.0 ? 1 : -1);
    }
    int changes = 0;
    for (std::size_t k = 0; k < signs.size(); ++k) {
      if (signs[k] != signs[(k + 1) % signs.size()]) ++changes;
    }
    w.ring_radii.push_back(center);
    w.sign_changes.push_back(changes);
  }

  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = state.m[i].x();
    a(i, 2) = state.m[i].y();
    b(i) = state.m[i].z();
  }
  const Eigen::Vector3d coef = a.colPivHouseholderQr().solve(b);
  w.max_amplitude = (a * coef - b).cwiseAbs().maxCoeff();
  return w;
}

NodalLoad constant_load(const Mesh& mesh, const Vec3& f) {
  if (f.isZero(0.0)) return {};
  return NodalLoad(mesh.node_count(), f);
}

ExperimentResult run_experiment(const ExperimentConfig& config, bool write) {
  config.validate();
  const MaterialParams p = config.material();
  const Mesh mesh = make_disk_mesh(config.refinement_level);
  const BoundaryCondition bc = BoundaryCondition::radial(config.r);
  const NodalLoad f = constant_load(mesh, config.force);
  const ShellState start = initial_state(mesh, config.r);

  ExperimentResult res;
  SolveResult sol = minimize(start, mesh, p, f, bc, config.solve_options());
  res.state = std::move(sol.state);
  res.stats = std::move(sol.stats);
  res.energy = assemble_energy(mesh, res.state, p, f);
  res.wrinkles = wrinkle_metric(res.state, mesh, config.rings);
  const DirichletMask fixed = dirichlet_mask(mesh, bc);
  const NodalGradient g = assemble_gradient(mesh, res.state, p, f, fixed);
  res.residual_m = g.max_node_norm_m();
  res.residual_R = g.max_node_norm_R();
  res.exit_code = res.stats.converged ? 0 : 2;
  if (write) {
    write_outputs(res.state, mesh, config.output_prefix);
    write_summary(config, res, config.output_prefix + "_summary.txt");
  }
  return res;
}

void write_outputs(const ShellState& state, const Mesh& mesh, const std::string& prefix) {
  check_state(mesh, state);
  const std::string csv = prefix + "_nodes.csv";
  const std::string vtk = prefix + ".vtk";
  try {
    auto out = fmt::output_file(csv);
    out.print("x,y,mx,my,mz,r11,r12,r13,r21,r22,r23,r31,r32,r33\n");
    for (int i = 0; i < mesh.node_count(); ++i) {
      const Vec2& x = mesh.nodes()[i];
      const Vec3& m = state.m[i];
      const Mat3& r = state.R[i].matrix();
      out.print("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}", x.x(), x.y(), m.x(), m.y(), m.z());
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) out.print(",{:.17g}", r(a, b));
      }
      out.print("\n");
    }
  } catch (const std::exception& e) {
    throw std::runtime_error(fmt::format("writing '{}': {}", csv, e.what()));
  }
  try {
    auto out = fmt::output_file(vtk);
    out.print("# vtk DataFile Version 3.0\nCosserat membrane shell\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    out.print("POINTS {} double\n", mesh.node_count());
    for (const Vec3& m : state.m) out.print("{:.17g} {:.17g} {:.17g}\n", m.x(), m.y(), m.z());
    out.print("CELLS {} {}\n", mesh.triangle_count(), 4 * mesh.triangle_count());
    for (const auto& t : mesh.triangles()) out.print("3 {} {} {}\n", t[0], t[1], t[2]);
    out.print("CELL_TYPES {}\n", mesh.triangle_count());
    for (int e = 0; e < mesh.triangle_count(); ++e) out.print("5\n");
    out.print("POINT_DATA {}\nVECTORS director double\n", mesh.node_count());
    for (const Rotation& r : state.R) {
      const Vec3 d = r.column(2);
      out.print("{:.17g} {:.17g} {:.17g}\n", d.x(), d.y(), d.z());
    }
    out.print("SCALARS out_of_plane double 1\nLOOKUP_TABLE default\n");
    for (const Vec3& m : state.m) out.print("{:.17g}\n", m.z());
  } catch (const std::exception& e) {
    throw std::runtime_error(fmt::format("writing '{}': {}", vtk, e.what()));
  }
}

void write_summary(const ExperimentConfig& config, const ExperimentResult& result, const std::string& path) {
  try {
    const MaterialParams p = config.material();
    auto out = fmt::output_file(path);
    out.print("mu = {:.17g}\nlambda = {:.17g}\nmu_c = {:.17g}\nL_c = {:.17g}\nr = {:.17g}\n", p.mu, p.lambda, p.mu_c,
              p.L_c, config.r);
    out.print("refinement_level = {}\nshear_mean = {}\nvariant = {}\ncurvature = {}\nmethod = {}\nseed = {}\n",
              config.refinement_level, to_string(p.shear_mean), to_string(p.variant), to_string(p.curvature),
              to_string(config.method), config.seed);
    out.print("converged = {}\niterations = {}\nnegative_curvature_steps = {}\nwall_time = {:.3f}\n",
              result.stats.converged, result.stats.iterations, result.stats.negative_curvature_steps,
              result.stats.wall_time);
    out.print("grad_norm = {:.6e}\nresidual_m = {:.6e}\nresidual_R = {:.6e}\n", result.stats.final_grad_norm,
              result.residual_m, result.residual_R);
    const EnergyReport& e = result.energy;
    out.print("energy_total = {:.17g}\nenergy_stretch = {:.17g}\nenergy_drill = {:.17g}\n", e.total, e.stretch, e.drill);
    out.print("energy_transverse_shear = {:.17g}\nenergy_elongation = {:.17g}\nenergy_curvature = {:.17g}\n",
              e.transverse_shear, e.elongation, e.curvature);
    out.print("energy_load = {:.17g}\n", e.load);
    out.print("wrinkle_max_amplitude = {:.17g}\nwrinkle_max_sign_changes = {}\n", result.wrinkles.max_amplitude,
              result.wrinkles.max_sign_changes());
    for (std::size_t k = 0; k < result.wrinkles.ring_radii.size(); ++k) {
      out.print("ring_{} = {:.6f} {}\n", k, result.wrinkles.ring_radii[k], result.wrinkles.sign_changes[k]);
    }
    for (const auto& w : result.wrinkles.warnings) out.print("# warning: {}\n", w);
  } catch (const std::exception& e) {
    throw std::runtime_error(fmt::format("writing '{}': {}", path, e.what()));
  }
}

ShellState read_state_csv(const std::string& path, const Mesh& mesh) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open state '{}'", path));
  std::string line;
  if (!std::getline(in, line) || trim(line) != "x,y,mx,my,mz,r11,r12,r13,r21,r22,r23,r31,r32,r33") {
    throw std::runtime_error(fmt::format("'{}': unexpected header", path));
  }
  ShellState s;
  int row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::array<double, 14> v{};
    std::size_t pos = 0;
    for (int k = 0; k < 14; ++k) {
      const auto next = line.find(',', pos);
      const std::string field = trim(line.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
      v[k] = parse_double(fmt::format("{} row {}", path, row), field);
      if (k < 13 && next == std::string::npos) throw std::runtime_error(fmt::format("'{}' row {}: too few columns", path, row));
      pos = next + 1;
    }
    if (row >= mesh.node_count()) throw std::runtime_error(fmt::format("'{}': more rows than mesh nodes", path));
    const Vec2& x = mesh.nodes()[row];
    if (std::abs(x.x() - v[0]) > 1e-12 || std::abs(x.y() - v[1]) > 1e-12) {
      throw std::runtime_error(fmt::format("'{}' row {}: reference coordinates do not match the mesh", path, row));
    }
    s.m.emplace_back(v[2], v[3], v[4]);
    Mat3 r;
    r << v[5], v[6], v[7], v[8], v[9], v[10], v[11], v[12], v[13];
    s.R.emplace_back(r);
    ++row;
  }
  if (row != mesh.node_count()) throw std::runtime_error(fmt::format("'{}': {} rows, mesh has {} nodes", path, row, mesh.node_count()));
  return s;
}

}  // namespace cosserat
