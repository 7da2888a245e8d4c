#include "cosserat/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

#include <Eigen/LU>
#include <fmt/format.h>
#include <fmt/os.h>

namespace cosserat {

Mesh::Mesh(std::vector<Vec2> nodes, std::vector<std::array<int, 3>> triangles)
    : nodes_(std::move(nodes)), triangles_(std::move(triangles)) {
  const int n = node_count();
  area_.resize(triangles_.size());
  grads_.resize(triangles_.size());
  std::map<std::pair<int, int>, int> edge_count;
  for (std::size_t e = 0; e < triangles_.size(); ++e) {
    const auto& t = triangles_[e];
    for (int k : t) {
      if (k < 0 || k >= n) throw std::invalid_argument(fmt::format("mesh: triangle {} references node {} out of range", e, k));
    }
    const Vec2 e1 = nodes_[t[1]] - nodes_[t[0]];
    const Vec2 e2 = nodes_[t[2]] - nodes_[t[0]];
    const double a = 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
    if (!(a > 1e-14)) {
      throw std::invalid_argument(fmt::format("mesh: triangle {} is degenerate or clockwise (signed area {:.3e})", e, a));
    }
    area_[e] = a;
    Eigen::Matrix2d j;
    j << e1, e2;  // columns
    const Eigen::Matrix2d jinv_t = j.inverse().transpose();
    Eigen::Matrix<double, 3, 2> g;
    g.row(1) = jinv_t.col(0).transpose();
    g.row(2) = jinv_t.col(1).transpose();
    g.row(0) = -(g.row(1) + g.row(2));
    grads_[e] = g;
    for (int k = 0; k < 3; ++k) {
      const int p = t[k], q = t[(k + 1) % 3];
      ++edge_count[{std::min(p, q), std::max(p, q)}];
    }
  }
  on_boundary_.assign(n, 0);
  for (const auto& [edge, count] : edge_count) {
    if (count == 1) on_boundary_[edge.first] = on_boundary_[edge.second] = 1;
  }
  for (int i = 0; i < n; ++i) {
    if (on_boundary_[i]) boundary_.push_back(i);
  }
}

double Mesh::total_area() const { return std::accumulate(area_.begin(), area_.end(), 0.0); }

Mesh make_disk_mesh(int refinement_level) {
  if (refinement_level < 0 || refinement_level > 8) {
    throw std::invalid_argument(fmt::format("make_disk_mesh: level must be in [0, 8], got {}", refinement_level));
  }
  const int n = 1 << refinement_level;
  const double h = 1.0 / n;
  const Vec2 a(1.0, 0.0);
  const Vec2 b(0.5, std::sqrt(3.0) / 2.0);
  auto ring = [](int i, int j) { return std::max({std::abs(i), std::abs(j), std::abs(i + j)}); };

  std::vector<Vec2> nodes;
  std::map<std::pair<int, int>, int> index;
  for (int j = -n; j <= n; ++j) {
    for (int i = -n; i <= n; ++i) {
      const int k = ring(i, j);
      if (k > n) continue;
      Vec2 p = h * (i * a + j * b);
      if (k > 0) p *= (k * h) / p.norm();
      if (k == n) p /= p.norm();
      index[{i, j}] = static_cast<int>(nodes.size());
      nodes.push_back(p);
    }
  }
  std::vector<std::array<int, 3>> tris;
  auto add = [&](std::pair<int, int> p, std::pair<int, int> q, std::pair<int, int> r) {
    const auto ip = index.find(p), iq = index.find(q), ir = index.find(r);
    if (ip == index.end() || iq == index.end() || ir == index.end()) return;
    tris.push_back({ip->second, iq->second, ir->second});
  };
  for (int j = -n; j <= n; ++j) {
    for (int i = -n; i <= n; ++i) {
      add({i, j}, {i + 1, j}, {i, j + 1});
      add({i + 1, j}, {i + 1, j + 1}, {i, j + 1});
    }
  }
  return Mesh(std::move(nodes), std::move(tris));
}

void write_mesh(const Mesh& mesh, const std::string& path) {
  try {
    auto out = fmt::output_file(path);
    out.print("nodes {}\n", mesh.node_count());
    for (const Vec2& p : mesh.nodes()) out.print("{:.17g} {:.17g}\n", p.x(), p.y());
    out.print("triangles {}\n", mesh.triangle_count());
    for (const auto& t : mesh.triangles()) out.print("{} {} {}\n", t[0], t[1], t[2]);
    out.print("boundary {}\n", mesh.boundary_nodes().size());
    for (int i : mesh.boundary_nodes()) out.print("{}\n", i);
  } catch (const std::exception& e) {
    throw std::runtime_error(fmt::format("write_mesh '{}': {}", path, e.what()));
  }
}

Mesh read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("read_mesh: cannot open '{}'", path));
  auto expect = [&](const char* word) {
    std::string w;
    long long count = -1;
    if (!(in >> w >> count) || w != word || count < 0) {
      throw std::runtime_error(fmt::format("read_mesh '{}': expected '{} <count>'", path, word));
    }
    return static_cast<std::size_t>(count);
  };
  std::vector<Vec2> nodes(expect("nodes"));
  for (auto& p : nodes) {
    if (!(in >> p.x() >> p.y())) throw std::runtime_error(fmt::format("read_mesh '{}': truncated node list", path));
  }
  std::vector<std::array<int, 3>> tris(expect("triangles"));
  for (auto& t : tris) {
    if (!(in >> t[0] >> t[1] >> t[2])) throw std::runtime_error(fmt::format("read_mesh '{}': truncated triangle list", path));
  }
  std::vector<int> boundary(expect("boundary"));
  for (auto& i : boundary) {
    if (!(in >> i)) throw std::runtime_error(fmt::format("read_mesh '{}': truncated boundary list", path));
  }
  Mesh mesh(std::move(nodes), std::move(tris));
  std::sort(boundary.begin(), boundary.end());
  if (boundary != mesh.boundary_nodes()) {
    throw std::runtime_error(fmt::format("read_mesh '{}': boundary list disagrees with edge incidence", path));
  }
  return mesh;
}

}  // namespace cosserat
