#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cosserat/so3.hpp"

namespace cosserat {

/// Triangulation of a planar reference domain with cached P1 geometry.
class Mesh {
 public:
  /// Validates orientation (signed area > 1e-14) and index ranges, and derives
  /// the boundary nodes from edges that belong to exactly one triangle.
  Mesh(std::vector<Vec2> nodes, std::vector<std::array<int, 3>> triangles);

  int node_count() const { return static_cast<int>(nodes_.size()); }
  int triangle_count() const { return static_cast<int>(triangles_.size()); }

  const std::vector<Vec2>& nodes() const { return nodes_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<int>& boundary_nodes() const { return boundary_; }
  bool is_boundary(int node) const { return on_boundary_[node] != 0; }

  double area(int e) const { return area_[e]; }
  /// Row a holds the gradient of the hat function of local node a.
  const Eigen::Matrix<double, 3, 2>& shape_gradients(int e) const { return grads_[e]; }

  double total_area() const;

 private:
  std::vector<Vec2> nodes_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<int> boundary_;
  std::vector<char> on_boundary_;
  std::vector<double> area_;
  std::vector<Eigen::Matrix<double, 3, 2>> grads_;
};

/// Unit disk with 6 * 4^level triangles. Nodes of the hexagonal lattice are
/// moved radially so that lattice ring k lands on the circle of radius k/2^level.
Mesh make_disk_mesh(int refinement_level);

void write_mesh(const Mesh& mesh, const std::string& path);
Mesh read_mesh(const std::string& path);

}  // namespace cosserat
