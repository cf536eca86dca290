#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "thinc/geometry.hpp"

namespace thinc {

enum class CellShape : std::uint8_t { quad, triangle, hex };

struct Cell {
  Vec3 centroid;
  double volume = 0.0;
  /// Characteristic size: min spacing on Cartesian cells, hydraulic diameter 4A/P on triangles.
  double size = 0.0;
  CellShape shape = CellShape::quad;
  std::array<int, 8> nodes{};
  int node_count = 0;
  std::array<int, 6> faces{};
  int face_count = 0;
};

struct Face {
  std::array<int, 4> nodes{};
  int node_count = 0;
  /// Lower-id adjacent cell; the normal points out of it.
  int owner = -1;
  /// -1 on the domain boundary.
  int neighbor = -1;
  double area = 0.0;
  Vec3 normal;
  Vec3 centroid;

  bool on_boundary() const { return neighbor < 0; }
};

/// Structured metadata kept alongside Cartesian meshes for index arithmetic.
struct CartesianGrid {
  std::array<int, 3> counts{1, 1, 1};
  Vec3 spacing{1.0, 1.0, 1.0};

  int index(int i, int j, int k = 0) const { return i + counts[0] * (j + counts[1] * k); }
  std::array<int, 3> ijk(int cell) const {
    const int i = cell % counts[0];
    const int rest = cell / counts[0];
    return {i, rest % counts[1], rest / counts[1]};
  }
};

struct LocateResult {
  int cell = -1;
  /// False when the point left the domain; `cell` is then the nearest boundary cell.
  bool inside = false;
};

/// Immutable cell/face container for 2D Cartesian, 2D triangular and 3D Cartesian grids.
class Mesh {
 public:
  int dimension() const { return dimension_; }
  /// Bounding box of the domain.
  const Vec3& lower() const { return lower_; }
  const Vec3& upper() const { return upper_; }
  double domain_volume() const;

  std::span<const Vec3> nodes() const { return nodes_; }
  std::span<const Cell> cells() const { return cells_; }
  std::span<const Face> faces() const { return faces_; }
  const Cell& cell(int id) const { return cells_[static_cast<std::size_t>(id)]; }
  const Face& face(int id) const { return faces_[static_cast<std::size_t>(id)]; }
  int cell_count() const { return static_cast<int>(cells_.size()); }
  int face_count() const { return static_cast<int>(faces_.size()); }

  bool is_cartesian() const { return grid_.has_value(); }
  const CartesianGrid& grid() const { return *grid_; }

  /// Cell across the given local face of `cell`, or -1 on the boundary.
  int face_neighbor(int cell, int local_face) const {
    const Face& f = face(cells_[static_cast<std::size_t>(cell)].faces[static_cast<std::size_t>(local_face)]);
    return f.owner == cell ? f.neighbor : f.owner;
  }
  /// Cells sharing at least one node with `cell`, excluding itself, in ascending id order.
  std::span<const int> vertex_neighbors(int cell) const;

  double min_cell_size() const;
  double mean_cell_size() const;

  /// Cell containing `p`. Points on shared faces or vertices resolve to the lowest-id cell.
  LocateResult locate_cell(const Vec3& p, int hint) const;
  /// Exhaustive point-in-cell scan; -1 when no cell contains `p`.
  int locate_cell_exhaustive(const Vec3& p) const;
  bool cell_contains(int cell, const Vec3& p) const;

 private:
  friend Mesh build_cartesian(std::span<const double>, std::span<const int>);
  friend Mesh build_triangles(std::vector<Vec3>, const std::vector<std::array<int, 3>>&);

  void finish_topology();
  LocateResult locate_triangle(const Vec3& p, int hint) const;
  int nearest_boundary_cell(const Vec3& p) const;

  int dimension_ = 2;
  Vec3 lower_;
  Vec3 upper_;
  std::vector<Vec3> nodes_;
  std::vector<Cell> cells_;
  std::vector<Face> faces_;
  std::optional<CartesianGrid> grid_;
  std::vector<int> vertex_neighbor_offsets_;
  std::vector<int> vertex_neighbor_ids_;
};

/// Uniform Cartesian mesh on [0, extents] with `cells_per_axis[d]` cells along axis d.
/// Two entries give a 2D mesh, three a 3D mesh.
Mesh build_cartesian(std::span<const double> extents, std::span<const int> cells_per_axis);

/// Triangulation of [0, ex] x [0, ey] with `boundary_nodes` equally spaced nodes per edge.
/// Each Cartesian quad is split along alternating diagonals.
Mesh build_triangular(std::span<const double> extents, int boundary_nodes);

/// Mesh from explicit node coordinates and triangles (any orientation). Nodes not referenced by
/// any triangle are kept but ignored.
Mesh build_triangles(std::vector<Vec3> nodes, const std::vector<std::array<int, 3>>& triangles);

/// Reads a Gmsh MSH 2.2 ASCII file containing 3-node triangles.
Mesh load_gmsh(const std::filesystem::path& path);
Mesh parse_gmsh(std::istream& in);

}  // namespace thinc
