#include "thinc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "thinc/errors.hpp"

namespace thinc {

namespace {

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

}  // namespace

double Mesh::domain_volume() const {
  double v = 1.0;
  for (int d = 0; d < dimension_; ++d) v *= upper_[d] - lower_[d];
  return v;
}

std::span<const int> Mesh::vertex_neighbors(int cell) const {
  const auto begin = static_cast<std::size_t>(vertex_neighbor_offsets_[static_cast<std::size_t>(cell)]);
  const auto end = static_cast<std::size_t>(vertex_neighbor_offsets_[static_cast<std::size_t>(cell) + 1]);
  return std::span<const int>(vertex_neighbor_ids_).subspan(begin, end - begin);
}

double Mesh::min_cell_size() const {
  double m = std::numeric_limits<double>::max();
  for (const Cell& c : cells_) m = std::min(m, c.size);
  return m;
}

double Mesh::mean_cell_size() const {
  double s = 0.0;
  for (const Cell& c : cells_) s += c.size;
  return s / static_cast<double>(cells_.size());
}

void Mesh::finish_topology() {
  // node -> cells
  std::vector<int> offsets(nodes_.size() + 1, 0);
  for (const Cell& c : cells_)
    for (int n = 0; n < c.node_count; ++n) ++offsets[static_cast<std::size_t>(c.nodes[static_cast<std::size_t>(n)]) + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<int> node_cells(static_cast<std::size_t>(offsets.back()));
  std::vector<int> fill(offsets.begin(), offsets.end() - 1);
  for (int id = 0; id < cell_count(); ++id) {
    const Cell& c = cells_[static_cast<std::size_t>(id)];
    for (int n = 0; n < c.node_count; ++n)
      node_cells[static_cast<std::size_t>(fill[static_cast<std::size_t>(c.nodes[static_cast<std::size_t>(n)])]++)] = id;
  }

  vertex_neighbor_offsets_.assign(cells_.size() + 1, 0);
  vertex_neighbor_ids_.clear();
  std::vector<int> scratch;
  for (int id = 0; id < cell_count(); ++id) {
    const Cell& c = cells_[static_cast<std::size_t>(id)];
    scratch.clear();
    for (int n = 0; n < c.node_count; ++n) {
      const auto node = static_cast<std::size_t>(c.nodes[static_cast<std::size_t>(n)]);
      for (int k = offsets[node]; k < offsets[node + 1]; ++k) {
        const int other = node_cells[static_cast<std::size_t>(k)];
        if (other != id) scratch.push_back(other);
      }
    }
    std::sort(scratch.begin(), scratch.end());
    scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
    vertex_neighbor_ids_.insert(vertex_neighbor_ids_.end(), scratch.begin(), scratch.end());
    vertex_neighbor_offsets_[static_cast<std::size_t>(id) + 1] = static_cast<int>(vertex_neighbor_ids_.size());
  }
}

Mesh build_cartesian(std::span<const double> extents, std::span<const int> cells_per_axis) {
  if (extents.size() != cells_per_axis.size() || extents.size() < 2 || extents.size() > 3)
    throw ConfigError("cartesian mesh needs 2 or 3 matching extents and cell counts");
  for (std::size_t d = 0; d < extents.size(); ++d) {
    if (!(extents[d] > 0.0)) throw ConfigError("cartesian mesh extent must be positive");
    if (cells_per_axis[d] < 1) throw ConfigError("cartesian mesh needs at least one cell per axis");
  }

  Mesh mesh;
  mesh.dimension_ = static_cast<int>(extents.size());
  const int dim = mesh.dimension_;
  CartesianGrid grid;
  for (int d = 0; d < dim; ++d) {
    grid.counts[static_cast<std::size_t>(d)] = cells_per_axis[static_cast<std::size_t>(d)];
    grid.spacing[d] = extents[static_cast<std::size_t>(d)] / cells_per_axis[static_cast<std::size_t>(d)];
    mesh.upper_[d] = extents[static_cast<std::size_t>(d)];
  }
  if (dim == 2) grid.spacing.z = 0.0;
  const auto [nx, ny, nz] = grid.counts;
  const Vec3 h = grid.spacing;

  const int nnx = nx + 1;
  const int nny = ny + 1;
  const int nnz = dim == 3 ? nz + 1 : 1;
  auto node_id = [&](int i, int j, int k) { return i + nnx * (j + nny * k); };
  mesh.nodes_.reserve(static_cast<std::size_t>(nnx) * nny * nnz);
  for (int k = 0; k < nnz; ++k)
    for (int j = 0; j < nny; ++j)
      for (int i = 0; i < nnx; ++i)
        mesh.nodes_.push_back({i * h.x, j * h.y, dim == 3 ? k * h.z : 0.0});

  const double volume = dim == 3 ? h.x * h.y * h.z : h.x * h.y;
  const double size = dim == 3 ? std::min({h.x, h.y, h.z}) : std::min(h.x, h.y);
  mesh.cells_.resize(static_cast<std::size_t>(nx) * ny * nz);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        Cell& c = mesh.cells_[static_cast<std::size_t>(grid.index(i, j, k))];
        c.centroid = {(i + 0.5) * h.x, (j + 0.5) * h.y, dim == 3 ? (k + 0.5) * h.z : 0.0};
        c.volume = volume;
        c.size = size;
        if (dim == 2) {
          c.shape = CellShape::quad;
          c.nodes = {node_id(i, j, 0), node_id(i + 1, j, 0), node_id(i + 1, j + 1, 0), node_id(i, j + 1, 0)};
          c.node_count = 4;
          c.face_count = 4;
        } else {
          c.shape = CellShape::hex;
          c.nodes = {node_id(i, j, k),         node_id(i + 1, j, k),     node_id(i + 1, j + 1, k),
                     node_id(i, j + 1, k),     node_id(i, j, k + 1),     node_id(i + 1, j, k + 1),
                     node_id(i + 1, j + 1, k + 1), node_id(i, j + 1, k + 1)};
          c.node_count = 8;
          c.face_count = 6;
        }
      }

  // Faces normal to `axis`; plane p separates cells p-1 and p along that axis.
  for (int axis = 0; axis < dim; ++axis) {
    const int a1 = (axis + 1) % dim;
    const int a2 = dim == 3 ? (axis + 2) % dim : -1;
    std::array<int, 3> n = grid.counts;
    if (dim == 2) n[2] = 1;
    const int planes = n[static_cast<std::size_t>(axis)] + 1;
    const int n1 = n[static_cast<std::size_t>(a1)];
    const int n2 = dim == 3 ? n[static_cast<std::size_t>(a2)] : 1;
    const double area = dim == 3 ? h[a1] * h[a2] : h[a1];
    for (int t2 = 0; t2 < n2; ++t2)
      for (int t1 = 0; t1 < n1; ++t1)
        for (int p = 0; p < planes; ++p) {
          auto cell_at = [&](int along) {
            std::array<int, 3> ijk{0, 0, 0};
            ijk[static_cast<std::size_t>(axis)] = along;
            ijk[static_cast<std::size_t>(a1)] = t1;
            if (dim == 3) ijk[static_cast<std::size_t>(a2)] = t2;
            return grid.index(ijk[0], ijk[1], ijk[2]);
          };
          auto node_at = [&](int d1, int d2) {
            std::array<int, 3> ijk{0, 0, 0};
            ijk[static_cast<std::size_t>(axis)] = p;
            ijk[static_cast<std::size_t>(a1)] = t1 + d1;
            if (dim == 3) ijk[static_cast<std::size_t>(a2)] = t2 + d2;
            return node_id(ijk[0], ijk[1], ijk[2]);
          };
          Face f;
          f.area = area;
          if (dim == 2) {
            f.nodes = {node_at(0, 0), node_at(1, 0), 0, 0};
            f.node_count = 2;
          } else {
            f.nodes = {node_at(0, 0), node_at(1, 0), node_at(1, 1), node_at(0, 1)};
            f.node_count = 4;
          }
          f.centroid[axis] = p * h[axis];
          f.centroid[a1] = (t1 + 0.5) * h[a1];
          if (dim == 3) f.centroid[a2] = (t2 + 0.5) * h[a2];
          const int lo = p > 0 ? cell_at(p - 1) : -1;
          const int hi = p < planes - 1 ? cell_at(p) : -1;
          f.normal[axis] = 1.0;
          if (lo >= 0) {
            f.owner = lo;
            f.neighbor = hi;
          } else {
            f.owner = hi;
            f.normal[axis] = -1.0;
          }
          const int id = static_cast<int>(mesh.faces_.size());
          mesh.faces_.push_back(f);
          if (lo >= 0) mesh.cells_[static_cast<std::size_t>(lo)].faces[static_cast<std::size_t>(2 * axis + 1)] = id;
          if (hi >= 0) mesh.cells_[static_cast<std::size_t>(hi)].faces[static_cast<std::size_t>(2 * axis)] = id;
        }
  }

  mesh.grid_ = grid;
  mesh.finish_topology();
  return mesh;
}

Mesh build_triangles(std::vector<Vec3> nodes, const std::vector<std::array<int, 3>>& triangles) {
  if (triangles.empty()) throw ConfigError("no triangular elements");
  Mesh mesh;
  mesh.dimension_ = 2;
  mesh.nodes_ = std::move(nodes);
  const int node_count = static_cast<int>(mesh.nodes_.size());

  mesh.lower_ = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max(), 0.0};
  mesh.upper_ = {std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest(), 0.0};

  std::unordered_map<std::uint64_t, int> edge_faces;
  edge_faces.reserve(triangles.size() * 2);
  mesh.cells_.reserve(triangles.size());
  for (const auto& tri_in : triangles) {
    auto tri = tri_in;
    for (int n : tri)
      if (n < 0 || n >= node_count) throw ConfigError("triangle references unknown node");
    const Vec3& a = mesh.nodes_[static_cast<std::size_t>(tri[0])];
    const Vec3& b = mesh.nodes_[static_cast<std::size_t>(tri[1])];
    const Vec3& c = mesh.nodes_[static_cast<std::size_t>(tri[2])];
    double twice_area = orient2d(a, b, c);
    if (twice_area < 0.0) {
      std::swap(tri[1], tri[2]);
      twice_area = -twice_area;
    }
    if (!(twice_area > 0.0)) throw ConfigError("degenerate triangle with zero area");

    const int id = static_cast<int>(mesh.cells_.size());
    Cell cell;
    cell.shape = CellShape::triangle;
    cell.node_count = 3;
    cell.face_count = 3;
    cell.nodes = {tri[0], tri[1], tri[2], 0, 0, 0, 0, 0};
    cell.volume = 0.5 * twice_area;
    double perimeter = 0.0;
    Vec3 centroid;
    for (int e = 0; e < 3; ++e) {
      const int na = tri[static_cast<std::size_t>(e)];
      const int nb = tri[static_cast<std::size_t>((e + 1) % 3)];
      const Vec3& pa = mesh.nodes_[static_cast<std::size_t>(na)];
      const Vec3& pb = mesh.nodes_[static_cast<std::size_t>(nb)];
      centroid += pa;
      perimeter += norm(pb - pa);
      for (int d = 0; d < 2; ++d) {
        mesh.lower_[d] = std::min(mesh.lower_[d], pa[d]);
        mesh.upper_[d] = std::max(mesh.upper_[d], pa[d]);
      }
      const auto key = edge_key(na, nb);
      auto it = edge_faces.find(key);
      if (it == edge_faces.end()) {
        Face f;
        f.nodes = {na, nb, 0, 0};
        f.node_count = 2;
        f.owner = id;
        const Vec3 t = pb - pa;
        f.area = norm(t);
        f.normal = {t.y / f.area, -t.x / f.area, 0.0};
        f.centroid = 0.5 * (pa + pb);
        const int fid = static_cast<int>(mesh.faces_.size());
        mesh.faces_.push_back(f);
        edge_faces.emplace(key, fid);
        cell.faces[static_cast<std::size_t>(e)] = fid;
      } else {
        Face& f = mesh.faces_[static_cast<std::size_t>(it->second)];
        if (f.neighbor >= 0) throw ConfigError("non-manifold edge shared by more than two triangles");
        f.neighbor = id;
        cell.faces[static_cast<std::size_t>(e)] = it->second;
      }
    }
    cell.centroid = (1.0 / 3.0) * centroid;
    cell.size = 4.0 * cell.volume / perimeter;
    mesh.cells_.push_back(cell);
  }
  mesh.finish_topology();
  return mesh;
}

Mesh build_triangular(std::span<const double> extents, int boundary_nodes) {
  if (extents.size() != 2) throw ConfigError("triangular mesh is two-dimensional");
  if (boundary_nodes < 2) throw ConfigError("triangular mesh needs at least 2 nodes per edge");
  if (!(extents[0] > 0.0) || !(extents[1] > 0.0)) throw ConfigError("triangular mesh extent must be positive");
  const int m = boundary_nodes - 1;
  const double hx = extents[0] / m;
  const double hy = extents[1] / m;
  std::vector<Vec3> nodes;
  nodes.reserve(static_cast<std::size_t>(boundary_nodes) * boundary_nodes);
  for (int j = 0; j <= m; ++j)
    for (int i = 0; i <= m; ++i) nodes.push_back({i * hx, j * hy, 0.0});
  auto id = [&](int i, int j) { return i + (m + 1) * j; };
  std::vector<std::array<int, 3>> tris;
  tris.reserve(static_cast<std::size_t>(2 * m * m));
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if ((i + j) % 2 == 0) {
        tris.push_back({a, b, c});
        tris.push_back({a, c, d});
      } else {
        tris.push_back({a, b, d});
        tris.push_back({b, c, d});
      }
    }
  return build_triangles(std::move(nodes), tris);
}

bool Mesh::cell_contains(int cell, const Vec3& p) const {
  const Cell& c = cells_[static_cast<std::size_t>(cell)];
  if (c.shape == CellShape::triangle) {
    const Vec3& a = nodes_[static_cast<std::size_t>(c.nodes[0])];
    const Vec3& b = nodes_[static_cast<std::size_t>(c.nodes[1])];
    const Vec3& d = nodes_[static_cast<std::size_t>(c.nodes[2])];
    return orient2d(a, b, p) >= 0.0 && orient2d(b, d, p) >= 0.0 && orient2d(d, a, p) >= 0.0;
  }
  const Vec3& lo = nodes_[static_cast<std::size_t>(c.nodes[0])];
  const Vec3& hi = nodes_[static_cast<std::size_t>(c.nodes[c.shape == CellShape::hex ? 6 : 2])];
  for (int d = 0; d < dimension_; ++d)
    if (p[d] < lo[d] || p[d] > hi[d]) return false;
  return true;
}

int Mesh::locate_cell_exhaustive(const Vec3& p) const {
  for (int id = 0; id < cell_count(); ++id)
    if (cell_contains(id, p)) return id;
  return -1;
}

int Mesh::nearest_boundary_cell(const Vec3& p) const {
  int best = -1;
  double best_d = std::numeric_limits<double>::max();
  for (const Face& f : faces_) {
    if (!f.on_boundary()) continue;
    const Vec3 r = cells_[static_cast<std::size_t>(f.owner)].centroid - p;
    const double d = dot(r, r);
    if (d < best_d || (d == best_d && f.owner < best)) {
      best_d = d;
      best = f.owner;
    }
  }
  return best;
}

LocateResult Mesh::locate_triangle(const Vec3& p, int hint) const {
  const int n = cell_count();
  const int cap = static_cast<int>(4.0 * std::sqrt(static_cast<double>(n))) + 1;
  int current = (hint >= 0 && hint < n) ? hint : 0;
  int found = -1;
  for (int step = 0; step < cap; ++step) {
    const Cell& c = cells_[static_cast<std::size_t>(current)];
    int worst_edge = -1;
    double worst = 0.0;
    for (int e = 0; e < 3; ++e) {
      const Vec3& a = nodes_[static_cast<std::size_t>(c.nodes[static_cast<std::size_t>(e)])];
      const Vec3& b = nodes_[static_cast<std::size_t>(c.nodes[static_cast<std::size_t>((e + 1) % 3)])];
      const double o = orient2d(a, b, p);
      if (o < worst) {
        worst = o;
        worst_edge = e;
      }
    }
    if (worst_edge < 0) {
      found = current;
      break;
    }
    const int next = face_neighbor(current, worst_edge);
    if (next < 0) break;
    current = next;
  }
  if (found < 0) found = locate_cell_exhaustive(p);
  if (found < 0) return {nearest_boundary_cell(p), false};
  for (int other : vertex_neighbors(found)) {
    if (other >= found) break;
    if (cell_contains(other, p)) return {other, true};
  }
  return {found, true};
}

LocateResult Mesh::locate_cell(const Vec3& p, int hint) const {
  if (!grid_) return locate_triangle(p, hint);
  bool inside = true;
  std::array<int, 3> ijk{0, 0, 0};
  for (int d = 0; d < dimension_; ++d) {
    const int n = grid_->counts[static_cast<std::size_t>(d)];
    const double s = (p[d] - lower_[d]) / grid_->spacing[d];
    if (!(s >= 0.0 && s <= n)) inside = false;
    // ceil - 1 sends points on a shared face to the lower-index (lower-id) cell.
    int idx = s > 0.0 ? static_cast<int>(std::ceil(s)) - 1 : 0;
    idx = std::clamp(idx, 0, n - 1);
    ijk[static_cast<std::size_t>(d)] = idx;
  }
  return {grid_->index(ijk[0], ijk[1], ijk[2]), inside};
}

}  // namespace thinc
