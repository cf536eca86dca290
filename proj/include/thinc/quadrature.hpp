#pragma once

#include <vector>

#include "thinc/geometry.hpp"
#include "thinc/mesh.hpp"

namespace thinc {

enum class TriangleRule { gp6, gp12 };

/// Points on a reference element with weights normalized to sum to 1.
/// Reference elements: [0,1] for lines, [0,1]^d for quads/hexes, and barycentric (l0, l1, l2)
/// stored in (x, y, z) for triangles.
struct QuadratureRule {
  std::vector<Vec3> points;
  std::vector<double> weights;
  /// Highest total polynomial degree integrated exactly.
  int degree = 0;
};

const QuadratureRule& gauss_line_rule(int points);
const QuadratureRule& quad_rule();
const QuadratureRule& hex_rule();
const QuadratureRule& triangle_rule(TriangleRule rule);

/// Quadrature mapped onto a concrete cell or face.
struct MappedQuadrature {
  std::vector<Vec3> points;
  std::vector<double> weights;
};

/// Cell rule with points in local coordinates X = x - centroid.
MappedQuadrature cell_quadrature(const Mesh& mesh, int cell, TriangleRule rule = TriangleRule::gp6);

/// Face rule in global coordinates: 2-point Gauss on 2D edges, 3x3 Gauss on hexahedron faces.
MappedQuadrature face_quadrature(const Mesh& mesh, int face);

}  // namespace thinc
