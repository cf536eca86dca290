#include "thinc/quadrature.hpp"

#include <array>
#include <cmath>

#include "thinc/errors.hpp"

namespace thinc {

namespace {

QuadratureRule make_line(int n) {
  QuadratureRule r;
  if (n == 2) {
    const double s = 0.5 / std::sqrt(3.0);
    r.points = {{0.5 - s, 0, 0}, {0.5 + s, 0, 0}};
    r.weights = {0.5, 0.5};
    r.degree = 3;
  } else if (n == 3) {
    const double s = 0.5 * std::sqrt(0.6);
    r.points = {{0.5 - s, 0, 0}, {0.5, 0, 0}, {0.5 + s, 0, 0}};
    r.weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    r.degree = 5;
  } else {
    throw ConfigError("gauss line rule supports 2 or 3 points");
  }
  return r;
}

QuadratureRule tensor(int dim) {
  const QuadratureRule& line = gauss_line_rule(3);
  QuadratureRule r;
  r.degree = 5;
  const int nz = dim == 3 ? 3 : 1;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) {
        const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j), uk = static_cast<std::size_t>(k);
        r.points.push_back({line.points[ui].x, line.points[uj].x, dim == 3 ? line.points[uk].x : 0.0});
        r.weights.push_back(line.weights[ui] * line.weights[uj] * (dim == 3 ? line.weights[uk] : 1.0));
      }
  return r;
}

void add_orbit3(QuadratureRule& r, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  r.points.push_back({a, a, b});
  r.points.push_back({a, b, a});
  r.points.push_back({b, a, a});
  for (int i = 0; i < 3; ++i) r.weights.push_back(w);
}

void add_orbit6(QuadratureRule& r, double a, double b, double c, double w) {
  const std::array<Vec3, 6> perms{{{a, b, c}, {a, c, b}, {b, a, c}, {b, c, a}, {c, a, b}, {c, b, a}}};
  for (const Vec3& p : perms) {
    r.points.push_back(p);
    r.weights.push_back(w);
  }
}

QuadratureRule make_triangle6() {
  QuadratureRule r;
  r.degree = 4;
  add_orbit3(r, 0.44594849091596488632, 0.22338158967801146570);
  add_orbit3(r, 0.09157621350977074346, 0.10995174365532186764);
  return r;
}

QuadratureRule make_triangle12() {
  QuadratureRule r;
  r.degree = 6;
  add_orbit3(r, 0.24928674517091042129, 0.11678627572637936603);
  add_orbit3(r, 0.06308901449150222834, 0.05084490637020681692);
  add_orbit6(r, 0.31035245103378440542, 0.63650249912139864723, 0.05314504984481694735, 0.08285107561837357519);
  return r;
}

}  // namespace

const QuadratureRule& gauss_line_rule(int points) {
  static const QuadratureRule two = make_line(2);
  static const QuadratureRule three = make_line(3);
  if (points == 2) return two;
  if (points == 3) return three;
  throw ConfigError("gauss line rule supports 2 or 3 points");
}

const QuadratureRule& quad_rule() {
  static const QuadratureRule r = tensor(2);
  return r;
}

const QuadratureRule& hex_rule() {
  static const QuadratureRule r = tensor(3);
  return r;
}

const QuadratureRule& triangle_rule(TriangleRule rule) {
  static const QuadratureRule six = make_triangle6();
  static const QuadratureRule twelve = make_triangle12();
  return rule == TriangleRule::gp12 ? twelve : six;
}

MappedQuadrature cell_quadrature(const Mesh& mesh, int cell, TriangleRule rule) {
  const Cell& c = mesh.cell(cell);
  const auto nodes = mesh.nodes();
  MappedQuadrature out;
  switch (c.shape) {
    case CellShape::quad:
    case CellShape::hex: {
      const QuadratureRule& r = c.shape == CellShape::quad ? quad_rule() : hex_rule();
      const Vec3& lo = nodes[static_cast<std::size_t>(c.nodes[0])];
      const Vec3& hi = nodes[static_cast<std::size_t>(c.nodes[c.shape == CellShape::hex ? 6 : 2])];
      for (const Vec3& p : r.points) {
        Vec3 x;
        for (int d = 0; d < mesh.dimension(); ++d) x[d] = lo[d] + p[d] * (hi[d] - lo[d]) - c.centroid[d];
        out.points.push_back(x);
      }
      out.weights = r.weights;
      break;
    }
    case CellShape::triangle: {
      const QuadratureRule& r = triangle_rule(rule);
      const Vec3 a = nodes[static_cast<std::size_t>(c.nodes[0])] - c.centroid;
      const Vec3 b = nodes[static_cast<std::size_t>(c.nodes[1])] - c.centroid;
      const Vec3 d = nodes[static_cast<std::size_t>(c.nodes[2])] - c.centroid;
      for (const Vec3& l : r.points) out.points.push_back(l.x * a + l.y * b + l.z * d);
      out.weights = r.weights;
      break;
    }
    default:
      throw ConfigError("unsupported cell type for quadrature");
  }
  return out;
}

MappedQuadrature face_quadrature(const Mesh& mesh, int face) {
  const Face& f = mesh.face(face);
  const auto nodes = mesh.nodes();
  MappedQuadrature out;
  const Vec3& p0 = nodes[static_cast<std::size_t>(f.nodes[0])];
  const Vec3& p1 = nodes[static_cast<std::size_t>(f.nodes[1])];
  if (f.node_count == 2) {
    const QuadratureRule& r = gauss_line_rule(2);
    for (const Vec3& s : r.points) out.points.push_back(p0 + s.x * (p1 - p0));
    out.weights = r.weights;
  } else {
    const Vec3& p3 = nodes[static_cast<std::size_t>(f.nodes[3])];
    const QuadratureRule& r = quad_rule();
    for (const Vec3& s : r.points) out.points.push_back(p0 + s.x * (p1 - p0) + s.y * (p3 - p0));
    out.weights = r.weights;
  }
  return out;
}

}  // namespace thinc
