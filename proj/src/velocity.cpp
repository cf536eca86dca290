#include "thinc/velocity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "thinc/errors.hpp"

namespace thinc {

namespace {

constexpr double kPi = std::numbers::pi;

double sq(double v) { return v * v; }

std::array<BenchmarkCase, 4> make_cases() {
  std::array<BenchmarkCase, 4> c;
  c[0].id = CaseId::zalesak;
  c[0].name = "zalesak";
  c[0].dimension = 2;
  c[0].extents = {1.0, 1.0, 0.0};
  c[0].period = 2.0 * kPi;
  c[0].default_cfl = 0.25;
  c[0].center = {0.5, 0.75, 0.0};
  c[0].radius = 0.15;
  c[0].slot_half_width = 0.025;
  c[0].slot_top = 0.85;

  c[1].id = CaseId::vortex2d;
  c[1].name = "vortex2d";
  c[1].dimension = 2;
  c[1].extents = {1.0, 1.0, 0.0};
  c[1].period = 8.0;
  c[1].default_cfl = 0.25;
  c[1].center = {0.5, 0.75, 0.0};
  c[1].radius = 0.15;

  c[2].id = CaseId::deform3d;
  c[2].name = "deform3d";
  c[2].dimension = 3;
  c[2].extents = {1.0, 1.0, 1.0};
  c[2].period = 3.0;
  c[2].default_cfl = 0.1;
  c[2].center = {0.35, 0.35, 0.35};
  c[2].radius = 0.15;

  c[3].id = CaseId::shear3d;
  c[3].name = "shear3d";
  c[3].dimension = 3;
  c[3].extents = {1.0, 1.0, 2.0};
  c[3].period = 3.0;
  c[3].default_cfl = 0.1;
  c[3].center = {0.5, 0.75, 0.5};
  c[3].radius = 0.15;
  return c;
}

const std::array<BenchmarkCase, 4>& cases() {
  static const std::array<BenchmarkCase, 4> c = make_cases();
  return c;
}

// Antiderivative in q of sqrt(s^2 + q^2).
double int_r(double s, double q) {
  const double r = std::hypot(s, q);
  const double tail = s == 0.0 ? 0.0 : s * s * std::asinh(q / std::abs(s));
  return 0.5 * (q * r + tail);
}

// Antiderivative in q of q^2 asinh(s / |q|), odd in q and zero at q = 0.
double int_q2_asinh(double s, double q) {
  const double aq = std::abs(q);
  if (aq == 0.0) return 0.0;
  const double r = std::hypot(s, q);
  const double tail = s == 0.0 ? 0.0 : s * s * std::asinh(aq / std::abs(s));
  const double g = aq * aq * aq / 3.0 * std::asinh(s / aq) + s / 6.0 * (aq * r - tail);
  return q > 0.0 ? g : -g;
}

// y-component of the shear potential without the time factor: the x-antiderivative of (1 - 2r)^2.
double shear_ay(double s, double q) {
  const double r = std::hypot(s, q);
  const double log_term = q == 0.0 ? 0.0 : q * q * std::asinh(s / std::abs(q));
  return s - 2.0 * (s * r + log_term) + 4.0 / 3.0 * s * s * s + 4.0 * q * q * s;
}

// Antiderivative of shear_ay in q.
double shear_ay_int(double s, double q) {
  return s * q - 2.0 * (s * int_r(s, q) + int_q2_asinh(s, q)) + 4.0 / 3.0 * s * s * s * q + 4.0 / 3.0 * q * q * q * s;
}

// Integral of A[axis] along the segment from `a` to a with a[axis] replaced by `end`.
double edge_circulation(CaseId id, const Vec3& a, int axis, double end, double t) {
  const double c = time_factor(id, t);
  const double x = a.x, y = a.y, z = a.z;
  if (id == CaseId::deform3d) {
    if (axis == 1)
      return -c * sq(std::sin(kPi * x)) * sq(std::sin(kPi * z)) / kPi *
             (std::cos(2.0 * kPi * y) - std::cos(2.0 * kPi * end)) / (2.0 * kPi);
    if (axis == 2)
      return c * sq(std::sin(kPi * x)) * sq(std::sin(kPi * y)) / kPi *
             (std::cos(2.0 * kPi * z) - std::cos(2.0 * kPi * end)) / (2.0 * kPi);
    return 0.0;
  }
  if (id == CaseId::shear3d) {
    if (axis == 1) return c * (shear_ay_int(x - 0.5, end - 0.5) - shear_ay_int(x - 0.5, y - 0.5));
    if (axis == 2) return c * sq(std::sin(kPi * x)) * sq(std::sin(kPi * y)) / kPi * (end - z);
    return 0.0;
  }
  throw ConfigError("vector potential is defined for 3D cases only");
}

}  // namespace

const BenchmarkCase& benchmark_case(CaseId id) { return cases()[static_cast<std::size_t>(id)]; }

CaseId parse_case(std::string_view name) {
  for (const BenchmarkCase& c : cases())
    if (c.name == name) return c.id;
  throw ConfigError("unknown case '" + std::string(name) + "' (expected zalesak, vortex2d, deform3d or shear3d)");
}

double time_factor(CaseId id, double t) {
  if (id == CaseId::zalesak) return 1.0;
  return std::cos(kPi * t / benchmark_case(id).period);
}

Vec3 velocity_at(CaseId id, const Vec3& p, double t) {
  const double c = time_factor(id, t);
  const double x = p.x, y = p.y, z = p.z;
  switch (id) {
    case CaseId::zalesak:
      return {y - 0.5, 0.5 - x, 0.0};
    case CaseId::vortex2d:
      return {c * sq(std::sin(kPi * x)) * std::sin(2.0 * kPi * y), -c * std::sin(2.0 * kPi * x) * sq(std::sin(kPi * y)),
              0.0};
    case CaseId::deform3d:
      return {2.0 * c * sq(std::sin(kPi * x)) * std::sin(2.0 * kPi * y) * std::sin(2.0 * kPi * z),
              -c * std::sin(2.0 * kPi * x) * sq(std::sin(kPi * y)) * std::sin(2.0 * kPi * z),
              -c * std::sin(2.0 * kPi * x) * std::sin(2.0 * kPi * y) * sq(std::sin(kPi * z))};
    case CaseId::shear3d: {
      const double r = std::hypot(x - 0.5, y - 0.5);
      return {c * sq(std::sin(kPi * x)) * std::sin(2.0 * kPi * y), -c * std::sin(2.0 * kPi * x) * sq(std::sin(kPi * y)),
              c * sq(1.0 - 2.0 * r)};
    }
  }
  throw ConfigError("unknown case");
}

double stream_function(CaseId id, const Vec3& p, double t) {
  if (id == CaseId::zalesak) return 0.5 * (sq(p.x - 0.5) + sq(p.y - 0.5));
  if (id == CaseId::vortex2d) return time_factor(id, t) * sq(std::sin(kPi * p.x)) * sq(std::sin(kPi * p.y)) / kPi;
  throw ConfigError("stream function is defined for 2D cases only");
}

Vec3 vector_potential(CaseId id, const Vec3& p, double t) {
  const double c = time_factor(id, t);
  if (id == CaseId::deform3d)
    return {0.0, -c * sq(std::sin(kPi * p.x)) * std::sin(2.0 * kPi * p.y) * sq(std::sin(kPi * p.z)) / kPi,
            c * sq(std::sin(kPi * p.x)) * sq(std::sin(kPi * p.y)) * std::sin(2.0 * kPi * p.z) / kPi};
  if (id == CaseId::shear3d)
    return {0.0, c * shear_ay(p.x - 0.5, p.y - 0.5), c * sq(std::sin(kPi * p.x)) * sq(std::sin(kPi * p.y)) / kPi};
  throw ConfigError("vector potential is defined for 3D cases only");
}

double face_flux(CaseId id, const Mesh& mesh, int face, double t) {
  const Face& f = mesh.face(face);
  const auto nodes = mesh.nodes();
  const Vec3& p0 = nodes[static_cast<std::size_t>(f.nodes[0])];
  const Vec3& p1 = nodes[static_cast<std::size_t>(f.nodes[1])];
  if (f.node_count == 2) {
    // Flux to the right of p0 -> p1 is psi(p1) - psi(p0).
    const Vec3 tangent = p1 - p0;
    const double sign = f.normal.x * tangent.y - f.normal.y * tangent.x > 0.0 ? 1.0 : -1.0;
    return sign * (stream_function(id, p1, t) - stream_function(id, p0, t));
  }
  // Axis-aligned rectangle p0, p1 = p0 + h1 e1, p2, p3 = p0 + h2 e2 with e1 x e2 = +e_axis.
  const Vec3& p2 = nodes[static_cast<std::size_t>(f.nodes[2])];
  const Vec3& p3 = nodes[static_cast<std::size_t>(f.nodes[3])];
  int axis = 0;
  for (int d = 1; d < 3; ++d)
    if (std::abs(f.normal[d]) > std::abs(f.normal[axis])) axis = d;
  const int a1 = (axis + 1) % 3;
  const int a2 = (axis + 2) % 3;
  // Each edge is integrated from its lower to its upper end so shared edges agree bit for bit.
  const double circulation = edge_circulation(id, p0, a1, p1[a1], t) + edge_circulation(id, p1, a2, p2[a2], t) -
                             edge_circulation(id, p3, a1, p2[a1], t) - edge_circulation(id, p0, a2, p3[a2], t);
  return f.normal[axis] > 0.0 ? circulation : -circulation;
}

double initial_signed_distance(CaseId id, const Vec3& x) {
  const BenchmarkCase& c = benchmark_case(id);
  Vec3 r = x - c.center;
  if (c.dimension == 2) r.z = 0.0;
  const double sphere = c.radius - norm(r);
  if (id != CaseId::zalesak) return sphere;
  // Signed distance to the slot (an infinite-downward strip capped at slot_top), positive outside it.
  const double qx = std::abs(x.x - c.center.x) - c.slot_half_width;
  const double qy = x.y - c.slot_top;
  const double outside = std::hypot(std::max(qx, 0.0), std::max(qy, 0.0));
  const double slot = outside + std::min(std::max(qx, qy), 0.0);
  return std::min(sphere, slot);
}

namespace {

template <class Sdf>
double subdivide_box(const Sdf& sdf, const Vec3& lo, const Vec3& hi, int dim, int depth) {
  const Vec3 center = 0.5 * (lo + hi);
  Vec3 half = 0.5 * (hi - lo);
  if (dim == 2) half.z = 0.0;
  const double radius = norm(half);
  const double d = sdf(center);
  if (d > radius) return 1.0;
  if (d < -radius) return 0.0;
  if (depth == 0) return d > 0.0 ? 1.0 : 0.0;
  double sum = 0.0;
  const int nz = dim == 3 ? 2 : 1;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i) {
        Vec3 a = lo, b = center;
        if (i) a.x = center.x, b.x = hi.x;
        if (j) a.y = center.y, b.y = hi.y;
        if (dim == 3) {
          if (k) a.z = center.z, b.z = hi.z;
        } else {
          b.z = hi.z;
        }
        sum += subdivide_box(sdf, a, b, dim, depth - 1);
      }
  return sum / (dim == 3 ? 8.0 : 4.0);
}

template <class Sdf>
double subdivide_triangle(const Sdf& sdf, const Vec3& a, const Vec3& b, const Vec3& c, int depth) {
  const Vec3 center = (1.0 / 3.0) * (a + b + c);
  const double radius = std::max({norm(a - center), norm(b - center), norm(c - center)});
  const double d = sdf(center);
  if (d > radius) return 1.0;
  if (d < -radius) return 0.0;
  if (depth == 0) return d > 0.0 ? 1.0 : 0.0;
  const Vec3 ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
  return 0.25 * (subdivide_triangle(sdf, a, ab, ca, depth - 1) + subdivide_triangle(sdf, ab, b, bc, depth - 1) +
                 subdivide_triangle(sdf, ca, bc, c, depth - 1) + subdivide_triangle(sdf, ab, bc, ca, depth - 1));
}

}  // namespace

double subdivision_vof(const Mesh& mesh, int cell, CaseId id, int depth) {
  const Cell& c = mesh.cell(cell);
  const auto nodes = mesh.nodes();
  auto sdf = [id](const Vec3& x) { return initial_signed_distance(id, x); };
  if (c.shape == CellShape::triangle)
    return subdivide_triangle(sdf, nodes[static_cast<std::size_t>(c.nodes[0])], nodes[static_cast<std::size_t>(c.nodes[1])],
                              nodes[static_cast<std::size_t>(c.nodes[2])], depth);
  const Vec3& lo = nodes[static_cast<std::size_t>(c.nodes[0])];
  const Vec3& hi = nodes[static_cast<std::size_t>(c.nodes[c.shape == CellShape::hex ? 6 : 2])];
  return subdivide_box(sdf, lo, hi, mesh.dimension(), depth);
}

InitialFields initial_fields(CaseId id, const Mesh& mesh) {
  const BenchmarkCase& bc = benchmark_case(id);
  if (mesh.dimension() != bc.dimension)
    throw ConfigError("case " + bc.name + " needs a " + std::to_string(bc.dimension) + "D mesh");
  for (int d = 0; d < bc.dimension; ++d)
    if (bc.center[d] - bc.radius < mesh.lower()[d] || bc.center[d] + bc.radius > mesh.upper()[d])
      throw ConfigError("initial shape of case " + bc.name + " exceeds the mesh domain");
  InitialFields out;
  out.vof.resize(static_cast<std::size_t>(mesh.cell_count()));
  out.phi.resize(static_cast<std::size_t>(mesh.cell_count()));
  for (int i = 0; i < mesh.cell_count(); ++i) {
    out.phi[static_cast<std::size_t>(i)] = initial_signed_distance(id, mesh.cell(i).centroid);
    out.vof[static_cast<std::size_t>(i)] = subdivision_vof(mesh, i, id);
  }
  return out;
}

}  // namespace thinc
