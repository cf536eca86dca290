#include "thinc/diagnostics.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "thinc/errors.hpp"

namespace thinc {

namespace {

void check_sizes(std::span<const double> a, std::span<const double> b, const Mesh& mesh) {
  if (a.size() != static_cast<std::size_t>(mesh.cell_count()) || b.size() != a.size())
    throw ConfigError("field sizes do not match the mesh");
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << std::setprecision(17);
  return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

Vec3 crossing(const Vec3& a, double va, const Vec3& b, double vb) {
  const double t = va / (va - vb);
  return a + t * (b - a);
}

struct SoupBuilder {
  PsiSoup& soup;
  void segment(const Vec3& a, const Vec3& b) {
    const int base = static_cast<int>(soup.vertices.size());
    soup.vertices.push_back(a);
    soup.vertices.push_back(b);
    soup.elements.push_back({base, base + 1, 0});
  }
  void triangle(const Vec3& a, const Vec3& b, const Vec3& c) {
    const int base = static_cast<int>(soup.vertices.size());
    soup.vertices.push_back(a);
    soup.vertices.push_back(b);
    soup.vertices.push_back(c);
    soup.elements.push_back({base, base + 1, base + 2});
  }
};

// Linear contour on a triangle (2D) given vertex values.
void contour_triangle(SoupBuilder& out, const std::array<Vec3, 3>& p, const std::array<double, 3>& v) {
  std::array<Vec3, 2> hits;
  int count = 0;
  for (std::size_t e = 0; e < 3; ++e) {
    const std::size_t f = (e + 1) % 3;
    if ((v[e] >= 0.0) != (v[f] >= 0.0) && count < 2) hits[static_cast<std::size_t>(count++)] = crossing(p[e], v[e], p[f], v[f]);
  }
  if (count == 2) out.segment(hits[0], hits[1]);
}

void contour_square(SoupBuilder& out, const std::array<Vec3, 4>& p, const std::array<double, 4>& v) {
  std::array<Vec3, 4> hit;
  std::array<bool, 4> has{};
  int count = 0;
  for (std::size_t e = 0; e < 4; ++e) {
    const std::size_t f = (e + 1) % 4;
    if ((v[e] >= 0.0) != (v[f] >= 0.0)) {
      hit[e] = crossing(p[e], v[e], p[f], v[f]);
      has[e] = true;
      ++count;
    }
  }
  if (count == 2) {
    std::array<Vec3, 2> pts;
    int k = 0;
    for (std::size_t e = 0; e < 4; ++e)
      if (has[e]) pts[static_cast<std::size_t>(k++)] = hit[e];
    out.segment(pts[0], pts[1]);
  } else if (count == 4) {
    // Saddle: edges e0..e3 run 0-1, 1-2, 2-3, 3-0. Resolve with the center value.
    const bool center_inside = 0.25 * (v[0] + v[1] + v[2] + v[3]) >= 0.0;
    if (center_inside == (v[0] >= 0.0)) {
      out.segment(hit[0], hit[1]);
      out.segment(hit[2], hit[3]);
    } else {
      out.segment(hit[3], hit[0]);
      out.segment(hit[1], hit[2]);
    }
  }
}

void contour_tet(SoupBuilder& out, const std::array<Vec3, 4>& p, const std::array<double, 4>& v) {
  std::array<int, 4> in{}, outside{};
  int ni = 0, no = 0;
  for (int k = 0; k < 4; ++k) {
    if (v[static_cast<std::size_t>(k)] >= 0.0)
      in[static_cast<std::size_t>(ni++)] = k;
    else
      outside[static_cast<std::size_t>(no++)] = k;
  }
  auto cut = [&](int a, int b) {
    return crossing(p[static_cast<std::size_t>(a)], v[static_cast<std::size_t>(a)], p[static_cast<std::size_t>(b)],
                    v[static_cast<std::size_t>(b)]);
  };
  if (ni == 1 || ni == 3) {
    const int lone = ni == 1 ? in[0] : outside[0];
    const auto& others = ni == 1 ? outside : in;
    out.triangle(cut(lone, others[0]), cut(lone, others[1]), cut(lone, others[2]));
  } else if (ni == 2) {
    const Vec3 a = cut(in[0], outside[0]);
    const Vec3 b = cut(in[0], outside[1]);
    const Vec3 c = cut(in[1], outside[1]);
    const Vec3 d = cut(in[1], outside[0]);
    out.triangle(a, b, c);
    out.triangle(a, c, d);
  }
}

}  // namespace

double total_vof(const Mesh& mesh, std::span<const double> vof) {
  double m = 0.0;
  for (int i = 0; i < mesh.cell_count(); ++i) m += vof[static_cast<std::size_t>(i)] * mesh.cell(i).volume;
  return m;
}

double error_l1(std::span<const double> numeric, std::span<const double> exact, const Mesh& mesh) {
  check_sizes(numeric, exact, mesh);
  double e = 0.0;
  for (int i = 0; i < mesh.cell_count(); ++i) {
    const auto ui = static_cast<std::size_t>(i);
    e += std::abs(numeric[ui] - exact[ui]) * mesh.cell(i).volume;
  }
  return e;
}

double error_relative(std::span<const double> numeric, std::span<const double> exact, const Mesh& mesh) {
  check_sizes(numeric, exact, mesh);
  double mass = 0.0;
  for (int i = 0; i < mesh.cell_count(); ++i) mass += std::abs(exact[static_cast<std::size_t>(i)]) * mesh.cell(i).volume;
  if (!(mass > 0.0)) throw ConfigError("relative error needs a nonzero exact mass");
  return error_l1(numeric, exact, mesh) / mass;
}

std::pair<std::vector<Vec3>, double> sub_cell_centers(const Mesh& mesh, int cell, int n) {
  const Cell& c = mesh.cell(cell);
  const auto nodes = mesh.nodes();
  std::vector<Vec3> centers;
  if (c.shape == CellShape::triangle) {
    const Vec3& a = nodes[static_cast<std::size_t>(c.nodes[0])];
    const Vec3 e1 = nodes[static_cast<std::size_t>(c.nodes[1])] - a;
    const Vec3 e2 = nodes[static_cast<std::size_t>(c.nodes[2])] - a;
    centers.reserve(static_cast<std::size_t>(n * n));
    for (int j = 0; j < n; ++j)
      for (int i = 0; i + j < n; ++i) {
        centers.push_back(a + ((i + 1.0 / 3.0) / n) * e1 + ((j + 1.0 / 3.0) / n) * e2);
        if (i + j < n - 1) centers.push_back(a + ((i + 2.0 / 3.0) / n) * e1 + ((j + 2.0 / 3.0) / n) * e2);
      }
    return {centers, 1.0 / (n * n)};
  }
  const int dim = mesh.dimension();
  const Vec3& lo = nodes[static_cast<std::size_t>(c.nodes[0])];
  const Vec3& hi = nodes[static_cast<std::size_t>(c.nodes[c.shape == CellShape::hex ? 6 : 2])];
  const int nz = dim == 3 ? n : 1;
  centers.reserve(static_cast<std::size_t>(n * n * nz));
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        centers.push_back({lo.x + (i + 0.5) / n * (hi.x - lo.x), lo.y + (j + 0.5) / n * (hi.y - lo.y),
                           dim == 3 ? lo.z + (k + 0.5) / n * (hi.z - lo.z) : 0.0});
  return {centers, 1.0 / (n * n * nz)};
}

PsiSoup extract_psi(std::span<const SurfacePolynomial> polys, const Mesh& mesh, int samples) {
  if (samples < 2) throw ConfigError("PSI extraction needs at least 2 samples per axis");
  PsiSoup soup;
  soup.vertices_per_element = mesh.dimension() == 3 ? 3 : 2;
  SoupBuilder out{soup};
  const auto nodes = mesh.nodes();
  const int s = samples;
  const double step = 1.0 / (s - 1);
  for (const SurfacePolynomial& poly : polys) {
    const Cell& c = mesh.cell(poly.cell);
    if (c.shape == CellShape::triangle) {
      const Vec3& a = nodes[static_cast<std::size_t>(c.nodes[0])];
      const Vec3 e1 = nodes[static_cast<std::size_t>(c.nodes[1])] - a;
      const Vec3 e2 = nodes[static_cast<std::size_t>(c.nodes[2])] - a;
      auto point = [&](int i, int j) { return a + (i * step) * e1 + (j * step) * e2; };
      for (int j = 0; j < s - 1; ++j)
        for (int i = 0; i + j < s - 1; ++i) {
          std::array<Vec3, 3> up{point(i, j), point(i + 1, j), point(i, j + 1)};
          contour_triangle(out, up, {poly.psi(up[0]), poly.psi(up[1]), poly.psi(up[2])});
          if (i + j < s - 2) {
            std::array<Vec3, 3> down{point(i + 1, j), point(i + 1, j + 1), point(i, j + 1)};
            contour_triangle(out, down, {poly.psi(down[0]), poly.psi(down[1]), poly.psi(down[2])});
          }
        }
      continue;
    }
    const Vec3& lo = nodes[static_cast<std::size_t>(c.nodes[0])];
    const Vec3& hi = nodes[static_cast<std::size_t>(c.nodes[c.shape == CellShape::hex ? 6 : 2])];
    const bool three = c.shape == CellShape::hex;
    const int sz = three ? s : 1;
    std::vector<Vec3> pts(static_cast<std::size_t>(s * s * sz));
    std::vector<double> val(pts.size());
    auto at = [&](int i, int j, int k) { return static_cast<std::size_t>(i + s * (j + s * k)); };
    for (int k = 0; k < sz; ++k)
      for (int j = 0; j < s; ++j)
        for (int i = 0; i < s; ++i) {
          const Vec3 x{lo.x + i * step * (hi.x - lo.x), lo.y + j * step * (hi.y - lo.y),
                       three ? lo.z + k * step * (hi.z - lo.z) : 0.0};
          pts[at(i, j, k)] = x;
          val[at(i, j, k)] = poly.psi(x);
        }
    if (!three) {
      for (int j = 0; j < s - 1; ++j)
        for (int i = 0; i < s - 1; ++i) {
          const std::array<std::size_t, 4> id{at(i, j, 0), at(i + 1, j, 0), at(i + 1, j + 1, 0), at(i, j + 1, 0)};
          contour_square(out, {pts[id[0]], pts[id[1]], pts[id[2]], pts[id[3]]},
                         {val[id[0]], val[id[1]], val[id[2]], val[id[3]]});
        }
      continue;
    }
    static constexpr std::array<std::array<int, 4>, 6> tets{
        {{0, 1, 2, 6}, {0, 2, 3, 6}, {0, 3, 7, 6}, {0, 7, 4, 6}, {0, 4, 5, 6}, {0, 5, 1, 6}}};
    for (int k = 0; k < s - 1; ++k)
      for (int j = 0; j < s - 1; ++j)
        for (int i = 0; i < s - 1; ++i) {
          const std::array<std::size_t, 8> corner{at(i, j, k),         at(i + 1, j, k),     at(i + 1, j + 1, k),
                                                  at(i, j + 1, k),     at(i, j, k + 1),     at(i + 1, j, k + 1),
                                                  at(i + 1, j + 1, k + 1), at(i, j + 1, k + 1)};
          for (const auto& t : tets) {
            std::array<Vec3, 4> p;
            std::array<double, 4> v;
            for (std::size_t q = 0; q < 4; ++q) {
              p[q] = pts[corner[static_cast<std::size_t>(t[q])]];
              v[q] = val[corner[static_cast<std::size_t>(t[q])]];
            }
            contour_tet(out, p, v);
          }
        }
  }
  return soup;
}

void write_vtk(const std::filesystem::path& path, const Mesh& mesh,
               const std::vector<std::pair<std::string, std::span<const double>>>& fields) {
  for (const auto& [name, values] : fields)
    if (values.size() != static_cast<std::size_t>(mesh.cell_count()))
      throw ConfigError("field " + name + " does not match the mesh");
  std::ofstream out = open_output(path);
  out << "# vtk DataFile Version 3.0\nthinc cell data\nASCII\n";
  if (mesh.is_cartesian()) {
    const CartesianGrid& g = mesh.grid();
    const bool three = mesh.dimension() == 3;
    out << "DATASET STRUCTURED_POINTS\n";
    out << "DIMENSIONS " << g.counts[0] + 1 << ' ' << g.counts[1] + 1 << ' ' << (three ? g.counts[2] + 1 : 1) << '\n';
    out << "ORIGIN " << mesh.lower().x << ' ' << mesh.lower().y << ' ' << mesh.lower().z << '\n';
    out << "SPACING " << g.spacing.x << ' ' << g.spacing.y << ' ' << (three ? g.spacing.z : 1.0) << '\n';
  } else {
    const auto nodes = mesh.nodes();
    out << "DATASET UNSTRUCTURED_GRID\nPOINTS " << nodes.size() << " double\n";
    for (const Vec3& p : nodes) out << p.x << ' ' << p.y << ' ' << p.z << '\n';
    out << "CELLS " << mesh.cell_count() << ' ' << 4 * mesh.cell_count() << '\n';
    for (const Cell& c : mesh.cells()) out << "3 " << c.nodes[0] << ' ' << c.nodes[1] << ' ' << c.nodes[2] << '\n';
    out << "CELL_TYPES " << mesh.cell_count() << '\n';
    for (int i = 0; i < mesh.cell_count(); ++i) out << "5\n";
  }
  out << "CELL_DATA " << mesh.cell_count() << '\n';
  for (const auto& [name, values] : fields) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : values) out << v << '\n';
  }
  finish_output(out, path);
}

void write_psi_vtk(const std::filesystem::path& path, const PsiSoup& soup) {
  std::ofstream out = open_output(path);
  out << "# vtk DataFile Version 3.0\nthinc PSI\nASCII\nDATASET POLYDATA\n";
  out << "POINTS " << soup.vertices.size() << " double\n";
  for (const Vec3& p : soup.vertices) out << p.x << ' ' << p.y << ' ' << p.z << '\n';
  const int k = soup.vertices_per_element;
  out << (k == 2 ? "LINES " : "POLYGONS ") << soup.elements.size() << ' ' << (k + 1) * soup.elements.size() << '\n';
  for (const auto& e : soup.elements) {
    out << k;
    for (int q = 0; q < k; ++q) out << ' ' << e[static_cast<std::size_t>(q)];
    out << '\n';
  }
  finish_output(out, path);
}

double convergence_order(double e1, double e2, double n1, double n2) { return std::log(e1 / e2) / std::log(n2 / n1); }

void write_csv(const std::filesystem::path& path, std::span<const ErrorReport> reports) {
  std::ofstream out = open_output(path);
  out << "case,mesh,n,steps,dt,e_l1,order_l1,e_r,order_r,e_sd,order_sd,vof_drift,clipped_mass,mean_newton_iterations\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const ErrorReport& r = reports[i];
    auto order = [&](double ErrorReport::*metric) -> std::string {
      if (i == 0) return "";
      const ErrorReport& p = reports[i - 1];
      std::ostringstream s;
      s << std::setprecision(17) << convergence_order(p.*metric, r.*metric, p.n, r.n);
      return s.str();
    };
    out << r.case_name << ',' << r.mesh_kind << ',' << r.n << ',' << r.steps << ',' << r.dt << ',' << r.e_l1 << ','
        << order(&ErrorReport::e_l1) << ',' << r.e_r << ',' << order(&ErrorReport::e_r) << ',' << r.e_sd << ','
        << order(&ErrorReport::e_sd) << ',' << r.vof_drift << ',' << r.clipped_mass << ',' << r.mean_newton_iterations
        << '\n';
  }
  finish_output(out, path);
}

}  // namespace thinc
