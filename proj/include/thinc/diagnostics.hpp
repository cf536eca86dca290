#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "thinc/errors.hpp"
#include "thinc/mesh.hpp"
#include "thinc/thinc.hpp"
#include "thinc/velocity.hpp"

namespace thinc {

struct ErrorReport {
  std::string case_name;
  std::string mesh_kind;
  int n = 0;
  double e_l1 = 0.0;
  double e_r = 0.0;
  double e_sd = 0.0;
  /// |M(T) - M(0)| / M(0).
  double vof_drift = 0.0;
  /// Clipped mass relative to M(0).
  double clipped_mass = 0.0;
  double mean_newton_iterations = 0.0;
  int steps = 0;
  double dt = 0.0;
  double seconds = 0.0;
};

double total_vof(const Mesh& mesh, std::span<const double> vof);

double error_l1(std::span<const double> numeric, std::span<const double> exact, const Mesh& mesh);
double error_relative(std::span<const double> numeric, std::span<const double> exact, const Mesh& mesh);

/// Symmetric-difference error: sub-cell sign mismatch between each cell's PSI and `exact_sdf`
/// on cells that are interface cells in both fields, |H - H_e| |cell| elsewhere.
/// `poly_index[i]` indexes `polys` for cells with a PSI, -1 otherwise.
template <class Sdf>
double error_symmetric_difference(std::span<const double> numeric, std::span<const double> exact, const Mesh& mesh,
                                  std::span<const int> poly_index, std::span<const SurfacePolynomial> polys,
                                  const Sdf& exact_sdf, int subdivisions = 20);

/// Sub-cell centers and the volume fraction of each: an n^d lattice on boxes, n^2 congruent
/// sub-triangles on triangles.
std::pair<std::vector<Vec3>, double> sub_cell_centers(const Mesh& mesh, int cell, int subdivisions);

/// Line segments (2D) or triangles (3D) approximating PSI zero sets.
struct PsiSoup {
  int vertices_per_element = 2;
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> elements;
};

/// Samples each PSI on a lattice of `samples` points per axis spanning its cell and contours the
/// zero level (marching squares in 2D, marching tetrahedra in 3D, linear per sub-triangle on triangles).
PsiSoup extract_psi(std::span<const SurfacePolynomial> polys, const Mesh& mesh, int samples = 5);

/// Legacy ASCII VTK of cell fields: STRUCTURED_POINTS for Cartesian meshes, UNSTRUCTURED_GRID otherwise.
void write_vtk(const std::filesystem::path& path, const Mesh& mesh,
               const std::vector<std::pair<std::string, std::span<const double>>>& fields);
void write_psi_vtk(const std::filesystem::path& path, const PsiSoup& soup);

/// log(e1 / e2) / log(n2 / n1).
double convergence_order(double e1, double e2, double n1, double n2);

/// One row per report with order columns against the previous row.
void write_csv(const std::filesystem::path& path, std::span<const ErrorReport> reports);

// ---------------------------------------------------------------------------

template <class Sdf>
double error_symmetric_difference(std::span<const double> numeric, std::span<const double> exact, const Mesh& mesh,
                                  std::span<const int> poly_index, std::span<const SurfacePolynomial> polys,
                                  const Sdf& exact_sdf, int subdivisions) {
  auto interior = [](double h) { return h > kInterfaceEps && h < 1.0 - kInterfaceEps; };
  double total = 0.0;
  for (int i = 0; i < mesh.cell_count(); ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double volume = mesh.cell(i).volume;
    if (!(interior(numeric[ui]) && interior(exact[ui]))) {
      total += std::abs(numeric[ui] - exact[ui]) * volume;
      continue;
    }
    const int p = poly_index.empty() ? -1 : poly_index[ui];
    if (p < 0) throw SolverError("missing PSI for interface cell " + std::to_string(i));
    const SurfacePolynomial& poly = polys[static_cast<std::size_t>(p)];
    const auto [centers, fraction] = sub_cell_centers(mesh, i, subdivisions);
    int mismatched = 0;
    for (const Vec3& x : centers)
      if ((poly.psi(x) >= 0.0) != (exact_sdf(x) >= 0.0)) ++mismatched;
    total += mismatched * fraction * volume;
  }
  return total;
}

}  // namespace thinc
