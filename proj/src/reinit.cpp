#include "thinc/reinit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thinc/errors.hpp"

namespace thinc {

namespace {

void check_frozen(const Mesh& mesh, std::span<double> phi, std::span<const char> frozen) {
  if (phi.size() != static_cast<std::size_t>(mesh.cell_count()) || frozen.size() != phi.size())
    throw SolverError("reinitialization fields do not match the mesh");
  if (std::none_of(frozen.begin(), frozen.end(), [](char f) { return f != 0; }))
    throw SolverError("reinitialization needs at least one frozen interface cell");
}

// Solves sum_k ((d - a_k)^+ / h_k)^2 = 1 for the smallest admissible d.
double godunov(std::array<double, 3> a, std::array<double, 3> h, int dim) {
  // insertion sort by a
  for (int i = 1; i < dim; ++i)
    for (int j = i; j > 0 && a[static_cast<std::size_t>(j)] < a[static_cast<std::size_t>(j - 1)]; --j) {
      std::swap(a[static_cast<std::size_t>(j)], a[static_cast<std::size_t>(j - 1)]);
      std::swap(h[static_cast<std::size_t>(j)], h[static_cast<std::size_t>(j - 1)]);
    }
  double d = a[0] + h[0];
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (int m = 0; m < dim; ++m) {
    const auto um = static_cast<std::size_t>(m);
    if (m > 0 && d <= a[um]) break;
    if (!std::isfinite(a[um])) break;
    const double w = 1.0 / (h[um] * h[um]);
    s0 += w;
    s1 += w * a[um];
    s2 += w * a[um] * a[um];
    const double disc = s1 * s1 - s0 * (s2 - 1.0);
    d = (s1 + std::sqrt(std::max(disc, 0.0))) / s0;
  }
  return d;
}

}  // namespace

ReinitStats reinit_fsm(const Mesh& mesh, std::span<double> phi, std::span<const char> frozen) {
  if (!mesh.is_cartesian()) throw ConfigError("fast sweeping needs a Cartesian mesh");
  check_frozen(mesh, phi, frozen);
  const CartesianGrid& g = mesh.grid();
  const int dim = mesh.dimension();
  const auto [nx, ny, nz] = g.counts;
  const Vec3 span = mesh.upper() - mesh.lower();
  const double cap = norm(span);
  const std::size_t n = phi.size();
  constexpr double inf = std::numeric_limits<double>::infinity();

  // Distances seen from each side. Frozen values enter signed, so a frozen neighbor across the
  // interface yields a distance shorter than one cell.
  std::array<std::vector<double>, 2> side{std::vector<double>(n), std::vector<double>(n)};
  std::vector<signed char> sign(n);
  for (std::size_t i = 0; i < n; ++i) {
    sign[i] = phi[i] < 0.0 ? -1 : 1;
    if (frozen[i]) {
      side[0][i] = phi[i];
      side[1][i] = -phi[i];
    } else {
      side[0][i] = sign[i] > 0 ? cap : inf;
      side[1][i] = sign[i] > 0 ? inf : cap;
    }
  }
  const std::array<double, 3> h{g.spacing.x, g.spacing.y, dim == 3 ? g.spacing.z : 1.0};
  const double tolerance = 1e-3 * mesh.min_cell_size();
  const int orderings = dim == 3 ? 8 : 4;
  const int sx = 1, sy = nx, sz = nx * ny;

  ReinitStats stats;
  for (int round = 0; round < 1000; ++round) {
    double max_update = 0.0;
    for (int o = 0; o < orderings; ++o) {
      const bool rx = o & 1, ry = o & 2, rz = o & 4;
      for (int kk = 0; kk < nz; ++kk) {
        const int k = rz ? nz - 1 - kk : kk;
        for (int jj = 0; jj < ny; ++jj) {
          const int j = ry ? ny - 1 - jj : jj;
          for (int ii = 0; ii < nx; ++ii) {
            const int i = rx ? nx - 1 - ii : ii;
            const int c = i + sy * j + sz * k;
            if (frozen[static_cast<std::size_t>(c)]) continue;
            std::vector<double>& d = side[sign[static_cast<std::size_t>(c)] > 0 ? 0 : 1];
            std::array<double, 3> a{inf, inf, inf};
            a[0] = std::min(i > 0 ? d[static_cast<std::size_t>(c - sx)] : inf, i < nx - 1 ? d[static_cast<std::size_t>(c + sx)] : inf);
            a[1] = std::min(j > 0 ? d[static_cast<std::size_t>(c - sy)] : inf, j < ny - 1 ? d[static_cast<std::size_t>(c + sy)] : inf);
            if (dim == 3)
              a[2] = std::min(k > 0 ? d[static_cast<std::size_t>(c - sz)] : inf, k < nz - 1 ? d[static_cast<std::size_t>(c + sz)] : inf);
            double& cur = d[static_cast<std::size_t>(c)];
            // The update never drops below the smallest neighbor value.
            if (std::min({a[0], a[1], a[2]}) >= cur) continue;
            const double candidate = std::max(godunov(a, h, dim), 0.0);
            if (candidate < cur) {
              max_update = std::max(max_update, cur - candidate);
              cur = candidate;
            }
          }
        }
      }
    }
    ++stats.iterations;
    stats.residual = max_update;
    if (max_update < tolerance) break;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!frozen[i]) phi[i] = sign[i] * side[sign[i] > 0 ? 0 : 1][i];
  return stats;
}

constexpr double kMinSpread = 0.25;

ReinitStats reinit_iterative(const Mesh& mesh, std::span<double> phi, std::span<const char> frozen, int max_iterations,
                             double tolerance) {
  if (mesh.dimension() != 2) throw ConfigError("iterative reinitialization is two-dimensional only");
  check_frozen(mesh, phi, frozen);
  const int n = mesh.cell_count();
  const double dtau = 0.3 * mesh.min_cell_size();

  std::vector<double> smooth_sign(static_cast<std::size_t>(n));
  std::vector<char> monitored(static_cast<std::size_t>(n), 0);
  bool any_free = false;
  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double h = mesh.cell(i).size;
    smooth_sign[ui] = phi[ui] / std::sqrt(phi[ui] * phi[ui] + h * h);
    if (frozen[ui]) continue;
    any_free = true;
    for (int j : mesh.vertex_neighbors(i))
      if (frozen[static_cast<std::size_t>(j)]) monitored[ui] = 1;
  }
  ReinitStats stats;
  if (!any_free) return stats;

  std::vector<double> grad_norm(static_cast<std::size_t>(n), 1.0);
  std::vector<double> next(phi.begin(), phi.end());
  auto gradient = [&](int i, bool upwind_only) {
    const Vec3& ci = mesh.cell(i).centroid;
    const double pi = phi[static_cast<std::size_t>(i)];
    const double s = smooth_sign[static_cast<std::size_t>(i)];
    double axx = 0, axy = 0, ayy = 0, bx = 0, by = 0;
    int used = 0;
    for (int j : mesh.vertex_neighbors(i)) {
      const double pj = phi[static_cast<std::size_t>(j)];
      if (upwind_only && !(s * pj < s * pi)) continue;
      const Vec3 r = mesh.cell(j).centroid - ci;
      const double w = 1.0 / dot(r, r);
      axx += w * r.x * r.x;
      axy += w * r.x * r.y;
      ayy += w * r.y * r.y;
      bx += w * r.x * (pj - pi);
      by += w * r.y * (pj - pi);
      ++used;
    }
    // One-sided stencils can be nearly collinear; reject those whose normal matrix is badly
    // conditioned (neighbor directions within about 30 degrees of each other).
    const double det = axx * ayy - axy * axy;
    if (used < 2 || !(det > kMinSpread * axx * ayy)) return -1.0;
    const double gx = (ayy * bx - axy * by) / det;
    const double gy = (axx * by - axy * bx) / det;
    return std::hypot(gx, gy);
  };

  for (int it = 0; it <= max_iterations; ++it) {
    double residual = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      if (frozen[ui]) continue;
      double gn = gradient(i, true);
      if (gn < 0.0) gn = gradient(i, false);
      if (gn < 0.0) gn = 1.0;
      // A cell above all its upwind neighbors sees a bowl, whose fitted slope is near zero.
      // The steepest one-sided difference is a lower bound on |grad phi| and stops it running away.
      const double s = smooth_sign[ui] >= 0.0 ? 1.0 : -1.0;
      for (int j : mesh.vertex_neighbors(i)) {
        const double drop = s * (phi[ui] - phi[static_cast<std::size_t>(j)]);
        if (drop > 0.0) gn = std::max(gn, drop / norm(mesh.cell(j).centroid - mesh.cell(i).centroid));
      }
      grad_norm[ui] = gn;
      if (monitored[ui]) residual = std::max(residual, std::abs(1.0 - gn));
    }
    stats.residual = residual;
    if (residual < tolerance || it == max_iterations) break;
    for (int i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      // Capping the speed at 1 keeps a badly fitted gradient from overshooting; steady states are unchanged.
      if (!frozen[ui]) next[ui] = phi[ui] + dtau * smooth_sign[ui] * std::max(1.0 - grad_norm[ui], -1.0);
    }
    std::copy(next.begin(), next.end(), phi.begin());
    ++stats.iterations;
  }
  return stats;
}

ReinitStats reinitialize(const Mesh& mesh, std::span<double> phi, std::span<const char> frozen) {
  return mesh.is_cartesian() ? reinit_fsm(mesh, phi, frozen) : reinit_iterative(mesh, phi, frozen);
}

}  // namespace thinc
