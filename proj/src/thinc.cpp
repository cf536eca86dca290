#include "thinc/thinc.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "thinc/errors.hpp"

namespace thinc {

double beta_from_cell(double size) {
  if (!(size > 0.0)) throw ConfigError("cell size must be positive");
  return 6.0 / size;
}

bool is_interface_cell(double vof) { return vof >= kInterfaceEps && vof <= 1.0 - kInterfaceEps; }

namespace {

// 3-point stencil for first and second derivatives at offset 0 along one axis.
struct AxisStencil {
  std::array<int, 3> offset{};
  std::array<double, 3> d1{};
  std::array<double, 3> d2{};
  int size = 3;
};

AxisStencil axis_stencil(int idx, int n, double h) {
  AxisStencil s;
  if (n == 1) {
    s.size = 1;
    s.offset = {0, 0, 0};
    return s;
  }
  if (n == 2) {
    s.size = 2;
    const int o = idx == 0 ? 1 : -1;
    s.offset = {0, o, 0};
    s.d1 = {-o / h, o / h, 0.0};
    return s;
  }
  const double h2 = h * h;
  s.d2 = {1.0 / h2, -2.0 / h2, 1.0 / h2};
  if (idx == 0) {
    s.offset = {0, 1, 2};
    s.d1 = {-1.5 / h, 2.0 / h, -0.5 / h};
  } else if (idx == n - 1) {
    s.offset = {-2, -1, 0};
    s.d1 = {0.5 / h, -2.0 / h, 1.5 / h};
  } else {
    s.offset = {-1, 0, 1};
    s.d1 = {-0.5 / h, 0.0, 0.5 / h};
  }
  return s;
}

SurfacePolynomial fit_cartesian(std::span<const double> phi, const Mesh& mesh, int cell) {
  const CartesianGrid& g = mesh.grid();
  const int dim = mesh.dimension();
  const auto ijk = g.ijk(cell);
  std::array<AxisStencil, 3> st;
  for (int d = 0; d < dim; ++d)
    st[static_cast<std::size_t>(d)] =
        axis_stencil(ijk[static_cast<std::size_t>(d)], g.counts[static_cast<std::size_t>(d)], g.spacing[d]);

  auto value = [&](int d1, int o1, int d2, int o2) {
    std::array<int, 3> p = ijk;
    p[static_cast<std::size_t>(d1)] += o1;
    if (d2 >= 0) p[static_cast<std::size_t>(d2)] += o2;
    return phi[static_cast<std::size_t>(g.index(p[0], p[1], p[2]))];
  };

  SurfacePolynomial poly;
  poly.cell = cell;
  poly.center = mesh.cell(cell).centroid;
  poly.a[0] = phi[static_cast<std::size_t>(cell)];
  for (int d = 0; d < dim; ++d) {
    const AxisStencil& s = st[static_cast<std::size_t>(d)];
    double first = 0.0;
    double second = 0.0;
    for (int k = 0; k < s.size; ++k) {
      const double v = value(d, s.offset[static_cast<std::size_t>(k)], -1, 0);
      first += s.d1[static_cast<std::size_t>(k)] * v;
      second += s.d2[static_cast<std::size_t>(k)] * v;
    }
    poly.a[static_cast<std::size_t>(1 + d)] = first;
    poly.a[static_cast<std::size_t>(4 + d)] = 0.5 * second;
  }
  // Mixed terms: tensor product of the first-derivative stencils.
  const std::array<std::array<int, 3>, 3> mixed{{{0, 1, 7}, {0, 2, 8}, {1, 2, 9}}};
  for (const auto& [da, db, slot] : mixed) {
    if (db >= dim) continue;
    const AxisStencil& sa = st[static_cast<std::size_t>(da)];
    const AxisStencil& sb = st[static_cast<std::size_t>(db)];
    double v = 0.0;
    for (int ka = 0; ka < sa.size; ++ka)
      for (int kb = 0; kb < sb.size; ++kb) {
        const double w = sa.d1[static_cast<std::size_t>(ka)] * sb.d1[static_cast<std::size_t>(kb)];
        if (w != 0.0) v += w * value(da, sa.offset[static_cast<std::size_t>(ka)], db, sb.offset[static_cast<std::size_t>(kb)]);
      }
    poly.a[static_cast<std::size_t>(slot)] = v;
  }
  return poly;
}

SurfacePolynomial fit_unstructured(std::span<const double> phi, const Mesh& mesh, int cell) {
  if (mesh.dimension() != 2) throw ConfigError("unstructured fitting is two-dimensional only");
  const Cell& c = mesh.cell(cell);
  const auto neighbors = mesh.vertex_neighbors(cell);
  const double h = c.size;
  const double phi_c = phi[static_cast<std::size_t>(cell)];

  SurfacePolynomial poly;
  poly.cell = cell;
  poly.center = c.centroid;
  poly.a[0] = phi_c;

  const auto rows = static_cast<Eigen::Index>(neighbors.size());
  Eigen::MatrixXd A(rows, 5);
  Eigen::VectorXd b(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const int j = neighbors[static_cast<std::size_t>(r)];
    const Vec3 X = mesh.cell(j).centroid - c.centroid;
    const double w = 1.0 / norm(X);  // row scaling for weights 1/d^2
    const double u = X.x / h;
    const double v = X.y / h;
    A.row(r) << w * u, w * v, w * u * u, w * v * v, w * u * v;
    b(r) = w * (phi[static_cast<std::size_t>(j)] - phi_c);
  }

  if (rows >= 6) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(1e-10);
    if (qr.rank() == 5) {
      const Eigen::VectorXd x = qr.solve(b);
      poly.a[1] = x(0) / h;
      poly.a[2] = x(1) / h;
      poly.a[4] = x(2) / (h * h);
      poly.a[5] = x(3) / (h * h);
      poly.a[7] = x(4) / (h * h);
      return poly;
    }
  }
  poly.linear_fallback = true;
  if (rows >= 2) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A.leftCols(2));
    qr.setThreshold(1e-10);
    if (qr.rank() == 2) {
      const Eigen::VectorXd x = qr.solve(b);
      poly.a[1] = x(0) / h;
      poly.a[2] = x(1) / h;
    }
  }
  return poly;
}

}  // namespace

SurfacePolynomial fit_polynomial(std::span<const double> phi, const Mesh& mesh, int cell) {
  return mesh.is_cartesian() ? fit_cartesian(phi, mesh, cell) : fit_unstructured(phi, mesh, cell);
}

ShiftResult solve_scaled_shift(std::span<const double> beta_p, std::span<const double> weights, double vof,
                               NewtonTrace* trace) {
  if (!(vof > 0.0 && vof < 1.0)) throw SolverError("shift solve needs a volume fraction strictly inside (0, 1)");
  if (beta_p.empty() || beta_p.size() != weights.size()) throw SolverError("shift solve needs matching points and weights");

  const double gamma = -*std::min_element(beta_p.begin(), beta_p.end()) + 1e-8;
  // With A_g = tanh(a_g) and D = tanh(s - gamma), work with m_g = 1 - A_g and E = D + 1 so
  // that roots near D = -1 keep full relative precision.
  thread_local std::vector<double> m;
  m.resize(beta_p.size());
  for (std::size_t g = 0; g < beta_p.size(); ++g) {
    const double a = std::min(beta_p[g] + gamma, 300.0);
    m[g] = 2.0 / (1.0 + std::exp(2.0 * a));
  }

  auto evaluate = [&](double E, double& derivative) {
    double f = -2.0 * vof;
    derivative = 0.0;
    for (std::size_t g = 0; g < m.size(); ++g) {
      const double den = E + m[g] * (1.0 - E);
      f += weights[g] * E * (2.0 - m[g]) / den;
      derivative += weights[g] * (m[g] / den) * ((2.0 - m[g]) / den);
    }
    return f;
  };

  double E = 0.0;
  double fp = 0.0;
  double f = evaluate(E, fp);
  if (trace) {
    trace->d.assign(1, E - 1.0);
    trace->f.assign(1, f);
  }
  int iterations = 0;
  while (std::abs(f) > kNewtonTolerance) {
    if (iterations == kNewtonMaxIterations) throw SolverError("Newton shift solve did not converge in 100 iterations");
    const double next = E - f / fp;
    if (!(next >= 0.0 && next <= 2.0)) throw SolverError("Newton iterate left [-1, 1]");
    E = next;
    f = evaluate(E, fp);
    ++iterations;
    if (trace) {
      trace->d.push_back(E - 1.0);
      trace->f.push_back(f);
    }
  }
  if (!(E > 0.0 && E < 2.0)) throw SolverError("shift root at D = +-1; volume fraction is numerically 0 or 1");
  return {gamma + 0.5 * std::log(E / (2.0 - E)), iterations};
}

int solve_interface_shift(SurfacePolynomial& poly, double beta, double vof, std::span<const Vec3> local_points,
                          std::span<const double> weights, NewtonTrace* trace) {
  if (!is_interface_cell(vof)) throw SolverError("shift solve called on a non-interface cell");
  thread_local std::vector<double> bp;
  bp.resize(local_points.size());
  for (std::size_t g = 0; g < local_points.size(); ++g) bp[g] = beta * poly.eval_local(local_points[g]);
  const ShiftResult r = solve_scaled_shift(bp, weights, vof, trace);
  poly.beta = beta;
  poly.shift = r.scaled_shift / beta;
  return r.iterations;
}

double thinc_value(const SurfacePolynomial& poly, const Vec3& x) {
  return 0.5 * (1.0 + std::tanh(poly.beta * poly.psi(x)));
}

// atanh(2h - 1) = log(h / (1 - h)) / 2. Clamping h and 1 - h separately keeps both ends exact.
double inverse_scale(double h, double beta) {
  const double inside = std::max(h, kScaleClamp);
  const double outside = std::max(1.0 - h, kScaleClamp);
  return 0.5 * std::log(inside / outside) / beta;
}

double scale_bound(double beta) { return inverse_scale(1.0, beta); }

double level_set_value(const SurfacePolynomial& poly, const Vec3& x) {
  const double bound = scale_bound(poly.beta);
  return std::clamp(poly.psi(x), -bound, bound);
}

}  // namespace thinc
