#pragma once

#include <array>
#include <span>
#include <vector>

#include "thinc/geometry.hpp"
#include "thinc/mesh.hpp"

namespace thinc {

/// Interface-cell threshold on the volume fraction.
inline constexpr double kInterfaceEps = 1e-8;
/// Clamp applied to H before inverse scaling.
inline constexpr double kScaleClamp = 1e-14;
inline constexpr double kNewtonTolerance = 1e-11;
inline constexpr int kNewtonMaxIterations = 100;

/// Quadratic polynomial in local coordinates X = x - center.
/// Coefficient layout: 1, X, Y, Z, X^2, Y^2, Z^2, XY, XZ, YZ.
struct SurfacePolynomial {
  int cell = -1;
  Vec3 center;
  std::array<double, 10> a{};
  double shift = 0.0;
  double beta = 0.0;
  /// Set when the stencil could not support a quadratic fit.
  bool linear_fallback = false;

  double eval_local(const Vec3& X) const {
    return a[0] + a[1] * X.x + a[2] * X.y + a[3] * X.z + a[4] * X.x * X.x + a[5] * X.y * X.y +
           a[6] * X.z * X.z + a[7] * X.x * X.y + a[8] * X.x * X.z + a[9] * X.y * X.z;
  }
  double eval(const Vec3& x) const { return eval_local(x - center); }
  /// PSI value: polynomial plus the conservation shift.
  double psi(const Vec3& x) const { return eval(x) + shift; }
};

double beta_from_cell(double size);

bool is_interface_cell(double vof);

/// Fits the quadratic level-set polynomial of `cell` from cell-center values `phi`.
SurfacePolynomial fit_polynomial(std::span<const double> phi, const Mesh& mesh, int cell);

struct NewtonTrace {
  /// Iterates D_k, starting with D_0 = -1.
  std::vector<double> d;
  /// f(D_k) for each iterate.
  std::vector<double> f;
};

struct ShiftResult {
  /// beta * shift.
  double scaled_shift = 0.0;
  int iterations = 0;
};

/// Solves sum_g w_g * (1 + tanh(bp_g + s)) / 2 = vof for s, where bp_g = beta * P(x_g).
ShiftResult solve_scaled_shift(std::span<const double> beta_p, std::span<const double> weights, double vof,
                               NewtonTrace* trace = nullptr);

/// Sets `poly.shift` so that the quadrature average of the THINC function equals `vof`.
/// `local_points` are quadrature points relative to the polynomial center. Returns the
/// Newton iteration count.
int solve_interface_shift(SurfacePolynomial& poly, double beta, double vof, std::span<const Vec3> local_points,
                          std::span<const double> weights, NewtonTrace* trace = nullptr);

/// THINC function of the cell at global point x.
double thinc_value(const SurfacePolynomial& poly, const Vec3& x);

double inverse_scale(double h, double beta);

/// Largest |phi| produced by inverse_scale for the given beta.
double scale_bound(double beta);

/// Level-set value carried by the cell's THINC function at x: the clamped PSI value,
/// equal to inverse_scale(thinc_value(poly, x), beta) without the round trip through H.
double level_set_value(const SurfacePolynomial& poly, const Vec3& x);

}  // namespace thinc
