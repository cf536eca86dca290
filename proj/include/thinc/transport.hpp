#pragma once

#include <array>
#include <span>
#include <vector>

#include "thinc/mesh.hpp"
#include "thinc/quadrature.hpp"
#include "thinc/thinc.hpp"
#include "thinc/velocity.hpp"

namespace thinc {

enum class ReinitFrequency { per_substep, per_step };

/// Shu-Osher weights: stage k forms alpha_k u^n + (1 - alpha_k)(u^(k) + L(u^(k))).
inline constexpr std::array<double, 3> kRk3Alpha{0.0, 0.75, 1.0 / 3.0};
/// Stage time offsets in units of dt.
inline constexpr std::array<double, 3> kRk3StageTime{0.0, 1.0, 0.5};

struct TransportOptions {
  TriangleRule rule = TriangleRule::gp6;
  ReinitFrequency reinit = ReinitFrequency::per_substep;
  /// Steepness; <= 0 selects 6 / (mean cell size).
  double beta = 0.0;
};

struct StepState {
  double t = 0.0;
  double dt = 0.0;
  std::vector<double> vof;
  std::vector<double> phi;
  /// Index into `polys` for interface cells, -1 elsewhere.
  std::vector<int> poly_index;
  std::vector<SurfacePolynomial> polys;
};

/// Running totals collected while stepping.
struct TransportStats {
  long newton_solves = 0;
  long newton_iterations = 0;
  /// Sum of |clipped amount| * cell volume.
  double clipped_mass = 0.0;
  /// Largest excursion of a stage value outside [0, 1] before clipping.
  double max_excursion = 0.0;
  int linear_fallbacks = 0;
};

/// Midpoint-rule backward trace from x over [t, t + dt].
Vec3 departure_point(CaseId id, const Vec3& x, double t, double dt);

/// CFL * min cell size / max speed over face Gauss points at time t, capped by max_dt.
double compute_dt(const Mesh& mesh, CaseId id, double t, double cfl, double max_dt);

class Transport {
 public:
  Transport(const Mesh& mesh, CaseId id, TransportOptions options = {});

  double beta() const { return beta_; }
  const Mesh& mesh() const { return mesh_; }
  CaseId case_id() const { return case_; }
  const TransportStats& stats() const { return stats_; }
  void reset_stats() { stats_ = {}; }

  /// Fits and shift-solves every interface cell of the state.
  void reconstruct(StepState& state);

  /// Euler increment of one stage: returns L with vof_new = vof + L.
  std::vector<double> vof_increment(const StepState& state, double stage_time, double dt) const;
  /// vof + increment, unclipped.
  std::vector<double> vof_substep(const StepState& state, double stage_time, double dt) const;

  /// Semi-Lagrangian phi for band cells; other cells keep their value.
  std::vector<double> semi_lagrangian_phi_update(const StepState& state, double stage_time, double dt) const;

  /// Cells within graph distance 2 of an interface cell.
  std::vector<char> interface_band(const StepState& state) const;

  /// Clips to [0, 1] and adds the removed amount to the tally.
  void clip(std::span<double> vof);

  /// Reinitializes phi with the interface cells of `vof` frozen.
  void reinitialize_phi(std::span<const double> vof, std::span<double> phi) const;

  /// Advances state.vof, state.phi and state.t by state.dt.
  void rk3_step(StepState& state);

  const MappedQuadrature& cell_rule(int cell, MappedQuadrature& scratch) const;

 private:
  const Mesh& mesh_;
  CaseId case_;
  TransportOptions options_;
  double beta_;
  MappedQuadrature cartesian_rule_;
  /// Face Gauss-point normal velocities at unit time factor, `face_stride_` per face, already
  /// shifted so their quadrature matches the exact face flux.
  std::vector<double> face_un_;
  int face_stride_ = 0;
  TransportStats stats_;
};

}  // namespace thinc
