#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "thinc/geometry.hpp"
#include "thinc/mesh.hpp"

namespace thinc {

enum class CaseId { zalesak, vortex2d, deform3d, shear3d };

struct BenchmarkCase {
  CaseId id = CaseId::zalesak;
  std::string name;
  int dimension = 2;
  Vec3 extents;
  /// Duration of one period (one revolution for zalesak).
  double period = 0.0;
  double default_cfl = 0.25;
  Vec3 center;
  double radius = 0.15;
  /// Slot of the zalesak disk: |x - center.x| <= slot_half_width and y <= slot_top.
  double slot_half_width = 0.0;
  double slot_top = 0.0;
};

const BenchmarkCase& benchmark_case(CaseId id);
CaseId parse_case(std::string_view name);

/// Cosine reversal factor (1 for the steady rotation).
double time_factor(CaseId id, double t);
Vec3 velocity_at(CaseId id, const Vec3& x, double t);

/// Stream function of the 2D cases: u = dpsi/dy, v = -dpsi/dx.
double stream_function(CaseId id, const Vec3& x, double t);
/// Vector potential of the 3D cases: u = curl A.
Vec3 vector_potential(CaseId id, const Vec3& x, double t);

/// Exact volumetric flux of the velocity through a face along its stored normal,
/// computed from the stream function or the circulation of the vector potential.
/// Per-cell sums of these fluxes vanish to roundoff.
double face_flux(CaseId id, const Mesh& mesh, int face, double t);

/// Signed distance to the initial shape, positive inside. For the slotted disk this is the
/// min-composition of the disk and slot distances (exact inside, a lower bound outside).
double initial_signed_distance(CaseId id, const Vec3& x);

/// Cell average of the sharp indicator {sdf > 0}, by recursive subdivision to `depth` levels
/// with leaves decided by the sign at their center.
double subdivision_vof(const Mesh& mesh, int cell, CaseId id, int depth = 6);

struct InitialFields {
  std::vector<double> vof;
  std::vector<double> phi;
};

InitialFields initial_fields(CaseId id, const Mesh& mesh);

}  // namespace thinc
