#pragma once

#include <span>
#include <vector>

#include "thinc/mesh.hpp"

namespace thinc {

struct ReinitStats {
  int iterations = 0;
  /// FSM: last max update; iterative: last eikonal residual.
  double residual = 0.0;
};

/// Fast sweeping on a Cartesian mesh. Frozen cells keep their values; every other cell takes the
/// sign of its incoming phi (zero counts as positive) and the Godunov distance from the frozen band.
ReinitStats reinit_fsm(const Mesh& mesh, std::span<double> phi, std::span<const char> frozen);

/// Pseudo-time iteration of phi_t = S(phi0)(1 - |grad phi|) on a triangular mesh.
ReinitStats reinit_iterative(const Mesh& mesh, std::span<double> phi, std::span<const char> frozen,
                             int max_iterations = 200, double tolerance = 0.05);

/// Dispatches on mesh kind.
ReinitStats reinitialize(const Mesh& mesh, std::span<double> phi, std::span<const char> frozen);

}  // namespace thinc
