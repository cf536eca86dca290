#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "thinc/diagnostics.hpp"
#include "thinc/mesh.hpp"
#include "thinc/transport.hpp"

namespace thinc {

struct RunConfig {
  std::string case_name = "vortex2d";
  /// "cartesian", "tri-internal" or "msh:<path>".
  std::string mesh = "cartesian";
  /// Cells per axis (Cartesian) or nodes per edge (triangular).
  int n = 32;
  /// <= 0 selects the case default.
  double cfl = 0.0;
  /// Triangle quadrature: 6 or 12 points.
  int gp = 6;
  /// <= 0 selects 6 / (mean cell size).
  double beta = 0.0;
  double periods = 1.0;
  std::string reinit = "per-substep";
  std::string out = "out";
  /// Snapshot cadence in steps; 0 writes only the final state.
  int vtk_every = 0;
  /// Upper bound on the time step; <= 0 means none.
  double max_dt = 0.0;
  /// Fixed number of steps; < 0 runs to periods * period.
  int steps = -1;
  std::vector<int> study;
  /// Write CSV/VTK artifacts under `out`.
  bool write_files = true;
};

/// Reads a JSON object whose keys are the CLI flag names (case, mesh, n, cfl, gp, beta, periods,
/// reinit, out, vtk-every, max-dt, steps, study) over `base`.
RunConfig config_from_json(const std::string& text, RunConfig base = {});
void validate(const RunConfig& config);

Mesh make_mesh(const RunConfig& config);

struct RunResult {
  ErrorReport report;
  Mesh mesh;
  StepState state;
  std::vector<double> exact;
  TransportStats stats;
};

/// One benchmark run. Progress lines go to `log` when given.
RunResult run(const RunConfig& config, std::ostream* log = nullptr);

/// Runs every resolution in `ns` (at least two) and writes study.csv.
std::vector<ErrorReport> convergence_study(const RunConfig& config, const std::vector<int>& ns,
                                           std::ostream* log = nullptr);

}  // namespace thinc
