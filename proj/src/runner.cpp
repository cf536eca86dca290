#include "thinc/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "thinc/errors.hpp"
#include "thinc/velocity.hpp"

namespace thinc {

namespace {

using nlohmann::json;

template <class T>
T get_field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

std::string tag(const RunConfig& c) {
  std::string mesh = c.mesh.rfind("msh:", 0) == 0 ? "msh" : c.mesh;
  return c.case_name + "_" + mesh + "_N" + std::to_string(c.n);
}

[[noreturn]] void rethrow_with_context(const Error& e, const std::string& context) {
  const std::string what = context + ": " + e.what();
  const std::string category = e.category();
  if (category == "config") throw ConfigError(what);
  if (category == "io") throw IoError(what);
  if (category == "parse") throw ParseError(what, 0);
  throw SolverError(what);
}

}  // namespace

RunConfig config_from_json(const std::string& text, RunConfig c) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON config: ") + e.what(), 0);
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "case") c.case_name = get_field<std::string>(j, "case");
    else if (key == "mesh") c.mesh = get_field<std::string>(j, "mesh");
    else if (key == "n") c.n = get_field<int>(j, "n");
    else if (key == "cfl") c.cfl = get_field<double>(j, "cfl");
    else if (key == "gp") c.gp = get_field<int>(j, "gp");
    else if (key == "beta") c.beta = get_field<double>(j, "beta");
    else if (key == "periods") c.periods = get_field<double>(j, "periods");
    else if (key == "reinit") c.reinit = get_field<std::string>(j, "reinit");
    else if (key == "out") c.out = get_field<std::string>(j, "out");
    else if (key == "vtk-every") c.vtk_every = get_field<int>(j, "vtk-every");
    else if (key == "max-dt") c.max_dt = get_field<double>(j, "max-dt");
    else if (key == "steps") c.steps = get_field<int>(j, "steps");
    else if (key == "study") c.study = get_field<std::vector<int>>(j, "study");
    else throw ConfigError("unknown config field '" + key + "'");
  }
  return c;
}

void validate(const RunConfig& c) {
  parse_case(c.case_name);
  if (c.mesh != "cartesian" && c.mesh != "tri-internal" && c.mesh.rfind("msh:", 0) != 0)
    throw ConfigError("mesh must be cartesian, tri-internal or msh:<path>");
  if (c.n < 2) throw ConfigError("n must be at least 2");
  if (c.gp != 6 && c.gp != 12) throw ConfigError("gp must be 6 or 12");
  if (c.reinit != "per-substep" && c.reinit != "per-step") throw ConfigError("reinit must be per-substep or per-step");
  if (!(c.periods > 0.0)) throw ConfigError("periods must be positive");
  if (c.vtk_every < 0) throw ConfigError("vtk-every must be nonnegative");
  if (!std::isfinite(c.cfl) || !std::isfinite(c.beta) || !std::isfinite(c.max_dt))
    throw ConfigError("cfl, beta and max-dt must be finite");
  for (int n : c.study)
    if (n < 2) throw ConfigError("study resolutions must be at least 2");
}

Mesh make_mesh(const RunConfig& c) {
  const BenchmarkCase& bc = benchmark_case(parse_case(c.case_name));
  if (c.mesh == "cartesian") {
    if (bc.dimension == 2) {
      const std::array<double, 2> ext{bc.extents.x, bc.extents.y};
      const std::array<int, 2> cells{c.n, c.n};
      return build_cartesian(ext, cells);
    }
    const std::array<double, 3> ext{bc.extents.x, bc.extents.y, bc.extents.z};
    // Cell counts scale with the extents: N x N x 2N on the [1, 1, 2] box.
    const std::array<int, 3> cells{c.n, static_cast<int>(std::lround(c.n * bc.extents.y / bc.extents.x)),
                                   static_cast<int>(std::lround(c.n * bc.extents.z / bc.extents.x))};
    return build_cartesian(ext, cells);
  }
  if (bc.dimension != 2) throw ConfigError("triangular meshes are available for 2D cases only");
  if (c.mesh == "tri-internal") {
    const std::array<double, 2> ext{bc.extents.x, bc.extents.y};
    return build_triangular(ext, c.n);
  }
  return load_gmsh(c.mesh.substr(4));
}

RunResult run(const RunConfig& config, std::ostream* log) {
  validate(config);
  const CaseId id = parse_case(config.case_name);
  const BenchmarkCase& bc = benchmark_case(id);
  const auto wall_start = std::chrono::steady_clock::now();

  RunResult result{{}, make_mesh(config), {}, {}, {}};
  const Mesh& mesh = result.mesh;
  TransportOptions options;
  options.rule = config.gp == 12 ? TriangleRule::gp12 : TriangleRule::gp6;
  options.reinit = config.reinit == "per-step" ? ReinitFrequency::per_step : ReinitFrequency::per_substep;
  options.beta = config.beta;
  Transport transport(mesh, id, options);

  InitialFields init = initial_fields(id, mesh);
  result.exact = init.vof;
  StepState& state = result.state;
  state.vof = std::move(init.vof);
  state.phi = std::move(init.phi);

  const double cfl = config.cfl > 0.0 ? config.cfl : bc.default_cfl;
  const double max_dt = config.max_dt > 0.0 ? config.max_dt : std::numeric_limits<double>::infinity();
  // The cosine factors peak at t = 0, so this step satisfies the CFL bound for the whole run.
  const double dt0 = compute_dt(mesh, id, 0.0, cfl, max_dt);
  const double duration = config.periods * bc.period;
  int steps = 0;
  if (config.steps >= 0) {
    steps = config.steps;
    state.dt = dt0;
  } else {
    steps = static_cast<int>(std::ceil(duration / dt0 - 1e-9));
    state.dt = duration / steps;
  }

  const std::filesystem::path out_dir(config.out);
  if (config.write_files) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());
  }
  std::ofstream history;
  if (config.write_files) {
    history.open(out_dir / ("history_" + tag(config) + ".csv"));
    if (!history) throw IoError("cannot open history file in " + out_dir.string());
    history << std::setprecision(17) << "step,t,vof_drift,clipped_mass,mean_newton_iterations\n";
  }
  auto snapshot = [&](int step) {
    const std::string stem = tag(config) + "_" + std::to_string(step);
    write_vtk(out_dir / (stem + ".vtk"), mesh, {{"vof", state.vof}, {"phi", state.phi}});
    transport.reconstruct(state);
    write_psi_vtk(out_dir / (stem + "_psi.vtk"), extract_psi(state.polys, mesh));
  };

  const double mass0 = total_vof(mesh, state.vof);
  if (log)
    *log << "run " << tag(config) << ": cells " << mesh.cell_count() << ", beta " << transport.beta() << ", dt "
         << state.dt << ", steps " << steps << '\n';
  try {
    if (config.write_files && config.vtk_every > 0) snapshot(0);
    for (int step = 1; step <= steps; ++step) {
      const long solves_before = transport.stats().newton_solves;
      const long iters_before = transport.stats().newton_iterations;
      transport.rk3_step(state);
      const long solves = transport.stats().newton_solves - solves_before;
      const double mean_iter =
          solves > 0 ? static_cast<double>(transport.stats().newton_iterations - iters_before) / solves : 0.0;
      const double drift = std::abs(total_vof(mesh, state.vof) - mass0) / mass0;
      if (history.is_open())
        history << step << ',' << state.t << ',' << drift << ',' << transport.stats().clipped_mass / mass0 << ','
                << mean_iter << '\n';
      if (config.write_files && config.vtk_every > 0 && step % config.vtk_every == 0) snapshot(step);
      if (log && (step % std::max(1, steps / 10) == 0 || step == steps))
        *log << "  step " << step << "/" << steps << " t " << state.t << " drift " << drift << " newton " << mean_iter
             << '\n';
    }
    transport.reconstruct(state);
  } catch (const Error& e) {
    std::ostringstream ctx;
    ctx << "case " << config.case_name << ", t = " << state.t;
    rethrow_with_context(e, ctx.str());
  }

  ErrorReport& r = result.report;
  r.case_name = config.case_name;
  r.mesh_kind = config.mesh.rfind("msh:", 0) == 0 ? "msh" : config.mesh;
  r.n = config.n;
  r.steps = steps;
  r.dt = state.dt;
  r.e_l1 = error_l1(state.vof, result.exact, mesh);
  r.e_r = error_relative(state.vof, result.exact, mesh);
  r.e_sd = error_symmetric_difference(state.vof, result.exact, mesh, state.poly_index, state.polys,
                                      [id](const Vec3& x) { return initial_signed_distance(id, x); });
  r.vof_drift = std::abs(total_vof(mesh, state.vof) - mass0) / mass0;
  r.clipped_mass = transport.stats().clipped_mass / mass0;
  // Reconstructions of the initial state and of the final diagnostic pass are included.
  r.mean_newton_iterations = transport.stats().newton_solves > 0
                                 ? static_cast<double>(transport.stats().newton_iterations) / transport.stats().newton_solves
                                 : 0.0;
  result.stats = transport.stats();

  if (config.write_files) {
    const std::string stem = tag(config) + "_final";
    write_vtk(out_dir / (stem + ".vtk"), mesh, {{"vof", state.vof}, {"phi", state.phi}, {"exact", result.exact}});
    write_psi_vtk(out_dir / (stem + "_psi.vtk"), extract_psi(state.polys, mesh));
    write_csv(out_dir / ("report_" + tag(config) + ".csv"), std::span<const ErrorReport>(&r, 1));
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  if (log)
    *log << "  E(L1) " << r.e_l1 << " E_r " << r.e_r << " E_sd " << r.e_sd << " drift " << r.vof_drift << " clipped "
         << r.clipped_mass << " newton " << r.mean_newton_iterations << " (" << r.seconds << " s)\n";
  return result;
}

std::vector<ErrorReport> convergence_study(const RunConfig& config, const std::vector<int>& ns, std::ostream* log) {
  if (ns.size() < 2) throw ConfigError("a convergence study needs at least two resolutions");
  std::vector<ErrorReport> reports;
  for (int n : ns) {
    RunConfig c = config;
    c.n = n;
    reports.push_back(run(c, log).report);
  }
  if (config.write_files) {
    std::filesystem::create_directories(config.out);
    write_csv(std::filesystem::path(config.out) / "study.csv", reports);
  }
  if (log)
    for (std::size_t i = 1; i < reports.size(); ++i)
      *log << "order N=" << reports[i - 1].n << "->" << reports[i].n << ": E(L1) "
           << convergence_order(reports[i - 1].e_l1, reports[i].e_l1, reports[i - 1].n, reports[i].n) << '\n';
  return reports;
}

}  // namespace thinc
