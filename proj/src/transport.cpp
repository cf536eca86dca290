#include "thinc/transport.hpp"

#include <algorithm>
#include <cmath>

#include "thinc/errors.hpp"
#include "thinc/reinit.hpp"

namespace thinc {

namespace {

// Gauss points of a face in global coordinates; returns the count.
int face_points(const Mesh& mesh, const Face& f, std::array<Vec3, 9>& points, std::array<double, 9>& weights) {
  const auto nodes = mesh.nodes();
  const Vec3& p0 = nodes[static_cast<std::size_t>(f.nodes[0])];
  const Vec3& p1 = nodes[static_cast<std::size_t>(f.nodes[1])];
  if (f.node_count == 2) {
    const QuadratureRule& r = gauss_line_rule(2);
    for (std::size_t g = 0; g < 2; ++g) {
      points[g] = p0 + r.points[g].x * (p1 - p0);
      weights[g] = r.weights[g];
    }
    return 2;
  }
  const Vec3& p3 = nodes[static_cast<std::size_t>(f.nodes[3])];
  const QuadratureRule& r = quad_rule();
  for (std::size_t g = 0; g < 9; ++g) {
    points[g] = p0 + r.points[g].x * (p1 - p0) + r.points[g].y * (p3 - p0);
    weights[g] = r.weights[g];
  }
  return 9;
}

}  // namespace

Vec3 departure_point(CaseId id, const Vec3& x, double t, double dt) {
  const Vec3 mid = x - (0.5 * dt) * velocity_at(id, x, t + dt);
  return x - dt * velocity_at(id, mid, t + 0.5 * dt);
}

double compute_dt(const Mesh& mesh, CaseId id, double t, double cfl, double max_dt) {
  if (!(cfl > 0.0)) throw ConfigError("CFL number must be positive");
  double max_speed = 0.0;
  std::array<Vec3, 9> points;
  std::array<double, 9> weights;
  for (const Face& f : mesh.faces()) {
    const int count = face_points(mesh, f, points, weights);
    for (int g = 0; g < count; ++g) max_speed = std::max(max_speed, norm(velocity_at(id, points[static_cast<std::size_t>(g)], t)));
  }
  const double dt = cfl * mesh.min_cell_size() / std::max(max_speed, 1e-12);
  return std::min(dt, max_dt);
}

Transport::Transport(const Mesh& mesh, CaseId id, TransportOptions options)
    : mesh_(mesh), case_(id), options_(options) {
  if (mesh.dimension() != benchmark_case(id).dimension)
    throw ConfigError("case " + benchmark_case(id).name + " does not match the mesh dimension");
  beta_ = options.beta > 0.0 ? options.beta : beta_from_cell(mesh.mean_cell_size());
  if (mesh.is_cartesian()) cartesian_rule_ = cell_quadrature(mesh, 0, options.rule);

  // Every benchmark field is a fixed field times time_factor(t), which is 1 at t = 0.
  face_stride_ = mesh.dimension() == 3 ? 9 : 2;
  face_un_.assign(static_cast<std::size_t>(mesh.face_count() * face_stride_), 0.0);
  std::array<Vec3, 9> points;
  std::array<double, 9> weights;
  for (int fid = 0; fid < mesh.face_count(); ++fid) {
    const Face& f = mesh.face(fid);
    const int count = face_points(mesh, f, points, weights);
    double* un = &face_un_[static_cast<std::size_t>(fid * face_stride_)];
    double quadrature = 0.0;
    for (int g = 0; g < count; ++g) {
      const auto ug = static_cast<std::size_t>(g);
      un[g] = dot(velocity_at(id, points[ug], 0.0), f.normal);
      quadrature += weights[ug] * un[g];
    }
    // Shift the point values so the face flux matches the exact, discretely solenoidal one.
    const double correction = face_flux(id, mesh, fid, 0.0) / f.area - quadrature;
    for (int g = 0; g < count; ++g) un[g] += correction;
  }
}

const MappedQuadrature& Transport::cell_rule(int cell, MappedQuadrature& scratch) const {
  if (mesh_.is_cartesian()) return cartesian_rule_;
  scratch = cell_quadrature(mesh_, cell, options_.rule);
  return scratch;
}

void Transport::reconstruct(StepState& state) {
  const int n = mesh_.cell_count();
  state.poly_index.assign(static_cast<std::size_t>(n), -1);
  state.polys.clear();
  MappedQuadrature scratch;
  for (int i = 0; i < n; ++i) {
    const double h = state.vof[static_cast<std::size_t>(i)];
    if (!is_interface_cell(h)) continue;
    SurfacePolynomial poly = fit_polynomial(state.phi, mesh_, i);
    if (poly.linear_fallback) ++stats_.linear_fallbacks;
    const MappedQuadrature& rule = cell_rule(i, scratch);
    int iterations = 0;
    try {
      iterations = solve_interface_shift(poly, beta_, h, rule.points, rule.weights);
    } catch (const SolverError& e) {
      throw SolverError(std::string(e.what()) + " (cell " + std::to_string(i) + ", t = " + std::to_string(state.t) + ")");
    }
    ++stats_.newton_solves;
    stats_.newton_iterations += iterations;
    state.poly_index[static_cast<std::size_t>(i)] = static_cast<int>(state.polys.size());
    state.polys.push_back(poly);
  }
}

std::vector<double> Transport::vof_increment(const StepState& state, double stage_time, double dt) const {
  const int n = mesh_.cell_count();
  std::vector<double> flux(static_cast<std::size_t>(n), 0.0);
  std::vector<double> divergence(static_cast<std::size_t>(n), 0.0);
  std::array<Vec3, 9> points;
  std::array<double, 9> weights;
  const auto& vof = state.vof;
  const double factor = time_factor(case_, stage_time);

  auto upwind_value = [&](int cell, const Vec3& x) {
    const int p = state.poly_index[static_cast<std::size_t>(cell)];
    return p >= 0 ? thinc_value(state.polys[static_cast<std::size_t>(p)], x) : vof[static_cast<std::size_t>(cell)];
  };

  for (int fid = 0; fid < mesh_.face_count(); ++fid) {
    const Face& f = mesh_.face(fid);
    const int o = f.owner;
    const int nb = f.neighbor;
    // Both sides empty: the fluxed value and the divergence weight are zero.
    if (vof[static_cast<std::size_t>(o)] <= 0.0 && (nb < 0 || vof[static_cast<std::size_t>(nb)] <= 0.0)) continue;
    const int count = face_points(mesh_, f, points, weights);
    const double* un = &face_un_[static_cast<std::size_t>(fid * face_stride_)];
    double fh = 0.0;
    double fu = 0.0;
    for (int g = 0; g < count; ++g) {
      const auto ug = static_cast<std::size_t>(g);
      const double u = factor * un[g];
      const int up = (u > 0.0 || nb < 0) ? o : nb;
      fh += weights[ug] * u * upwind_value(up, points[ug]);
      fu += weights[ug] * u;
    }
    fh *= f.area;
    fu *= f.area;
    flux[static_cast<std::size_t>(o)] += fh;
    divergence[static_cast<std::size_t>(o)] += fu;
    if (nb >= 0) {
      flux[static_cast<std::size_t>(nb)] -= fh;
      divergence[static_cast<std::size_t>(nb)] -= fu;
    }
  }
  std::vector<double> inc(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    inc[ui] = dt / mesh_.cell(i).volume * (vof[ui] * divergence[ui] - flux[ui]);
  }
  return inc;
}

std::vector<double> Transport::vof_substep(const StepState& state, double stage_time, double dt) const {
  std::vector<double> out = vof_increment(state, stage_time, dt);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += state.vof[i];
  return out;
}

std::vector<char> Transport::interface_band(const StepState& state) const {
  const int n = mesh_.cell_count();
  std::vector<char> band(static_cast<std::size_t>(n), 0);
  std::vector<int> frontier;
  for (int i = 0; i < n; ++i)
    if (is_interface_cell(state.vof[static_cast<std::size_t>(i)])) {
      band[static_cast<std::size_t>(i)] = 1;
      frontier.push_back(i);
    }
  for (int layer = 0; layer < 2; ++layer) {
    std::vector<int> next;
    for (int c : frontier)
      for (int j : mesh_.vertex_neighbors(c))
        if (!band[static_cast<std::size_t>(j)]) {
          band[static_cast<std::size_t>(j)] = 1;
          next.push_back(j);
        }
    frontier.swap(next);
  }
  return band;
}

std::vector<double> Transport::semi_lagrangian_phi_update(const StepState& state, double stage_time, double dt) const {
  std::vector<double> out(state.phi);
  const std::vector<char> band = interface_band(state);
  const double bound = scale_bound(beta_);
  for (int i = 0; i < mesh_.cell_count(); ++i) {
    if (!band[static_cast<std::size_t>(i)]) continue;
    const Vec3 xd = departure_point(case_, mesh_.cell(i).centroid, stage_time, dt);
    const int dep = mesh_.locate_cell(xd, i).cell;
    const int p = state.poly_index[static_cast<std::size_t>(dep)];
    double value;
    if (p >= 0)
      value = level_set_value(state.polys[static_cast<std::size_t>(p)], xd);
    else
      value = state.vof[static_cast<std::size_t>(dep)] > 0.5 ? bound : -bound;
    out[static_cast<std::size_t>(i)] = value;
  }
  return out;
}

void Transport::clip(std::span<double> vof) {
  for (int i = 0; i < mesh_.cell_count(); ++i) {
    double& v = vof[static_cast<std::size_t>(i)];
    const double excess = v < 0.0 ? -v : (v > 1.0 ? v - 1.0 : 0.0);
    if (excess == 0.0) continue;
    stats_.max_excursion = std::max(stats_.max_excursion, excess);
    stats_.clipped_mass += excess * mesh_.cell(i).volume;
    v = std::clamp(v, 0.0, 1.0);
  }
}

void Transport::reinitialize_phi(std::span<const double> vof, std::span<double> phi) const {
  const std::size_t n = phi.size();
  // Cells still carrying the out-of-reach value are rebuilt like any non-interface cell.
  const double sentinel = 0.999 * scale_bound(beta_);
  std::vector<char> frozen(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    frozen[i] = is_interface_cell(vof[i]) && std::abs(phi[i]) < sentinel;
    if (!frozen[i]) phi[i] = vof[i] > 0.5 ? std::abs(phi[i]) : -std::abs(phi[i]);
  }
  reinitialize(mesh_, phi, frozen);
}

void Transport::rk3_step(StepState& state) {
  const std::vector<double> vof_n = state.vof;
  const std::vector<double> phi_n = state.phi;
  const double t = state.t;
  const double dt = state.dt;
  StepState stage;
  stage.t = t;
  stage.dt = dt;
  stage.vof = state.vof;
  stage.phi = state.phi;
  for (std::size_t k = 0; k < 3; ++k) {
    const double tk = t + kRk3StageTime[k] * dt;
    stage.t = tk;
    reconstruct(stage);
    const std::vector<double> inc = vof_increment(stage, tk, dt);
    const std::vector<double> phi_sl = semi_lagrangian_phi_update(stage, tk, dt);
    const double a = kRk3Alpha[k];
    for (std::size_t i = 0; i < vof_n.size(); ++i) {
      stage.vof[i] = a * vof_n[i] + (1.0 - a) * (stage.vof[i] + inc[i]);
      stage.phi[i] = a * phi_n[i] + (1.0 - a) * phi_sl[i];
    }
    clip(stage.vof);
    if (options_.reinit == ReinitFrequency::per_substep || k == 2) reinitialize_phi(stage.vof, stage.phi);
  }
  state.vof = std::move(stage.vof);
  state.phi = std::move(stage.phi);
  state.t = t + dt;
  state.poly_index.clear();
  state.polys.clear();
}

}  // namespace thinc
