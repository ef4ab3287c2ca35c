#include <fstream>
#include <sstream>

#include "fsikit/errors.hpp"
#include "fsikit/harness.hpp"

namespace fsi {

namespace {

void write_vector(std::ostream& os, const std::string& name,
                  const std::vector<double>& v) {
  os << name << ' ' << v.size();
  for (double x : v) os << ' ' << format_double(x);
  os << '\n';
}

std::vector<double> read_vector(std::istream& is, const std::string& name) {
  std::string tag;
  std::size_t n = 0;
  if (!(is >> tag >> n) || tag != name)
    throw ConfigError("checkpoint: expected vector '" + name + "'");
  std::vector<double> v(n);
  std::string w;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(is >> w)) throw ConfigError("checkpoint: truncated vector '" + name + "'");
    v[i] = parse_double(w);
  }
  return v;
}

double read_number(std::istream& is, const std::string& what) {
  std::string w;
  if (!(is >> w)) throw ConfigError("checkpoint: missing " + what);
  return parse_double(w);
}

}  // namespace

Checkpoint make_checkpoint(const Mesh2D& mesh, const CurveMesh& curve,
                           const PhysicsParams& physics, const SchemeConfig& scheme,
                           const State& state) {
  Checkpoint c;
  c.nx = mesh.nx;
  c.ny = mesh.ny;
  c.x0 = mesh.x0;
  c.y0 = mesh.y0;
  c.x1 = mesh.x1;
  c.y1 = mesh.y1;
  c.n_seg = curve.n_seg;
  c.period = curve.period;
  c.physics = physics;
  c.scheme = scheme;
  c.params = curve.params;
  c.ref_positions.resize(2 * curve.n_seg);
  for (int k = 0; k < curve.n_seg; ++k) {
    c.ref_positions[2 * k] = curve.reference_positions[k].x;
    c.ref_positions[2 * k + 1] = curve.reference_positions[k].y;
  }
  c.state = state;
  return c;
}

Checkpoint make_checkpoint(const Simulation& sim) {
  return make_checkpoint(sim.mesh(), sim.curve(), sim.physics(), sim.scheme(),
                         sim.state());
}

void save_checkpoint(const std::string& path, const Checkpoint& c) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open checkpoint file '" + path + "' for writing");
  os << "fsikit-checkpoint 1\n";
  os << "mesh " << c.nx << ' ' << c.ny << ' ' << format_double(c.x0) << ' '
     << format_double(c.y0) << ' ' << format_double(c.x1) << ' '
     << format_double(c.y1) << '\n';
  os << "curve " << c.n_seg << ' ' << format_double(c.period) << '\n';
  os << "physics " << format_double(c.physics.rho_f) << ' '
     << format_double(c.physics.rho_s) << ' ' << format_double(c.physics.mu) << ' '
     << format_double(c.physics.kappa) << ' ' << format_double(c.physics.gamma)
     << '\n';
  os << "scheme " << to_string(c.scheme.type) << ' ' << c.scheme.extrapolation_order
     << ' ' << format_double(c.scheme.tau) << ' ' << format_double(c.scheme.t_end)
     << ' ' << (c.scheme.linearized ? 1 : 0) << ' '
     << (c.scheme.frozen_geometry ? 1 : 0) << ' ' << (c.scheme.preload ? 1 : 0)
     << '\n';
  os << "time " << format_double(c.state.time) << ' ' << c.state.step << '\n';
  write_vector(os, "params", c.params);
  write_vector(os, "ref_positions", c.ref_positions);
  write_vector(os, "u", c.state.u);
  write_vector(os, "p", c.state.p);
  write_vector(os, "lambda", c.state.lambda);
  write_vector(os, "d", c.state.d);
  write_vector(os, "d_dot", c.state.d_dot);
  write_vector(os, "d_dot_half", c.state.d_dot_half);
  os << "end\n";
  if (!os) throw ConfigError("failed writing checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open checkpoint file '" + path + "'");
  std::string tag;
  int version = 0;
  if (!(is >> tag >> version) || tag != "fsikit-checkpoint" || version != 1)
    throw ConfigError("'" + path + "' is not a version-1 checkpoint");
  Checkpoint c;
  if (!(is >> tag >> c.nx >> c.ny) || tag != "mesh")
    throw ConfigError("checkpoint: malformed mesh line");
  c.x0 = read_number(is, "x0");
  c.y0 = read_number(is, "y0");
  c.x1 = read_number(is, "x1");
  c.y1 = read_number(is, "y1");
  if (!(is >> tag >> c.n_seg) || tag != "curve")
    throw ConfigError("checkpoint: malformed curve line");
  c.period = read_number(is, "period");
  if (!(is >> tag) || tag != "physics")
    throw ConfigError("checkpoint: malformed physics line");
  c.physics.rho_f = read_number(is, "rho_f");
  c.physics.rho_s = read_number(is, "rho_s");
  c.physics.mu = read_number(is, "mu");
  c.physics.kappa = read_number(is, "kappa");
  c.physics.gamma = read_number(is, "gamma");
  std::string type;
  int lin = 0, frozen = 0, preload = 0;
  if (!(is >> tag >> type >> c.scheme.extrapolation_order) || tag != "scheme")
    throw ConfigError("checkpoint: malformed scheme line");
  c.scheme.type = scheme_from_string(type);
  c.scheme.tau = read_number(is, "tau");
  c.scheme.t_end = read_number(is, "t_end");
  if (!(is >> lin >> frozen >> preload))
    throw ConfigError("checkpoint: malformed scheme flags");
  c.scheme.linearized = lin != 0;
  c.scheme.frozen_geometry = frozen != 0;
  c.scheme.preload = preload != 0;
  if (!(is >> tag) || tag != "time")
    throw ConfigError("checkpoint: malformed time line");
  c.state.time = read_number(is, "time");
  if (!(is >> c.state.step)) throw ConfigError("checkpoint: missing step counter");
  c.params = read_vector(is, "params");
  c.ref_positions = read_vector(is, "ref_positions");
  c.state.u = read_vector(is, "u");
  c.state.p = read_vector(is, "p");
  c.state.lambda = read_vector(is, "lambda");
  c.state.d = read_vector(is, "d");
  c.state.d_dot = read_vector(is, "d_dot");
  c.state.d_dot_half = read_vector(is, "d_dot_half");
  if (!(is >> tag) || tag != "end")
    throw ConfigError("checkpoint: missing end marker");
  if (static_cast<int>(c.params.size()) != c.n_seg ||
      static_cast<int>(c.ref_positions.size()) != 2 * c.n_seg)
    throw ConfigError("checkpoint: curve data does not match n_seg");
  const std::size_t nv = static_cast<std::size_t>(c.nx + 1) * (c.ny + 1);
  if (c.state.u.size() != 2 * nv || c.state.p.size() != nv)
    throw ConfigError("checkpoint: fluid data does not match mesh size");
  const std::size_t nw = 2 * static_cast<std::size_t>(c.n_seg);
  if (c.state.lambda.size() != nw || c.state.d.size() != nw ||
      c.state.d_dot.size() != nw)
    throw ConfigError("checkpoint: solid data does not match n_seg");
  if (!c.state.d_dot_half.empty() && c.state.d_dot_half.size() != nw)
    throw ConfigError("checkpoint: intermediate velocity does not match n_seg");
  return c;
}

Mesh2D checkpoint_mesh(const Checkpoint& c) {
  return build_structured_mesh(c.nx, c.ny, c.x0, c.y0, c.x1, c.y1);
}

CurveMesh checkpoint_curve(const Checkpoint& c) {
  CurveMesh curve;
  curve.n_seg = c.n_seg;
  curve.period = c.period;
  curve.params = c.params;
  curve.reference_positions.resize(c.n_seg);
  for (int k = 0; k < c.n_seg; ++k)
    curve.reference_positions[k] = {c.ref_positions[2 * k], c.ref_positions[2 * k + 1]};
  curve.current_positions = curve.reference_positions;
  for (int k = 0; k < c.n_seg; ++k) {
    curve.current_positions[k].x += c.state.d[2 * k];
    curve.current_positions[k].y += c.state.d[2 * k + 1];
  }
  return curve;
}

}  // namespace fsi
