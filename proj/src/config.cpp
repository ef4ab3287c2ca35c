#include "fsikit/harness.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include "fsikit/errors.hpp"

namespace fsi {

std::string format_double(double v) {
  std::array<char, 64> buf;
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    throw ConfigError("not a number: '" + s + "'");
  return v;
}

namespace {

int parse_int(const std::string& s) {
  int v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("not an integer: '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError("not a boolean: '" + s + "'");
}

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& w : split_words(s)) out.push_back(parse_double(w));
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& w : split_words(s)) out.push_back(parse_int(w));
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void validate_scheme_list(const std::vector<std::string>& tokens,
                          const std::string& where) {
  if (tokens.empty()) throw ConfigError(where + ": empty scheme list");
  for (const auto& t : tokens) parse_scheme_token(t);
}

}  // namespace

SchemeToken parse_scheme_token(const std::string& token) {
  if (token == "strong") return {SchemeType::Strong, 1};
  if (token == "explicit") return {SchemeType::Explicit, 1};
  if (token == "split1") return {SchemeType::Split, 1};
  if (token == "split2") return {SchemeType::Split, 2};
  throw ConfigError("unknown scheme token '" + token +
                    "' (expected strong, explicit, split1 or split2)");
}

std::string scheme_token_label(const SchemeToken& t) {
  switch (t.type) {
    case SchemeType::Strong: return "strong";
    case SchemeType::Explicit: return "explicit";
    case SchemeType::Split: return t.r == 1 ? "split1" : "split2";
  }
  return "?";
}

void RunConfig::validate() const {
  if (nx < 2 || ny < 2) throw ConfigError("mesh: nx and ny must be >= 2");
  if (!(x1 > x0) || !(y1 > y0)) throw ConfigError("mesh: empty box");
  if (n_seg < 3) throw ConfigError("curve: n_seg must be >= 3");
  if (shape != "ellipse" && shape != "circle")
    throw ConfigError("curve: shape must be ellipse or circle");
  if (shape == "ellipse" && (semi_axis_a <= 0.0 || semi_axis_b <= 0.0))
    throw ConfigError("curve: semi-axes must be positive");
  if (shape == "circle" && radius <= 0.0)
    throw ConfigError("curve: radius must be positive");
  physics.validate();
  scheme.validate();
  if (blowup_factor <= 1.0) throw ConfigError("run: blowup_factor must be > 1");
  validate_scheme_list(stability.schemes, "stability");
  if (stability.tau_list.empty()) throw ConfigError("stability: empty tau list");
  for (double t : stability.tau_list)
    if (t <= 0.0) throw ConfigError("stability: tau must be positive");
  if (stability.t_end <= 0.0) throw ConfigError("stability: t_end must be positive");
  for (int n : cfl.n_seg_list)
    if (n < 3) throw ConfigError("cfl: n_seg must be >= 3");
  if (cfl.tau_max <= 0.0 || cfl.tau_min <= 0.0 || cfl.tau_min > cfl.tau_max)
    throw ConfigError("cfl: need 0 < tau_min <= tau_max");
  if (cfl.tau_factor <= 1.0) throw ConfigError("cfl: tau_factor must be > 1");
  if (cfl.t_end <= 0.0) throw ConfigError("cfl: t_end must be positive");
  if (spatial.h_list.empty()) throw ConfigError("spatial: empty h list");
  for (int n : spatial.h_list)
    if (n < 2) throw ConfigError("spatial: resolutions must be >= 2");
  if (spatial.tau <= 0.0 || spatial.ref_tau <= 0.0 || spatial.t_end <= 0.0)
    throw ConfigError("spatial: tau, ref_tau and t_end must be positive");
  if (spatial.ref_n < 2) throw ConfigError("spatial: ref_n must be >= 2");
  validate_scheme_list(spatial.schemes, "spatial");
  if (temporal.n < 2) throw ConfigError("temporal: n must be >= 2");
  if (temporal.tau_list.empty()) throw ConfigError("temporal: empty tau list");
  for (double t : temporal.tau_list)
    if (t <= 0.0) throw ConfigError("temporal: tau must be positive");
  if (temporal.ref_tau <= 0.0 || temporal.t_end <= 0.0)
    throw ConfigError("temporal: ref_tau and t_end must be positive");
  validate_scheme_list(temporal.schemes, "temporal");
  if (trajectory.tau_list.empty()) throw ConfigError("trajectory: empty tau list");
  for (double t : trajectory.tau_list)
    if (t <= 0.0) throw ConfigError("trajectory: tau must be positive");
  if (trajectory.t_end <= 0.0) throw ConfigError("trajectory: t_end must be positive");
  validate_scheme_list(trajectory.schemes, "trajectory");
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  RunConfig cfg;
  std::string line, section;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw ConfigError(path + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.erase(hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) fail("empty key or value");
    try {
      if (section == "mesh") {
        if (key == "nx") cfg.nx = parse_int(val);
        else if (key == "ny") cfg.ny = parse_int(val);
        else if (key == "box") {
          auto v = parse_double_list(val);
          if (v.size() != 4) fail("box needs 4 numbers: x0 y0 x1 y1");
          cfg.x0 = v[0]; cfg.y0 = v[1]; cfg.x1 = v[2]; cfg.y1 = v[3];
        } else fail("unknown key '" + key + "' in [mesh]");
      } else if (section == "curve") {
        if (key == "n_seg") cfg.n_seg = parse_int(val);
        else if (key == "shape") cfg.shape = val;
        else if (key == "center") {
          auto v = parse_double_list(val);
          if (v.size() != 2) fail("center needs 2 numbers");
          cfg.cx = v[0]; cfg.cy = v[1];
        } else if (key == "semi_axis_a") cfg.semi_axis_a = parse_double(val);
        else if (key == "semi_axis_b") cfg.semi_axis_b = parse_double(val);
        else if (key == "radius") cfg.radius = parse_double(val);
        else fail("unknown key '" + key + "' in [curve]");
      } else if (section == "physics") {
        if (key == "rho_f") cfg.physics.rho_f = parse_double(val);
        else if (key == "rho_s") cfg.physics.rho_s = parse_double(val);
        else if (key == "mu") cfg.physics.mu = parse_double(val);
        else if (key == "kappa") cfg.physics.kappa = parse_double(val);
        else if (key == "gamma") cfg.physics.gamma = parse_double(val);
        else fail("unknown key '" + key + "' in [physics]");
      } else if (section == "scheme") {
        if (key == "type") cfg.scheme.type = scheme_from_string(val);
        else if (key == "order") cfg.scheme.extrapolation_order = parse_int(val);
        else if (key == "tau") cfg.scheme.tau = parse_double(val);
        else if (key == "t_end") cfg.scheme.t_end = parse_double(val);
        else if (key == "linearized") cfg.scheme.linearized = parse_bool(val);
        else if (key == "frozen_geometry") cfg.scheme.frozen_geometry = parse_bool(val);
        else if (key == "preload") cfg.scheme.preload = parse_bool(val);
        else fail("unknown key '" + key + "' in [scheme]");
      } else if (section == "run") {
        if (key == "blowup_factor") cfg.blowup_factor = parse_double(val);
        else if (key == "out_dir") cfg.out_dir = val;
        else if (key == "reference") cfg.reference_path = val;
        else if (key == "checkpoint") cfg.checkpoint_path = val;
        else fail("unknown key '" + key + "' in [run]");
      } else if (section == "stability") {
        if (key == "schemes") cfg.stability.schemes = split_words(val);
        else if (key == "tau_list") cfg.stability.tau_list = parse_double_list(val);
        else if (key == "t_end") cfg.stability.t_end = parse_double(val);
        else fail("unknown key '" + key + "' in [stability]");
      } else if (section == "cfl") {
        if (key == "n_seg_list") cfg.cfl.n_seg_list = parse_int_list(val);
        else if (key == "tau_max") cfg.cfl.tau_max = parse_double(val);
        else if (key == "tau_factor") cfg.cfl.tau_factor = parse_double(val);
        else if (key == "tau_min") cfg.cfl.tau_min = parse_double(val);
        else if (key == "t_end") cfg.cfl.t_end = parse_double(val);
        else fail("unknown key '" + key + "' in [cfl]");
      } else if (section == "spatial") {
        if (key == "h_list") cfg.spatial.h_list = parse_int_list(val);
        else if (key == "tau") cfg.spatial.tau = parse_double(val);
        else if (key == "t_end") cfg.spatial.t_end = parse_double(val);
        else if (key == "ref_n") cfg.spatial.ref_n = parse_int(val);
        else if (key == "ref_tau") cfg.spatial.ref_tau = parse_double(val);
        else if (key == "frozen_fast") cfg.spatial.frozen_fast = parse_bool(val);
        else if (key == "schemes") cfg.spatial.schemes = split_words(val);
        else fail("unknown key '" + key + "' in [spatial]");
      } else if (section == "temporal") {
        if (key == "n") cfg.temporal.n = parse_int(val);
        else if (key == "tau_list") cfg.temporal.tau_list = parse_double_list(val);
        else if (key == "ref_tau") cfg.temporal.ref_tau = parse_double(val);
        else if (key == "t_end") cfg.temporal.t_end = parse_double(val);
        else if (key == "schemes") cfg.temporal.schemes = split_words(val);
        else fail("unknown key '" + key + "' in [temporal]");
      } else if (section == "trajectory") {
        if (key == "tau_list") cfg.trajectory.tau_list = parse_double_list(val);
        else if (key == "t_end") cfg.trajectory.t_end = parse_double(val);
        else if (key == "schemes") cfg.trajectory.schemes = split_words(val);
        else fail("unknown key '" + key + "' in [trajectory]");
      } else if (section.empty()) {
        fail("key outside any section");
      } else {
        fail("unknown section [" + section + "]");
      }
    } catch (const ConfigError& e) {
      std::string what = e.what();
      if (what.rfind(path + ":", 0) == 0) throw;
      fail(what);
    }
  }
  cfg.validate();
  return cfg;
}

void apply_paper_scale(RunConfig& cfg) {
  cfg.paper_scale = true;
  cfg.spatial.h_list = {8, 16, 32, 64, 128};
  cfg.spatial.ref_n = 256;
  cfg.spatial.ref_tau = 5e-5;
  cfg.temporal.n = 256;
  cfg.temporal.ref_tau = 5e-5;
}

Mesh2D build_mesh(const RunConfig& cfg) {
  return build_structured_mesh(cfg.nx, cfg.ny, cfg.x0, cfg.y0, cfg.x1, cfg.y1);
}

CurveMesh build_curve(const RunConfig& cfg) {
  if (cfg.shape == "circle")
    return build_ellipse_curve(cfg.n_seg, {cfg.cx, cfg.cy}, cfg.radius, cfg.radius);
  return build_ellipse_curve(cfg.n_seg, {cfg.cx, cfg.cy}, cfg.semi_axis_a,
                             cfg.semi_axis_b);
}

std::string RunConfig::canonical() const {
  std::ostringstream os;
  auto put = [&os](const std::string& key, const std::string& val) {
    os << key << '=' << val << '\n';
  };
  auto put_d = [&](const std::string& key, double v) { put(key, format_double(v)); };
  auto put_i = [&](const std::string& key, int v) { put(key, std::to_string(v)); };
  auto put_b = [&](const std::string& key, bool v) { put(key, v ? "true" : "false"); };
  auto put_dl = [&](const std::string& key, const std::vector<double>& vs) {
    std::string s;
    for (double v : vs) { if (!s.empty()) s += ' '; s += format_double(v); }
    put(key, s);
  };
  auto put_il = [&](const std::string& key, const std::vector<int>& vs) {
    std::string s;
    for (int v : vs) { if (!s.empty()) s += ' '; s += std::to_string(v); }
    put(key, s);
  };
  auto put_sl = [&](const std::string& key, const std::vector<std::string>& vs) {
    std::string s;
    for (const auto& v : vs) { if (!s.empty()) s += ' '; s += v; }
    put(key, s);
  };
  put_i("mesh.nx", nx);
  put_i("mesh.ny", ny);
  put_dl("mesh.box", {x0, y0, x1, y1});
  put_i("curve.n_seg", n_seg);
  put("curve.shape", shape);
  put_dl("curve.center", {cx, cy});
  if (shape == "circle") {
    put_d("curve.radius", radius);
  } else {
    put_d("curve.semi_axis_a", semi_axis_a);
    put_d("curve.semi_axis_b", semi_axis_b);
  }
  put_d("physics.rho_f", physics.rho_f);
  put_d("physics.rho_s", physics.rho_s);
  put_d("physics.mu", physics.mu);
  put_d("physics.kappa", physics.kappa);
  put_d("physics.gamma", physics.gamma);
  put("scheme.type", to_string(scheme.type));
  put_i("scheme.order", scheme.extrapolation_order);
  put_d("scheme.tau", scheme.tau);
  put_d("scheme.t_end", scheme.t_end);
  put_b("scheme.linearized", scheme.linearized);
  put_b("scheme.frozen_geometry", scheme.frozen_geometry);
  put_b("scheme.preload", scheme.preload);
  put_d("run.blowup_factor", blowup_factor);
  put_b("run.paper_scale", paper_scale);
  put_sl("stability.schemes", stability.schemes);
  put_dl("stability.tau_list", stability.tau_list);
  put_d("stability.t_end", stability.t_end);
  put_il("cfl.n_seg_list", cfl.n_seg_list);
  put_d("cfl.tau_max", cfl.tau_max);
  put_d("cfl.tau_factor", cfl.tau_factor);
  put_d("cfl.tau_min", cfl.tau_min);
  put_d("cfl.t_end", cfl.t_end);
  put_il("spatial.h_list", spatial.h_list);
  put_d("spatial.tau", spatial.tau);
  put_d("spatial.t_end", spatial.t_end);
  put_i("spatial.ref_n", spatial.ref_n);
  put_d("spatial.ref_tau", spatial.ref_tau);
  put_b("spatial.frozen_fast", spatial.frozen_fast);
  put_sl("spatial.schemes", spatial.schemes);
  put_i("temporal.n", temporal.n);
  put_dl("temporal.tau_list", temporal.tau_list);
  put_d("temporal.ref_tau", temporal.ref_tau);
  put_d("temporal.t_end", temporal.t_end);
  put_sl("temporal.schemes", temporal.schemes);
  put_dl("trajectory.tau_list", trajectory.tau_list);
  put_d("trajectory.t_end", trajectory.t_end);
  put_sl("trajectory.schemes", trajectory.schemes);
  return os.str();
}

std::uint64_t RunConfig::hash() const {
  const std::string text = canonical();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace fsi
