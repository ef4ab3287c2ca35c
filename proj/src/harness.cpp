#include "fsikit/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <ostream>
#include <sstream>

#include "fsikit/errors.hpp"

namespace fsi {

std::string to_string(RunOutcome o) {
  switch (o) {
    case RunOutcome::Completed: return "completed";
    case RunOutcome::BlowUp: return "blowup";
    case RunOutcome::CurveEscape: return "curve_escape";
    case RunOutcome::SolverFailure: return "solver_failure";
  }
  return "?";
}

namespace {

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void csv_preamble(std::ostream& os, const RunConfig& cfg, const std::string& table) {
  os << "# table=" << table << '\n';
  os << "# config_hash=" << hash_hex(cfg.hash()) << '\n';
  os << "# params: gamma=" << format_double(cfg.physics.gamma)
     << " mu=" << format_double(cfg.physics.mu)
     << " rho_f=" << format_double(cfg.physics.rho_f)
     << " rho_s=" << format_double(cfg.physics.rho_s)
     << " kappa=" << format_double(cfg.physics.kappa) << '\n';
}

// A run that owns its geometry so snapshots can point into it.
struct OwnedRun {
  Mesh2D mesh;
  CurveMesh curve;
  RunResult result;
};

FieldSnapshot snapshot_of(const OwnedRun& r) {
  FieldSnapshot s;
  s.mesh = &r.mesh;
  s.curve = &r.curve;
  s.u = &r.result.final_state.u;
  s.d = &r.result.final_state.d;
  s.d_dot = &r.result.final_state.d_dot;
  s.time = r.result.final_state.time;
  return s;
}

OwnedRun execute(const RunConfig& cfg) {
  OwnedRun run{build_mesh(cfg), build_curve(cfg), {}};
  Simulation sim(run.mesh, run.curve, cfg.physics, cfg.scheme);
  const double tau = cfg.scheme.tau;
  const long n_steps = std::max<long>(1, std::llround(cfg.scheme.t_end / tau));
  RunResult& res = run.result;
  EnergyRecord rec0 = sim.current_energy_record();
  res.E0 = rec0.E;
  res.energy.push_back(rec0);
  ControlPoints cp0 = control_points(sim.curve());
  res.trajectory.push_back({0.0, cp0.A_x, cp0.B_y});
  const double e_scale = std::max(res.E0, 1e-300);
  double cum_dissipation = 0.0;
  // The certified composite depends on the scheme. The split estimate
  // telescopes E + sum(D) + tau^2 ||X_dot||_s^2 + (tau^2/rho_s) ||L_h X||^2
  // (the stored aug_elastic carries half that coefficient); the strong and
  // explicit estimates control plain E + sum(D).
  const bool split = cfg.scheme.type == SchemeType::Split;
  const auto composite = [split](const EnergyRecord& r, double cum) {
    double m = r.E + cum;
    if (split) m += r.aug_velocity + 2.0 * r.aug_elastic;
    return m;
  };
  double monitor_prev = composite(rec0, 0.0);
  for (long k = 0; k < n_steps; ++k) {
    StepRecord srec;
    try {
      srec = sim.step();
    } catch (const SolverError& e) {
      res.outcome = RunOutcome::SolverFailure;
      res.message = e.what();
      break;
    } catch (const GeometryError& e) {
      // A violent step can push the interface outside the box before the
      // post-step containment check runs; assembly then fails to clip the
      // curve against the mesh. Same outcome as the explicit check.
      res.outcome = RunOutcome::CurveEscape;
      res.message = e.what();
      break;
    }
    ++res.steps;
    const EnergyRecord& er = srec.energy;
    res.energy.push_back(er);
    cum_dissipation += er.D_increment;
    res.max_identity_residual =
        std::max(res.max_identity_residual, std::abs(er.identity_residual));
    res.max_constraint_residual =
        std::max(res.max_constraint_residual, er.constraint_residual);
    res.max_solver_residual = std::max(res.max_solver_residual, srec.solver_residual);
    if (srec.solver_residual > 1e-10) ++res.residual_reports;
    if (cfg.scheme.type == SchemeType::Split) {
      const double dscale =
          std::max(norm_L2_sigma(sim.solid_mass_hat(), sim.state().d_dot), 1.0);
      res.max_intermediate_residual = std::max(
          res.max_intermediate_residual, srec.intermediate_residual / dscale);
    }
    const double monitor = composite(er, cum_dissipation);
    res.max_monitor_increase =
        std::max(res.max_monitor_increase, (monitor - monitor_prev) / e_scale);
    monitor_prev = monitor;
    ControlPoints cp = control_points(sim.curve());
    res.trajectory.push_back({er.time, cp.A_x, cp.B_y});
    if (!std::isfinite(er.E) || er.E > cfg.blowup_factor * e_scale) {
      res.outcome = RunOutcome::BlowUp;
      res.message = "energy reached " + format_double(er.E) + " at t=" +
                    format_double(er.time) + " (threshold " +
                    format_double(cfg.blowup_factor * e_scale) + ")";
      break;
    }
    if (!cfg.scheme.frozen_geometry && !curve_inside_box(sim.mesh(), sim.curve())) {
      res.outcome = RunOutcome::CurveEscape;
      res.message = "interface left the fluid box at t=" + format_double(er.time);
      break;
    }
  }
  res.final_state = sim.state();
  run.curve = sim.curve();  // carries the moved interface positions
  return run;
}

std::string sanitize_number(const std::string& s) {
  std::string out = s;
  std::replace(out.begin(), out.end(), '.', 'd');
  std::replace(out.begin(), out.end(), '-', 'm');
  std::replace(out.begin(), out.end(), '+', 'p');
  return out;
}

void check_reference_checkpoint(const Checkpoint& c, const RunConfig& expect,
                                double t_end, const std::string& path) {
  auto fail = [&](const std::string& why) {
    throw ConfigError("reference checkpoint '" + path + "' does not match: " + why);
  };
  if (c.nx != expect.nx || c.ny != expect.ny) fail("fluid mesh resolution");
  if (c.x0 != expect.x0 || c.y0 != expect.y0 || c.x1 != expect.x1 ||
      c.y1 != expect.y1)
    fail("fluid box");
  if (c.n_seg != expect.n_seg) fail("interface resolution");
  if (c.physics.rho_f != expect.physics.rho_f ||
      c.physics.rho_s != expect.physics.rho_s ||
      c.physics.mu != expect.physics.mu ||
      c.physics.kappa != expect.physics.kappa ||
      c.physics.gamma != expect.physics.gamma)
    fail("physical parameters");
  if (std::abs(c.state.time - t_end) > 1e-9 * std::max(1.0, std::abs(t_end)))
    fail("final time " + format_double(c.state.time) + " vs expected " +
         format_double(t_end));
}

// Runs the reference problem, or loads it from `explicit_path` / the cache
// file under out_dir. A fresh run is saved to the cache.
OwnedRun reference_run(const RunConfig& ref_cfg, const std::string& explicit_path,
                       const std::string& cache_name) {
  std::string path = explicit_path;
  if (path.empty()) {
    std::filesystem::path cache =
        std::filesystem::path(ref_cfg.out_dir) / cache_name;
    if (std::filesystem::exists(cache)) path = cache.string();
  }
  if (!path.empty()) {
    Checkpoint c = load_checkpoint(path);
    check_reference_checkpoint(c, ref_cfg, ref_cfg.scheme.t_end, path);
    OwnedRun run{checkpoint_mesh(c), checkpoint_curve(c), {}};
    run.result.outcome = RunOutcome::Completed;
    run.result.final_state = c.state;
    run.result.E0 = std::numeric_limits<double>::quiet_NaN();
    return run;
  }
  OwnedRun run = execute(ref_cfg);
  if (run.result.outcome != RunOutcome::Completed)
    throw SolverError("reference run failed: " + run.result.message);
  std::filesystem::create_directories(ref_cfg.out_dir);
  std::filesystem::path cache = std::filesystem::path(ref_cfg.out_dir) / cache_name;
  save_checkpoint(cache.string(),
                  make_checkpoint(run.mesh, run.curve, ref_cfg.physics,
                                  ref_cfg.scheme, run.result.final_state));
  return run;
}

void apply_token(RunConfig& cfg, const SchemeToken& tok) {
  cfg.scheme.type = tok.type;
  cfg.scheme.extrapolation_order = tok.r;
}

ConvergenceTable finish_table(std::string scheme,
                              std::vector<ConvergenceRow> rows) {
  ConvergenceTable t;
  t.scheme = std::move(scheme);
  t.rows = std::move(rows);
  std::vector<double> eu, ed, es;
  for (const auto& r : t.rows) {
    eu.push_back(r.err.err_u);
    ed.push_back(r.err.err_d_dot);
    es.push_back(r.err.err_d_s);
  }
  t.rate_u = convergence_rates(eu);
  t.rate_d_dot = convergence_rates(ed);
  t.rate_d_s = convergence_rates(es);
  return t;
}

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

}  // namespace

RunResult run_simulation(const RunConfig& cfg) {
  cfg.validate();
  return execute(cfg).result;
}

std::vector<StabilityRow> stability_sweep(const RunConfig& cfg) {
  cfg.validate();
  std::vector<StabilityRow> rows;
  for (const auto& token : cfg.stability.schemes) {
    SchemeToken tok = parse_scheme_token(token);
    for (double tau : cfg.stability.tau_list) {
      RunConfig sub = cfg;
      apply_token(sub, tok);
      sub.scheme.tau = tau;
      sub.scheme.t_end = cfg.stability.t_end;
      RunResult res = run_simulation(sub);
      StabilityRow row;
      row.scheme = token;
      row.tau = tau;
      row.n_seg = cfg.n_seg;
      row.outcome = res.outcome;
      row.steps = res.steps;
      row.final_E_over_E0 = res.energy.back().E / std::max(res.E0, 1e-300);
      row.max_monitor_increase = res.max_monitor_increase;
      row.max_identity_residual = res.max_identity_residual;
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<CflBoundaryRow> cfl_boundary_scan(const RunConfig& cfg) {
  cfg.validate();
  std::vector<CflBoundaryRow> rows;
  for (int n_seg : cfg.cfl.n_seg_list) {
    RunConfig sub = cfg;
    sub.n_seg = n_seg;
    sub.scheme.type = SchemeType::Explicit;
    sub.scheme.extrapolation_order = 1;
    sub.scheme.linearized = true;
    sub.scheme.frozen_geometry = true;
    sub.scheme.t_end = cfg.cfl.t_end;
    CflBoundaryRow row;
    row.n_seg = n_seg;
    row.h_s = build_curve(sub).h_s();
    row.tau_star = kNan;
    double tau = cfg.cfl.tau_max;
    while (tau >= cfg.cfl.tau_min * (1.0 - 1e-12)) {
      sub.scheme.tau = tau;
      // Slow growth needs iterations to show, so probe for at least 300
      // steps regardless of the horizon.
      sub.scheme.t_end = std::max(cfg.cfl.t_end, 300.0 * tau);
      RunResult res = run_simulation(sub);
      const bool stable = res.outcome == RunOutcome::Completed &&
                          res.energy.back().E <= 1.5 * std::max(res.E0, 1e-300);
      row.probes.push_back({tau, stable});
      if (stable) {
        row.tau_star = tau;
        break;
      }
      tau /= cfg.cfl.tau_factor;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ConvergenceTable> spatial_convergence(const RunConfig& cfg) {
  cfg.validate();
  RunConfig ref_cfg = cfg;
  ref_cfg.nx = ref_cfg.ny = cfg.spatial.ref_n;
  ref_cfg.n_seg = cfg.spatial.ref_n;
  ref_cfg.scheme.type = SchemeType::Strong;
  ref_cfg.scheme.extrapolation_order = 1;
  ref_cfg.scheme.tau = cfg.spatial.ref_tau;
  ref_cfg.scheme.t_end = cfg.spatial.t_end;
  if (cfg.spatial.frozen_fast) {
    ref_cfg.scheme.linearized = true;
    ref_cfg.scheme.frozen_geometry = true;
  }
  const std::string cache_name =
      "ref_spatial_strong_n" + std::to_string(cfg.spatial.ref_n) + "_tau" +
      sanitize_number(format_double(cfg.spatial.ref_tau)) + ".chk";
  OwnedRun ref = reference_run(ref_cfg, cfg.reference_path, cache_name);
  FieldSnapshot ref_snap = snapshot_of(ref);

  std::vector<ConvergenceTable> tables;
  for (const auto& token : cfg.spatial.schemes) {
    SchemeToken tok = parse_scheme_token(token);
    std::vector<ConvergenceRow> rows;
    double max_inter = 0.0;
    for (int n : cfg.spatial.h_list) {
      RunConfig sub = ref_cfg;
      apply_token(sub, tok);
      sub.nx = sub.ny = n;
      sub.n_seg = n;
      sub.scheme.tau = cfg.spatial.tau;
      OwnedRun run = execute(sub);
      max_inter = std::max(max_inter, run.result.max_intermediate_residual);
      ConvergenceRow row;
      row.level = (cfg.x1 - cfg.x0) / n;
      if (run.result.outcome == RunOutcome::Completed) {
        row.err = error_vs_reference(snapshot_of(run), ref_snap, cfg.physics.kappa);
      } else {
        row.err = {kNan, kNan, kNan};
      }
      rows.push_back(row);
    }
    tables.push_back(finish_table(token, std::move(rows)));
    tables.back().max_intermediate_residual = max_inter;
  }
  return tables;
}

std::vector<ConvergenceTable> temporal_convergence(const RunConfig& cfg) {
  cfg.validate();
  std::vector<ConvergenceTable> tables;
  for (const auto& token : cfg.temporal.schemes) {
    SchemeToken tok = parse_scheme_token(token);
    RunConfig ref_cfg = cfg;
    apply_token(ref_cfg, tok);
    ref_cfg.nx = ref_cfg.ny = cfg.temporal.n;
    ref_cfg.n_seg = cfg.temporal.n;
    ref_cfg.scheme.tau = cfg.temporal.ref_tau;
    ref_cfg.scheme.t_end = cfg.temporal.t_end;
    const std::string cache_name =
        "ref_temporal_" + token + "_n" + std::to_string(cfg.temporal.n) + "_tau" +
        sanitize_number(format_double(cfg.temporal.ref_tau)) + ".chk";
    OwnedRun ref = reference_run(ref_cfg, "", cache_name);
    FieldSnapshot ref_snap = snapshot_of(ref);

    std::vector<ConvergenceRow> rows;
    double max_inter = 0.0;
    for (double tau : cfg.temporal.tau_list) {
      RunConfig sub = ref_cfg;
      sub.scheme.tau = tau;
      OwnedRun run = execute(sub);
      max_inter = std::max(max_inter, run.result.max_intermediate_residual);
      ConvergenceRow row;
      row.level = tau;
      if (run.result.outcome == RunOutcome::Completed) {
        row.err = error_vs_reference(snapshot_of(run), ref_snap, cfg.physics.kappa);
      } else {
        row.err = {kNan, kNan, kNan};
      }
      rows.push_back(row);
    }
    tables.push_back(finish_table(token, std::move(rows)));
    tables.back().max_intermediate_residual = max_inter;
  }
  return tables;
}

std::vector<TrajectorySeries> trajectory_run(const RunConfig& cfg) {
  cfg.validate();
  std::vector<TrajectorySeries> out;
  for (const auto& token : cfg.trajectory.schemes) {
    SchemeToken tok = parse_scheme_token(token);
    for (double tau : cfg.trajectory.tau_list) {
      RunConfig sub = cfg;
      apply_token(sub, tok);
      sub.scheme.tau = tau;
      sub.scheme.t_end = cfg.trajectory.t_end;
      RunResult res = run_simulation(sub);
      TrajectorySeries s;
      s.scheme = token;
      s.tau = tau;
      s.points = std::move(res.trajectory);
      out.push_back(std::move(s));
    }
  }
  return out;
}

void write_energy_csv(std::ostream& os, const RunConfig& cfg,
                      const std::vector<EnergyRecord>& records) {
  csv_preamble(os, cfg, "energy");
  os << "time,E,D_increment,aug_velocity,aug_elastic,constraint_residual,"
        "identity_residual\n";
  for (const auto& r : records) {
    os << format_double(r.time) << ',' << format_double(r.E) << ','
       << format_double(r.D_increment) << ',' << format_double(r.aug_velocity)
       << ',' << format_double(r.aug_elastic) << ','
       << format_double(r.constraint_residual) << ','
       << format_double(r.identity_residual) << '\n';
  }
}

void write_trajectory_csv(std::ostream& os, const RunConfig& cfg,
                          const std::vector<TrajectorySeries>& series) {
  csv_preamble(os, cfg, "trajectory");
  os << "scheme,tau,time,A_x,B_y\n";
  for (const auto& s : series)
    for (const auto& p : s.points)
      os << s.scheme << ',' << format_double(s.tau) << ',' << format_double(p.time)
         << ',' << format_double(p.A_x) << ',' << format_double(p.B_y) << '\n';
}

void write_stability_csv(std::ostream& os, const RunConfig& cfg,
                         const std::vector<StabilityRow>& rows) {
  csv_preamble(os, cfg, "stability");
  os << "scheme,tau,n_seg,outcome,steps,final_E_over_E0,max_monitor_increase,"
        "max_identity_residual\n";
  for (const auto& r : rows)
    os << r.scheme << ',' << format_double(r.tau) << ',' << r.n_seg << ','
       << to_string(r.outcome) << ',' << r.steps << ','
       << format_double(r.final_E_over_E0) << ','
       << format_double(r.max_monitor_increase) << ','
       << format_double(r.max_identity_residual) << '\n';
}

void write_cfl_csv(std::ostream& os, const RunConfig& cfg,
                   const std::vector<CflBoundaryRow>& rows) {
  csv_preamble(os, cfg, "cfl_boundary");
  os << "n_seg,h_s,tau,stable,tau_star\n";
  for (const auto& r : rows)
    for (const auto& p : r.probes)
      os << r.n_seg << ',' << format_double(r.h_s) << ',' << format_double(p.tau)
         << ',' << (p.stable ? 1 : 0) << ',' << format_double(r.tau_star) << '\n';
}

void write_convergence_csv(std::ostream& os, const RunConfig& cfg,
                           const std::string& level_name,
                           const std::vector<ConvergenceTable>& tables) {
  csv_preamble(os, cfg, level_name + "_convergence");
  if (level_name == "h")
    os << "# mode=" << (cfg.spatial.frozen_fast ? "frozen_linearized" : "moving")
       << '\n';
  os << "scheme," << level_name
     << ",err_u,rate_u,err_d_dot,rate_d_dot,err_d_s,rate_d_s\n";
  for (const auto& t : tables) {
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
      auto rate = [&](const std::vector<double>& rs) {
        return k == 0 ? std::string() : format_double(rs[k - 1]);
      };
      os << t.scheme << ',' << format_double(t.rows[k].level) << ','
         << format_double(t.rows[k].err.err_u) << ',' << rate(t.rate_u) << ','
         << format_double(t.rows[k].err.err_d_dot) << ',' << rate(t.rate_d_dot)
         << ',' << format_double(t.rows[k].err.err_d_s) << ',' << rate(t.rate_d_s)
         << '\n';
    }
  }
}

}  // namespace fsi
