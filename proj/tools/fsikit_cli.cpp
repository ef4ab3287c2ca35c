#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>

#include <CLI11.hpp>

#include "fsikit/errors.hpp"
#include "fsikit/harness.hpp"

namespace {

using namespace fsi;

void write_file(const std::string& dir, const std::string& name,
                const std::function<void(std::ostream&)>& emit) {
  std::filesystem::path path = std::filesystem::path(dir) / name;
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open '" + path.string() + "' for writing");
  emit(os);
  if (!os) throw ConfigError("failed writing '" + path.string() + "'");
  std::cout << "wrote " << path.string() << "\n";
}

int do_run(const RunConfig& cfg) {
  RunResult res = run_simulation(cfg);
  write_file(cfg.out_dir, "energy.csv",
             [&](std::ostream& os) { write_energy_csv(os, cfg, res.energy); });
  TrajectorySeries series;
  series.scheme = scheme_token_label(
      {cfg.scheme.type, cfg.scheme.extrapolation_order});
  series.tau = cfg.scheme.tau;
  series.points = res.trajectory;
  write_file(cfg.out_dir, "trajectory.csv", [&](std::ostream& os) {
    write_trajectory_csv(os, cfg, {series});
  });
  if (!cfg.checkpoint_path.empty()) {
    save_checkpoint(cfg.checkpoint_path,
                    make_checkpoint(build_mesh(cfg), build_curve(cfg), cfg.physics,
                                    cfg.scheme, res.final_state));
    std::cout << "wrote " << cfg.checkpoint_path << "\n";
  }
  std::cout << "outcome: " << to_string(res.outcome) << " after " << res.steps
            << " steps\n";
  std::cout << "E0=" << format_double(res.E0)
            << " E_final=" << format_double(res.energy.back().E)
            << " max_monitor_increase=" << format_double(res.max_monitor_increase)
            << "\n";
  std::cout << "max residuals: solver=" << format_double(res.max_solver_residual)
            << " constraint=" << format_double(res.max_constraint_residual)
            << " identity=" << format_double(res.max_identity_residual) << "\n";
  if (!res.message.empty()) std::cout << res.message << "\n";
  if (res.residual_reports > 0)
    std::cout << "warning: solver residual exceeded 1e-10 on "
              << res.residual_reports << " steps\n";
  if (!cfg.reference_path.empty() && res.outcome == RunOutcome::Completed) {
    Checkpoint ref = load_checkpoint(cfg.reference_path);
    Mesh2D mesh = build_mesh(cfg);
    CurveMesh curve = build_curve(cfg);
    Mesh2D ref_mesh = checkpoint_mesh(ref);
    CurveMesh ref_curve = checkpoint_curve(ref);
    FieldSnapshot coarse{&mesh, &curve, &res.final_state.u, &res.final_state.d,
                         &res.final_state.d_dot, res.final_state.time};
    FieldSnapshot fine{&ref_mesh, &ref_curve, &ref.state.u, &ref.state.d,
                       &ref.state.d_dot, ref.state.time};
    ErrorTriple err = error_vs_reference(coarse, fine, cfg.physics.kappa);
    std::cout << "errors vs reference: u=" << format_double(err.err_u)
              << " d_dot=" << format_double(err.err_d_dot)
              << " d_s=" << format_double(err.err_d_s) << "\n";
  }
  switch (res.outcome) {
    case RunOutcome::Completed: return 0;
    case RunOutcome::SolverFailure: return 3;
    case RunOutcome::BlowUp:
    case RunOutcome::CurveEscape: return 4;
  }
  return 3;
}

int do_stability(const RunConfig& cfg) {
  auto rows = stability_sweep(cfg);
  write_file(cfg.out_dir, "stability.csv",
             [&](std::ostream& os) { write_stability_csv(os, cfg, rows); });
  for (const auto& r : rows)
    std::cout << r.scheme << " tau=" << format_double(r.tau) << ": "
              << to_string(r.outcome) << " after " << r.steps
              << " steps, E/E0=" << format_double(r.final_E_over_E0) << "\n";
  if (!cfg.cfl.n_seg_list.empty()) {
    auto scan = cfl_boundary_scan(cfg);
    write_file(cfg.out_dir, "cfl_boundary.csv",
               [&](std::ostream& os) { write_cfl_csv(os, cfg, scan); });
    for (const auto& r : scan)
      std::cout << "explicit n_seg=" << r.n_seg << " h_s=" << format_double(r.h_s)
                << " tau_star=" << format_double(r.tau_star)
                << " tau_star/h_s^2=" << format_double(r.tau_star / (r.h_s * r.h_s))
                << "\n";
  }
  return 0;
}

void print_tables(const std::string& level_name,
                  const std::vector<ConvergenceTable>& tables) {
  for (const auto& t : tables) {
    std::cout << t.scheme << ":\n";
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
      std::cout << "  " << level_name << "=" << format_double(t.rows[k].level)
                << " err_u=" << format_double(t.rows[k].err.err_u)
                << " err_d_dot=" << format_double(t.rows[k].err.err_d_dot)
                << " err_d_s=" << format_double(t.rows[k].err.err_d_s);
      if (k > 0)
        std::cout << " rates=" << format_double(t.rate_u[k - 1]) << "/"
                  << format_double(t.rate_d_dot[k - 1]) << "/"
                  << format_double(t.rate_d_s[k - 1]);
      std::cout << "\n";
    }
  }
}

int do_spatial(const RunConfig& cfg) {
  std::cout << "spatial study mode: "
            << (cfg.spatial.frozen_fast ? "frozen_linearized" : "moving")
            << "\n";
  auto tables = spatial_convergence(cfg);
  write_file(cfg.out_dir, "spatial_convergence.csv", [&](std::ostream& os) {
    write_convergence_csv(os, cfg, "h", tables);
  });
  print_tables("h", tables);
  return 0;
}

int do_temporal(const RunConfig& cfg) {
  auto tables = temporal_convergence(cfg);
  write_file(cfg.out_dir, "temporal_convergence.csv", [&](std::ostream& os) {
    write_convergence_csv(os, cfg, "tau", tables);
  });
  print_tables("tau", tables);
  return 0;
}

int do_trajectory(const RunConfig& cfg) {
  auto series = trajectory_run(cfg);
  write_file(cfg.out_dir, "trajectories.csv", [&](std::ostream& os) {
    write_trajectory_csv(os, cfg, series);
  });
  for (const auto& s : series)
    std::cout << s.scheme << " tau=" << format_double(s.tau) << ": "
              << s.points.size() - 1 << " steps, final A_x="
              << format_double(s.points.back().A_x)
              << " B_y=" << format_double(s.points.back().B_y) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"immersed elastic interface toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_dir, reference;
  bool paper_scale = false;
  app.add_option("--config", config_path, "INI-style configuration file");
  app.add_option("--out", out_dir, "output directory (overrides the config)");
  app.add_option("--reference", reference, "reference checkpoint file");
  app.add_flag("--paper-scale", paper_scale, "use the full-size study grids");
  auto* cmd_run =
      app.add_subcommand("run", "single simulation with energy and control-point series");
  auto* cmd_stab = app.add_subcommand(
      "stability", "scheme/time-step sweep plus the explicit step-bound scan");
  auto* cmd_spat =
      app.add_subcommand("spatial", "mesh refinement study against a fine reference");
  auto* cmd_temp =
      app.add_subcommand("temporal", "time-step refinement study per scheme");
  auto* cmd_traj =
      app.add_subcommand("trajectory", "control-point series for scheme/tau pairs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    fsi::RunConfig cfg =
        config_path.empty() ? fsi::RunConfig{} : fsi::load_config(config_path);
    if (paper_scale) fsi::apply_paper_scale(cfg);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!reference.empty()) cfg.reference_path = reference;
    cfg.validate();
    std::filesystem::create_directories(cfg.out_dir);
    if (*cmd_run) return do_run(cfg);
    if (*cmd_stab) return do_stability(cfg);
    if (*cmd_spat) return do_spatial(cfg);
    if (*cmd_temp) return do_temporal(cfg);
    if (*cmd_traj) return do_trajectory(cfg);
  } catch (const fsi::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const fsi::GeometryError& e) {
    std::cerr << "geometry error: " << e.what() << "\n";
    return 2;
  } catch (const fsi::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
