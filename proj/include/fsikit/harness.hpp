#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fsikit/diagnostics.hpp"
#include "fsikit/schemes.hpp"

namespace fsi {

// Scheme tokens used by sweep lists: strong | explicit | split1 | split2.
struct SchemeToken {
  SchemeType type = SchemeType::Strong;
  int r = 1;
};
SchemeToken parse_scheme_token(const std::string& token);
std::string scheme_token_label(const SchemeToken& t);

struct SweepConfig {
  std::vector<std::string> schemes = {"strong", "split1"};
  std::vector<double> tau_list = {0.1, 0.05, 0.01, 0.005};
  double t_end = 3.0;
};

struct CflScanConfig {
  std::vector<int> n_seg_list = {40, 80, 160};
  double tau_max = 0.02;
  double tau_factor = 1.4142135623730951;  // sqrt(2) grid
  double tau_min = 1e-6;
  double t_end = 1.0;
};

struct SpatialConfig {
  std::vector<int> h_list = {8, 16, 32, 64};  // N meaning h = 1/N, n_seg = N
  double tau = 0.01;
  double t_end = 0.5;
  int ref_n = 128;
  double ref_tau = 5e-4;
  bool frozen_fast = true;  // whole study in linearized+frozen mode
  std::vector<std::string> schemes = {"strong", "split1", "split2"};
};

struct TemporalConfig {
  int n = 64;  // fluid mesh and curve resolution
  std::vector<double> tau_list = {0.0625,      0.03125,     0.015625,
                                  0.0078125,   0.00390625,  0.001953125};
  double ref_tau = 0.00048828125;  // 1/2048, per-scheme reference
  double t_end = 0.5;
  std::vector<std::string> schemes = {"strong", "split1", "split2"};
};

struct TrajectoryConfig {
  std::vector<double> tau_list = {0.1, 0.05, 0.01};
  double t_end = 3.0;
  std::vector<std::string> schemes = {"strong", "split1", "split2"};
};

struct RunConfig {
  // mesh
  int nx = 40, ny = 40;
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  // curve
  int n_seg = 40;
  std::string shape = "ellipse";  // ellipse | circle
  double cx = 0.5, cy = 0.5;
  double semi_axis_a = 0.35355339059327379;   // 0.25 * sqrt(2)
  double semi_axis_b = 0.17677669529663689;   // 0.25 / sqrt(2)
  double radius = 0.25;                       // circle shape

  PhysicsParams physics;
  SchemeConfig scheme;

  double blowup_factor = 1e3;
  std::string out_dir = "out";
  std::string reference_path;   // optional checkpoint to compare against
  std::string checkpoint_path;  // optional: save final state here
  bool paper_scale = false;

  SweepConfig stability;
  CflScanConfig cfl;
  SpatialConfig spatial;
  TemporalConfig temporal;
  TrajectoryConfig trajectory;

  void validate() const;
  std::string canonical() const;  // deterministic full dump, '.'-decimal
  std::uint64_t hash() const;     // FNV-1a over canonical()
};

RunConfig load_config(const std::string& path);
void apply_paper_scale(RunConfig& cfg);
Mesh2D build_mesh(const RunConfig& cfg);
CurveMesh build_curve(const RunConfig& cfg);

// Shortest round-trip decimal representation (locale-free).
std::string format_double(double v);
double parse_double(const std::string& s);

// ---- checkpoints ----

struct Checkpoint {
  int nx = 0, ny = 0;
  double x0 = 0, y0 = 0, x1 = 1, y1 = 1;
  int n_seg = 0;
  double period = 0;
  PhysicsParams physics;
  SchemeConfig scheme;
  std::vector<double> params;
  std::vector<double> ref_positions;
  State state;
};

Checkpoint make_checkpoint(const Simulation& sim);
Checkpoint make_checkpoint(const Mesh2D& mesh, const CurveMesh& curve,
                           const PhysicsParams& physics, const SchemeConfig& scheme,
                           const State& state);
void save_checkpoint(const std::string& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::string& path);
Mesh2D checkpoint_mesh(const Checkpoint& c);
CurveMesh checkpoint_curve(const Checkpoint& c);

// ---- single run ----

enum class RunOutcome { Completed, BlowUp, CurveEscape, SolverFailure };
std::string to_string(RunOutcome o);

struct TrajectoryPoint {
  double time = 0.0;
  double A_x = 0.0;
  double B_y = 0.0;
};

struct RunResult {
  RunOutcome outcome = RunOutcome::Completed;
  std::string message;
  double E0 = 0.0;
  int steps = 0;
  State final_state;
  std::vector<EnergyRecord> energy;      // includes the initial record
  std::vector<TrajectoryPoint> trajectory;
  double max_identity_residual = 0.0;
  double max_constraint_residual = 0.0;
  double max_solver_residual = 0.0;
  // Split runs: intermediate-velocity identity residual over
  // max(||d_dot||_{L2(Sigma)}, 1), maximized over the steps.
  double max_intermediate_residual = 0.0;
  // Largest per-step increase of the scheme's certified energy composite,
  // over E0: E + sum(D) for the strong and explicit schemes, plus
  // tau^2 ||X_dot||_s^2 + (tau^2/rho_s) ||L_h X||^2 for the split scheme.
  double max_monitor_increase = 0.0;
  int residual_reports = 0;  // steps whose solver residual exceeded 1e-10
};

RunResult run_simulation(const RunConfig& cfg);

// ---- experiments ----

struct StabilityRow {
  std::string scheme;
  double tau = 0.0;
  int n_seg = 0;
  RunOutcome outcome = RunOutcome::Completed;
  int steps = 0;
  double final_E_over_E0 = 0.0;
  double max_monitor_increase = 0.0;
  double max_identity_residual = 0.0;
};
std::vector<StabilityRow> stability_sweep(const RunConfig& cfg);

struct CflProbe {
  double tau = 0.0;
  bool stable = false;
};
struct CflBoundaryRow {
  int n_seg = 0;
  double h_s = 0.0;
  double tau_star = 0.0;  // NaN when no stable tau was found
  std::vector<CflProbe> probes;
};
std::vector<CflBoundaryRow> cfl_boundary_scan(const RunConfig& cfg);

struct ConvergenceRow {
  double level = 0.0;  // h = 1/N for spatial, tau for temporal
  ErrorTriple err;
};
struct ConvergenceTable {
  std::string scheme;
  std::vector<ConvergenceRow> rows;
  std::vector<double> rate_u, rate_d_dot, rate_d_s;
  // Largest normalized intermediate-velocity residual over the table's runs
  // (split schemes; zero otherwise).
  double max_intermediate_residual = 0.0;
};
std::vector<ConvergenceTable> spatial_convergence(const RunConfig& cfg);
std::vector<ConvergenceTable> temporal_convergence(const RunConfig& cfg);

struct TrajectorySeries {
  std::string scheme;
  double tau = 0.0;
  std::vector<TrajectoryPoint> points;  // includes t = 0
};
std::vector<TrajectorySeries> trajectory_run(const RunConfig& cfg);

// ---- CSV emission (every table carries the config hash) ----

void write_energy_csv(std::ostream& os, const RunConfig& cfg,
                      const std::vector<EnergyRecord>& records);
void write_trajectory_csv(std::ostream& os, const RunConfig& cfg,
                          const std::vector<TrajectorySeries>& series);
void write_stability_csv(std::ostream& os, const RunConfig& cfg,
                         const std::vector<StabilityRow>& rows);
void write_cfl_csv(std::ostream& os, const RunConfig& cfg,
                   const std::vector<CflBoundaryRow>& rows);
void write_convergence_csv(std::ostream& os, const RunConfig& cfg,
                           const std::string& level_name,
                           const std::vector<ConvergenceTable>& tables);

}  // namespace fsi
