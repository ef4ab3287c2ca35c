#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fsikit/assembly.hpp"
#include "fsikit/diagnostics.hpp"
#include "fsikit/geometry.hpp"
#include "fsikit/sparse.hpp"

namespace fsi {

enum class SchemeType { Strong, Explicit, Split };

std::string to_string(SchemeType t);
SchemeType scheme_from_string(const std::string& s);

struct SchemeConfig {
  SchemeType type = SchemeType::Strong;
  int extrapolation_order = 1;  // r in {1, 2}; split scheme only
  double tau = 0.01;
  double t_end = 3.0;
  bool linearized = false;       // drop convection
  bool frozen_geometry = false;  // keep coupling at the initial interface
  bool preload = true;           // elastic force acts on X_ref + d

  void validate() const;
};

struct State {
  double time = 0.0;
  int step = 0;
  std::vector<double> u, p, lambda, d, d_dot;
  std::vector<double> d_dot_half;  // split scheme only
};

// d* for the split scheme: r=1 uses d^{n-1}, r=2 adds tau * d_dot^{n-1}.
std::vector<double> extrapolate_displacement(const std::vector<double>& d_prev,
                                             const std::vector<double>& d_dot_prev,
                                             int r, double tau);

struct StepRecord {
  EnergyRecord energy;
  double solver_residual = 0.0;       // relative LU residual of the big solve
  double intermediate_residual = 0.0; // split: lemma check on d_dot_half
};

// One coupled problem: mesh + curve + parameters + scheme, with the constant
// operators assembled once. step() advances the stored state by tau.
class Simulation {
 public:
  Simulation(Mesh2D mesh, CurveMesh curve, PhysicsParams physics,
             SchemeConfig scheme);

  const Mesh2D& mesh() const { return mesh_; }
  const CurveMesh& curve() const { return curve_; }
  const PhysicsParams& physics() const { return physics_; }
  const SchemeConfig& scheme() const { return scheme_; }
  const DofMap& dofs() const { return dofs_; }
  const State& state() const { return state_; }
  void set_state(State s);  // sizes and mean-pressure checked

  StepRecord step();
  // Scheme-specific entry points; calling the wrong one is a usage error.
  StepRecord step_strong();
  StepRecord step_explicit();
  StepRecord step_split();

  // L_h w = M_s^{-1} K_s w (density-free mass).
  std::vector<double> apply_discrete_elastic(const std::vector<double>& w) const;
  // ||d_dot_half - d_dot - (tau/rho_s) L_h(d - d*)||_{L2(Sigma)}; only
  // defined after a split step.
  double intermediate_velocity_residual() const;
  std::vector<double> extrapolated_displacement() const;

  double total_energy() const;
  // Record at the current state; increment/residual fields are zero for the
  // initial state.
  EnergyRecord current_energy_record() const;

  // Assembled constant operators (density-free mass matrices).
  const SparseMatrix& fluid_mass_hat() const { return mass_f_; }
  const SparseMatrix& viscous() const { return visc_; }
  const SparseMatrix& div_matrix() const { return div_; }
  const SparseMatrix& stabilization() const { return stab_; }
  const SparseMatrix& solid_mass_hat() const { return mass_s_; }
  const SparseMatrix& solid_stiffness_matrix() const { return ks_; }
  const SparseMatrix& pairing() const { return cw_; }
  // Coupling at the geometry used by the last assembled step (initial one
  // before any step, frozen one in frozen-geometry mode).
  const SparseMatrix& coupling_matrix() const { return c_; }

  std::vector<double> total_position() const;  // X = X_ref + d (or d)

 private:
  struct SplitAux {
    std::optional<Factorization> step2;  // rho_s/tau^2 M + K_s
    std::vector<double> d_star;          // extrapolation used by last step
  };

  StepRecord advance(SchemeType type);
  void refresh_coupling();
  std::vector<double> solve_coupled(const std::vector<double>& rhs,
                                    double* residual);
  EnergyRecord finish_step(const State& prev, State next,
                           const std::vector<double>& w_constraint,
                           double sigma_dx, const std::vector<double>* d_star);

  Mesh2D mesh_;
  CurveMesh curve_;
  PhysicsParams physics_;
  SchemeConfig scheme_;
  DofMap dofs_;
  BlockLayout layout_;

  SparseMatrix mass_f_, visc_, div_, stab_, mass_s_, ks_, cw_, c_;
  std::vector<double> m_vec_;    // mean-pressure constraint
  std::vector<double> pin_vec_;  // single-entry stand-in used for factoring
  double m_total_ = 0.0;         // sum of m_vec_, the box area
  std::vector<double> load_;   // preload (zero when disabled)
  std::vector<int> boundary_dofs_;
  Factorization mass_s_lu_;

  std::optional<Factorization> frozen_lu_;  // reused in linearized+frozen mode
  SparseMatrix frozen_a_;                   // matrix of the last factorization
  SplitAux split_;
  State state_;
};

struct CflReport {
  double h_s = 0.0;
  double c_i_estimate = 0.0;      // from the curve's generalized eigenvalue
  double parabolic_bound = 0.0;   // rho_s / (C_I beta_s) * h_s^2
  double split_r2_bound = 0.0;    // alpha (rho_s / C_I)^{2/3} h_s^{4/3}
  bool tau_within_parabolic = false;
  bool tau_within_split_r2 = false;
  bool alpha_condition_ok = false;  // 2 tau alpha^3 < 1
};

// Advisory time-step bounds; never enforced by the steppers.
CflReport cfl_bounds(const PhysicsParams& physics, const CurveMesh& curve,
                     double tau, double alpha = 1.0, double beta_s = 1.0);

// Largest generalized eigenvalue of (K_s(kappa), M_s) scaled by h_s^2;
// computed by power iteration.
double estimate_inverse_constant(const CurveMesh& curve, double kappa);

}  // namespace fsi
