#pragma once

#include <vector>

#include "fsikit/assembly.hpp"
#include "fsikit/geometry.hpp"
#include "fsikit/sparse.hpp"

namespace fsi {

// Per-step energy bookkeeping. E is the doubled energy
// rho_f ||u||^2 + rho_s ||d_dot||^2 + ||X||_s^2; the augmented terms are
// tau^2 ||X_dot||_s^2 and tau^2/(2 rho_s) ||L_h X||^2 as monitored by the
// stability analysis. Residuals are normalized by their natural scales.
struct EnergyRecord {
  double time = 0.0;
  double E = 0.0;
  double D_increment = 0.0;
  double aug_velocity = 0.0;
  double aug_elastic = 0.0;
  double constraint_residual = 0.0;
  double identity_residual = 0.0;
};

struct ErrorTriple {
  double err_u = 0.0;      // L2(Omega) velocity error
  double err_d_dot = 0.0;  // L2(Sigma) interface-velocity error
  double err_d_s = 0.0;    // ||.||_s displacement error
};

// Quadratic-form norms; the matrix fixes the inner product.
double norm_L2_omega(const SparseMatrix& fluid_mass_hat,
                     const std::vector<double>& u);
double norm_L2_sigma(const SparseMatrix& solid_mass_hat,
                     const std::vector<double>& w);
double norm_s(const SparseMatrix& solid_stiffness,
              const std::vector<double>& d);
double seminorm_sh(const SparseMatrix& stabilization,
                   const std::vector<double>& p);

double total_energy(double rho_f, const SparseMatrix& fluid_mass_hat,
                    const std::vector<double>& u, double rho_s,
                    const SparseMatrix& solid_mass_hat,
                    const std::vector<double>& d_dot,
                    const SparseMatrix& solid_stiffness,
                    const std::vector<double>& x_total);

// tau * (4 mu ||eps(u)||^2 + 2 |p|_sh^2) expressed through the assembled
// operators: tau * (2 u'Ku + 2 p'Sp).
double dissipation_increment(double tau, const SparseMatrix& viscous,
                             const std::vector<double>& u,
                             const SparseMatrix& stabilization,
                             const std::vector<double>& p);

// Pointwise P1 evaluation.
Vec2 evaluate_velocity(const Mesh2D& mesh, const std::vector<double>& u,
                       Vec2 x);
// Periodic P1 interpolation of a nodal 2-vector field at parameter s.
Vec2 evaluate_solid(const CurveMesh& curve, const std::vector<double>& w,
                    double s);

struct ControlPoints {
  double A_x = 0.0;  // x-coordinate of the point at s = 0
  double B_y = 0.0;  // y-coordinate of the point at s = pi/2
};
ControlPoints control_points(const CurveMesh& curve);

// Successive log2 error ratios; rates[k] = log2(e[k] / e[k+1]).
std::vector<double> convergence_rates(const std::vector<double>& errors);

struct FieldSnapshot {
  const Mesh2D* mesh = nullptr;
  const CurveMesh* curve = nullptr;
  const std::vector<double>* u = nullptr;
  const std::vector<double>* d = nullptr;
  const std::vector<double>* d_dot = nullptr;
  double time = 0.0;
};

// Errors of a coarse snapshot against a reference on a nested finer pair
// (refinement ratios powers of two, same box and final time). The fluid
// error integrates |u_c - u_r|^2 with the 3-point edge-midpoint rule on the
// finer mesh (exact here); solid errors interpolate the coarse fields onto
// the finer curve nodes.
ErrorTriple error_vs_reference(const FieldSnapshot& coarse,
                               const FieldSnapshot& reference, double kappa);

}  // namespace fsi
