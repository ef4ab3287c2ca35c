#pragma once

#include <array>
#include <vector>

#include "fsikit/geometry.hpp"
#include "fsikit/sparse.hpp"

namespace fsi {

struct PhysicsParams {
  double rho_f = 1.0;   // fluid density
  double rho_s = 1.0;   // solid density (per unit parameter length)
  double mu = 1.0;      // dynamic viscosity
  double kappa = 2.0;   // elastic modulus of the string
  double gamma = 0.1;   // pressure stabilization weight

  // Configuration-level check; the assembly routines themselves accept
  // kappa == 0 (used by scheme-degeneracy tests).
  void validate() const;
};

// Velocity dofs are vertex-interleaved (2v, 2v+1), pressure dofs are vertex
// ids, solid dofs are curve-node-interleaved. Composed-system block order is
// u, p, mean-pressure multiplier, lambda, displacement-like block.
struct DofMap {
  int n_vertices = 0;
  int n_curve_nodes = 0;

  int n_u() const { return 2 * n_vertices; }
  int n_p() const { return n_vertices; }
  int n_w() const { return 2 * n_curve_nodes; }
  static int u_dof(int vertex, int comp) { return 2 * vertex + comp; }
  static int p_dof(int vertex) { return vertex; }
  static int w_dof(int node, int comp) { return 2 * node + comp; }
};

DofMap make_dof_map(const Mesh2D& mesh, const CurveMesh& curve);

// Sorted velocity dofs on the box boundary.
std::vector<int> boundary_velocity_dofs(const Mesh2D& mesh);

// Barycentric coordinates of p in a given triangle (may be negative outside).
std::array<double, 3> barycentric_coordinates(const Mesh2D& mesh, int triangle,
                                              Vec2 p);

// ---- fluid forms (P1/P1 on the triangulation) ----

// Density-free velocity mass matrix, both components.
SparseMatrix fluid_mass(const Mesh2D& mesh);
// Scalar P1 mass matrix (pressure-sized).
SparseMatrix pressure_mass(const Mesh2D& mesh);
// 2*mu*(eps(u), eps(v))
SparseMatrix viscous_stiffness(const Mesh2D& mesh, double mu);
// (div u, q): n_p x n_u
SparseMatrix divergence(const Mesh2D& mesh);
// gamma * sum_K h_K^2 (grad p, grad q)_K
SparseMatrix pressure_stabilization(const Mesh2D& mesh, double gamma);
// Skew-symmetrized convection at transport field z (velocity dof vector):
// rho_f/2 * [(z . grad u, v) - (z . grad v, u)]
SparseMatrix convection(const Mesh2D& mesh, const std::vector<double>& z,
                        double rho_f);
// m_i = integral of the i-th pressure basis function (mean constraint).
std::vector<double> pressure_integral_vector(const Mesh2D& mesh);

// ---- solid forms (periodic P1 string) ----

SparseMatrix solid_mass(const CurveMesh& curve, double rho_s);
// L2(Sigma) pairing between multiplier and velocity-like curve fields.
inline SparseMatrix multiplier_pairing(const CurveMesh& curve) {
  return solid_mass(curve, 1.0);
}
// kappa * (d_s d, d_s w), periodic
SparseMatrix solid_stiffness(const CurveMesh& curve, double kappa);
// Constant load putting the elastic force on total position:
// l = -K_s(kappa) * X_ref
std::vector<double> reference_tension_load(const CurveMesh& curve,
                                           double kappa);

// ---- interface coupling ----

// C[(i,c),(j,c)] = int_Sigma psi_i(s) theta_j(phi(s)) ds at the curve's
// current positions; exact piecewise Gauss on curve/mesh intersections.
SparseMatrix coupling(const Mesh2D& mesh, const CurveMesh& curve);
// Cross-check variant: fixed n-point Gauss per curve segment, no
// intersections (inexact across element boundaries).
SparseMatrix coupling_composite(const Mesh2D& mesh, const CurveMesh& curve,
                                int points_per_segment);

// ---- boundary conditions ----

// Rows and columns of `dofs` are replaced by identity (homogeneous data).
SparseMatrix apply_dirichlet(const SparseMatrix& a,
                             const std::vector<int>& dofs);
void apply_dirichlet_rhs(std::vector<double>& rhs,
                         const std::vector<int>& dofs);

// ---- small utilities ----

std::vector<double> flatten(const std::vector<Vec2>& pts);
// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights);

}  // namespace fsi
