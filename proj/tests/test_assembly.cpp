#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fsikit/assembly.hpp"
#include "fsikit/geometry.hpp"
#include "fsikit/sparse.hpp"
#include "oracles.hpp"

using namespace fsi;

namespace {

// Nodal interpolant of a vector field onto velocity dofs.
template <typename F>
std::vector<double> interpolate_velocity(const Mesh2D& m, F f) {
  std::vector<double> u(2 * m.n_vertices(), 0.0);
  for (int v = 0; v < m.n_vertices(); ++v) {
    Vec2 val = f(m.vertices[v]);
    u[DofMap::u_dof(v, 0)] = val.x;
    u[DofMap::u_dof(v, 1)] = val.y;
  }
  return u;
}

template <typename F>
std::vector<double> interpolate_pressure(const Mesh2D& m, F f) {
  std::vector<double> p(m.n_vertices(), 0.0);
  for (int v = 0; v < m.n_vertices(); ++v) p[v] = f(m.vertices[v]);
  return p;
}

double max_symmetry_defect(const SparseMatrix& a) {
  SparseMatrix at = a.transposed();
  SparseMatrix diff = add(a, at.scaled(-1.0));
  double m = 0.0;
  for (double v : diff.values()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_SUITE_BEGIN("assembly");

TEST_CASE("fluid mass: symmetry, partition of unity, local entries") {
  Mesh2D m = build_structured_mesh(3, 2, 0.0, 0.0, 1.5, 1.0);
  SparseMatrix mass = fluid_mass(m);
  CHECK(max_symmetry_defect(mass) == 0.0);

  std::vector<double> ones(mass.cols(), 1.0);
  double total = 0.0;
  for (double v : mass.apply(ones)) total += v;
  // Both components together integrate (1,1).(1,1) = 2 |Omega|.
  CHECK(total == doctest::Approx(2.0 * 1.5).epsilon(1e-13));

  // Single-cell mesh: analytic P1 mass entries (area/6 diag per element,
  // area/12 off-diagonal).
  Mesh2D unit = build_structured_mesh(1, 1);
  SparseMatrix mu = fluid_mass(unit);
  // vertex 1 = (1,0) belongs to the lower triangle only.
  CHECK(mu.coeff(DofMap::u_dof(1, 0), DofMap::u_dof(1, 0)) ==
        doctest::Approx(0.5 / 6.0).epsilon(1e-15));
  // vertex 0 = (0,0) belongs to both triangles.
  CHECK(mu.coeff(DofMap::u_dof(0, 0), DofMap::u_dof(0, 0)) ==
        doctest::Approx(2.0 * 0.5 / 6.0).epsilon(1e-15));
  // edge (0,0)-(1,0): one shared triangle.
  CHECK(mu.coeff(DofMap::u_dof(0, 1), DofMap::u_dof(1, 1)) ==
        doctest::Approx(0.5 / 12.0).epsilon(1e-15));
  // opposite corners (1,0) and (0,1): no shared triangle.
  CHECK(mu.coeff(DofMap::u_dof(1, 0), DofMap::u_dof(2, 0)) == 0.0);
  // components never mix
  CHECK(mu.coeff(DofMap::u_dof(0, 0), DofMap::u_dof(0, 1)) == 0.0);
}

TEST_CASE("viscous stiffness: kernel and analytic quadratic form") {
  Mesh2D m = build_structured_mesh(4, 4);
  double mu = 3.0;
  SparseMatrix k = viscous_stiffness(m, mu);
  CHECK(max_symmetry_defect(k) <= 1e-15);

  std::vector<double> c = interpolate_velocity(m, [](Vec2) {
    return Vec2{2.0, -1.0};
  });
  for (double v : k.apply(c)) CHECK(std::abs(v) <= 1e-14);

  std::vector<double> rot = interpolate_velocity(m, [](Vec2 x) {
    return Vec2{-x.y, x.x};
  });
  for (double v : k.apply(rot)) CHECK(std::abs(v) <= 1e-13);

  // u = (x, 0): eps = diag(1, 0), 2 mu int eps:eps = 2 mu |Omega|.
  std::vector<double> shear = interpolate_velocity(m, [](Vec2 x) {
    return Vec2{x.x, 0.0};
  });
  CHECK(k.quadratic(shear) == doctest::Approx(2.0 * mu).epsilon(1e-13));

  oracle::Rng rng(3);
  for (int t = 0; t < 5; ++t)
    CHECK(k.quadratic(rng.vector(k.cols())) >= -1e-12);
}

TEST_CASE("divergence: constants, solenoidal field, analytic pairing") {
  Mesh2D m = build_structured_mesh(5, 3);
  SparseMatrix b = divergence(m);

  std::vector<double> c = interpolate_velocity(m, [](Vec2) {
    return Vec2{1.0, 2.0};
  });
  for (double v : b.apply(c)) CHECK(std::abs(v) <= 1e-14);

  std::vector<double> sol = interpolate_velocity(m, [](Vec2 x) {
    return Vec2{x.x, -x.y};
  });
  for (double v : b.apply(sol)) CHECK(std::abs(v) <= 1e-13);

  std::vector<double> shear = interpolate_velocity(m, [](Vec2 x) {
    return Vec2{x.x, 0.0};
  });
  std::vector<double> q(m.n_vertices(), 1.0);
  CHECK(b.bilinear(q, shear) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("pressure stabilization: kernel, positivity, analytic value") {
  Mesh2D m = build_structured_mesh(1, 1);
  double gamma = 0.1;
  SparseMatrix s = pressure_stabilization(m, gamma);
  CHECK(max_symmetry_defect(s) == 0.0);

  std::vector<double> c(m.n_vertices(), 3.25);
  for (double v : s.apply(c)) CHECK(std::abs(v) <= 1e-15);

  // p = x on the unit box: grad p = (1,0) on both triangles, h_K = sqrt(2):
  // p'Sp = gamma * sum_K h_K^2 * area_K = gamma * 2 * (2 * 0.5).
  std::vector<double> px = interpolate_pressure(m, [](Vec2 x) { return x.x; });
  CHECK(s.quadratic(px) == doctest::Approx(gamma * 2.0).epsilon(1e-14));

  oracle::Rng rng(8);
  Mesh2D m2 = build_structured_mesh(4, 3);
  SparseMatrix s2 = pressure_stabilization(m2, gamma);
  for (int t = 0; t < 5; ++t)
    CHECK(s2.quadratic(rng.vector(s2.cols())) >= 0.0);
}

TEST_CASE("convection: exact skew symmetry and structure") {
  Mesh2D m = build_structured_mesh(3, 3);
  oracle::Rng rng(21);
  std::vector<double> z = rng.vector(2 * m.n_vertices());
  SparseMatrix n = convection(m, z, 1.0);

  // N + N^T vanishes entry-by-entry (assembled antisymmetrized).
  SparseMatrix sum = add(n, n.transposed());
  for (double v : sum.values()) CHECK(v == 0.0);

  for (int t = 0; t < 5; ++t) {
    std::vector<double> v = rng.vector(n.cols());
    double scale = n.bilinear(v, z) + 1.0;
    CHECK(std::abs(n.quadratic(v)) <= 1e-13 * std::abs(scale));
  }

  std::vector<double> zero(2 * m.n_vertices(), 0.0);
  SparseMatrix n0 = convection(m, zero, 1.0);
  for (double v : n0.values()) CHECK(v == 0.0);
}

TEST_CASE("convection entries match the dense 7-point Gauss oracle") {
  Mesh2D m = build_structured_mesh(2, 2);
  oracle::Rng rng(42);
  double rho_f = 1.75;
  std::vector<double> z = rng.vector(2 * m.n_vertices());
  SparseMatrix n = convection(m, z, rho_f);
  auto ref = oracle::convection_dense(m, z, rho_f);
  CHECK(oracle::max_abs_diff(oracle::dense(n), ref) <= 1e-14);
}

TEST_CASE("solid mass: partition, periodic wrap, local entries") {
  double rho_s = 2.5;
  CurveMesh c = build_ellipse_curve(9, {0.5, 0.5}, 0.3, 0.2);
  SparseMatrix ms = solid_mass(c, rho_s);
  CHECK(max_symmetry_defect(ms) == 0.0);

  std::vector<double> ones(ms.cols(), 1.0);
  double total = 0.0;
  for (double v : ms.apply(ones)) total += v;
  CHECK(total == doctest::Approx(2.0 * rho_s * 2.0 * M_PI).epsilon(1e-13));

  // Row of node 0 couples the last node and node 1 (closure).
  int n = c.n_seg;
  CHECK(ms.coeff(DofMap::w_dof(0, 0), DofMap::w_dof(n - 1, 0)) > 0.0);
  CHECK(ms.coeff(DofMap::w_dof(0, 0), DofMap::w_dof(1, 0)) > 0.0);
  CHECK(ms.coeff(DofMap::w_dof(0, 0), DofMap::w_dof(2, 0)) == 0.0);

  // Uniform 4-node curve: per-segment local mass rho_s*ds/6 * [[2,1],[1,2]].
  CurveMesh c4 = build_ellipse_curve(4, {0.5, 0.5}, 0.2, 0.2);
  SparseMatrix m4 = solid_mass(c4, rho_s);
  double ds = M_PI / 2.0;
  CHECK(m4.coeff(DofMap::w_dof(0, 0), DofMap::w_dof(0, 0)) ==
        doctest::Approx(2.0 * 2.0 * rho_s * ds / 6.0).epsilon(1e-14));
  CHECK(m4.coeff(DofMap::w_dof(0, 1), DofMap::w_dof(1, 1)) ==
        doctest::Approx(rho_s * ds / 6.0).epsilon(1e-14));
}

TEST_CASE("multiplier pairing equals the density-free solid mass") {
  CurveMesh c = build_ellipse_curve(7, {0.5, 0.5}, 0.25, 0.15);
  SparseMatrix pair = multiplier_pairing(c);
  SparseMatrix ms = solid_mass(c, 1.0);
  CHECK(pair.row_offsets() == ms.row_offsets());
  CHECK(pair.col_indices() == ms.col_indices());
  CHECK(pair.values() == ms.values());

  // c(mu, const w) = (int mu) * w, realized through the transpose action.
  oracle::Rng rng(17);
  std::vector<double> mu = rng.vector(pair.rows());
  std::vector<double> w_const(pair.cols(), 0.0);
  for (int k = 0; k < c.n_nodes(); ++k) w_const[DofMap::w_dof(k, 0)] = 1.0;
  double lhs = pair.bilinear(mu, w_const);
  double integral = 0.0;  // int of the x-component of mu via exact P1 rule
  for (int k = 0; k < c.n_seg; ++k) {
    int kp = (k + 1) % c.n_seg;
    integral += 0.5 * c.ds(k) *
                (mu[DofMap::w_dof(k, 0)] + mu[DofMap::w_dof(kp, 0)]);
  }
  CHECK(lhs == doctest::Approx(integral).epsilon(1e-13));
}

TEST_CASE("solid stiffness: kernel, positivity, circulant eigenvalue") {
  double kappa = 2.0;
  CurveMesh c = build_ellipse_curve(8, {0.5, 0.5}, 0.25, 0.25);
  SparseMatrix k = solid_stiffness(c, kappa);
  CHECK(max_symmetry_defect(k) == 0.0);

  std::vector<double> cst(k.cols(), 0.0);
  for (int i = 0; i < c.n_nodes(); ++i) {
    cst[DofMap::w_dof(i, 0)] = 1.5;
    cst[DofMap::w_dof(i, 1)] = -0.25;
  }
  for (double v : k.apply(cst)) CHECK(std::abs(v) <= 1e-14);
  CHECK(k.quadratic(cst) <= 1e-14);

  oracle::Rng rng(31);
  std::vector<double> d = rng.vector(k.cols());
  CHECK(k.quadratic(d) > 0.0);

  // Mode j on the uniform parameter grid is a stiffness eigenvector with
  // eigenvalue kappa (2 - 2 cos theta) / ds.
  int n = c.n_seg;
  double ds = 2.0 * M_PI / n;
  for (int j : {1, 2, 4}) {
    double theta = 2.0 * M_PI * j / n;
    std::vector<double> v(k.cols(), 0.0);
    for (int i = 0; i < n; ++i)
      v[DofMap::w_dof(i, 0)] = std::cos(theta * i);
    double lambda = oracle::stiffness_eigenvalue(kappa, ds, theta);
    std::vector<double> kv = k.apply(v);
    for (int i = 0; i < n; ++i)
      CHECK(kv[DofMap::w_dof(i, 0)] ==
            doctest::Approx(lambda * v[DofMap::w_dof(i, 0)]).epsilon(1e-10).scale(lambda));
  }
}

TEST_CASE("reference tension load: inward pull, zero mean") {
  double kappa = 2.0;
  CurveMesh c = build_ellipse_curve(12, {0.5, 0.5}, 0.25, 0.25);
  std::vector<double> l = reference_tension_load(c, kappa);

  // Definition: l = -K_s X_ref.
  SparseMatrix ks = solid_stiffness(c, kappa);
  std::vector<double> x = flatten(c.reference_positions);
  std::vector<double> kx = ks.apply(x);
  for (size_t i = 0; i < l.size(); ++i)
    CHECK(l[i] == doctest::Approx(-kx[i]).epsilon(1e-14));

  // Circle: load points radially inward at every node.
  for (int k = 0; k < c.n_nodes(); ++k) {
    Vec2 outward = c.reference_positions[k] - Vec2{0.5, 0.5};
    double along = outward.x * l[DofMap::w_dof(k, 0)] +
                   outward.y * l[DofMap::w_dof(k, 1)];
    CHECK(along < 0.0);
  }

  // Orthogonal to constants per component.
  double sx = 0.0, sy = 0.0;
  for (int k = 0; k < c.n_nodes(); ++k) {
    sx += l[DofMap::w_dof(k, 0)];
    sy += l[DofMap::w_dof(k, 1)];
  }
  CHECK(std::abs(sx) <= 1e-12);
  CHECK(std::abs(sy) <= 1e-12);
}

TEST_CASE("coupling: partition of unity row sums and constant fields") {
  Mesh2D m = build_structured_mesh(5, 5);
  CurveMesh c = oracle::star_curve(10, {0.5, 0.5}, 0.28, 0.05, 3);
  SparseMatrix cpl = coupling(m, c);
  SparseMatrix pair = multiplier_pairing(c);

  // C applied to u == 1 in one component reproduces int psi_i, i.e. the
  // pairing row sums of that component.
  for (int comp = 0; comp < 2; ++comp) {
    std::vector<double> u(cpl.cols(), 0.0);
    for (int v = 0; v < m.n_vertices(); ++v) u[DofMap::u_dof(v, comp)] = 1.0;
    std::vector<double> cu = cpl.apply(u);
    std::vector<double> ones(pair.cols(), 0.0);
    for (int k = 0; k < c.n_nodes(); ++k) ones[DofMap::w_dof(k, comp)] = 1.0;
    std::vector<double> pu = pair.apply(ones);
    for (size_t i = 0; i < cu.size(); ++i)
      CHECK(cu[i] == doctest::Approx(pu[i]).epsilon(1e-12));
  }
}

TEST_CASE("coupling matches the dense bisection oracle") {
  // 2x2 mesh with the 4-segment square curve, then meshes {2,4,8} with
  // random star curves of 8..16 segments.
  {
    Mesh2D m = build_structured_mesh(2, 2);
    CurveMesh c = build_ellipse_curve(4, {0.5, 0.5}, 0.3, 0.3);
    SparseMatrix cpl = coupling(m, c);
    oracle::CouplingOracle ref(m, c);
    CHECK(oracle::max_abs_diff(oracle::dense(cpl), ref.matrix()) <= 1e-10);
  }
  oracle::Rng rng(64);
  for (int n : {2, 4, 8}) {
    Mesh2D m = build_structured_mesh(n, n);
    int n_seg = 8 + static_cast<int>(rng.uniform(0.0, 8.99));
    CurveMesh c = oracle::star_curve(n_seg, {0.5, 0.5}, 0.3,
                                     rng.uniform(0.02, 0.08), 2 + n % 3);
    SparseMatrix cpl = coupling(m, c);
    oracle::CouplingOracle ref(m, c);
    CHECK(oracle::max_abs_diff(oracle::dense(cpl), ref.matrix()) <= 1e-10);
  }
}

TEST_CASE("composite-quadrature fallback approaches the exact coupling") {
  Mesh2D m = build_structured_mesh(4, 4);
  CurveMesh c = build_ellipse_curve(12, {0.5, 0.5}, 0.3, 0.2);
  SparseMatrix exact = coupling(m, c);
  double gap32 = oracle::max_abs_diff(oracle::dense(coupling_composite(m, c, 32)),
                                      oracle::dense(exact));
  double gap4 = oracle::max_abs_diff(oracle::dense(coupling_composite(m, c, 4)),
                                     oracle::dense(exact));
  CHECK(gap32 <= 1e-4);
  CHECK(gap32 < gap4);
}

TEST_CASE("dirichlet elimination: identity rows, untouched interior, SPD") {
  Mesh2D m = build_structured_mesh(4, 4);
  SparseMatrix k = add(viscous_stiffness(m, 1.0), fluid_mass(m));
  std::vector<int> bnd = boundary_velocity_dofs(m);
  CHECK(std::is_sorted(bnd.begin(), bnd.end()));
  SparseMatrix kc = apply_dirichlet(k, bnd);
  CHECK(max_symmetry_defect(kc) == 0.0);

  std::vector<bool> is_bnd(k.rows(), false);
  for (int d : bnd) is_bnd[d] = true;
  for (int d : bnd) {
    CHECK(kc.coeff(d, d) == 1.0);
    for (int j = 0; j < k.cols(); ++j)
      if (j != d) {
        CHECK(kc.coeff(d, j) == 0.0);
        CHECK(kc.coeff(j, d) == 0.0);
      }
  }
  for (int i = 0; i < k.rows(); ++i)
    for (int j = 0; j < k.cols(); ++j)
      if (!is_bnd[i] && !is_bnd[j]) CHECK(kc.coeff(i, j) == k.coeff(i, j));

  // Constrained system is SPD: factorization succeeds and the solution has
  // exact zeros on the boundary after the RHS is zeroed there.
  oracle::Rng rng(55);
  std::vector<double> rhs = rng.vector(k.rows());
  apply_dirichlet_rhs(rhs, bnd);
  std::vector<double> x = factorize(kc).solve(rhs);
  for (int d : bnd) CHECK(x[d] == 0.0);
  CHECK(relative_residual(kc, x, rhs) <= 1e-10);
}

TEST_CASE("dof map layout") {
  Mesh2D m = build_structured_mesh(3, 2);
  CurveMesh c = build_ellipse_curve(5, {0.5, 0.5}, 0.2, 0.2);
  DofMap dofs = make_dof_map(m, c);
  CHECK(dofs.n_u() == 2 * m.n_vertices());
  CHECK(dofs.n_p() == m.n_vertices());
  CHECK(dofs.n_w() == 2 * c.n_nodes());
  CHECK(DofMap::u_dof(3, 1) == 7);
  CHECK(DofMap::w_dof(2, 0) == 4);
}

TEST_CASE("physics validation accepts the benchmark, rejects nonpositive") {
  PhysicsParams p;
  CHECK_NOTHROW(p.validate());
  PhysicsParams bad = p;
  bad.kappa = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = p;
  bad.mu = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_SUITE_END();
