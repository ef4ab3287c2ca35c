#include "fsikit/assembly.hpp"

#include <algorithm>
#include <cmath>

namespace fsi {

void PhysicsParams::validate() const {
  if (!(rho_f > 0.0) || !(rho_s > 0.0) || !(mu > 0.0) || !(kappa > 0.0) ||
      !(gamma > 0.0))
    throw ConfigError("physics: rho_f, rho_s, mu, kappa, gamma must be > 0");
}

DofMap make_dof_map(const Mesh2D& mesh, const CurveMesh& curve) {
  return DofMap{mesh.n_vertices(), curve.n_nodes()};
}

std::vector<int> boundary_velocity_dofs(const Mesh2D& mesh) {
  std::vector<int> dofs;
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (mesh.boundary_vertex(v)) {
      dofs.push_back(DofMap::u_dof(v, 0));
      dofs.push_back(DofMap::u_dof(v, 1));
    }
  return dofs;
}

std::array<double, 3> barycentric_coordinates(const Mesh2D& m, int tri,
                                              Vec2 p) {
  const auto& t = m.triangles[tri];
  Vec2 a = m.vertices[t[0]], b = m.vertices[t[1]], c = m.vertices[t[2]];
  Vec2 e1 = b - a, e2 = c - a, vp = p - a;
  double det = cross(e1, e2);
  double l1 = cross(vp, e2) / det;
  double l2 = cross(e1, vp) / det;
  return {1.0 - l1 - l2, l1, l2};
}

namespace {

struct TriGeom {
  std::array<Vec2, 3> grad;  // gradients of the three P1 basis functions
  double area;
};

TriGeom tri_geometry(const Mesh2D& m, int tri) {
  const auto& t = m.triangles[tri];
  Vec2 v0 = m.vertices[t[0]], v1 = m.vertices[t[1]], v2 = m.vertices[t[2]];
  double twice_area = cross(v1 - v0, v2 - v0);
  TriGeom g;
  g.area = 0.5 * twice_area;
  g.grad[0] = {(v1.y - v2.y) / twice_area, (v2.x - v1.x) / twice_area};
  g.grad[1] = {(v2.y - v0.y) / twice_area, (v0.x - v2.x) / twice_area};
  g.grad[2] = {(v0.y - v1.y) / twice_area, (v1.x - v0.x) / twice_area};
  return g;
}

constexpr double kMassLocal[3][3] = {{2, 1, 1}, {1, 2, 1}, {1, 1, 2}};

}  // namespace

SparseMatrix fluid_mass(const Mesh2D& mesh) {
  std::vector<Triplet> t;
  t.reserve(mesh.n_triangles() * 18);
  for (int k = 0; k < mesh.n_triangles(); ++k) {
    const auto& tri = mesh.triangles[k];
    double w = mesh.triangle_area() / 12.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int c = 0; c < 2; ++c)
          t.push_back({DofMap::u_dof(tri[i], c), DofMap::u_dof(tri[j], c),
                       w * kMassLocal[i][j]});
  }
  int n = 2 * mesh.n_vertices();
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

SparseMatrix pressure_mass(const Mesh2D& mesh) {
  std::vector<Triplet> t;
  t.reserve(mesh.n_triangles() * 9);
  for (int k = 0; k < mesh.n_triangles(); ++k) {
    const auto& tri = mesh.triangles[k];
    double w = mesh.triangle_area() / 12.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        t.push_back({tri[i], tri[j], w * kMassLocal[i][j]});
  }
  int n = mesh.n_vertices();
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

SparseMatrix viscous_stiffness(const Mesh2D& mesh, double mu) {
  std::vector<Triplet> t;
  t.reserve(mesh.n_triangles() * 36);
  for (int k = 0; k < mesh.n_triangles(); ++k) {
    const auto& tri = mesh.triangles[k];
    TriGeom g = tri_geometry(mesh, k);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double gij = dot(g.grad[i], g.grad[j]);
        double gi[2] = {g.grad[i].x, g.grad[i].y};
        double gj[2] = {g.grad[j].x, g.grad[j].y};
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            double val = mu * g.area * ((a == b ? gij : 0.0) + gi[b] * gj[a]);
            t.push_back(
                {DofMap::u_dof(tri[i], a), DofMap::u_dof(tri[j], b), val});
          }
      }
  }
  int n = 2 * mesh.n_vertices();
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

SparseMatrix divergence(const Mesh2D& mesh) {
  std::vector<Triplet> t;
  t.reserve(mesh.n_triangles() * 18);
  for (int k = 0; k < mesh.n_triangles(); ++k) {
    const auto& tri = mesh.triangles[k];
    TriGeom g = tri_geometry(mesh, k);
    double w = g.area / 3.0;
    for (int q = 0; q < 3; ++q)
      for (int j = 0; j < 3; ++j) {
        t.push_back({tri[q], DofMap::u_dof(tri[j], 0), w * g.grad[j].x});
        t.push_back({tri[q], DofMap::u_dof(tri[j], 1), w * g.grad[j].y});
      }
  }
  return SparseMatrix::from_triplets(mesh.n_vertices(),
                                     2 * mesh.n_vertices(), std::move(t));
}

SparseMatrix pressure_stabilization(const Mesh2D& mesh, double gamma) {
  std::vector<Triplet> t;
  t.reserve(mesh.n_triangles() * 9);
  double h2 = mesh.cell_diameter() * mesh.cell_diameter();
  for (int k = 0; k < mesh.n_triangles(); ++k) {
    const auto& tri = mesh.triangles[k];
    TriGeom g = tri_geometry(mesh, k);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        t.push_back(
            {tri[i], tri[j], gamma * h2 * g.area * dot(g.grad[i], g.grad[j])});
  }
  int n = mesh.n_vertices();
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

SparseMatrix convection(const Mesh2D& mesh, const std::vector<double>& z,
                        double rho_f) {
  if (static_cast<int>(z.size()) != 2 * mesh.n_vertices())
    throw SolverError("convection: transport field size mismatch");
  std::vector<Triplet> t;
  t.reserve(mesh.n_triangles() * 18);
  for (int k = 0; k < mesh.n_triangles(); ++k) {
    const auto& tri = mesh.triangles[k];
    TriGeom g = tri_geometry(mesh, k);
    Vec2 zn[3];
    for (int i = 0; i < 3; ++i)
      zn[i] = {z[DofMap::u_dof(tri[i], 0)], z[DofMap::u_dof(tri[i], 1)]};
    // G[m][j] = sum_i (z_i . grad theta_j) int theta_i theta_m
    double G[3][3];
    for (int m = 0; m < 3; ++m)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int i = 0; i < 3; ++i)
          s += dot(zn[i], g.grad[j]) * (g.area / 12.0) * kMassLocal[i][m];
        G[m][j] = s;
      }
    for (int m = 0; m < 3; ++m)
      for (int j = 0; j < 3; ++j) {
        double val = 0.5 * rho_f * (G[m][j] - G[j][m]);
        if (val == 0.0) continue;
        for (int c = 0; c < 2; ++c)
          t.push_back(
              {DofMap::u_dof(tri[m], c), DofMap::u_dof(tri[j], c), val});
      }
  }
  int n = 2 * mesh.n_vertices();
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

std::vector<double> pressure_integral_vector(const Mesh2D& mesh) {
  std::vector<double> m(mesh.n_vertices(), 0.0);
  for (int k = 0; k < mesh.n_triangles(); ++k)
    for (int i = 0; i < 3; ++i)
      m[mesh.triangles[k][i]] += mesh.triangle_area() / 3.0;
  return m;
}

SparseMatrix solid_mass(const CurveMesh& curve, double rho_s) {
  int n = curve.n_nodes();
  std::vector<Triplet> t;
  t.reserve(n * 8);
  for (int k = 0; k < n; ++k) {
    int kp = (k + 1) % n;
    double w = rho_s * curve.ds(k) / 6.0;
    int nodes[2] = {k, kp};
    double local[2][2] = {{2, 1}, {1, 2}};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int c = 0; c < 2; ++c)
          t.push_back({DofMap::w_dof(nodes[i], c), DofMap::w_dof(nodes[j], c),
                       w * local[i][j]});
  }
  return SparseMatrix::from_triplets(2 * n, 2 * n, std::move(t));
}

SparseMatrix solid_stiffness(const CurveMesh& curve, double kappa) {
  int n = curve.n_nodes();
  std::vector<Triplet> t;
  t.reserve(n * 8);
  for (int k = 0; k < n; ++k) {
    int kp = (k + 1) % n;
    double w = kappa / curve.ds(k);
    int nodes[2] = {k, kp};
    double local[2][2] = {{1, -1}, {-1, 1}};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int c = 0; c < 2; ++c)
          t.push_back({DofMap::w_dof(nodes[i], c), DofMap::w_dof(nodes[j], c),
                       w * local[i][j]});
  }
  return SparseMatrix::from_triplets(2 * n, 2 * n, std::move(t));
}

std::vector<double> reference_tension_load(const CurveMesh& curve,
                                           double kappa) {
  SparseMatrix ks = solid_stiffness(curve, kappa);
  std::vector<double> xref = flatten(curve.reference_positions);
  std::vector<double> l = ks.apply(xref);
  for (double& v : l) v = -v;
  return l;
}

namespace {

void accumulate_coupling_point(const Mesh2D& mesh, std::vector<Triplet>& t,
                               int node_a, int node_b, double psi_a,
                               double psi_b, int tri,
                               const std::array<double, 3>& bary, double w) {
  const auto& tv = mesh.triangles[tri];
  const int nodes[2] = {node_a, node_b};
  const double psi[2] = {psi_a, psi_b};
  for (int i = 0; i < 2; ++i) {
    if (psi[i] == 0.0) continue;
    for (int v = 0; v < 3; ++v) {
      double val = w * psi[i] * bary[v];
      if (val == 0.0) continue;
      for (int c = 0; c < 2; ++c)
        t.push_back(
            {DofMap::w_dof(nodes[i], c), DofMap::u_dof(tv[v], c), val});
    }
  }
}

}  // namespace

SparseMatrix coupling(const Mesh2D& mesh, const CurveMesh& curve) {
  std::vector<Triplet> t;
  int n = curve.n_nodes();
  t.reserve(n * 48);
  const double gauss = 1.0 / std::sqrt(3.0);
  for (int k = 0; k < n; ++k) {
    int kp = (k + 1) % n;
    double s0 = curve.params[k];
    double ds = curve.ds(k);
    Vec2 p0 = curve.current_positions[k];
    Vec2 p1 = curve.current_positions[kp];
    auto pieces = intersect_segment(mesh, p0, p1, s0, s0 + ds);
    for (const SubSegment& piece : pieces) {
      double half = 0.5 * (piece.s_end - piece.s_begin);
      double mid = 0.5 * (piece.s_end + piece.s_begin);
      for (double gp : {-gauss, gauss}) {
        double s = mid + half * gp;
        double tt = (s - piece.s_begin) / (piece.s_end - piece.s_begin);
        Vec2 x = piece.p_begin + tt * (piece.p_end - piece.p_begin);
        auto bary = barycentric_coordinates(mesh, piece.triangle, x);
        double psi_b = (s - s0) / ds;
        accumulate_coupling_point(mesh, t, k, kp, 1.0 - psi_b, psi_b,
                                  piece.triangle, bary, half);
      }
    }
  }
  return SparseMatrix::from_triplets(2 * n, 2 * mesh.n_vertices(),
                                     std::move(t));
}

SparseMatrix coupling_composite(const Mesh2D& mesh, const CurveMesh& curve,
                                int points_per_segment) {
  std::vector<double> nodes, weights;
  gauss_legendre(points_per_segment, nodes, weights);
  std::vector<Triplet> t;
  int n = curve.n_nodes();
  t.reserve(n * points_per_segment * 12);
  for (int k = 0; k < n; ++k) {
    int kp = (k + 1) % n;
    double s0 = curve.params[k];
    double ds = curve.ds(k);
    Vec2 p0 = curve.current_positions[k];
    Vec2 p1 = curve.current_positions[kp];
    for (int q = 0; q < points_per_segment; ++q) {
      double tt = 0.5 * (nodes[q] + 1.0);
      double w = 0.5 * ds * weights[q];
      Vec2 x = p0 + tt * (p1 - p0);
      PointLocation loc = locate_point(mesh, x);
      accumulate_coupling_point(mesh, t, k, kp, 1.0 - tt, tt, loc.triangle,
                                loc.bary, w);
    }
  }
  return SparseMatrix::from_triplets(2 * n, 2 * mesh.n_vertices(),
                                     std::move(t));
}

SparseMatrix apply_dirichlet(const SparseMatrix& a,
                             const std::vector<int>& dofs) {
  std::vector<char> constrained(std::max(a.rows(), a.cols()), 0);
  for (int d : dofs) constrained[d] = 1;
  std::vector<Triplet> t;
  t.reserve(a.nnz() + dofs.size());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k) {
      int j = a.col_indices()[k];
      if (constrained[i] || constrained[j]) continue;
      t.push_back({i, j, a.values()[k]});
    }
  for (int d : dofs) t.push_back({d, d, 1.0});
  return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(t));
}

void apply_dirichlet_rhs(std::vector<double>& rhs,
                         const std::vector<int>& dofs) {
  for (int d : dofs) rhs[d] = 0.0;
}

std::vector<double> flatten(const std::vector<Vec2>& pts) {
  std::vector<double> v;
  v.reserve(2 * pts.size());
  for (const Vec2& p : pts) {
    v.push_back(p.x);
    v.push_back(p.y);
  }
  return v;
}

void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  if (n < 1) throw ConfigError("gauss_legendre: n must be >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton iteration from the Chebyshev-based initial guess.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      if (n == 1) p1 = x;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      double pn = (n == 1) ? x : p1;
      double pm = (n == 1) ? 1.0 : p0;
      dp = n * (x * pn - pm) / (x * x - 1.0);
      double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) {
    // Midpoint node of odd rules sits at zero exactly.
    nodes[n / 2] = 0.0;
  }
  if (n == 1) {
    nodes[0] = 0.0;
    weights[0] = 2.0;
  }
}

}  // namespace fsi
