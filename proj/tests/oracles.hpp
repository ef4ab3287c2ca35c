#pragma once

// Shared independent oracles for the unit suites. Everything here is written
// against definitions (dense loops, closed forms, high-order quadrature), not
// against the library's own assembly paths, so agreement is evidence.

#include <cmath>
#include <cstdint>
#include <vector>

#include "fsikit/assembly.hpp"
#include "fsikit/geometry.hpp"
#include "fsikit/sparse.hpp"

namespace oracle {

// Deterministic uniform doubles in [lo, hi); xorshift so values are identical
// on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  double uniform(double lo, double hi) {
    s_ ^= s_ << 13;
    s_ ^= s_ >> 7;
    s_ ^= s_ << 17;
    double u = static_cast<double>(s_ >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  std::vector<double> vector(int n, double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (double& x : v) x = uniform(lo, hi);
    return v;
  }

 private:
  std::uint64_t s_;
};

inline std::vector<std::vector<double>> dense(const fsi::SparseMatrix& a) {
  std::vector<std::vector<double>> d(a.rows(), std::vector<double>(a.cols(), 0.0));
  const auto& off = a.row_offsets();
  for (int i = 0; i < a.rows(); ++i)
    for (int k = off[i]; k < off[i + 1]; ++k)
      d[i][a.col_indices()[k]] += a.values()[k];
  return d;
}

inline double max_abs_diff(const std::vector<std::vector<double>>& a,
                           const std::vector<std::vector<double>>& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a[i].size(); ++j)
      m = std::max(m, std::abs(a[i][j] - b[i][j]));
  return m;
}

// 7-point Gauss rule on a triangle, exact through degree 5.
struct TrianglePoint {
  double l0, l1, l2, w;  // barycentric coordinates and weight (times area)
};

inline const std::vector<TrianglePoint>& triangle_gauss7() {
  static const double a = 0.059715871789770, b = 0.470142064105115;
  static const double c = 0.797426985353087, d = 0.101286507323456;
  static const double w1 = 0.225, w2 = 0.132394152788506,
                      w3 = 0.125939180544827;
  static const std::vector<TrianglePoint> pts = {
      {1.0 / 3, 1.0 / 3, 1.0 / 3, w1}, {a, b, b, w2}, {b, a, b, w2},
      {b, b, a, w2},                   {c, d, d, w3}, {d, c, d, w3},
      {d, d, c, w3}};
  return pts;
}

// Skew-symmetrized convection matrix by direct dense quadrature:
// N[(i,c),(j,c)] = rho_f/2 * int (z . grad phi_j) phi_i - (z . grad phi_i) phi_j
// with z the P1-interpolated transport field.
inline std::vector<std::vector<double>> convection_dense(
    const fsi::Mesh2D& mesh, const std::vector<double>& z, double rho_f) {
  int n_u = 2 * mesh.n_vertices();
  std::vector<std::vector<double>> n(n_u, std::vector<double>(n_u, 0.0));
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    fsi::Vec2 v0 = mesh.vertices[tri[0]], v1 = mesh.vertices[tri[1]],
              v2 = mesh.vertices[tri[2]];
    double det = fsi::cross(v1 - v0, v2 - v0);
    double area = 0.5 * det;
    // Constant P1 gradients on the triangle.
    fsi::Vec2 g[3] = {{(v1.y - v2.y) / det, (v2.x - v1.x) / det},
                      {(v2.y - v0.y) / det, (v0.x - v2.x) / det},
                      {(v0.y - v1.y) / det, (v1.x - v0.x) / det}};
    for (const auto& q : triangle_gauss7()) {
      double l[3] = {q.l0, q.l1, q.l2};
      fsi::Vec2 zq{0, 0};
      for (int k = 0; k < 3; ++k) {
        zq.x += l[k] * z[fsi::DofMap::u_dof(tri[k], 0)];
        zq.y += l[k] * z[fsi::DofMap::u_dof(tri[k], 1)];
      }
      double w = q.w * area;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          double adv_ji = fsi::dot(zq, g[j]) * l[i];  // (z.grad phi_j) phi_i
          double adv_ij = fsi::dot(zq, g[i]) * l[j];
          double val = 0.5 * rho_f * w * (adv_ji - adv_ij);
          for (int c = 0; c < 2; ++c)
            n[fsi::DofMap::u_dof(tri[i], c)][fsi::DofMap::u_dof(tri[j], c)] +=
                val;
        }
    }
  }
  return n;
}

// Dense interface-coupling oracle, independent of intersect_segment. Each
// curve segment is bisected until a piece verifiably sits inside one triangle
// (barycentrics of both endpoints within the closed triangle), then 2-point
// Gauss integrates psi_i(s) * theta_j(phi(s)) over the parameter piece.
class CouplingOracle {
 public:
  CouplingOracle(const fsi::Mesh2D& mesh, const fsi::CurveMesh& curve)
      : mesh_(mesh), curve_(curve) {
    int n_w = 2 * curve.n_nodes();
    int n_u = 2 * mesh.n_vertices();
    c_.assign(n_w, std::vector<double>(n_u, 0.0));
    for (int k = 0; k < curve.n_seg; ++k) {
      fsi::Vec2 p0 = curve.current_positions[k];
      fsi::Vec2 p1 = curve.current_positions[(k + 1) % curve.n_seg];
      piece(k, p0, p1, 0.0, 1.0, 0);
    }
  }
  const std::vector<std::vector<double>>& matrix() const { return c_; }

 private:
  static bool inside(const std::array<double, 3>& b) {
    for (double x : b)
      if (x < -1e-13 || x > 1.0 + 1e-13) return false;
    return true;
  }

  void piece(int k, fsi::Vec2 p0, fsi::Vec2 p1, double a, double b, int depth) {
    fsi::Vec2 pa = p0 + a * (p1 - p0);
    fsi::Vec2 pb = p0 + b * (p1 - p0);
    fsi::Vec2 mid = 0.5 * (pa + pb);
    fsi::PointLocation loc = fsi::locate_point(mesh_, mid);
    auto ba = fsi::barycentric_coordinates(mesh_, loc.triangle, pa);
    auto bb = fsi::barycentric_coordinates(mesh_, loc.triangle, pb);
    if ((inside(ba) && inside(bb)) || depth >= 52) {
      integrate(k, p0, p1, a, b, loc.triangle);
      return;
    }
    double m = 0.5 * (a + b);
    piece(k, p0, p1, a, m, depth + 1);
    piece(k, p0, p1, m, b, depth + 1);
  }

  void integrate(int k, fsi::Vec2 p0, fsi::Vec2 p1, double a, double b,
                 int tri) {
    static const double xi[2] = {0.5 - 0.5 / std::sqrt(3.0),
                                 0.5 + 0.5 / std::sqrt(3.0)};
    int kp = (k + 1) % curve_.n_seg;
    double ds = curve_.ds(k);
    const auto& t = mesh_.triangles[tri];
    for (double x : xi) {
      double local = a + x * (b - a);          // in [0,1] along the segment
      fsi::Vec2 p = p0 + local * (p1 - p0);
      auto bary = fsi::barycentric_coordinates(mesh_, tri, p);
      double w = 0.5 * (b - a) * ds;           // Gauss weight on the piece
      double psi[2] = {1.0 - local, local};    // multiplier hats at s
      int nodes[2] = {k, kp};
      for (int i = 0; i < 2; ++i)
        for (int v = 0; v < 3; ++v)
          for (int c = 0; c < 2; ++c)
            c_[fsi::DofMap::w_dof(nodes[i], c)]
              [fsi::DofMap::u_dof(t[v], c)] += w * psi[i] * bary[v];
    }
  }

  const fsi::Mesh2D& mesh_;
  const fsi::CurveMesh& curve_;
  std::vector<std::vector<double>> c_;
};

// Eigenvalues of the periodic uniform-grid P1 operators for mode angle
// theta = 2*pi*j/n (per displacement component).
inline double stiffness_eigenvalue(double kappa, double ds, double theta) {
  return kappa * (2.0 - 2.0 * std::cos(theta)) / ds;
}
inline double mass_eigenvalue(double rho, double ds, double theta) {
  return rho * ds * (2.0 + std::cos(theta)) / 3.0;
}

// Elastic energy kappa * sum |X_{k+1}-X_k|^2 / ds of n points on a circle of
// radius r with uniform parameters (closed form).
inline double circle_elastic_energy(double kappa, int n, double r) {
  double s = std::sin(M_PI / n);
  return kappa * (2.0 * n * n * r * r / M_PI) * s * s;
}

// Closed star-shaped test curve: radius r(t) = base + wobble*cos(lobes*t).
inline fsi::CurveMesh star_curve(int n_seg, fsi::Vec2 center, double base,
                                 double wobble, int lobes) {
  fsi::CurveMesh c = fsi::build_ellipse_curve(n_seg, center, base, base);
  for (int k = 0; k < n_seg; ++k) {
    double t = c.params[k];
    double r = base + wobble * std::cos(lobes * t);
    c.reference_positions[k] = {center.x + r * std::cos(t),
                                center.y + r * std::sin(t)};
    c.current_positions[k] = c.reference_positions[k];
  }
  return c;
}

}  // namespace oracle
