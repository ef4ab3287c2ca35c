#include "fsikit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fsi {

Mesh2D build_structured_mesh(int nx, int ny, double x0, double y0, double x1,
                             double y1) {
  if (nx < 1 || ny < 1) throw GeometryError("mesh: nx and ny must be >= 1");
  if (!(x1 > x0) || !(y1 > y0))
    throw GeometryError("mesh: box must have positive extent");
  Mesh2D m;
  m.nx = nx;
  m.ny = ny;
  m.x0 = x0;
  m.y0 = y0;
  m.x1 = x1;
  m.y1 = y1;
  m.vertices.reserve((nx + 1) * (ny + 1));
  double hx = (x1 - x0) / nx, hy = (y1 - y0) / ny;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.vertices.push_back({i == nx ? x1 : x0 + i * hx, j == ny ? y1 : y0 + j * hy});
  m.triangles.reserve(2 * nx * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      int v00 = m.vertex_index(i, j);
      int v10 = m.vertex_index(i + 1, j);
      int v11 = m.vertex_index(i + 1, j + 1);
      int v01 = m.vertex_index(i, j + 1);
      m.triangles.push_back({v00, v10, v11});
      m.triangles.push_back({v00, v11, v01});
    }
  return m;
}

CurveMesh build_ellipse_curve(int n_seg, Vec2 center, double a, double b) {
  if (n_seg < 3) throw GeometryError("curve: need at least 3 segments");
  if (!(a > 0.0) || !(b > 0.0))
    throw GeometryError("curve: semi-axes must be positive");
  CurveMesh c;
  c.n_seg = n_seg;
  c.params.resize(n_seg);
  c.reference_positions.resize(n_seg);
  for (int k = 0; k < n_seg; ++k) {
    double s = c.period * k / n_seg;
    c.params[k] = s;
    c.reference_positions[k] = {center.x + a * std::cos(s),
                                center.y + b * std::sin(s)};
  }
  c.current_positions = c.reference_positions;
  return c;
}

bool curve_inside_box(const Mesh2D& mesh, const CurveMesh& curve) {
  for (const Vec2& p : curve.current_positions)
    if (!(p.x > mesh.x0 && p.x < mesh.x1 && p.y > mesh.y0 && p.y < mesh.y1))
      return false;
  return true;
}

namespace {

std::array<double, 3> barycentric(const Mesh2D& m, int tri, Vec2 p) {
  const auto& t = m.triangles[tri];
  Vec2 a = m.vertices[t[0]], b = m.vertices[t[1]], c = m.vertices[t[2]];
  Vec2 e1 = b - a, e2 = c - a, vp = p - a;
  double det = cross(e1, e2);
  double l1 = cross(vp, e2) / det;
  double l2 = cross(e1, vp) / det;
  return {1.0 - l1 - l2, l1, l2};
}

int clamp_cell(double f, int n) {
  int i = static_cast<int>(std::floor(f));
  return std::clamp(i, 0, n - 1);
}

}  // namespace

PointLocation locate_point(const Mesh2D& m, Vec2 p) {
  double tol_box = 1e-12 * std::max(m.x1 - m.x0, m.y1 - m.y0);
  if (p.x < m.x0 - tol_box || p.x > m.x1 + tol_box || p.y < m.y0 - tol_box ||
      p.y > m.y1 + tol_box)
    throw GeometryError("locate_point: point (" + std::to_string(p.x) + ", " +
                        std::to_string(p.y) + ") outside the mesh box");

  int ci = clamp_cell((p.x - m.x0) / m.hx(), m.nx);
  int cj = clamp_cell((p.y - m.y0) / m.hy(), m.ny);
  // Points on cell boundaries may belong to a neighboring cell's triangle
  // with a lower id, so scan the 3x3 cell neighborhood in ascending id order.
  for (double tol : {1e-10, 1e-6}) {
    PointLocation best;
    for (int j = std::max(0, cj - 1); j <= std::min(m.ny - 1, cj + 1); ++j)
      for (int i = std::max(0, ci - 1); i <= std::min(m.nx - 1, ci + 1); ++i) {
        auto [t0, t1] = m.grid_index(i, j);
        for (int t : {t0, t1}) {
          if (best.triangle >= 0 && t > best.triangle) continue;
          auto l = barycentric(m, t, p);
          if (std::min({l[0], l[1], l[2]}) >= -tol) {
            best.triangle = t;
            best.bary = l;
          }
        }
      }
    if (best.triangle >= 0) return best;
  }
  throw GeometryError("locate_point: no containing triangle found");
}

std::vector<SubSegment> intersect_segment(const Mesh2D& m, Vec2 p0, Vec2 p1,
                                          double s0, double s1) {
  double tol_box = 1e-12 * std::max(m.x1 - m.x0, m.y1 - m.y0);
  for (Vec2 p : {p0, p1})
    if (p.x < m.x0 - tol_box || p.x > m.x1 + tol_box || p.y < m.y0 - tol_box ||
        p.y > m.y1 + tol_box)
      throw GeometryError("intersect_segment: endpoint outside the mesh box");

  Vec2 d = p1 - p0;
  double len = norm(d);
  std::vector<SubSegment> pieces;

  auto point_at = [&](double t) -> Vec2 {
    if (t <= 0.0) return p0;
    if (t >= 1.0) return p1;
    return p0 + t * d;
  };
  auto emit = [&](double ta, double tb) {
    Vec2 qa = point_at(ta), qb = point_at(tb);
    Vec2 mid = 0.5 * (qa + qb);
    SubSegment s;
    s.triangle = locate_point(m, mid).triangle;
    s.s_begin = s0 + (s1 - s0) * ta;
    s.s_end = (tb >= 1.0) ? s1 : s0 + (s1 - s0) * tb;
    s.p_begin = qa;
    s.p_end = qb;
    pieces.push_back(s);
  };

  if (len < 1e-12 * m.cell_diameter()) {
    emit(0.0, 1.0);
    return pieces;
  }

  // Parameters where the segment crosses a grid line family: vertical lines,
  // horizontal lines, and cell diagonals (level sets of x-index minus
  // y-index).
  std::vector<double> cuts;
  auto add_crossings = [&](double f0, double f1) {
    if (f0 == f1) return;
    double lo = std::min(f0, f1), hi = std::max(f0, f1);
    for (double k = std::ceil(lo); k <= std::floor(hi); k += 1.0) {
      double t = (k - f0) / (f1 - f0);
      if (t > 0.0 && t < 1.0) cuts.push_back(t);
    }
  };
  double fx0 = (p0.x - m.x0) / m.hx(), fx1 = (p1.x - m.x0) / m.hx();
  double fy0 = (p0.y - m.y0) / m.hy(), fy1 = (p1.y - m.y0) / m.hy();
  add_crossings(fx0, fx1);
  add_crossings(fy0, fy1);
  add_crossings(fx0 - fy0, fx1 - fy1);
  std::sort(cuts.begin(), cuts.end());

  double tol_t = 1e-12 * m.cell_diameter() / len;
  double cur = 0.0;
  for (double t : cuts) {
    if (t - cur <= tol_t || 1.0 - t <= tol_t) continue;
    emit(cur, t);
    cur = t;
  }
  emit(cur, 1.0);
  return pieces;
}

}  // namespace fsi
