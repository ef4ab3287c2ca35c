#pragma once

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "fsikit/errors.hpp"

namespace fsi {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

// Structured conforming triangulation of an axis-aligned box. Every cell is
// split along its lower-left -> upper-right diagonal; triangle vertices are
// listed counter-clockwise. Cell (i,j) owns triangles 2*(j*nx+i) (below the
// diagonal) and 2*(j*nx+i)+1 (above it).
struct Mesh2D {
  int nx = 0;
  int ny = 0;
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  std::vector<Vec2> vertices;                // (nx+1)*(ny+1), row-major
  std::vector<std::array<int, 3>> triangles; // 2*nx*ny

  double hx() const { return (x1 - x0) / nx; }
  double hy() const { return (y1 - y0) / ny; }
  // All cells share one diameter: the diagonal length.
  double cell_diameter() const { return std::hypot(hx(), hy()); }
  // All triangles are congruent on the structured mesh.
  double triangle_area() const { return 0.5 * hx() * hy(); }

  int vertex_index(int i, int j) const { return j * (nx + 1) + i; }
  std::pair<int, int> grid_index(int i, int j) const {
    int t = 2 * (j * nx + i);
    return {t, t + 1};
  }
  bool boundary_vertex(int v) const {
    int i = v % (nx + 1), j = v / (nx + 1);
    return i == 0 || i == nx || j == 0 || j == ny;
  }
  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
};

Mesh2D build_structured_mesh(int nx, int ny, double x0 = 0.0, double y0 = 0.0,
                             double x1 = 1.0, double y1 = 1.0);

// Closed P1 curve over a periodic parameter. Node k sits at params[k]; the
// segment k connects node k to node (k+1) % n_seg, the last one wrapping
// through params[0] + period.
struct CurveMesh {
  int n_seg = 0;
  double period = 2.0 * M_PI;
  std::vector<double> params;               // strictly increasing, in [0, period)
  std::vector<Vec2> reference_positions;    // n_seg
  std::vector<Vec2> current_positions;      // n_seg

  double ds(int k) const {
    int n = n_seg;
    return (k + 1 < n) ? params[k + 1] - params[k]
                       : params[0] + period - params[k];
  }
  // Mesh size in parameter units.
  double h_s() const {
    double h = 0.0;
    for (int k = 0; k < n_seg; ++k) h = std::max(h, ds(k));
    return h;
  }
  int n_nodes() const { return n_seg; }
};

// Ellipse centered at `center` with semi-axes a (x) and b (y), uniform
// parameter spacing; a == b gives a circle.
CurveMesh build_ellipse_curve(int n_seg, Vec2 center, double a, double b);

// True if every current position is strictly inside the open box of `mesh`.
bool curve_inside_box(const Mesh2D& mesh, const CurveMesh& curve);

struct PointLocation {
  int triangle = -1;
  std::array<double, 3> bary{};  // matches the triangle's vertex order
};

// Host triangle of a point in the closed box. Points on shared edges or
// vertices resolve to the lowest containing triangle id. Throws
// GeometryError for points outside the closed box.
PointLocation locate_point(const Mesh2D& mesh, Vec2 p);

// One triangle-local piece of a straight segment, with the parameter
// subrange it came from.
struct SubSegment {
  int triangle = -1;
  double s_begin = 0.0, s_end = 0.0;
  Vec2 p_begin, p_end;
};

// Partition the segment p0 -> p1 (carrying parameter range [s0, s1]) into
// pieces each contained in the closure of a single triangle. Pieces shorter
// than 1e-12 * cell diameter are merged into a neighbor, so the pieces always
// cover the segment exactly. Both endpoints must lie in the closed box.
std::vector<SubSegment> intersect_segment(const Mesh2D& mesh, Vec2 p0, Vec2 p1,
                                          double s0, double s1);

}  // namespace fsi
