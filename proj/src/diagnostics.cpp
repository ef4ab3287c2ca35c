#include "fsikit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fsi {

double norm_L2_omega(const SparseMatrix& m, const std::vector<double>& u) {
  return std::sqrt(std::max(0.0, m.quadratic(u)));
}

double norm_L2_sigma(const SparseMatrix& m, const std::vector<double>& w) {
  return std::sqrt(std::max(0.0, m.quadratic(w)));
}

double norm_s(const SparseMatrix& ks, const std::vector<double>& d) {
  return std::sqrt(std::max(0.0, ks.quadratic(d)));
}

double seminorm_sh(const SparseMatrix& s, const std::vector<double>& p) {
  return std::sqrt(std::max(0.0, s.quadratic(p)));
}

double total_energy(double rho_f, const SparseMatrix& mf,
                    const std::vector<double>& u, double rho_s,
                    const SparseMatrix& ms, const std::vector<double>& d_dot,
                    const SparseMatrix& ks,
                    const std::vector<double>& x_total) {
  return rho_f * mf.quadratic(u) + rho_s * ms.quadratic(d_dot) +
         ks.quadratic(x_total);
}

double dissipation_increment(double tau, const SparseMatrix& k,
                             const std::vector<double>& u,
                             const SparseMatrix& s,
                             const std::vector<double>& p) {
  return tau * (2.0 * k.quadratic(u) + 2.0 * s.quadratic(p));
}

Vec2 evaluate_velocity(const Mesh2D& mesh, const std::vector<double>& u,
                       Vec2 x) {
  PointLocation loc = locate_point(mesh, x);
  const auto& tri = mesh.triangles[loc.triangle];
  Vec2 v;
  for (int i = 0; i < 3; ++i) {
    v.x += loc.bary[i] * u[DofMap::u_dof(tri[i], 0)];
    v.y += loc.bary[i] * u[DofMap::u_dof(tri[i], 1)];
  }
  return v;
}

Vec2 evaluate_solid(const CurveMesh& curve, const std::vector<double>& w,
                    double s) {
  double base = curve.params.front();
  double rel = std::fmod(s - base, curve.period);
  if (rel < 0.0) rel += curve.period;
  double sw = base + rel;
  auto it = std::upper_bound(curve.params.begin(), curve.params.end(), sw);
  int k = static_cast<int>(it - curve.params.begin()) - 1;
  int kp = (k + 1) % curve.n_seg;
  double t = (sw - curve.params[k]) / curve.ds(k);
  Vec2 a{w[DofMap::w_dof(k, 0)], w[DofMap::w_dof(k, 1)]};
  Vec2 b{w[DofMap::w_dof(kp, 0)], w[DofMap::w_dof(kp, 1)]};
  return a + t * (b - a);
}

ControlPoints control_points(const CurveMesh& curve) {
  std::vector<double> pos = flatten(curve.current_positions);
  ControlPoints cp;
  cp.A_x = evaluate_solid(curve, pos, 0.0).x;
  cp.B_y = evaluate_solid(curve, pos, 0.5 * M_PI).y;
  return cp;
}

std::vector<double> convergence_rates(const std::vector<double>& errors) {
  std::vector<double> rates;
  for (size_t k = 0; k + 1 < errors.size(); ++k) {
    if (errors[k] > 0.0 && errors[k + 1] > 0.0)
      rates.push_back(std::log2(errors[k] / errors[k + 1]));
    else
      rates.push_back(std::numeric_limits<double>::quiet_NaN());
  }
  return rates;
}

namespace {

bool nested_ratio(int coarse, int fine) {
  if (coarse <= 0 || fine <= 0 || fine % coarse != 0) return false;
  int r = fine / coarse;
  return (r & (r - 1)) == 0;
}

}  // namespace

ErrorTriple error_vs_reference(const FieldSnapshot& coarse,
                               const FieldSnapshot& ref, double kappa) {
  const Mesh2D& cm = *coarse.mesh;
  const Mesh2D& fm = *ref.mesh;
  if (std::abs(coarse.time - ref.time) >
      1e-9 * std::max(1.0, std::abs(ref.time)))
    throw ConfigError("error_vs_reference: snapshots at different times");
  if (cm.x0 != fm.x0 || cm.x1 != fm.x1 || cm.y0 != fm.y0 || cm.y1 != fm.y1)
    throw ConfigError("error_vs_reference: meshes on different boxes");
  if (!nested_ratio(cm.nx, fm.nx) || !nested_ratio(cm.ny, fm.ny) ||
      !nested_ratio(coarse.curve->n_seg, ref.curve->n_seg))
    throw ConfigError(
        "error_vs_reference: meshes are not nested with power-of-two ratios");

  ErrorTriple e;
  // Fluid: exact integration of the squared P1 difference on the fine mesh.
  double acc = 0.0;
  for (int t = 0; t < fm.n_triangles(); ++t) {
    const auto& tri = fm.triangles[t];
    Vec2 v0 = fm.vertices[tri[0]], v1 = fm.vertices[tri[1]],
         v2 = fm.vertices[tri[2]];
    Vec2 mids[3] = {0.5 * (v0 + v1), 0.5 * (v1 + v2), 0.5 * (v2 + v0)};
    std::array<std::array<double, 3>, 3> bary = {
        {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}}};
    for (int q = 0; q < 3; ++q) {
      Vec2 uf;
      for (int i = 0; i < 3; ++i) {
        uf.x += bary[q][i] * (*ref.u)[DofMap::u_dof(tri[i], 0)];
        uf.y += bary[q][i] * (*ref.u)[DofMap::u_dof(tri[i], 1)];
      }
      Vec2 uc = evaluate_velocity(cm, *coarse.u, mids[q]);
      Vec2 d = uc - uf;
      acc += (fm.triangle_area() / 3.0) * dot(d, d);
    }
  }
  e.err_u = std::sqrt(acc);

  // Solid: interpolate coarse fields to the fine curve nodes.
  const CurveMesh& fc = *ref.curve;
  int nw = 2 * fc.n_nodes();
  std::vector<double> delta_dot(nw), delta_d(nw);
  for (int k = 0; k < fc.n_nodes(); ++k) {
    double s = fc.params[k];
    Vec2 dd = evaluate_solid(*coarse.curve, *coarse.d_dot, s);
    Vec2 d = evaluate_solid(*coarse.curve, *coarse.d, s);
    delta_dot[DofMap::w_dof(k, 0)] = dd.x - (*ref.d_dot)[DofMap::w_dof(k, 0)];
    delta_dot[DofMap::w_dof(k, 1)] = dd.y - (*ref.d_dot)[DofMap::w_dof(k, 1)];
    delta_d[DofMap::w_dof(k, 0)] = d.x - (*ref.d)[DofMap::w_dof(k, 0)];
    delta_d[DofMap::w_dof(k, 1)] = d.y - (*ref.d)[DofMap::w_dof(k, 1)];
  }
  e.err_d_dot = norm_L2_sigma(multiplier_pairing(fc), delta_dot);
  e.err_d_s = norm_s(solid_stiffness(fc, kappa), delta_d);
  return e;
}

}  // namespace fsi
