#include "fsikit/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fsi {

std::string to_string(SchemeType t) {
  switch (t) {
    case SchemeType::Strong: return "strong";
    case SchemeType::Explicit: return "explicit";
    case SchemeType::Split: return "split";
  }
  return "?";
}

SchemeType scheme_from_string(const std::string& s) {
  if (s == "strong") return SchemeType::Strong;
  if (s == "explicit") return SchemeType::Explicit;
  if (s == "split") return SchemeType::Split;
  throw ConfigError("unknown scheme '" + s + "' (strong|explicit|split)");
}

void SchemeConfig::validate() const {
  if (!(tau > 0.0)) throw ConfigError("scheme: tau must be > 0");
  if (!(t_end >= tau)) throw ConfigError("scheme: t_end must be >= tau");
  if (extrapolation_order != 1 && extrapolation_order != 2)
    throw ConfigError("scheme: extrapolation order r must be 1 or 2");
  if (frozen_geometry && !linearized)
    throw ConfigError("scheme: frozen_geometry requires linearized");
}

std::vector<double> extrapolate_displacement(const std::vector<double>& d_prev,
                                             const std::vector<double>& d_dot_prev,
                                             int r, double tau) {
  if (r != 1 && r != 2)
    throw ConfigError("extrapolate_displacement: r must be 1 or 2");
  std::vector<double> d_star = d_prev;
  if (r == 2)
    for (size_t i = 0; i < d_star.size(); ++i)
      d_star[i] += tau * d_dot_prev[i];
  return d_star;
}

namespace {

std::vector<double> slice(const std::vector<double>& v, int offset, int n) {
  return std::vector<double>(v.begin() + offset, v.begin() + offset + n);
}

void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
  for (size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

std::vector<double> diff(const std::vector<double>& a,
                         const std::vector<double>& b) {
  std::vector<double> r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

double euclid(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

enum Block { BU = 0, BP = 1, BZ = 2, BL = 3, BD = 4 };

}  // namespace

Simulation::Simulation(Mesh2D mesh, CurveMesh curve, PhysicsParams physics,
                       SchemeConfig scheme)
    : mesh_(std::move(mesh)),
      curve_(std::move(curve)),
      physics_(physics),
      scheme_(scheme),
      dofs_(make_dof_map(mesh_, curve_)),
      layout_(BlockLayout::make(
          {"velocity", "pressure", "pressure_mean", "multiplier", "solid"},
          {dofs_.n_u(), dofs_.n_p(), 1, dofs_.n_w(), dofs_.n_w()})) {
  scheme_.validate();
  if (!curve_inside_box(mesh_, curve_))
    throw GeometryError("simulation: curve must start strictly inside the box");

  mass_f_ = fluid_mass(mesh_);
  visc_ = viscous_stiffness(mesh_, physics_.mu);
  div_ = divergence(mesh_);
  stab_ = pressure_stabilization(mesh_, physics_.gamma);
  m_vec_ = pressure_integral_vector(mesh_);
  m_total_ = 0.0;
  for (double v : m_vec_) m_total_ += v;
  pin_vec_.assign(dofs_.n_p(), 0.0);
  pin_vec_[0] = 1.0;
  mass_s_ = multiplier_pairing(curve_);
  cw_ = mass_s_;
  ks_ = solid_stiffness(curve_, physics_.kappa);
  load_.assign(dofs_.n_w(), 0.0);
  if (scheme_.preload) load_ = reference_tension_load(curve_, physics_.kappa);
  boundary_dofs_ = boundary_velocity_dofs(mesh_);
  mass_s_lu_ = factorize(mass_s_);
  c_ = coupling(mesh_, curve_);

  state_.u.assign(dofs_.n_u(), 0.0);
  state_.p.assign(dofs_.n_p(), 0.0);
  state_.lambda.assign(dofs_.n_w(), 0.0);
  state_.d.assign(dofs_.n_w(), 0.0);
  state_.d_dot.assign(dofs_.n_w(), 0.0);
  if (scheme_.type == SchemeType::Split)
    state_.d_dot_half.assign(dofs_.n_w(), 0.0);
}

void Simulation::set_state(State s) {
  if (static_cast<int>(s.u.size()) != dofs_.n_u() ||
      static_cast<int>(s.p.size()) != dofs_.n_p() ||
      static_cast<int>(s.lambda.size()) != dofs_.n_w() ||
      static_cast<int>(s.d.size()) != dofs_.n_w() ||
      static_cast<int>(s.d_dot.size()) != dofs_.n_w())
    throw ConfigError("set_state: field sizes inconsistent with dof map");
  if (!s.d_dot_half.empty() &&
      (scheme_.type != SchemeType::Split ||
       static_cast<int>(s.d_dot_half.size()) != dofs_.n_w()))
    throw ConfigError("set_state: d_dot_half only valid for the split scheme");
  double mean = 0.0;
  for (int i = 0; i < dofs_.n_p(); ++i) mean += m_vec_[i] * s.p[i];
  if (std::abs(mean) > 1e-9 * std::max(1.0, euclid(s.p)))
    throw ConfigError("set_state: pressure must have zero mean");
  state_ = std::move(s);
  for (int k = 0; k < curve_.n_nodes(); ++k)
    curve_.current_positions[k] =
        curve_.reference_positions[k] + Vec2{state_.d[DofMap::w_dof(k, 0)],
                                             state_.d[DofMap::w_dof(k, 1)]};
  if (!scheme_.frozen_geometry) refresh_coupling();
}

void Simulation::refresh_coupling() { c_ = coupling(mesh_, curve_); }

std::vector<double> Simulation::total_position() const {
  std::vector<double> x = state_.d;
  if (scheme_.preload) {
    std::vector<double> xr = flatten(curve_.reference_positions);
    for (size_t i = 0; i < x.size(); ++i) x[i] += xr[i];
  }
  return x;
}

std::vector<double> Simulation::apply_discrete_elastic(
    const std::vector<double>& w) const {
  return mass_s_lu_.solve(ks_.apply(w));
}

std::vector<double> Simulation::extrapolated_displacement() const {
  return extrapolate_displacement(state_.d, state_.d_dot,
                                  scheme_.extrapolation_order, scheme_.tau);
}

double Simulation::total_energy() const {
  return fsi::total_energy(physics_.rho_f, mass_f_, state_.u, physics_.rho_s,
                           mass_s_, state_.d_dot, ks_, total_position());
}

EnergyRecord Simulation::current_energy_record() const {
  EnergyRecord r;
  r.time = state_.time;
  r.E = total_energy();
  std::vector<double> x = total_position();
  std::vector<double> lh = mass_s_lu_.solve(ks_.apply(x));
  double tau = scheme_.tau;
  r.aug_velocity = tau * tau * ks_.quadratic(state_.d_dot);
  r.aug_elastic =
      tau * tau / (2.0 * physics_.rho_s) * mass_s_.quadratic(lh);
  return r;
}

std::vector<double> Simulation::solve_coupled(const std::vector<double>& rhs,
                                              double* residual) {
  // The matrix changes every step unless both linearized and frozen.
  bool reusable = scheme_.linearized && scheme_.frozen_geometry;
  double tau = scheme_.tau;

  if (!reusable || !frozen_lu_) {
    SparseMatrix a_uu = add(mass_f_.scaled(physics_.rho_f / tau), visc_);
    if (!scheme_.linearized)
      a_uu = add(a_uu, convection(mesh_, state_.u, physics_.rho_f));

    SparseMatrix a_dd;
    bool solid_is_displacement = scheme_.type == SchemeType::Strong;
    if (solid_is_displacement)
      a_dd = add(mass_s_.scaled(physics_.rho_s / (tau * tau)), ks_);
    else
      a_dd = mass_s_.scaled(physics_.rho_s / tau);

    auto build = [&](const std::vector<double>* mean) {
      BlockSystem bs(layout_);
      bs.set(BU, BU, &a_uu);
      bs.set(BU, BP, &div_, -1.0, true);
      bs.set(BU, BL, &c_, 1.0, true);
      bs.set(BP, BU, &div_);
      bs.set(BP, BP, &stab_);
      bs.set_column_vector(BP, BZ, mean);
      bs.set_row_vector(BZ, BP, mean);
      bs.set(BL, BU, &c_);
      bs.set(BL, BD, &cw_, solid_is_displacement ? -1.0 / tau : -1.0);
      bs.set(BD, BL, &cw_, -1.0);
      bs.set(BD, BD, &a_dd);
      return apply_dirichlet(bs.assemble(), boundary_dofs_);
    };
    frozen_a_ = build(&m_vec_);
    // A direct factorization of frozen_a_ suffers heavy fill-in from the
    // dense mean row, so factor the variant that pins one pressure value
    // instead. Both systems share u, lambda and the solid unknowns and give
    // the same zero-ksi solution; their pressures differ by the constant
    // removed below. The residual is still checked against frozen_a_.
    frozen_lu_ = factorize(build(&pin_vec_), &layout_);
  }

  std::vector<double> b = rhs;
  apply_dirichlet_rhs(b, boundary_dofs_);

  std::vector<double> x = frozen_lu_->solve(b);
  const int p_off = layout_.offset(BP);
  double mean = 0.0;
  for (int i = 0; i < dofs_.n_p(); ++i) mean += m_vec_[i] * x[p_off + i];
  const double shift = mean / m_total_;
  for (int i = 0; i < dofs_.n_p(); ++i) x[p_off + i] -= shift;
  if (residual) *residual = relative_residual(frozen_a_, x, b);
  if (!reusable) frozen_lu_.reset();
  return x;
}

StepRecord Simulation::step() { return advance(scheme_.type); }

StepRecord Simulation::step_strong() {
  if (scheme_.type != SchemeType::Strong)
    throw ConfigError("step_strong called on a non-strong configuration");
  return advance(SchemeType::Strong);
}

StepRecord Simulation::step_explicit() {
  if (scheme_.type != SchemeType::Explicit)
    throw ConfigError("step_explicit called on a non-explicit configuration");
  return advance(SchemeType::Explicit);
}

StepRecord Simulation::step_split() {
  if (scheme_.type != SchemeType::Split)
    throw ConfigError("step_split called on a non-split configuration");
  return advance(SchemeType::Split);
}

StepRecord Simulation::advance(SchemeType type) {
  const State prev = state_;
  const double tau = scheme_.tau;
  const double rs = physics_.rho_s;
  const int nu = dofs_.n_u(), np = dofs_.n_p(), nw = dofs_.n_w();

  std::vector<double> rhs(layout_.total(), 0.0);
  // momentum: (rho_f/tau) M u^{n-1}
  {
    std::vector<double> mu_prev = mass_f_.apply(prev.u);
    for (int i = 0; i < nu; ++i)
      rhs[layout_.offset(BU) + i] = physics_.rho_f / tau * mu_prev[i];
  }

  std::vector<double> d_star;  // split extrapolation
  if (type == SchemeType::Strong) {
    // constraint: C u - (1/tau) Cw d = -(1/tau) Cw d^{n-1}
    std::vector<double> cwd = cw_.apply(prev.d);
    for (int i = 0; i < nw; ++i)
      rhs[layout_.offset(BL) + i] = -cwd[i] / tau;
    // solid: (rho_s/tau^2) M (d^{n-1} + tau ddot^{n-1}) + load
    std::vector<double> tmp = prev.d;
    axpy(tau, prev.d_dot, tmp);
    std::vector<double> ms = mass_s_.apply(tmp);
    for (int i = 0; i < nw; ++i)
      rhs[layout_.offset(BD) + i] = rs / (tau * tau) * ms[i] + load_[i];
  } else {
    // solid row solves for a velocity-like unknown:
    //   (rho_s/tau) M w - Cw lambda = (rho_s/tau) M ddot^{n-1} - K_s X_expl
    // with X_expl = d^{n-1} (explicit) or d* (split step 1), plus preload.
    d_star = (type == SchemeType::Split)
                 ? extrapolate_displacement(prev.d, prev.d_dot,
                                            scheme_.extrapolation_order, tau)
                 : prev.d;
    std::vector<double> ms = mass_s_.apply(prev.d_dot);
    std::vector<double> ksd = ks_.apply(d_star);
    for (int i = 0; i < nw; ++i)
      rhs[layout_.offset(BD) + i] = rs / tau * ms[i] - ksd[i] + load_[i];
  }

  double solver_residual = 0.0;
  std::vector<double> sol = solve_coupled(rhs, &solver_residual);

  State next;
  next.time = prev.time + tau;
  next.step = prev.step + 1;
  next.u = slice(sol, layout_.offset(BU), nu);
  next.p = slice(sol, layout_.offset(BP), np);
  next.lambda = slice(sol, layout_.offset(BL), nw);

  std::vector<double> w_constraint;  // velocity-like field in the constraint
  if (type == SchemeType::Strong) {
    next.d = slice(sol, layout_.offset(BD), nw);
    next.d_dot = diff(next.d, prev.d);
    for (double& v : next.d_dot) v /= tau;
    w_constraint = next.d_dot;
  } else if (type == SchemeType::Explicit) {
    next.d_dot = slice(sol, layout_.offset(BD), nw);
    next.d = prev.d;
    axpy(tau, next.d_dot, next.d);
    w_constraint = next.d_dot;
  } else {
    next.d_dot_half = slice(sol, layout_.offset(BD), nw);
    w_constraint = next.d_dot_half;
    // step 2: (rho_s/tau^2 M + K_s) d^n =
    //         rho_s/tau^2 M d^{n-1} + rho_s/tau M ddot^{n-1} + Cw lambda + l
    if (!split_.step2)
      split_.step2 =
          factorize(add(mass_s_.scaled(rs / (tau * tau)), ks_));
    std::vector<double> tmp = prev.d;
    axpy(tau, prev.d_dot, tmp);
    std::vector<double> b2 = mass_s_.apply(tmp);
    for (double& v : b2) v *= rs / (tau * tau);
    std::vector<double> cwl = cw_.apply(next.lambda);
    for (int i = 0; i < nw; ++i) b2[i] += cwl[i] + load_[i];
    next.d = split_.step2->solve(b2);
    next.d_dot = diff(next.d, prev.d);
    for (double& v : next.d_dot) v /= tau;
    split_.d_star = d_star;
  }

  StepRecord rec;
  rec.solver_residual = solver_residual;
  double sigma_dx = (type == SchemeType::Explicit) ? -1.0 : 1.0;
  rec.energy = finish_step(prev, std::move(next), w_constraint, sigma_dx,
                           type == SchemeType::Split ? &d_star : nullptr);
  if (type == SchemeType::Split)
    rec.intermediate_residual = intermediate_velocity_residual();
  return rec;
}

EnergyRecord Simulation::finish_step(const State& prev, State next,
                                     const std::vector<double>& w_constraint,
                                     double sigma_dx,
                                     const std::vector<double>* d_star) {
  const double tau = scheme_.tau;
  const double rf = physics_.rho_f, rs = physics_.rho_s;

  EnergyRecord rec;
  rec.time = next.time;

  // constraint residual ||C u - Cw w|| / scale
  {
    std::vector<double> cu = c_.apply(next.u);
    std::vector<double> cww = cw_.apply(w_constraint);
    double scale = std::max({euclid(cu), euclid(cww), 1e-30});
    rec.constraint_residual = euclid(diff(cu, cww)) / scale;
  }

  std::vector<double> xr = scheme_.preload
                               ? flatten(curve_.reference_positions)
                               : std::vector<double>(dofs_.n_w(), 0.0);
  std::vector<double> x_prev = prev.d, x_next = next.d;
  axpy(1.0, xr, x_prev);
  axpy(1.0, xr, x_next);

  double e_prev = rf * mass_f_.quadratic(prev.u) +
                  rs * mass_s_.quadratic(prev.d_dot) + ks_.quadratic(x_prev);
  rec.E = rf * mass_f_.quadratic(next.u) +
          rs * mass_s_.quadratic(next.d_dot) + ks_.quadratic(x_next);
  rec.D_increment =
      dissipation_increment(tau, visc_, next.u, stab_, next.p);

  // Per-step energy identity, halves convention. sigma_dx flips the
  // ||X^n - X^{n-1}||_s^2 sign for the explicit scheme; T1/T2 appear only
  // for the split scheme.
  std::vector<double> du = diff(next.u, prev.u);
  std::vector<double> dd_dot = diff(next.d_dot, prev.d_dot);
  std::vector<double> dx = diff(x_next, x_prev);
  double identity =
      0.5 * rf *
          (mass_f_.quadratic(next.u) - mass_f_.quadratic(prev.u) +
           mass_f_.quadratic(du)) +
      tau * visc_.quadratic(next.u) + tau * stab_.quadratic(next.p) +
      0.5 * rs *
          (mass_s_.quadratic(next.d_dot) - mass_s_.quadratic(prev.d_dot) +
           mass_s_.quadratic(dd_dot)) +
      0.5 * (ks_.quadratic(x_next) - ks_.quadratic(x_prev) +
             sigma_dx * ks_.quadratic(dx));
  if (d_star) {
    std::vector<double> rel = diff(next.d, *d_star);
    std::vector<double> ks_rel = ks_.apply(rel);
    double t1 = tau * std::inner_product(dd_dot.begin(), dd_dot.end(),
                                         ks_rel.begin(), 0.0);
    std::vector<double> lh_rel = mass_s_lu_.solve(ks_rel);
    std::vector<double> ks_x = ks_.apply(x_next);
    double t2 = tau * tau / rs *
                std::inner_product(ks_x.begin(), ks_x.end(), lh_rel.begin(),
                                   0.0);
    identity += t1 + t2;
  }
  rec.identity_residual =
      identity / std::max({e_prev, rec.E, 1e-30});

  std::vector<double> lh_x = mass_s_lu_.solve(ks_.apply(x_next));
  rec.aug_velocity = tau * tau * ks_.quadratic(next.d_dot);
  rec.aug_elastic = tau * tau / (2.0 * rs) * mass_s_.quadratic(lh_x);

  state_ = std::move(next);
  for (int k = 0; k < curve_.n_nodes(); ++k)
    curve_.current_positions[k] =
        curve_.reference_positions[k] + Vec2{state_.d[DofMap::w_dof(k, 0)],
                                             state_.d[DofMap::w_dof(k, 1)]};
  if (!scheme_.frozen_geometry) refresh_coupling();
  return rec;
}

double Simulation::intermediate_velocity_residual() const {
  if (scheme_.type != SchemeType::Split || state_.d_dot_half.empty() ||
      split_.d_star.empty())
    throw ConfigError(
        "intermediate_velocity_residual: only defined after a split step");
  std::vector<double> rel = diff(state_.d, split_.d_star);
  std::vector<double> lh = mass_s_lu_.solve(ks_.apply(rel));
  std::vector<double> r = state_.d_dot_half;
  for (size_t i = 0; i < r.size(); ++i)
    r[i] -= state_.d_dot[i] + scheme_.tau / physics_.rho_s * lh[i];
  return norm_L2_sigma(mass_s_, r);
}

namespace {

double power_iteration_max_eig(const SparseMatrix& k, const SparseMatrix& m,
                               const Factorization& m_lu) {
  int n = k.rows();
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i)
    x[i] = ((i / 2) % 2 ? 1.0 : -1.0) + 1e-3 * ((i % 7) - 3);
  double lambda = 0.0;
  for (int it = 0; it < 1000; ++it) {
    std::vector<double> y = m_lu.solve(k.apply(x));
    double nrm = std::sqrt(m.quadratic(y));
    if (nrm < 1e-300) return 0.0;
    for (double& v : y) v /= nrm;
    double next = k.quadratic(y) / m.quadratic(y);
    bool done = std::abs(next - lambda) <= 1e-12 * std::max(1.0, next);
    lambda = next;
    x = std::move(y);
    if (done && it > 3) break;
  }
  return lambda;
}

}  // namespace

double estimate_inverse_constant(const CurveMesh& curve, double kappa) {
  SparseMatrix ks = solid_stiffness(curve, kappa);
  SparseMatrix ms = multiplier_pairing(curve);
  Factorization lu = factorize(ms);
  double lmax = power_iteration_max_eig(ks, ms, lu);
  double h = curve.h_s();
  return h * h * lmax;
}

CflReport cfl_bounds(const PhysicsParams& physics, const CurveMesh& curve,
                     double tau, double alpha, double beta_s) {
  CflReport r;
  r.h_s = curve.h_s();
  r.c_i_estimate = estimate_inverse_constant(curve, physics.kappa);
  double ci = std::max(r.c_i_estimate, 1e-300);
  r.parabolic_bound = physics.rho_s / (ci * beta_s) * r.h_s * r.h_s;
  r.split_r2_bound =
      alpha * std::pow(physics.rho_s / ci, 2.0 / 3.0) * std::pow(r.h_s, 4.0 / 3.0);
  r.tau_within_parabolic = tau <= r.parabolic_bound;
  r.tau_within_split_r2 = tau <= r.split_r2_bound;
  r.alpha_condition_ok = 2.0 * tau * alpha * alpha * alpha < 1.0;
  return r;
}

}  // namespace fsi
