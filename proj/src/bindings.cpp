#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fsikit/errors.hpp"
#include "fsikit/harness.hpp"

namespace py = pybind11;
using namespace fsi;

namespace {

Simulation make_simulation(const RunConfig& cfg) {
  cfg.validate();
  return Simulation(build_mesh(cfg), build_curve(cfg), cfg.physics, cfg.scheme);
}

}  // namespace

PYBIND11_MODULE(_fsikit, m) {
  m.doc() = "incompressible flow coupled to an immersed elastic string";

  py::register_exception<ConfigError>(m, "FsiConfigError", PyExc_ValueError);
  py::register_exception<GeometryError>(m, "FsiGeometryError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "FsiSolverError", PyExc_RuntimeError);

  py::enum_<SchemeType>(m, "SchemeType")
      .value("STRONG", SchemeType::Strong)
      .value("EXPLICIT", SchemeType::Explicit)
      .value("SPLIT", SchemeType::Split);

  py::class_<PhysicsParams>(m, "PhysicsParams")
      .def(py::init<>())
      .def_readwrite("rho_f", &PhysicsParams::rho_f)
      .def_readwrite("rho_s", &PhysicsParams::rho_s)
      .def_readwrite("mu", &PhysicsParams::mu)
      .def_readwrite("kappa", &PhysicsParams::kappa)
      .def_readwrite("gamma", &PhysicsParams::gamma)
      .def("validate", &PhysicsParams::validate);

  py::class_<SchemeConfig>(m, "SchemeConfig")
      .def(py::init<>())
      .def_readwrite("type", &SchemeConfig::type)
      .def_readwrite("extrapolation_order", &SchemeConfig::extrapolation_order)
      .def_readwrite("tau", &SchemeConfig::tau)
      .def_readwrite("t_end", &SchemeConfig::t_end)
      .def_readwrite("linearized", &SchemeConfig::linearized)
      .def_readwrite("frozen_geometry", &SchemeConfig::frozen_geometry)
      .def_readwrite("preload", &SchemeConfig::preload)
      .def("validate", &SchemeConfig::validate);

  py::class_<SweepConfig>(m, "SweepConfig")
      .def(py::init<>())
      .def_readwrite("schemes", &SweepConfig::schemes)
      .def_readwrite("tau_list", &SweepConfig::tau_list)
      .def_readwrite("t_end", &SweepConfig::t_end);

  py::class_<CflScanConfig>(m, "CflScanConfig")
      .def(py::init<>())
      .def_readwrite("n_seg_list", &CflScanConfig::n_seg_list)
      .def_readwrite("tau_max", &CflScanConfig::tau_max)
      .def_readwrite("tau_factor", &CflScanConfig::tau_factor)
      .def_readwrite("tau_min", &CflScanConfig::tau_min)
      .def_readwrite("t_end", &CflScanConfig::t_end);

  py::class_<SpatialConfig>(m, "SpatialConfig")
      .def(py::init<>())
      .def_readwrite("h_list", &SpatialConfig::h_list)
      .def_readwrite("tau", &SpatialConfig::tau)
      .def_readwrite("t_end", &SpatialConfig::t_end)
      .def_readwrite("ref_n", &SpatialConfig::ref_n)
      .def_readwrite("ref_tau", &SpatialConfig::ref_tau)
      .def_readwrite("frozen_fast", &SpatialConfig::frozen_fast)
      .def_readwrite("schemes", &SpatialConfig::schemes);

  py::class_<TemporalConfig>(m, "TemporalConfig")
      .def(py::init<>())
      .def_readwrite("n", &TemporalConfig::n)
      .def_readwrite("tau_list", &TemporalConfig::tau_list)
      .def_readwrite("ref_tau", &TemporalConfig::ref_tau)
      .def_readwrite("t_end", &TemporalConfig::t_end)
      .def_readwrite("schemes", &TemporalConfig::schemes);

  py::class_<TrajectoryConfig>(m, "TrajectoryConfig")
      .def(py::init<>())
      .def_readwrite("tau_list", &TrajectoryConfig::tau_list)
      .def_readwrite("t_end", &TrajectoryConfig::t_end)
      .def_readwrite("schemes", &TrajectoryConfig::schemes);

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("nx", &RunConfig::nx)
      .def_readwrite("ny", &RunConfig::ny)
      .def_readwrite("x0", &RunConfig::x0)
      .def_readwrite("y0", &RunConfig::y0)
      .def_readwrite("x1", &RunConfig::x1)
      .def_readwrite("y1", &RunConfig::y1)
      .def_readwrite("n_seg", &RunConfig::n_seg)
      .def_readwrite("shape", &RunConfig::shape)
      .def_readwrite("cx", &RunConfig::cx)
      .def_readwrite("cy", &RunConfig::cy)
      .def_readwrite("semi_axis_a", &RunConfig::semi_axis_a)
      .def_readwrite("semi_axis_b", &RunConfig::semi_axis_b)
      .def_readwrite("radius", &RunConfig::radius)
      .def_readwrite("physics", &RunConfig::physics)
      .def_readwrite("scheme", &RunConfig::scheme)
      .def_readwrite("blowup_factor", &RunConfig::blowup_factor)
      .def_readwrite("out_dir", &RunConfig::out_dir)
      .def_readwrite("reference_path", &RunConfig::reference_path)
      .def_readwrite("checkpoint_path", &RunConfig::checkpoint_path)
      .def_readwrite("paper_scale", &RunConfig::paper_scale)
      .def_readwrite("stability", &RunConfig::stability)
      .def_readwrite("cfl", &RunConfig::cfl)
      .def_readwrite("spatial", &RunConfig::spatial)
      .def_readwrite("temporal", &RunConfig::temporal)
      .def_readwrite("trajectory", &RunConfig::trajectory)
      .def("validate", &RunConfig::validate)
      .def("canonical", &RunConfig::canonical)
      .def("hash", &RunConfig::hash);

  m.def("load_config", &load_config, py::arg("path"));
  m.def("apply_paper_scale", &apply_paper_scale, py::arg("config"));

  py::class_<State>(m, "State")
      .def(py::init<>())
      .def_readwrite("time", &State::time)
      .def_readwrite("step", &State::step)
      .def_readwrite("u", &State::u)
      .def_readwrite("p", &State::p)
      .def_readwrite("multiplier", &State::lambda)
      .def_readwrite("d", &State::d)
      .def_readwrite("d_dot", &State::d_dot)
      .def_readwrite("d_dot_half", &State::d_dot_half);

  py::class_<EnergyRecord>(m, "EnergyRecord")
      .def_readonly("time", &EnergyRecord::time)
      .def_readonly("E", &EnergyRecord::E)
      .def_readonly("D_increment", &EnergyRecord::D_increment)
      .def_readonly("aug_velocity", &EnergyRecord::aug_velocity)
      .def_readonly("aug_elastic", &EnergyRecord::aug_elastic)
      .def_readonly("constraint_residual", &EnergyRecord::constraint_residual)
      .def_readonly("identity_residual", &EnergyRecord::identity_residual);

  py::class_<StepRecord>(m, "StepRecord")
      .def_readonly("energy", &StepRecord::energy)
      .def_readonly("solver_residual", &StepRecord::solver_residual)
      .def_readonly("intermediate_residual", &StepRecord::intermediate_residual);

  py::class_<ControlPoints>(m, "ControlPoints")
      .def_readonly("A_x", &ControlPoints::A_x)
      .def_readonly("B_y", &ControlPoints::B_y);

  py::class_<CflReport>(m, "CflReport")
      .def_readonly("h_s", &CflReport::h_s)
      .def_readonly("c_i_estimate", &CflReport::c_i_estimate)
      .def_readonly("parabolic_bound", &CflReport::parabolic_bound)
      .def_readonly("split_r2_bound", &CflReport::split_r2_bound)
      .def_readonly("tau_within_parabolic", &CflReport::tau_within_parabolic)
      .def_readonly("tau_within_split_r2", &CflReport::tau_within_split_r2)
      .def_readonly("alpha_condition_ok", &CflReport::alpha_condition_ok);

  py::class_<Simulation>(m, "Simulation")
      .def(py::init(&make_simulation), py::arg("config"))
      .def("step", &Simulation::step)
      .def("state", &Simulation::state, py::return_value_policy::copy)
      .def("set_state", &Simulation::set_state, py::arg("state"))
      .def("total_energy", &Simulation::total_energy)
      .def("intermediate_velocity_residual",
           &Simulation::intermediate_velocity_residual)
      .def("total_position", &Simulation::total_position)
      .def("control_points",
           [](const Simulation& sim) { return control_points(sim.curve()); })
      .def("cfl_report",
           [](const Simulation& sim, double alpha, double beta_s) {
             return cfl_bounds(sim.physics(), sim.curve(), sim.scheme().tau,
                               alpha, beta_s);
           },
           py::arg("alpha") = 1.0, py::arg("beta_s") = 1.0);

  py::class_<TrajectoryPoint>(m, "TrajectoryPoint")
      .def_readonly("time", &TrajectoryPoint::time)
      .def_readonly("A_x", &TrajectoryPoint::A_x)
      .def_readonly("B_y", &TrajectoryPoint::B_y);

  py::class_<RunResult>(m, "RunResult")
      .def_property_readonly(
          "outcome", [](const RunResult& r) { return to_string(r.outcome); })
      .def_readonly("message", &RunResult::message)
      .def_readonly("E0", &RunResult::E0)
      .def_readonly("steps", &RunResult::steps)
      .def_readonly("final_state", &RunResult::final_state)
      .def_readonly("energy", &RunResult::energy)
      .def_readonly("trajectory", &RunResult::trajectory)
      .def_readonly("max_identity_residual", &RunResult::max_identity_residual)
      .def_readonly("max_constraint_residual",
                    &RunResult::max_constraint_residual)
      .def_readonly("max_solver_residual", &RunResult::max_solver_residual)
      .def_readonly("max_intermediate_residual",
                    &RunResult::max_intermediate_residual)
      .def_readonly("max_monitor_increase", &RunResult::max_monitor_increase)
      .def_readonly("residual_reports", &RunResult::residual_reports);

  m.def("run_simulation", &run_simulation, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<StabilityRow>(m, "StabilityRow")
      .def_readonly("scheme", &StabilityRow::scheme)
      .def_readonly("tau", &StabilityRow::tau)
      .def_readonly("n_seg", &StabilityRow::n_seg)
      .def_property_readonly(
          "outcome", [](const StabilityRow& r) { return to_string(r.outcome); })
      .def_readonly("steps", &StabilityRow::steps)
      .def_readonly("final_E_over_E0", &StabilityRow::final_E_over_E0)
      .def_readonly("max_monitor_increase", &StabilityRow::max_monitor_increase)
      .def_readonly("max_identity_residual",
                    &StabilityRow::max_identity_residual);

  py::class_<CflProbe>(m, "CflProbe")
      .def_readonly("tau", &CflProbe::tau)
      .def_readonly("stable", &CflProbe::stable);

  py::class_<CflBoundaryRow>(m, "CflBoundaryRow")
      .def_readonly("n_seg", &CflBoundaryRow::n_seg)
      .def_readonly("h_s", &CflBoundaryRow::h_s)
      .def_readonly("tau_star", &CflBoundaryRow::tau_star)
      .def_readonly("probes", &CflBoundaryRow::probes);

  py::class_<ErrorTriple>(m, "ErrorTriple")
      .def_readonly("err_u", &ErrorTriple::err_u)
      .def_readonly("err_d_dot", &ErrorTriple::err_d_dot)
      .def_readonly("err_d_s", &ErrorTriple::err_d_s);

  py::class_<ConvergenceRow>(m, "ConvergenceRow")
      .def_readonly("level", &ConvergenceRow::level)
      .def_readonly("err", &ConvergenceRow::err);

  py::class_<ConvergenceTable>(m, "ConvergenceTable")
      .def_readonly("scheme", &ConvergenceTable::scheme)
      .def_readonly("rows", &ConvergenceTable::rows)
      .def_readonly("rate_u", &ConvergenceTable::rate_u)
      .def_readonly("rate_d_dot", &ConvergenceTable::rate_d_dot)
      .def_readonly("rate_d_s", &ConvergenceTable::rate_d_s)
      .def_readonly("max_intermediate_residual",
                    &ConvergenceTable::max_intermediate_residual);

  py::class_<TrajectorySeries>(m, "TrajectorySeries")
      .def_readonly("scheme", &TrajectorySeries::scheme)
      .def_readonly("tau", &TrajectorySeries::tau)
      .def_readonly("points", &TrajectorySeries::points);

  m.def("stability_sweep", &stability_sweep, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("cfl_boundary_scan", &cfl_boundary_scan, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("spatial_convergence", &spatial_convergence, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("temporal_convergence", &temporal_convergence, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("trajectory_run", &trajectory_run, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<Checkpoint>(m, "Checkpoint")
      .def_readonly("nx", &Checkpoint::nx)
      .def_readonly("ny", &Checkpoint::ny)
      .def_readonly("n_seg", &Checkpoint::n_seg)
      .def_readonly("physics", &Checkpoint::physics)
      .def_readonly("scheme", &Checkpoint::scheme)
      .def_readonly("state", &Checkpoint::state);

  m.def("make_checkpoint",
        [](const Simulation& sim) { return make_checkpoint(sim); },
        py::arg("simulation"));
  m.def("save_checkpoint", &save_checkpoint, py::arg("path"),
        py::arg("checkpoint"));
  m.def("load_checkpoint", &load_checkpoint, py::arg("path"));

  m.def("convergence_rates", &convergence_rates, py::arg("errors"));
  m.def("format_double", &format_double, py::arg("value"));
  m.def("parse_double", &parse_double, py::arg("text"));
}
