"""Incompressible flow coupled to an immersed elastic string.

Thin wrapper around the compiled extension. The heavy lifting (assembly,
time stepping, studies) happens in C++; this package re-exports the bound
types and adds nothing on top, so the Python and C++ APIs stay identical.
"""

from ._fsikit import (
    CflBoundaryRow,
    CflProbe,
    CflReport,
    Checkpoint,
    ControlPoints,
    ConvergenceRow,
    ConvergenceTable,
    EnergyRecord,
    ErrorTriple,
    FsiConfigError,
    FsiGeometryError,
    FsiSolverError,
    PhysicsParams,
    RunConfig,
    RunResult,
    SchemeConfig,
    SchemeType,
    Simulation,
    StabilityRow,
    State,
    StepRecord,
    SpatialConfig,
    SweepConfig,
    TemporalConfig,
    TrajectoryConfig,
    TrajectoryPoint,
    TrajectorySeries,
    apply_paper_scale,
    cfl_boundary_scan,
    convergence_rates,
    format_double,
    load_checkpoint,
    load_config,
    make_checkpoint,
    parse_double,
    run_simulation,
    save_checkpoint,
    spatial_convergence,
    stability_sweep,
    temporal_convergence,
    trajectory_run,
)

__all__ = [
    "CflBoundaryRow",
    "CflProbe",
    "CflReport",
    "Checkpoint",
    "ControlPoints",
    "ConvergenceRow",
    "ConvergenceTable",
    "EnergyRecord",
    "ErrorTriple",
    "FsiConfigError",
    "FsiGeometryError",
    "FsiSolverError",
    "PhysicsParams",
    "RunConfig",
    "RunResult",
    "SchemeConfig",
    "SchemeType",
    "Simulation",
    "StabilityRow",
    "State",
    "StepRecord",
    "SpatialConfig",
    "SweepConfig",
    "TemporalConfig",
    "TrajectoryConfig",
    "TrajectoryPoint",
    "TrajectorySeries",
    "apply_paper_scale",
    "cfl_boundary_scan",
    "convergence_rates",
    "format_double",
    "load_checkpoint",
    "load_config",
    "make_checkpoint",
    "parse_double",
    "run_simulation",
    "save_checkpoint",
    "spatial_convergence",
    "stability_sweep",
    "temporal_convergence",
    "trajectory_run",
]
