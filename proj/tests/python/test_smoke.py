"""End-to-end checks of the Python bindings on coarse problems."""

import math

import pytest

import fsikit


def tiny_config():
    cfg = fsikit.RunConfig()
    cfg.nx = cfg.ny = 12
    cfg.n_seg = 12
    cfg.scheme.tau = 0.05
    cfg.scheme.t_end = 0.2
    return cfg


def test_defaults_echo_benchmark():
    cfg = fsikit.RunConfig()
    assert cfg.nx == 40 and cfg.ny == 40 and cfg.n_seg == 40
    assert cfg.physics.gamma == pytest.approx(0.1)
    assert cfg.physics.kappa == pytest.approx(2.0)
    assert cfg.shape == "ellipse"
    cfg.validate()


def test_run_completes_and_dissipates(tmp_path):
    cfg = tiny_config()
    cfg.out_dir = str(tmp_path)
    res = fsikit.run_simulation(cfg)
    assert res.outcome == "completed"
    assert res.steps == 4
    assert len(res.energy) == 5
    assert res.E0 > 0.0
    assert res.energy[-1].E < res.E0
    assert res.max_monitor_increase <= 1e-9
    assert len(res.trajectory) == 5
    assert res.trajectory[0].A_x == pytest.approx(0.853553, abs=1e-6)


def test_stepping_matches_run():
    cfg = tiny_config()
    sim = fsikit.Simulation(cfg)
    rec = None
    for _ in range(4):
        rec = sim.step()
    res = fsikit.run_simulation(cfg)
    assert sim.state().time == pytest.approx(res.final_state.time)
    assert sim.state().u == res.final_state.u
    assert sim.state().d == res.final_state.d
    assert abs(rec.energy.identity_residual) <= 1e-9


def test_split_scheme_and_control_points():
    cfg = tiny_config()
    cfg.scheme.type = fsikit.SchemeType.SPLIT
    cfg.scheme.extrapolation_order = 1
    sim = fsikit.Simulation(cfg)
    sim.step()
    scale = max(1.0, max(abs(v) for v in sim.state().d_dot))
    assert sim.intermediate_velocity_residual() <= 1e-9 * scale
    pts = sim.control_points()
    assert math.isfinite(pts.A_x) and math.isfinite(pts.B_y)
    report = sim.cfl_report()
    assert report.h_s == pytest.approx(2.0 * math.pi / 12)
    assert report.c_i_estimate > 0.0


def test_checkpoint_round_trip(tmp_path):
    cfg = tiny_config()
    sim = fsikit.Simulation(cfg)
    sim.step()
    path = str(tmp_path / "state.chk")
    fsikit.save_checkpoint(path, fsikit.make_checkpoint(sim))
    loaded = fsikit.load_checkpoint(path)
    assert loaded.nx == 12 and loaded.n_seg == 12
    assert loaded.state.u == sim.state().u
    assert loaded.state.d == sim.state().d


def test_config_hash_and_doubles():
    cfg = tiny_config()
    other = tiny_config()
    assert cfg.hash() == other.hash()
    other.scheme.tau = 0.025
    assert cfg.hash() != other.hash()
    assert fsikit.parse_double(fsikit.format_double(0.1)) == 0.1
    assert fsikit.convergence_rates([4.0, 1.0]) == [2.0]


def test_invalid_config_raises():
    cfg = tiny_config()
    cfg.scheme.tau = -1.0
    with pytest.raises(ValueError):
        cfg.validate()
    bad = tiny_config()
    bad.cx = 5.0
    with pytest.raises(ValueError):
        fsikit.Simulation(bad)
