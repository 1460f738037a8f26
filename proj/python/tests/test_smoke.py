import math

import numpy as np
import pytest

import chemomass as cm


def test_mass_function_of_constant_density():
    grid = cm.RadialGrid.uniform(64)
    u = cm.RadialProfile.constant(grid, 3.0)
    xig = cm.XiGrid.uniform(32)
    U = np.asarray(cm.mass_function(u, xig))
    # int_0^sqrt(xi) 3 r dr = 3 xi / 2
    np.testing.assert_allclose(U, 1.5 * np.asarray(xig.nodes), rtol=0, atol=1e-14)
    assert u.integral() == pytest.approx(3.0 * math.pi, rel=1e-13)


def test_invalid_input_maps_to_value_error():
    with pytest.raises(ValueError):
        cm.RadialGrid.uniform(0)
    # the config is only validated when a run starts
    with pytest.raises(cm.InvalidInput):
        cm.run_primal(
            cm.RadialProfile.constant(cm.RadialGrid.uniform(8), 1.0),
            cm.RadialProfile.constant(cm.RadialGrid.uniform(8), 1.0),
            cm.ModelParams(1.0, 1.0, math.pi),
            cm.PrimalConfig(dt=-1.0),
        )


def test_primal_run_conserves_mass():
    p = cm.ModelParams(delta=1.0, tau=1.0, m=4 * math.pi)
    grid = cm.RadialGrid.uniform(128)
    data = cm.concentrated_data(grid, p.m)
    seen = []
    rec = cm.run_primal(data.u0, data.w0, p, cm.PrimalConfig(dt=2e-3, t_end=0.5, record_every=0.1),
                        observer=lambda s: seen.append(s.t))
    cols = rec.columns()
    assert len(rec) == len(cols["t"]) >= 5
    np.testing.assert_allclose(cols["mass_u"], p.m, rtol=1e-10)
    assert seen and seen[-1] == pytest.approx(0.5)
    assert rec.to_csv().startswith("t,")


def test_grow_up_barrier_outer_certificate():
    p = cm.ModelParams(1.0, 1.0, 12 * math.pi)
    c = cm.grow_up_constants(p.m, 1.0, p)
    assert c.barrier.m == pytest.approx(p.m)
    grid = cm.grow_up_grid(c, 256)
    data = cm.build_grow_up_data(c, p, grid, 1.0)
    xig = cm.XiGrid.uniform(128)
    ctx = cm.make_context(p, data.w0, xig)
    xi0 = c.barrier.xi0
    xs = cm.linear_samples(xi0 * 1.001, 0.999, 30)
    ts = cm.linear_samples(0.0, 20.0, 10)
    rep = cm.certify_barrier(cm.BarrierReport.Region.outer, c.barrier, ctx, xs, ts)
    assert rep.passed and rep.max_residual <= 0.0
    assert rep.sample_count == 300


def test_small_sweep_separates_masses():
    cfg = cm.SweepConfig()
    cfg.masses = [4 * math.pi, 12 * math.pi]
    cfg.horizon = 60.0
    cfg.window = 20.0
    cfg.n = 128
    cfg.n_data = 256
    cfg.nxi = 128
    rows = cm.mass_sweep(cfg)
    assert [r.verdict for r in rows] == [cm.Verdict.bounded, cm.Verdict.growing]
    assert cm.verdict_name(rows[1].verdict) == "Growing"
    assert rows[1].alpha_hat > 0.0
    assert cm.sweep_csv(rows).splitlines()[0].startswith("m,")


def test_hold_weights_integrate_constants():
    k, dt = 0.7, 0.3
    a, b = cm.hold_weights(k, dt)
    assert a + b == pytest.approx(-math.expm1(-k * dt) / k, rel=1e-15)
