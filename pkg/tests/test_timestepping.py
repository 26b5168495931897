import numpy as np
import pytest

from esmhd.cases import ic_orszag_tang
from esmhd.mesh import build_cartesian, build_interval
from esmhd.physics import PhysParams, prim_to_cons
from esmhd.solver import SemiDiscretization
from esmhd.timestepping import SSPRK54, StepControl, compute_dt, max_advective_speed, select_ch, ssprk54_step


def _decay(dt, steps):
    u = np.array([1.0])
    for _ in range(steps):
        u = ssprk54_step(u, lambda w, t, s: -w, dt)
    return float(u[0])


def test_tableau_consistency():
    A, b, c = SSPRK54.butcher()
    assert b.sum() == pytest.approx(1.0, abs=1e-14)
    np.testing.assert_allclose(c, A.sum(axis=1), atol=1e-15)
    for i, row in enumerate(SSPRK54.alpha):
        assert sum(row) == pytest.approx(1.0, abs=1e-14)
    # explicit: strictly lower triangular
    assert np.all(np.triu(A) == 0)


def test_order_conditions():
    A, b, c = SSPRK54.butcher()
    assert b @ c == pytest.approx(1 / 2, abs=1e-13)
    assert b @ c**2 == pytest.approx(1 / 3, abs=1e-13)
    assert b @ A @ c == pytest.approx(1 / 6, abs=1e-13)
    assert b @ c**3 == pytest.approx(1 / 4, abs=1e-13)
    assert b @ (c * (A @ c)) == pytest.approx(1 / 8, abs=1e-13)
    assert b @ A @ c**2 == pytest.approx(1 / 12, abs=1e-13)
    assert b @ A @ A @ c == pytest.approx(1 / 24, abs=1e-13)


def test_linear_decay_matches_stability_polynomial():
    # one step on u' = -u multiplies by R(-dt), R(z) = 1 + b^T (I - zA)^-1 z 1
    A, b, _ = SSPRK54.butcher()
    z = -0.1
    R = 1 + z * b @ np.linalg.solve(np.eye(5) - z * A, np.ones(5))
    assert _decay(0.1, 10) == pytest.approx(R**10, rel=1e-14)


def test_linear_decay_error_bound():
    # the tableau gives 1.5e-7 here; see the decisions ledger
    assert abs(_decay(0.1, 10) - np.exp(-1.0)) < 2e-7


@pytest.mark.xfail(strict=True, reason="documented bound 1e-7 is below the scheme's actual error 1.5e-7")
def test_linear_decay_documented_bound():
    assert abs(_decay(0.1, 10) - np.exp(-1.0)) < 1e-7


def test_observed_order():
    dts = [0.2, 0.1, 0.05, 0.025]
    errs = [abs(_decay(dt, int(round(1 / dt))) - np.exp(-1.0)) for dt in dts]
    slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
    assert 3.9 <= slope <= 4.1


def _sound_state(mesh, params):
    prim = np.zeros((9,) + mesh.J.shape)
    prim[0] = 1.0
    prim[4] = 1.0 / params.gamma  # sound speed 1
    return prim_to_cons(prim, params)


def test_compute_dt_example():
    params = PhysParams()
    mesh = build_interval(2, (0.0, 2.0), N=1)
    assert compute_dt(_sound_state(mesh, params), mesh, params, StepControl(cfl=0.5)) == pytest.approx(1 / 6)


def test_compute_dt_scaling():
    mesh_c = build_interval(4, (0.0, 4.0), N=2)
    mesh_f = build_interval(8, (0.0, 4.0), N=2)
    inv = PhysParams()
    ctrl = StepControl(cfl=0.5)
    a = compute_dt(_sound_state(mesh_c, inv), mesh_c, inv, ctrl)
    b = compute_dt(_sound_state(mesh_f, inv), mesh_f, inv, ctrl)
    assert b == pytest.approx(a / 2, rel=1e-14)
    visc = PhysParams(mu_ns=50.0)
    a = compute_dt(_sound_state(mesh_c, visc), mesh_c, visc, ctrl)
    b = compute_dt(_sound_state(mesh_f, visc), mesh_f, visc, ctrl)
    assert b == pytest.approx(a / 4, rel=1e-14)
    assert a < compute_dt(_sound_state(mesh_c, inv), mesh_c, inv, ctrl)


def test_dt_fixed_override():
    params = PhysParams()
    mesh = build_interval(2, N=1)
    assert compute_dt(_sound_state(mesh, params), mesh, params, StepControl(dt_fixed=1e-3)) == 1e-3


def test_select_ch_static_plasma():
    params = PhysParams()
    mesh = build_cartesian(2, 2, N=2)
    u = _sound_state(mesh, params)
    u[0] *= 2.0
    u[4] *= 3.0  # still at rest: c = sqrt(gamma p / rho)
    assert select_ch(u, mesh, params) == pytest.approx(np.sqrt(1.5), rel=1e-14)
    assert select_ch(u, mesh, params) <= max_advective_speed(u, mesh, params).max()


def test_psi_stays_zero_for_discretely_solenoidal_field():
    params = PhysParams()
    mesh = build_cartesian(6, 6, N=3)
    u = ic_orszag_tang(mesh.x, params)
    sd = SemiDiscretization(mesh, params)
    assert np.abs(sd.divergence_b(u)).max() < 1e-10
    for ch in (0.0, 1.0, select_ch(u, mesh, params)):
        sd.with_ch(ch)
        # the cleaning field receives no source while B is discretely solenoidal
        assert np.abs(sd.rhs(u, None)[8]).max() < 1e-12


def test_step_control_validation():
    with pytest.raises(ValueError):
        StepControl(cfl=0.0)
