import numpy as np
import pytest

from esmhd.dg import br1_gradients
from esmhd.mesh import build_cartesian, build_interval, build_warped
from esmhd.physics import PhysParams, entropy_vars, prim_to_cons
from esmhd.solver import SchemeOptions, SemiDiscretization
from conftest import entropy_scale, smooth_state

P = PhysParams(c_h=1.0)
FSP = np.array([1.0, 0.1, -0.2, 0.3, 1.0, 1.0, 1.0, 1.0, 0.0])


@pytest.fixture(scope="module")
def warped():
    return build_warped(6, L=3.0, N=4)


def uniform(mesh, prim=FSP, params=P):
    u = prim_to_cons(prim, params)
    return np.ascontiguousarray(np.broadcast_to(u.reshape((9,) + (1,) * (mesh.dim + 1)), (9,) + mesh.J.shape))


@pytest.mark.parametrize("surface", ["ec", "es_rusanov"])
def test_dg_free_stream(warped, surface):
    sd = SemiDiscretization(warped, P, SchemeOptions(surface_flux=surface))
    assert np.abs(sd.rhs(uniform(warped))).max() < 1e-11


def test_single_element_ec_entropy_conservation():
    mesh = build_cartesian(1, 1, N=5)
    sd = SemiDiscretization(mesh, P, SchemeOptions(surface_flux="ec", fv_flux="ec"))
    u = smooth_state(mesh, P, seed=3)
    rate = sd.entropy_rate(u)
    assert abs(rate) < 1e-11 * max(1.0, entropy_scale(sd, u))


def test_warped_ec_entropy_conservation(warped):
    sd = SemiDiscretization(warped, P, SchemeOptions(surface_flux="ec", fv_flux="ec"))
    u = smooth_state(warped, P, seed=4)
    assert abs(sd.entropy_rate(u)) < 1e-11 * entropy_scale(sd, u)


def test_es_surface_dissipates(warped):
    sd = SemiDiscretization(warped, P, SchemeOptions(surface_flux="es_rusanov"))
    u = smooth_state(warped, P, amp=0.3, seed=5)
    assert sd.entropy_rate(u) <= 1e-11 * entropy_scale(sd, u)
    assert sd.entropy_rate(u) < 0


def test_br1_constant_state(warped):
    v = entropy_vars(uniform(warped), P)
    assert np.abs(br1_gradients(v, warped)).max() < 1e-11


def test_br1_linear_profile():
    mesh = build_cartesian(6, 2, domain=((0, 6), (0, 1)), N=3)
    v = np.zeros((9,) + mesh.J.shape)
    v[2] = 0.7 * mesh.x[0] + 0.2
    g = br1_gradients(v, mesh)
    # elements away from the periodic jump in x
    ix = np.arange(mesh.K) // 2
    interior = (ix > 0) & (ix < 5)
    np.testing.assert_allclose(g[0, 2][interior], 0.7, atol=1e-12)
    np.testing.assert_allclose(g[1, 2][interior], 0.0, atol=1e-12)
    assert np.abs(np.delete(g, 2, axis=1)).max() == 0.0


def test_br1_jump_enters_through_half_jump():
    mesh = build_interval(4, (0.0, 4.0), N=3)
    v = np.zeros((9, 4, 4))
    v[0, 1] = 1.0
    g = br1_gradients(v, mesh)[0, 0]
    wJ0 = mesh.ops.weights[0] * mesh.J[0, 0]
    expected = np.zeros((4, 4))
    expected[1, 0] = 0.5 / wJ0
    expected[1, -1] = -0.5 / wJ0
    expected[0, -1] = 0.5 / wJ0
    expected[2, 0] = -0.5 / wJ0
    np.testing.assert_allclose(g, expected, atol=1e-13)


def test_viscous_zero_when_inviscid(warped):
    sd = SemiDiscretization(warped, P)
    u = smooth_state(warped, P)
    assert np.all(sd.residual_parts(u)["visc"] == 0.0)


@pytest.fixture(scope="module")
def viscous_setup(warped):
    params = PhysParams(mu_ns=0.05, eta=0.03, prandtl=0.72, c_h=1.0)
    sd = SemiDiscretization(warped, params)
    u = smooth_state(warped, params, amp=0.3, seed=8)
    return sd, u, sd.residual_parts(u)["visc"]


def test_viscous_conservation(viscous_setup):
    _, _, visc = viscous_setup
    totals = visc.reshape(9, -1).sum(axis=1)
    assert np.abs(totals).max() < 1e-12 * max(1.0, np.abs(visc).max())


def test_viscous_entropy_dissipation(viscous_setup):
    sd, u, visc = viscous_setup
    v = entropy_vars(u, sd.params)
    rate = -float(np.sum(v * visc))
    assert rate <= 1e-10
    assert rate < 0
