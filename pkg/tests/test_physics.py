import numpy as np
import pytest

from esmhd.physics import (
    AdmissibilityError,
    PhysParams,
    advective_block_flux,
    cons_to_prim,
    entropy,
    entropy_flux_potential,
    entropy_jacobian,
    entropy_vars,
    max_wavespeed,
    phi_glm,
    phi_mhd,
    prim_to_cons,
    viscous_block_flux,
)
from conftest import random_prim

G = 5.0 / 3.0


def state(rho=1.0, v=(0, 0, 0), p=1.0, B=(0, 0, 0), psi=0.0, params=None):
    prim = np.array([rho, *v, p, *B, psi], dtype=float)
    return prim_to_cons(prim, params or PhysParams())


def test_pressure_at_rest(params):
    u = np.array([1.0, 0, 0, 0, 1.0, 0, 0, 0, 0])
    assert cons_to_prim(u, params)[4] == pytest.approx(2.0 / 3.0, abs=1e-15)


def test_pressure_moving(params):
    u = np.array([1.0, 1.0, 0, 0, 2.0, 0, 0, 0, 0])
    assert cons_to_prim(u, params)[4] == pytest.approx(1.0, abs=1e-15)


def test_negative_pressure_raises(params):
    u = np.array([1.0, 0, 0, 0, 0.1, 1.0, 0, 0, 0])
    with pytest.raises(AdmissibilityError) as exc:
        cons_to_prim(u, params)
    assert exc.value.p_min < 0


def test_prim_cons_round_trip(rng, params):
    prim = random_prim(rng, 50)
    np.testing.assert_allclose(cons_to_prim(prim_to_cons(prim, params), params), prim, rtol=1e-13, atol=1e-14)


@pytest.mark.parametrize("rho,p,expected", [
    (1.0, 1.0, 0.0),
    (1.0, np.exp(G - 1.0), -1.0),
])
def test_entropy_values(params, rho, p, expected):
    assert entropy(state(rho=rho, p=p), params) == pytest.approx(expected, abs=1e-14)


def test_entropy_direct_formula(params):
    rho, p = np.e, np.e**G
    ref = -rho * np.log(p * rho**-G) / (G - 1.0)
    assert entropy(state(rho=rho, p=p), params) == pytest.approx(ref, abs=1e-14)


def test_entropy_vars_rest_state(params):
    v = entropy_vars(state(), params)
    np.testing.assert_allclose(v, [2.5, 0, 0, 0, -1, 0, 0, 0, 0], atol=1e-14)


def test_entropy_vars_are_gradient(rng, params):
    u = prim_to_cons(random_prim(rng, 20), params)
    v = entropy_vars(u, params)
    h = 1e-7
    for i in range(9):
        du = np.zeros_like(u)
        du[i] = h
        fd = (entropy(u + du, params) - entropy(u - du, params)) / (2 * h)
        assert np.max(np.abs(fd - v[i]) / np.maximum(np.abs(v[i]), 1.0)) < 1e-6


def test_entropy_vars_zero_psi(params):
    assert entropy_vars(state(B=(0.3, 0.1, 0.2), v=(0.1, 0, 0)), params)[8] == 0.0


def test_entropy_jacobian_symmetric_positive(rng, params):
    u = prim_to_cons(random_prim(rng, 100), params)
    H = np.moveaxis(entropy_jacobian(u, params), -1, 0)
    assert np.max(np.abs(H - np.swapaxes(H, 1, 2))) < 1e-12
    assert np.min(np.linalg.eigvalsh(H)) > 0


def test_entropy_jacobian_maps_dv_to_du(rng, params):
    u = prim_to_cons(random_prim(rng, 100), params)
    H = entropy_jacobian(u, params)
    du = 1e-6 * rng.standard_normal(u.shape) * np.abs(u).clip(0.1)
    dv = entropy_vars(u + du, params) - entropy_vars(u - du, params)
    pred = np.einsum("ij...,j...->i...", H, dv)
    err = np.linalg.norm(pred - 2 * du, axis=0) / np.linalg.norm(2 * du, axis=0)
    assert err.max() < 1e-5


def test_advective_flux_example(params):
    f = advective_block_flux(state(v=(1, 0, 0)), params, dim=2)[0]
    np.testing.assert_allclose(f, [1, 2, 0, 0, 3, 0, 0, 0, 0], atol=1e-14)


def test_advective_flux_pressure_only(params):
    f = advective_block_flux(state(p=0.7), params, dim=2)[0]
    np.testing.assert_allclose(f, [0, 0.7, 0, 0, 0, 0, 0, 0, 0], atol=1e-15)


def test_advective_flux_glm_terms():
    params = PhysParams(c_h=2.0)
    base = PhysParams(c_h=0.0)
    u = state(v=(0.3, 0.1, 0), B=(0.7, 0.2, 0.1), psi=0.4)
    diff = advective_block_flux(u, params)[0] - advective_block_flux(u, base)[0]
    expected = np.zeros(9)
    expected[4] = 2.0 * 0.4 * 0.7
    expected[5] = 2.0 * 0.4
    expected[8] = 2.0 * 0.7
    np.testing.assert_allclose(diff, expected, atol=1e-14)


def _grad_cons(prim, dprim, params):
    # prim_to_cons is at most quadratic along these directions, so the
    # central difference is exact to round-off
    h = 1e-3
    return (prim_to_cons(prim + h * dprim, params) - prim_to_cons(prim - h * dprim, params)) / (2 * h)


def test_viscous_flux_zero_gradient():
    params = PhysParams(mu_ns=1.0, eta=1.0)
    u = state(v=(0.5, 0.1, 0), B=(0.2, 0.3, 0.1))
    assert np.all(viscous_block_flux(u, np.zeros((2, 9)), params) == 0.0)


def test_viscous_flux_shear_example():
    params = PhysParams(mu_ns=1.0, eta=0.0)
    prim = np.array([1.0, 0.5, 0, 0, 1.0, 0, 0, 0, 0])
    d = np.zeros(9)
    d[1] = 1.0
    grad = np.stack([_grad_cons(prim, d, params), np.zeros(9)])
    f = viscous_block_flux(prim_to_cons(prim, params), grad, params)[0]
    assert f[1] == pytest.approx(4.0 / 3.0, rel=1e-12)
    assert f[4] == pytest.approx(4.0 / 3.0 * 0.5, rel=1e-12)


def test_viscous_flux_resistive_example():
    params = PhysParams(mu_ns=0.0, eta=1.0)
    prim = np.array([1.0, 0, 0, 0, 1.0, 0, 0.4, 0, 0])
    d = np.zeros(9)
    d[6] = 1.0
    grad = np.stack([_grad_cons(prim, d, params), np.zeros(9)])
    f = viscous_block_flux(prim_to_cons(prim, params), grad, params)[0]
    assert f[6] == pytest.approx(1.0, rel=1e-12)
    assert f[4] == pytest.approx(0.4, rel=1e-12)


def test_phi_at_rest(params):
    u = state(B=(0.3, -0.2, 0.5), psi=0.1)
    np.testing.assert_allclose(phi_mhd(u, params), [0, 0.3, -0.2, 0.5, 0, 0, 0, 0, 0], atol=1e-15)
    assert np.all(phi_glm(u, params) == 0.0)


def test_phi_mhd_example(params):
    u = state(v=(1, 0, 0), B=(1, 0, 0))
    np.testing.assert_allclose(phi_mhd(u, params), [0, 1, 0, 0, 1, 1, 0, 0, 0], atol=1e-15)


def test_phi_mhd_contraction(rng, params):
    prim = random_prim(rng, 100)
    u = prim_to_cons(prim, params)
    beta = 0.5 * prim[0] / prim[4]
    lhs = np.sum(entropy_vars(u, params) * phi_mhd(u, params), axis=0)
    rhs = 2 * beta * np.sum(prim[1:4] * prim[5:8], axis=0)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-13)


def test_entropy_flux_potential_at_rest():
    params = PhysParams(c_h=1.5)
    u = state(B=(0.4, 0.2, -0.3), psi=0.3)
    v = entropy_vars(u, params)
    f1 = advective_block_flux(u, params)[0]
    assert entropy_flux_potential(u, params)[0] == pytest.approx(np.dot(v, f1), rel=1e-13, abs=1e-14)


def test_entropy_flux_potential_b3_neutral():
    params = PhysParams(c_h=0.5)
    a = entropy_flux_potential(state(B=(0, 0.3, 0.1), psi=0.2), params)[0]
    b = entropy_flux_potential(state(B=(0, 0.3, 0.2), psi=0.2), params)[0]
    assert a == pytest.approx(b, abs=1e-14)


def test_wavespeed_hydro_limit(params):
    u = state(rho=1.3, v=(0.4, -0.2, 0.1), p=0.8)
    n = np.array([0.6, 0.8])
    ref = abs(0.4 * 0.6 - 0.2 * 0.8) + np.sqrt(G * 0.8 / 1.3)
    assert max_wavespeed(u, n, params) == pytest.approx(ref, rel=1e-14)


def test_wavespeed_parallel_field(params):
    u = state(p=1.0, B=(0.5, 0, 0))
    assert max_wavespeed(u, np.array([1.0, 0.0]), params) == pytest.approx(np.sqrt(G), rel=1e-14)


def test_fast_speed_monotone_in_b(rng, params):
    prim = random_prim(rng, 200)
    n = np.array([0.8, 0.6])
    c_prev = None
    for scale in (0.0, 0.5, 1.0, 2.0, 4.0):
        p = prim.copy()
        p[1:4] = 0.0
        p[5:8] *= scale
        c = max_wavespeed(prim_to_cons(p, params), n, params)
        if c_prev is not None:
            assert np.all(c >= c_prev - 1e-14)
        c_prev = c


def test_params_validation():
    with pytest.raises(ValueError):
        PhysParams(gamma=1.0)
    with pytest.raises(ValueError):
        PhysParams(eta=-1.0)
