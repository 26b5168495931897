import numpy as np
import pytest

from esmhd import kernels
from esmhd.mesh import build_interval, build_warped
from esmhd.physics import PhysParams
from esmhd.solver import SchemeOptions, SemiDiscretization
from conftest import smooth_state

pytestmark = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba not available")

VARIANTS = [("ec", "none"), ("es_rusanov", "none"), ("tvd_es", "none"), ("tvd_es", "tvd_no_boundary"),
            ("tvd_es", "tvd_central_boundary"), ("tvd_es", "tvd_neighbor_boundary")]


def _pair(mesh, params, **opts):
    fast = SemiDiscretization(mesh, params, SchemeOptions(**opts))
    ref = SemiDiscretization(mesh, params, SchemeOptions(**opts))
    ref.use_kernels = ref.use_kernels_2d = False
    return fast, ref


def _rough_state(mesh, params, seed):
    u = smooth_state(mesh, params, amp=0.3, seed=seed)
    # a jump so that the limiters are active
    u[0] = u[0] * np.where(mesh.x[0] < 0.5 * mesh.extent[0][1], 1.0, 1.5)
    u[4] = u[4] * np.where(mesh.x[0] < 0.5 * mesh.extent[0][1], 1.0, 1.8)
    return u


@pytest.mark.parametrize("fv,recon", VARIANTS)
@pytest.mark.parametrize("surface", ["ec", "es_rusanov"])
def test_kernels_match_numpy_2d(fv, recon, surface):
    params = PhysParams(c_h=1.2)
    mesh = build_warped(6, N=4)
    u = _rough_state(mesh, params, 1)
    alpha = np.random.default_rng(2).uniform(0, 1, mesh.K)
    fast, ref = _pair(mesh, params, surface_flux=surface, fv_flux=fv, recon=recon)
    a, b = fast.rhs(u, alpha), ref.rhs(u, alpha)
    assert np.abs(a - b).max() <= 1e-12 * np.abs(b).max()


@pytest.mark.parametrize("fv,recon", VARIANTS)
def test_kernels_match_numpy_1d(fv, recon):
    params = PhysParams(c_h=1.0)
    mesh = build_interval(10, (0.0, 1.0), N=3)
    u = _rough_state(mesh, params, 3)
    alpha = np.linspace(0, 1, mesh.K)
    fast, ref = _pair(mesh, params, fv_flux=fv, recon=recon)
    a, b = fast.rhs(u, alpha), ref.rhs(u, alpha)
    assert np.abs(a - b).max() <= 1e-12 * np.abs(b).max()


def test_viscous_kernel_matches_numpy():
    params = PhysParams(mu_ns=0.02, eta=0.01, c_h=1.0)
    mesh = build_warped(6, N=3)
    u = smooth_state(mesh, params, amp=0.3, seed=9)
    fast, ref = _pair(mesh, params)
    a, b = fast.residual_parts(u)["visc"], ref.residual_parts(u)["visc"]
    assert np.abs(a - b).max() <= 1e-12 * np.abs(b).max()


def test_all_fv_fast_path():
    params = PhysParams(c_h=1.0)
    mesh = build_warped(6, N=3)
    u = _rough_state(mesh, params, 4)
    fast, ref = _pair(mesh, params)
    ones = np.ones(mesh.K)
    a, b = fast.rhs(u, ones), ref.rhs(u, ones)
    assert np.abs(a - b).max() <= 1e-12 * np.abs(b).max()
