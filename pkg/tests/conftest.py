import numpy as np
import pytest

from esmhd.physics import PhysParams, prim_to_cons


def random_prim(rng, n, rho_range=(0.5, 2.0), p_range=(0.5, 2.0), psi=True):
    """Random admissible primitive states, shape (9, n)."""
    prim = np.empty((9, n))
    prim[0] = rng.uniform(*rho_range, n)
    prim[1:4] = rng.uniform(-1, 1, (3, n))
    prim[4] = rng.uniform(*p_range, n)
    prim[5:8] = rng.uniform(-1, 1, (3, n))
    prim[8] = rng.uniform(-0.5, 0.5, n) if psi else 0.0
    return prim


@pytest.fixture
def params():
    return PhysParams(gamma=5.0 / 3.0)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def random_states(rng, params):
    def make(n, **kw):
        return prim_to_cons(random_prim(rng, n, **kw), params)
    return make


def smooth_state(mesh, params, amp=0.2, seed=0):
    """Smooth periodic perturbation of a reference state at the mesh nodes."""
    rng = np.random.default_rng(seed)
    x = mesh.x
    L = [hi - lo for lo, hi in mesh.extent]
    base = np.array([1.0, 0.1, -0.2, 0.05, 1.0, 0.3, 0.2, 0.1, 0.05])
    prim = np.empty((9,) + x.shape[1:])
    for i in range(9):
        phase = 0.0
        for d in range(mesh.dim):
            k = rng.integers(1, 3)
            phase = phase + 2 * np.pi * k * (x[d] - mesh.extent[d][0]) / L[d] + rng.uniform(0, 2 * np.pi)
        prim[i] = base[i] + amp * np.sin(phase) * (0.5 if i in (0, 4) else 1.0)
    return prim_to_cons(prim, params)


def entropy_scale(solver, u, alpha=None):
    """Magnitude of the nodal entropy contributions of the residual."""
    from esmhd.physics import entropy_vars
    du = solver.rhs(u, alpha)
    return float(np.sum(solver.wJ * np.abs(np.sum(entropy_vars(u, solver.params) * du, axis=0))))


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
