"""Initial conditions, meshes and case diagnostics for the test suite."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .mesh import Mesh, build_cartesian, build_interval, build_warped
from .physics import PhysParams, prim_to_cons

__all__ = [
    "CaseSpec",
    "CASES",
    "get_case",
    "ic_fsp",
    "ic_blast",
    "ic_orszag_tang",
    "ic_gem",
    "ic_brio_wu",
    "ic_smooth",
    "reconnected_flux",
    "GEM_DEFAULTS",
]

FSP_STATE = np.array([1.0, 0.1, -0.2, 0.3, 1.0, 1.0, 1.0, 1.0, 0.0])
BLAST_INNER = np.array([1.2, 0.1, 0.0, 0.1, 0.9, 1.0, 1.0, 1.0, 0.0])
BLAST_OUTER = np.array([1.0, 0.2, -0.4, 0.2, 0.3, 1.0, 1.0, 1.0, 0.0])

# GEM challenge geometry
GEM_DEFAULTS = {"lx": 25.6, "ly": 12.8, "l": 0.5, "b0": 1.0, "amp": 0.1}


def _broadcast_state(state, shape):
    return np.broadcast_to(np.asarray(state, dtype=float).reshape((9,) + (1,) * len(shape)),
                           (9,) + tuple(shape)).copy()


def ic_fsp(x, params: PhysParams):
    """Uniform free-stream state."""
    return prim_to_cons(_broadcast_state(FSP_STATE, np.shape(x[0])), params)


def ic_blast(x, params: PhysParams, center=(1.5, 1.5), r0: float = 0.3, delta0: float = 0.1):
    """Weak magnetic blast blended from inner and outer primitive states."""
    r = np.sqrt(sum((x[d] - center[d]) ** 2 for d in range(len(x))))
    # inner weight 1 / (1 + lam) with lam = exp(z), written to avoid overflow
    z = 5.0 / delta0 * (r - r0)
    w_in = 0.5 * (1.0 - np.tanh(0.5 * z))
    shape = np.shape(r)
    prim = w_in * _broadcast_state(BLAST_INNER, shape) + (1.0 - w_in) * _broadcast_state(BLAST_OUTER, shape)
    return prim_to_cons(prim, params)


def ic_orszag_tang(x, params: PhysParams):
    """Orszag-Tang vortex on the unit square."""
    X, Y = x[0], x[1]
    shape = np.shape(X)
    prim = np.zeros((9,) + shape)
    prim[0] = 25.0 / (36.0 * np.pi)
    prim[4] = 5.0 / (12.0 * np.pi)
    prim[1] = -np.sin(2 * np.pi * Y)
    prim[2] = np.sin(2 * np.pi * X)
    s = 1.0 / np.sqrt(4.0 * np.pi)
    prim[5] = -np.sin(2 * np.pi * Y) * s
    prim[6] = np.sin(4 * np.pi * X) * s
    return prim_to_cons(prim, params)


def ic_gem(x, params: PhysParams, lx=25.6, ly=12.8, l=0.5, b0=1.0, amp=0.1):
    """GEM reconnection current sheet with the magnetic island perturbation."""
    X, Y = x[0], x[1]
    prim = np.zeros((9,) + np.shape(X))
    rho = 1.0 / np.cosh(Y / l) ** 2 + 0.2
    prim[0] = rho
    prim[4] = rho * b0**2 / 2.0
    prim[5] = b0 * np.tanh(Y / l) - amp * (np.pi / ly) * np.sin(np.pi * Y / ly) * np.cos(2 * np.pi * X / lx)
    prim[6] = amp * (2 * np.pi / lx) * np.sin(2 * np.pi * X / lx) * np.cos(np.pi * Y / ly)
    return prim_to_cons(prim, params)


def ic_brio_wu(x, params: PhysParams, x0: float = 0.5):
    """Brio-Wu shock tube (ideal MHD Riemann problem)."""
    X = x[0]
    prim = np.zeros((9,) + np.shape(X))
    left = X < x0
    prim[0] = np.where(left, 1.0, 0.125)
    prim[4] = np.where(left, 1.0, 0.1)
    prim[5] = 0.75
    prim[6] = np.where(left, 1.0, -1.0)
    return prim_to_cons(prim, params)


def ic_smooth(x, params: PhysParams, L=1.0):
    """Smooth periodic state with all components active (for operator tests)."""
    k = 2 * np.pi / L
    X = x[0]
    Y = x[1] if len(x) > 1 else 0.0 * X
    prim = np.zeros((9,) + np.shape(X))
    prim[0] = 1.0 + 0.3 * np.sin(k * X) * np.cos(k * Y)
    prim[1] = 0.3 * np.cos(k * Y) + 0.1 * np.sin(k * X)
    prim[2] = 0.2 + 0.1 * np.cos(k * X)
    prim[3] = 0.1 * np.sin(k * (X + Y))
    prim[4] = 1.0 + 0.2 * np.cos(k * (X + Y))
    prim[5] = 0.5 + 0.2 * np.sin(k * Y)
    prim[6] = 0.3 * np.cos(k * X)
    prim[7] = 0.1 + 0.05 * np.sin(k * X)
    prim[8] = 0.05 * np.sin(k * X)
    return prim_to_cons(prim, params)


def reconnected_flux(u, mesh: Mesh) -> float:
    """Half the line integral of ``|B2|`` along ``y = 0``.

    Uses the element faces on ``y = 0``, which exist when the element
    count in y is even on a domain symmetric about 0.
    """
    if mesh.dim != 2:
        raise ValueError("reconnected flux needs a 2D mesh")
    nx, ny = mesh.shape
    y0, y1 = mesh.extent[1]
    if ny % 2 or not np.isclose(y0, -y1):
        raise ValueError("no node line at y = 0: need an even element count on a symmetric domain")
    iy = ny // 2
    elems = np.arange(nx) * ny + iy
    xs = np.take(mesh.x[..., 0], elems, axis=1)  # (2, nx, n) bottom edge nodes
    if np.abs(xs[1]).max() > 1e-10:
        raise ValueError("element edge is not on y = 0")
    b2 = np.abs(np.take(u[6, ..., 0], elems, axis=0))
    dxdxi = np.einsum("im,km->ki", mesh.ops.D, xs[0])
    return 0.5 * float(np.sum(b2 * np.abs(dxdxi) * mesh.ops.weights))


@dataclass
class CaseSpec:
    """Description of a benchmark case."""

    name: str
    dim: int
    initial: Callable  # (x, params, config dict) -> u
    build_mesh: Callable  # (config dict) -> Mesh
    defaults: dict = field(default_factory=dict)
    indicator_quantity: str = "p"
    scalars: tuple = ()
    boundary: Callable | None = None  # params -> boundary_state(x_face, t)

    def scalar_values(self, u, mesh) -> dict:
        out = {}
        if "reconnected_flux" in self.scalars:
            out["reconnected_flux"] = reconnected_flux(u, mesh)
        return out


def _mesh_fsp(cfg):
    if cfg.get("mesh", "warped") == "warped":
        return build_warped(cfg["nx"], 3.0, cfg["N"], cfg.get("n_geo") or cfg["N"], cfg.get("warp_amplitude"))
    return build_cartesian(cfg["nx"], cfg["ny"], ((0.0, 3.0), (0.0, 3.0)), (True, True), cfg["N"])


def _mesh_unit(cfg):
    return build_cartesian(cfg["nx"], cfg["ny"], ((0.0, 1.0), (0.0, 1.0)), (True, True), cfg["N"])


def _mesh_gem(cfg):
    lx, ly = cfg.get("lx", GEM_DEFAULTS["lx"]), cfg.get("ly", GEM_DEFAULTS["ly"])
    return build_cartesian(cfg["nx"], cfg["ny"], ((-lx / 2, lx / 2), (-ly / 2, ly / 2)), (True, True), cfg["N"])


def _mesh_brio_wu(cfg):
    return build_interval(cfg["nx"], (0.0, 1.0), cfg["N"], periodic=False)


def _brio_wu_boundary(params):
    def bc(xf, t):
        return ic_brio_wu(xf, params)
    return bc


def _gem_ic(x, params, cfg=None):
    cfg = cfg or {}
    kw = {k: cfg.get(k, v) for k, v in GEM_DEFAULTS.items()}
    return ic_gem(x, params, **kw)


CASES = {
    "fsp": CaseSpec("fsp", 2, lambda x, p, c: ic_fsp(x, p), _mesh_fsp,
                    dict(N=4, nx=8, ny=8, mesh="warped", t_end=1.0, cfl=0.1, surface_flux="ec",
                         alpha_mode="random", relaxation=False, propagation=False)),
    "blast": CaseSpec("blast", 2, lambda x, p, c: ic_blast(x, p), _mesh_fsp,
                      dict(N=4, nx=16, ny=16, mesh="warped", t_end=1.0), indicator_quantity="p"),
    "orszag_tang": CaseSpec("orszag_tang", 2, lambda x, p, c: ic_orszag_tang(x, p), _mesh_unit,
                            dict(N=3, nx=32, ny=32, mesh="cartesian", t_end=0.5), indicator_quantity="p"),
    "gem": CaseSpec("gem", 2, _gem_ic, _mesh_gem,
                    dict(N=3, nx=64, ny=32, mesh="cartesian", t_end=40.0, eta=5e-3),
                    indicator_quantity="rho_p", scalars=("reconnected_flux",)),
    "brio_wu": CaseSpec("brio_wu", 1, lambda x, p, c: ic_brio_wu(x, p), _mesh_brio_wu,
                        dict(N=3, nx=100, ny=1, mesh="interval", t_end=0.1, gamma=2.0),
                        indicator_quantity="p", boundary=_brio_wu_boundary),
    "smooth": CaseSpec("smooth", 2, lambda x, p, c: ic_smooth(x, p), _mesh_unit,
                       dict(N=4, nx=4, ny=4, mesh="cartesian", t_end=0.1)),
}


def get_case(name: str) -> CaseSpec:
    try:
        return CASES[name]
    except KeyError:
        raise ValueError(f"unknown case {name!r}; choose from {sorted(CASES)}") from None
