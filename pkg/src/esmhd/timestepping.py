"""SSPRK(5,4) time integration, CFL time step and GLM speed selection."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import Mesh
from .physics import AdmissibilityError, PhysParams, cons_to_prim, fast_speed

__all__ = [
    "SSPRK54",
    "StepControl",
    "ssprk54_step",
    "max_advective_speed",
    "max_viscous_eigenvalue",
    "compute_dt",
    "select_ch",
]


class SSPRK54:
    """Shu-Osher coefficients of the five-stage, fourth-order SSP scheme.

    ``u_i = sum_k alpha[i][k] u_k + beta[i][k] dt L(u_k)`` for stage inputs
    ``u_0 = u^n`` and ``u_1..u_4`` with ``u^{n+1}`` as the last row.
    """

    alpha = (
        (1.0,),
        (0.444370493651235, 0.555629506348765),
        (0.620101851488403, 0.0, 0.379898148511597),
        (0.178079954393132, 0.0, 0.0, 0.821920045606868),
        (0.0, 0.0, 0.517231671970585, 0.096059710526147, 0.386708617503269),
    )
    beta = (
        (0.391752226571890,),
        (0.0, 0.368410593050371),
        (0.0, 0.0, 0.251891774271694),
        (0.0, 0.0, 0.0, 0.544974750228521),
        (0.0, 0.0, 0.0, 0.063692468666290, 0.226007483236906),
    )
    stages = 5

    @classmethod
    def butcher(cls):
        """Equivalent Butcher tableau ``(A, b, c)``."""
        s = cls.stages
        # each stage value as a combination of dt * k_j (k_j = L(u_j))
        coef = [np.zeros(s)]  # u_0 = u^n
        for i in range(s):
            c = np.zeros(s)
            for k, a in enumerate(cls.alpha[i]):
                c += a * coef[k]
            for k, b in enumerate(cls.beta[i]):
                c[k] += b
            coef.append(c)
        A = np.array(coef[:s])
        b = coef[s]
        return A, b, A.sum(axis=1)


def ssprk54_step(u, rhs, dt: float, t: float = 0.0):
    """Advance ``u`` by one SSPRK(5,4) step.

    ``rhs(u, t, stage)`` is called once per stage; stage buffers are
    independent arrays.
    """
    al, be = SSPRK54.alpha, SSPRK54.beta
    c = SSPRK54.butcher()[2]
    us = [u]
    ks = []
    for i in range(SSPRK54.stages):
        try:
            ks.append(rhs(us[i], t + c[i] * dt, i))
        except AdmissibilityError as err:
            raise AdmissibilityError(f"stage {i}: {err}", err.rho_min, err.p_min, err.index) from err
        new = np.zeros_like(u)
        for k, a in enumerate(al[i]):
            if a != 0.0:
                new += a * us[k]
        for k, b in enumerate(be[i]):
            if b != 0.0:
                new += (b * dt) * ks[k]
        us.append(new)
    return us[-1]


@dataclass(frozen=True)
class StepControl:
    """Time-step settings."""

    cfl: float = 0.5
    cfl_visc: float = 0.5
    beta_a: float = 1.0
    beta_v: float = 1.0
    t_end: float = 1.0
    dt_fixed: float | None = None

    def __post_init__(self):
        for name in ("cfl", "cfl_visc"):
            val = getattr(self, name)
            if not 0.0 < val <= 1.0:
                raise ValueError(f"{name} must be in (0, 1], got {val}")


def max_advective_speed(u, mesh: Mesh, params: PhysParams, prim=None):
    """Per-element max over nodes and Cartesian directions of ``|v_d| + c_f``."""
    if prim is None:
        prim = cons_to_prim(u, params)
    lam = None
    for d in range(mesh.dim):
        e = [0.0, 0.0, 0.0]
        e[d] = 1.0
        s = np.abs(prim[1 + d]) + fast_speed(prim, e, params)
        lam = s if lam is None else np.maximum(lam, s)
    axes = tuple(range(1, lam.ndim))
    out = lam.max(axis=axes)
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("non-finite wave speed")
    return out


def max_viscous_eigenvalue(u, mesh: Mesh, params: PhysParams, prim=None):
    """Per-element ``max(4 mu/(3 rho), gamma mu/(Pr rho), eta/mu0)``."""
    if prim is None:
        prim = cons_to_prim(u, params)
    rho = prim[0]
    lam = np.maximum(4.0 * params.mu_ns / (3.0 * rho), params.gamma * params.mu_ns / (params.prandtl * rho))
    lam = np.maximum(lam, params.eta / params.mu0)
    return lam.max(axis=tuple(range(1, lam.ndim)))


def compute_dt(u, mesh: Mesh, params: PhysParams, control: StepControl, prim=None) -> float:
    """CFL time step (global minimum over elements)."""
    if control.dt_fixed is not None:
        return float(control.dt_fixed)
    N = mesh.N
    dx = mesh.element_size
    lam_a = max_advective_speed(u, mesh, params, prim)
    dt = np.min(control.cfl * control.beta_a * dx / (lam_a * (2 * N + 1)))
    if params.viscous:
        lam_v = max_viscous_eigenvalue(u, mesh, params, prim)
        with np.errstate(divide="ignore"):
            dtv = np.min(control.cfl_visc * control.beta_v * dx**2 / (lam_v * (2 * N + 1) ** 2))
        dt = min(dt, dtv)
    if not np.isfinite(dt) or dt <= 0:
        raise FloatingPointError(f"invalid time step {dt}")
    return float(dt)


def select_ch(u, mesh: Mesh, params: PhysParams, prim=None) -> float:
    """GLM cleaning speed: the largest advective speed on the mesh."""
    return float(np.max(max_advective_speed(u, mesh, params, prim)))
