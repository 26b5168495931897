"""Pointwise resistive GLM-MHD physics.

All functions operate on arrays whose first axis holds the 9 state
components ``(rho, rho v1, rho v2, rho v3, rho E, B1, B2, B3, psi)``;
any number of trailing axes is allowed. Block fluxes carry an extra
leading axis for the spatial direction.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "NVAR",
    "IRHO", "IM", "IE", "IB", "IPSI",
    "PhysParams",
    "AdmissibilityError",
    "cons_to_prim",
    "prim_to_cons",
    "pressure",
    "entropy",
    "entropy_vars",
    "entropy_jacobian",
    "entropy_jacobian_apply",
    "advective_flux",
    "advective_block_flux",
    "viscous_block_flux",
    "viscous_block_flux_entropy",
    "phi_mhd",
    "phi_glm",
    "entropy_flux_potential",
    "fast_speed",
    "max_wavespeed",
]

NVAR = 9
IRHO = 0
IM = slice(1, 4)
IE = 4
IB = slice(5, 8)
IPSI = 8

# pointwise admissibility threshold for rho and p
ADMISSIBLE_MIN = 1e-13


class AdmissibilityError(ValueError):
    """Raised when a state has non-positive density or pressure.

    Attributes
    ----------
    rho_min, p_min : float
        Smallest density and pressure found.
    index : tuple or None
        Position (trailing axes) of the first offending node.
    """

    def __init__(self, message, rho_min=np.nan, p_min=np.nan, index=None):
        super().__init__(message)
        self.rho_min = rho_min
        self.p_min = p_min
        self.index = index


@dataclass
class PhysParams:
    """Material and GLM parameters.

    ``c_h`` is updated by the time integrator every step; use
    :func:`dataclasses.replace` to get a modified copy.
    """

    gamma: float = 5.0 / 3.0
    mu0: float = 1.0
    mu_ns: float = 0.0
    eta: float = 0.0
    prandtl: float = 0.72
    r_gas: float = 1.0
    c_h: float = 0.0

    def __post_init__(self):
        if not self.gamma > 1:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        if not self.mu0 > 0:
            raise ValueError(f"mu0 must be positive, got {self.mu0}")
        if self.mu_ns < 0 or self.eta < 0:
            raise ValueError("mu_ns and eta must be non-negative")
        if not self.prandtl > 0:
            raise ValueError(f"prandtl must be positive, got {self.prandtl}")
        if self.c_h < 0:
            raise ValueError(f"c_h must be non-negative, got {self.c_h}")

    @property
    def kappa(self) -> float:
        """Thermal conductivity from the constant Prandtl number."""
        return self.gamma * self.mu_ns * self.r_gas / ((self.gamma - 1.0) * self.prandtl)

    @property
    def viscous(self) -> bool:
        return self.mu_ns > 0 or self.eta > 0


def _check(rho, p):
    bad_rho = ~(rho > ADMISSIBLE_MIN)
    bad_p = ~(p > ADMISSIBLE_MIN)
    if np.any(bad_rho) or np.any(bad_p):
        bad = np.argwhere(np.atleast_1d(bad_rho | bad_p))
        idx = tuple(int(i) for i in bad[0]) if bad.size else None
        rmin = float(np.nanmin(rho)) if np.size(rho) else np.nan
        pmin = float(np.nanmin(p)) if np.size(p) else np.nan
        raise AdmissibilityError(
            f"inadmissible state: min rho={rmin:.6e}, min p={pmin:.6e}, first bad node {idx}",
            rmin, pmin, idx,
        )


def pressure(u, params: PhysParams):
    """Gas pressure from the conservative state (no admissibility check)."""
    u = np.asarray(u, dtype=float)
    rho = u[IRHO]
    kin = 0.5 * (u[1] ** 2 + u[2] ** 2 + u[3] ** 2) / rho
    mag = 0.5 * (u[5] ** 2 + u[6] ** 2 + u[7] ** 2 + u[8] ** 2) / params.mu0
    return (params.gamma - 1.0) * (u[IE] - kin - mag)


def cons_to_prim(u, params: PhysParams, check: bool = True):
    """Primitive variables ``(rho, v1, v2, v3, p, B1, B2, B3, psi)``."""
    u = np.asarray(u, dtype=float)
    rho = u[IRHO]
    p = pressure(u, params)
    if check:
        _check(rho, p)
    prim = np.empty_like(u)
    prim[0] = rho
    prim[1:4] = u[1:4] / rho
    prim[4] = p
    prim[5:9] = u[5:9]
    return prim


def prim_to_cons(prim, params: PhysParams):
    """Conservative state from primitive variables."""
    prim = np.asarray(prim, dtype=float)
    rho = prim[0]
    vel = prim[1:4]
    u = np.empty_like(prim)
    u[0] = rho
    u[1:4] = rho * vel
    u[4] = (prim[4] / (params.gamma - 1.0) + 0.5 * rho * np.sum(vel**2, axis=0)
            + 0.5 * (np.sum(prim[5:8] ** 2, axis=0) + prim[8] ** 2) / params.mu0)
    u[5:9] = prim[5:9]
    return u


def entropy(u, params: PhysParams):
    """Mathematical entropy ``S = -rho s / (gamma - 1)``, ``s = ln(p rho^-gamma)``."""
    prim = cons_to_prim(u, params)
    rho, p = prim[0], prim[4]
    s = np.log(p) - params.gamma * np.log(rho)
    return -rho * s / (params.gamma - 1.0)


def _entropy_vars_prim(prim, params: PhysParams):
    g = params.gamma
    rho, vel, p, B, psi = prim[0], prim[1:4], prim[4], prim[5:8], prim[8]
    beta = 0.5 * rho / p
    s = np.log(p) - g * np.log(rho)
    v = np.empty_like(prim)
    v[0] = (g - s) / (g - 1.0) - beta * np.sum(vel**2, axis=0)
    v[1:4] = 2.0 * beta * vel
    v[4] = -2.0 * beta
    # exact gradient of S w.r.t. B and psi carries 1/mu0 (identical at mu0 = 1)
    v[5:8] = 2.0 * beta * B / params.mu0
    v[8] = 2.0 * beta * psi / params.mu0
    return v


def entropy_vars(u, params: PhysParams):
    """Entropy variables ``v = dS/du``."""
    return _entropy_vars_prim(cons_to_prim(u, params), params)


def entropy_jacobian(u, params: PhysParams, prim=None):
    """Symmetric positive definite matrix ``H = du/dv``.

    Returns an array of shape ``(9, 9) + u.shape[1:]``.
    """
    if prim is None:
        prim = cons_to_prim(u, params)
    g, mu0 = params.gamma, params.mu0
    rho, vel, p, B, psi = prim[0], prim[1:4], prim[4], prim[5:8], prim[8]
    v2 = np.sum(vel**2, axis=0)
    eh = p / (g - 1.0) + 0.5 * rho * v2
    por = p / rho
    H = np.zeros((NVAR, NVAR) + np.shape(rho))
    H[0, 0] = rho
    H[0, 4] = H[4, 0] = eh
    for i in range(3):
        H[0, 1 + i] = H[1 + i, 0] = rho * vel[i]
        for j in range(3):
            H[1 + i, 1 + j] = rho * vel[i] * vel[j]
        H[1 + i, 1 + i] = H[1 + i, 1 + i] + p
        H[1 + i, 4] = H[4, 1 + i] = vel[i] * (eh + p)
        H[4, 5 + i] = H[5 + i, 4] = por * B[i]
        H[5 + i, 5 + i] = mu0 * por
    H[4, 4] = (eh**2 / rho + p * p / (rho * (g - 1.0)) + p * v2
               + por * (np.sum(B**2, axis=0) + psi**2) / mu0)
    H[4, 8] = H[8, 4] = por * psi
    H[8, 8] = mu0 * por
    return H


def entropy_jacobian_apply(prim, x, params: PhysParams):
    """Matrix-free product ``H(prim) @ x`` along the component axis."""
    g, mu0 = params.gamma, params.mu0
    rho, vel, p, B, psi = prim[0], prim[1:4], prim[4], prim[5:8], prim[8]
    v2 = vel[0] ** 2 + vel[1] ** 2 + vel[2] ** 2
    eh = p / (g - 1.0) + 0.5 * rho * v2
    por = p / rho
    vx = vel[0] * x[1] + vel[1] * x[2] + vel[2] * x[3]
    bx = B[0] * x[5] + B[1] * x[6] + B[2] * x[7]
    h44 = eh * eh / rho + p * p / (rho * (g - 1.0)) + p * v2 + por * (B[0] ** 2 + B[1] ** 2 + B[2] ** 2 + psi**2) / mu0
    out = np.empty(np.broadcast_shapes(np.shape(x), np.shape(prim)))
    out[0] = rho * x[0] + rho * vx + eh * x[4]
    a = rho * x[0] + rho * vx + (eh + p) * x[4]
    out[1:4] = vel * a + p * x[1:4]
    out[4] = eh * x[0] + (eh + p) * vx + h44 * x[4] + por * (bx + psi * x[8])
    out[5:8] = por * (B * x[4] + mu0 * x[5:8])
    out[8] = por * (psi * x[4] + mu0 * x[8])
    return out


def _pad3(normal):
    """Split a (dim, ...) normal into three components, zero-padding."""
    normal = np.asarray(normal, dtype=float)
    comps = [normal[d] for d in range(normal.shape[0])]
    while len(comps) < 3:
        comps.append(0.0)
    return comps


def advective_flux(u, params: PhysParams, normal, prim=None):
    """Advective flux projected on ``normal`` (shape ``(dim, ...)``, any length)."""
    u = np.asarray(u, dtype=float)
    if prim is None:
        prim = cons_to_prim(u, params)
    mu0, ch = params.mu0, params.c_h
    n = _pad3(normal)
    rho, vel, p, B, psi = prim[0], prim[1:4], prim[4], prim[5:8], prim[8]
    vn = vel[0] * n[0] + vel[1] * n[1] + vel[2] * n[2]
    bn = B[0] * n[0] + B[1] * n[1] + B[2] * n[2]
    vb = vel[0] * B[0] + vel[1] * B[1] + vel[2] * B[2]
    ptot = p + 0.5 * (B[0] ** 2 + B[1] ** 2 + B[2] ** 2) / mu0
    f = np.empty(np.broadcast_shapes(u.shape, np.shape(vn)))
    f[0] = rho * vn
    for i in range(3):
        f[1 + i] = u[1 + i] * vn - B[i] * bn / mu0 + ptot * n[i]
        f[5 + i] = vn * B[i] - vel[i] * bn + ch * psi * n[i]
    # psi^2/2 is transported by the GLM non-conservative term, not by f
    v2 = vel[0] ** 2 + vel[1] ** 2 + vel[2] ** 2
    b2 = B[0] ** 2 + B[1] ** 2 + B[2] ** 2
    f[4] = ((0.5 * rho * v2 + params.gamma * p / (params.gamma - 1.0)) * vn
            + (vn * b2 - vb * bn) / mu0 + ch * psi * bn / mu0)
    f[8] = ch * bn
    return f


def advective_block_flux(u, params: PhysParams, dim: int = 2):
    """Advective flux for each Cartesian direction, shape ``(dim, 9, ...)``."""
    prim = cons_to_prim(u, params)
    eye = np.eye(dim)
    return np.stack([advective_flux(u, params, eye[d], prim) for d in range(dim)])


def phi_mhd(u, params: PhysParams, prim=None):
    """Powell non-conservative vector ``(0, B/mu0, v.B/mu0, v, 0)``."""
    if prim is None:
        prim = cons_to_prim(u, params)
    vel, B = prim[1:4], prim[5:8]
    phi = np.zeros_like(prim)
    phi[1:4] = B / params.mu0
    phi[4] = np.sum(vel * B, axis=0) / params.mu0
    phi[5:8] = vel
    return phi


def phi_glm(u, params: PhysParams, dim: int = 2, prim=None):
    """GLM non-conservative vectors, shape ``(dim, 9, ...)``."""
    if prim is None:
        prim = cons_to_prim(u, params)
    vel, psi = prim[1:4], prim[8]
    out = np.zeros((dim,) + prim.shape)
    for d in range(dim):
        out[d, 4] = vel[d] * psi / params.mu0
        out[d, 8] = vel[d] / params.mu0
    return out


def entropy_flux_potential(u, params: PhysParams, dim: int = 2):
    """Entropy flux potential per direction ``Psi_d = v.f_d - v_d S + theta B_d``."""
    prim = cons_to_prim(u, params)
    v = _entropy_vars_prim(prim, params)
    S = entropy(u, params)
    beta = 0.5 * prim[0] / prim[4]
    theta = 2.0 * beta * np.sum(prim[1:4] * prim[5:8], axis=0)
    out = []
    eye = np.eye(dim)
    for d in range(dim):
        f = advective_flux(u, params, eye[d], prim)
        out.append(np.sum(v * f, axis=0) - prim[1 + d] * S + theta * prim[5 + d] / params.mu0)
    return np.stack(out)


def _primitive_gradients_from_cons(u, grad_u, params):
    prim = cons_to_prim(u, params)
    rho, vel, p, B, psi = prim[0], prim[1:4], prim[4], prim[5:8], prim[8]
    g_rho = grad_u[:, 0]
    g_vel = (grad_u[:, 1:4] - vel[None] * g_rho[:, None]) / rho
    g_B = grad_u[:, 5:8]
    g_p = (params.gamma - 1.0) * (
        grad_u[:, 4]
        - np.sum(vel[None] * grad_u[:, 1:4], axis=1)
        + 0.5 * np.sum(vel**2, axis=0) * g_rho
        - (np.sum(B[None] * g_B, axis=1) + psi * grad_u[:, 8]) / params.mu0
    )
    g_T = (g_p - p / rho * g_rho) / (params.r_gas * rho)
    return prim, g_vel, g_T, g_B


def _primitive_gradients_from_entropy(u, grad_v, params, prim=None):
    if prim is None:
        prim = cons_to_prim(u, params)
    b = prim[0] / prim[4]  # 2 beta = -v5
    vel, B = prim[1:4], prim[5:8]
    g5 = grad_v[:, 4]
    g_vel = (grad_v[:, 1:4] + vel[None] * g5[:, None]) / b
    g_B = (params.mu0 * grad_v[:, 5:8] + B[None] * g5[:, None]) / b
    g_T = g5 / (params.r_gas * b * b)
    return prim, g_vel, g_T, g_B


def _viscous_from_prim_gradients(prim, g_vel, g_T, g_B, params):
    dim = g_vel.shape[0]
    mu, eta, mu0 = params.mu_ns, params.eta, params.mu0
    vel, B = prim[1:4], prim[5:8]
    out = np.zeros((dim,) + prim.shape)
    # velocity gradient tensor G[i][j] = d v_i / d x_j (zero for j >= dim)
    def dv(i, j):
        return g_vel[j, i] if j < dim else 0.0

    def dB(i, j):
        return g_B[j, i] if j < dim else 0.0

    div_v = sum(dv(k, k) for k in range(dim))
    for d in range(dim):
        if mu > 0:
            tau = [mu * (dv(i, d) + dv(d, i)) for i in range(3)]
            tau[d] = tau[d] - 2.0 / 3.0 * mu * div_v
            for i in range(3):
                out[d, 1 + i] = tau[i]
            out[d, 4] = tau[0] * vel[0] + tau[1] * vel[1] + tau[2] * vel[2] + params.kappa * g_T[d]
        if eta > 0:
            for i in range(3):
                fb = eta / mu0 * (dB(i, d) - dB(d, i))
                out[d, 5 + i] = fb
                out[d, 4] = out[d, 4] + B[i] * fb / mu0
    return out


def viscous_block_flux(u, grad_u, params: PhysParams):
    """Visco-resistive flux from gradients of the conservative state.

    Parameters
    ----------
    u : ndarray, shape (9, ...)
    grad_u : ndarray, shape (dim, 9, ...)
        Spatial derivatives of ``u`` in each direction.
    """
    grad_u = np.asarray(grad_u, dtype=float)
    prim, g_vel, g_T, g_B = _primitive_gradients_from_cons(u, grad_u, params)
    return _viscous_from_prim_gradients(prim, g_vel, g_T, g_B, params)


def viscous_block_flux_entropy(u, grad_v, params: PhysParams, prim=None):
    """Visco-resistive flux from gradients of the entropy variables."""
    prim, g_vel, g_T, g_B = _primitive_gradients_from_entropy(u, grad_v, params, prim)
    return _viscous_from_prim_gradients(prim, g_vel, g_T, g_B, params)


def fast_speed(prim, normal, params: PhysParams):
    """Fast magnetosonic speed in the unit direction ``normal``."""
    n = _pad3(normal)
    rho, p, B = prim[0], prim[4], prim[5:8]
    a2 = params.gamma * p / rho
    b2 = (B[0] ** 2 + B[1] ** 2 + B[2] ** 2) / (params.mu0 * rho)
    bn2 = (B[0] * n[0] + B[1] * n[1] + B[2] * n[2]) ** 2 / (params.mu0 * rho)
    s = a2 + b2
    disc = np.sqrt(np.maximum(s * s - 4.0 * a2 * bn2, 0.0))
    return np.sqrt(0.5 * (s + disc))


def max_wavespeed(u, normal, params: PhysParams, prim=None):
    """``|v.n| + c_f(n)`` for a unit direction ``normal``."""
    if prim is None:
        prim = cons_to_prim(u, params)
    n = _pad3(normal)
    vn = prim[1] * n[0] + prim[2] * n[1] + prim[3] * n[2]
    return np.abs(vn) + fast_speed(prim, normal, params)
