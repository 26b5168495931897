"""Two-point numerical fluxes and entropy diagnostics.

Every flux takes a (possibly non-unit) normal ``n`` of shape ``(dim, ...)``
and returns the flux through a face with that scaled normal. The
entropy conservative (EC) flux is linear in ``n``, so the Cartesian
x-flux is recovered with ``n = (1,)`` or ``(1, 0)``.

The kernels work on an auxiliary per-node array (see :func:`flux_aux`)
so that primitive variables and logarithms are evaluated once per node
rather than once per pair.
"""
from __future__ import annotations

from enum import Enum

import numpy as np

from .numerics import log_mean
from .physics import (
    NVAR,
    PhysParams,
    cons_to_prim,
    entropy_jacobian,
    entropy_jacobian_apply,
    entropy_vars,
    entropy_flux_potential,
    fast_speed,
)

__all__ = [
    "FluxKind",
    "flux_aux",
    "ec_flux",
    "ec_flux_aux",
    "es_rusanov_flux",
    "tvd_es_flux",
    "dissipation_context",
    "diamond_noncons",
    "diamond_aux",
    "volume_noncons",
    "numerical_entropy_flux",
    "entropy_production",
    "wavespeed_aux",
]


class FluxKind(str, Enum):
    EC = "ec"
    ES_RUSANOV = "es_rusanov"
    TVD_ES = "tvd_es"


# rows of the auxiliary array
A_RHO, A_V, A_P, A_B, A_PSI = 0, slice(1, 4), 4, slice(5, 8), 8
A_BETA, A_LNRHO, A_LNBETA, A_V2, A_B2, A_VB = 9, 10, 11, 12, 13, 14
A_VB2 = slice(15, 18)   # v_d |B|^2
A_BPSI = slice(18, 21)  # B_d psi
NAUX = 21


def flux_aux(u, params: PhysParams, prim=None):
    """Per-node quantities consumed by the two-point kernels."""
    if prim is None:
        prim = cons_to_prim(u, params)
    aux = np.empty((NAUX,) + prim.shape[1:])
    aux[:9] = prim
    rho, vel, p, B, psi = prim[0], prim[1:4], prim[4], prim[5:8], prim[8]
    aux[A_BETA] = 0.5 * rho / p
    aux[A_LNRHO] = np.log(rho)
    aux[A_LNBETA] = np.log(aux[A_BETA])
    aux[A_V2] = vel[0] ** 2 + vel[1] ** 2 + vel[2] ** 2
    b2 = B[0] ** 2 + B[1] ** 2 + B[2] ** 2
    aux[A_B2] = b2
    aux[A_VB] = vel[0] * B[0] + vel[1] * B[1] + vel[2] * B[2]
    aux[A_VB2] = vel * b2
    aux[A_BPSI] = B * psi
    return aux


def _ncomp(normal):
    normal = np.asarray(normal, dtype=float) if not isinstance(normal, (list, tuple)) else normal
    comps = [normal[d] for d in range(len(normal))]
    return comps


def _check_mu0(params):
    if params.mu0 != 1.0:
        raise ValueError("the entropy conservative flux is implemented for mu0 = 1 only")


def ec_flux_aux(aL, aR, normal, params: PhysParams):
    """EC flux from auxiliary arrays; ``normal`` is a sequence of dim arrays."""
    n = _ncomp(normal)
    dim = len(n)
    g, ch = params.gamma, params.c_h
    rho_ln = log_mean(aL[A_RHO], aR[A_RHO], aL[A_LNRHO], aR[A_LNRHO])
    beta_ln = log_mean(aL[A_BETA], aR[A_BETA], aL[A_LNBETA], aR[A_LNBETA])
    v = [0.5 * (aL[1 + i] + aR[1 + i]) for i in range(3)]
    B = [0.5 * (aL[5 + i] + aR[5 + i]) for i in range(3)]
    psi = 0.5 * (aL[A_PSI] + aR[A_PSI])
    pbar = 0.5 * (aL[A_RHO] + aR[A_RHO]) / (aL[A_BETA] + aR[A_BETA])
    b2avg = 0.5 * (aL[A_B2] + aR[A_B2])
    v2avg = 0.5 * (aL[A_V2] + aR[A_V2])
    vbavg = 0.5 * (aL[A_VB] + aR[A_VB])
    vn = v[0] * n[0]
    bn = B[0] * n[0]
    vb2n = 0.5 * (aL[15] + aR[15]) * n[0]
    bpsin = 0.5 * (aL[18] + aR[18]) * n[0]
    for d in range(1, dim):
        vn = vn + v[d] * n[d]
        bn = bn + B[d] * n[d]
        vb2n = vb2n + 0.5 * (aL[15 + d] + aR[15 + d]) * n[d]
        bpsin = bpsin + 0.5 * (aL[18 + d] + aR[18 + d]) * n[d]
    ptot = pbar + 0.5 * b2avg
    f = np.empty((NVAR,) + np.broadcast_shapes(np.shape(rho_ln), np.shape(vn)))
    f0 = rho_ln * vn
    f[0] = f0
    for i in range(3):
        fi = f0 * v[i] - B[i] * bn
        fb = vn * B[i] - v[i] * bn
        if i < dim:
            fi = fi + ptot * n[i]
            fb = fb + ch * psi * n[i]
        f[1 + i] = fi
        f[5 + i] = fb
    f[8] = ch * bn
    f[4] = (f0 * (0.5 / ((g - 1.0) * beta_ln) - 0.5 * v2avg)
            + f[1] * v[0] + f[2] * v[1] + f[3] * v[2]
            + f[5] * B[0] + f[6] * B[1] + f[7] * B[2] + f[8] * psi
            - 0.5 * vb2n + vbavg * bn - ch * bpsin)
    return f


def _default_normal(u):
    return (np.ones(np.shape(u)[1:]),)


def ec_flux(uL, uR, params: PhysParams, normal=None):
    """Entropy conservative two-point flux.

    Parameters
    ----------
    uL, uR : ndarray, shape (9, ...)
        Conservative states.
    normal : array_like, shape (dim, ...), optional
        Scaled face normal. Defaults to the 1D x-direction.
    """
    _check_mu0(params)
    if normal is None:
        normal = _default_normal(uL)
    return ec_flux_aux(flux_aux(uL, params), flux_aux(uR, params), normal, params)


def wavespeed_aux(a, nhat, params: PhysParams):
    """``|v.n| + c_f`` from an auxiliary array for a unit normal sequence."""
    vn = a[1] * nhat[0]
    for d in range(1, len(nhat)):
        vn = vn + a[1 + d] * nhat[d]
    return np.abs(vn) + fast_speed(a, nhat, params)


def _normal_norm(n):
    s = n[0] ** 2
    for d in range(1, len(n)):
        s = s + n[d] ** 2
    nn = np.sqrt(s)
    return nn, [c / nn for c in n]


def _interface_lambda(aL, aR, n, params):
    nn, nhat = _normal_norm(n)
    lam = np.maximum(wavespeed_aux(aL, nhat, params), wavespeed_aux(aR, nhat, params))
    return lam, nn


def _mean_prim(aL, aR):
    return 0.5 * (aL[:9] + aR[:9])


def _entropy_vars_aux(a, params):
    g = params.gamma
    beta = a[A_BETA]
    s = np.log(a[A_P]) - g * a[A_LNRHO]
    v = np.empty((NVAR,) + a.shape[1:])
    v[0] = (g - s) / (g - 1.0) - beta * a[A_V2]
    v[1:4] = 2.0 * beta * a[1:4]
    v[4] = -2.0 * beta
    v[5:9] = 2.0 * beta * a[5:9] / params.mu0
    return v


def es_rusanov_aux(aL, aR, vL, vR, normal, params: PhysParams):
    """ES Rusanov flux on auxiliary arrays with given entropy variables."""
    n = _ncomp(normal)
    f = ec_flux_aux(aL, aR, n, params)
    lam, nn = _interface_lambda(aL, aR, n, params)
    diss = entropy_jacobian_apply(_mean_prim(aL, aR), vR - vL, params)
    return f - 0.5 * lam * nn * diss


def es_rusanov_flux(uL, uR, params: PhysParams, normal=None):
    """Entropy stable Rusanov flux ``f_ec - 1/2 lambda |n| Hbar [[v]]``."""
    _check_mu0(params)
    if normal is None:
        normal = _default_normal(uL)
    aL, aR = flux_aux(uL, params), flux_aux(uR, params)
    return es_rusanov_aux(aL, aR, _entropy_vars_aux(aL, params), _entropy_vars_aux(aR, params),
                          normal, params)


def dissipation_context(uL, uR, params: PhysParams, normal=None, aux=None):
    """Mean-state entropy Jacobian, its Cholesky factor and the interface speed.

    Returns
    -------
    Hbar : ndarray, shape (..., 9, 9)
    L : ndarray, shape (..., 9, 9)
        Lower triangular with ``Hbar = L L^T``.
    lam : ndarray
        Interface wave speed (unit normal).
    nn : ndarray
        Norm of the scaled normal.
    """
    if aux is None:
        aL, aR = flux_aux(uL, params), flux_aux(uR, params)
    else:
        aL, aR = aux
    if normal is None:
        normal = _default_normal(aL)
    n = _ncomp(normal)
    lam, nn = _interface_lambda(aL, aR, n, params)
    H = entropy_jacobian(None, params, prim=_mean_prim(aL, aR))
    H = np.moveaxis(np.moveaxis(H, 0, -1), 0, -1)  # (..., 9, 9)
    L = np.linalg.cholesky(H)
    return H, L, lam, nn


def tvd_es_flux(uL, uR, recon_jump_w, params: PhysParams, normal=None, context=None):
    """TVD-ES flux ``f_ec - 1/2 lambda |n| L [[w]]^R``.

    ``recon_jump_w`` holds the reconstructed jump of the scaled variables
    ``w = L^T v`` with shape ``(9, ...)``.
    """
    _check_mu0(params)
    aL, aR = flux_aux(uL, params), flux_aux(uR, params)
    if normal is None:
        normal = _default_normal(uL)
    if context is None:
        context = dissipation_context(None, None, params, normal, aux=(aL, aR))
    _, L, lam, nn = context
    f = ec_flux_aux(aL, aR, normal, params)
    jw = np.moveaxis(np.asarray(recon_jump_w, dtype=float), 0, -1)
    diss = np.moveaxis(np.einsum("...ij,...j->...i", L, jw), -1, 0)
    return f - 0.5 * lam * nn * diss


def diamond_aux(aj, ak, mj, mm, params: PhysParams):
    """Surface non-conservative term Phi<>(j,k) from auxiliary arrays.

    ``mj`` is the scaled normal evaluated at node j and ``mm`` the mean
    normal of the pair (both sequences of dim arrays).
    """
    dim = len(mj)
    mu0 = params.mu0
    bmj = aj[5] * mj[0]
    bkm = ak[5] * mm[0]
    vmj = aj[1] * mj[0]
    for d in range(1, dim):
        bmj = bmj + aj[5 + d] * mj[d]
        bkm = bkm + ak[5 + d] * mm[d]
        vmj = vmj + aj[1 + d] * mj[d]
    c = 0.5 * (bmj + bkm)
    psi = 0.5 * (aj[A_PSI] + ak[A_PSI])
    out = np.zeros((NVAR,) + np.broadcast_shapes(np.shape(c), np.shape(aj[0])))
    out[1:4] = c * aj[5:8] / mu0
    out[4] = (c * aj[A_VB] + vmj * aj[A_PSI] * psi) / mu0
    out[5:8] = c * aj[1:4]
    out[8] = vmj * psi / mu0
    return out


def volume_noncons_aux(aj, ak, mj, mm, params: PhysParams):
    """Volume non-conservative term Phi*(j,k) = 2 Phi<>(j,k) - Phi_j.m_j."""
    dim = len(mj)
    mu0 = params.mu0
    bkm = ak[5] * mm[0]
    vmj = aj[1] * mj[0]
    for d in range(1, dim):
        bkm = bkm + ak[5 + d] * mm[d]
        vmj = vmj + aj[1 + d] * mj[d]
    psi = ak[A_PSI]
    out = np.zeros((NVAR,) + np.broadcast_shapes(np.shape(bkm), np.shape(aj[0])))
    out[1:4] = bkm * aj[5:8] / mu0
    out[4] = (bkm * aj[A_VB] + vmj * aj[A_PSI] * psi) / mu0
    out[5:8] = bkm * aj[1:4]
    out[8] = vmj * psi / mu0
    return out


def _as_normal(m, like):
    if m is None:
        return _default_normal(like)
    return _ncomp(m)


def diamond_noncons(u_j, u_k, params: PhysParams, metric_j=None, mean_metric=None):
    """Surface non-conservative term ``Phi<>(j,k)``.

    ``1/2 [(B.m)_j + B_k.mbar] phi^MHD_j + (phi^GLM.m)_j <psi>``.
    """
    mj = _as_normal(metric_j, u_j)
    mm = mj if mean_metric is None else _ncomp(mean_metric)
    return diamond_aux(flux_aux(u_j, params), flux_aux(u_k, params), mj, mm, params)


def volume_noncons(u_j, u_k, params: PhysParams, metric_j=None, mean_metric=None):
    """Volume non-conservative term ``Phi*(j,k)``.

    ``phi^MHD_j (B_k.mbar) + (phi^GLM.m)_j psi_k``.
    """
    mj = _as_normal(metric_j, u_j)
    mm = mj if mean_metric is None else _ncomp(mean_metric)
    return volume_noncons_aux(flux_aux(u_j, params), flux_aux(u_k, params), mj, mm, params)


def _psi_dot(u, params, m):
    psi = entropy_flux_potential(u, params, dim=len(m))
    return sum(m[d] * psi[d] for d in range(len(m)))


def numerical_entropy_flux(u_j, u_k, flux, dia_jk, dia_kj, params: PhysParams, mean_metric=None):
    """Numerical entropy flux from node j to node k.

    ``<v>.f + 1/2 v_j.Phi<>(j,k) + 1/2 v_k.Phi<>(k,j) - mbar.<Psi>``.
    """
    mm = _as_normal(mean_metric, u_j)
    vj, vk = entropy_vars(u_j, params), entropy_vars(u_k, params)
    return (np.sum(0.5 * (vj + vk) * flux, axis=0)
            + 0.5 * np.sum(vj * dia_jk, axis=0) + 0.5 * np.sum(vk * dia_kj, axis=0)
            - 0.5 * (_psi_dot(u_j, params, mm) + _psi_dot(u_k, params, mm)))


def entropy_production(u_j, u_k, flux, dia_jk, dia_kj, params: PhysParams, mean_metric=None):
    """Interface entropy production.

    ``[[v]].f + v_k.Phi<>(k,j) - v_j.Phi<>(j,k) - mbar.[[Psi]]`` with
    ``[[a]] = a_k - a_j``.
    """
    mm = _as_normal(mean_metric, u_j)
    vj, vk = entropy_vars(u_j, params), entropy_vars(u_k, params)
    return (np.sum((vk - vj) * flux, axis=0)
            + np.sum(vk * dia_kj, axis=0) - np.sum(vj * dia_jk, axis=0)
            - (_psi_dot(u_k, params, mm) - _psi_dot(u_j, params, mm)))
