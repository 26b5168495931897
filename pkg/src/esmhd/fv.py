"""Native LGL subcell finite volume kernels and the DG/FV blend.

Interior subcell interfaces of an element use the selected FV flux
(EC, ES Rusanov or TVD-ES); element faces are handled by the shared
surface terms in :mod:`esmhd.dg`, so both residuals share the same
boundary rows.
"""
from __future__ import annotations

from enum import Enum

import numpy as np

from .fluxes import (
    FluxKind,
    _interface_lambda,
    _mean_prim,
    diamond_aux,
    ec_flux_aux,
    es_rusanov_aux,
)
from .numerics import SpectralOps, minmod
from .physics import PhysParams, entropy_jacobian

__all__ = [
    "ReconstructionKind",
    "fv_interior_dir",
    "reconstruct_scaled_jumps",
    "cholesky_context",
    "blend_rhs",
]


class ReconstructionKind(str, Enum):
    NONE = "none"
    TVD_NO_BOUNDARY = "tvd_no_boundary"
    TVD_CENTRAL_BOUNDARY = "tvd_central_boundary"
    TVD_NEIGHBOR_BOUNDARY = "tvd_neighbor_boundary"


def cholesky_context(aL, aR, params: PhysParams):
    """Cholesky factor of the mean-state entropy Jacobian, shape (..., 9, 9)."""
    H = entropy_jacobian(None, params, prim=_mean_prim(aL, aR))
    H = np.moveaxis(np.moveaxis(H, 0, -1), 0, -1)
    return np.linalg.cholesky(H)


def _lt_apply(L, v):
    """``L^T v`` with L of shape (..., 9, 9) and v of shape (9, ...)."""
    return np.moveaxis(np.einsum("...ji,...j->...i", L, np.moveaxis(v, 0, -1)), -1, 0)


def _l_apply(L, w):
    return np.moveaxis(np.einsum("...ij,...j->...i", L, np.moveaxis(w, 0, -1)), -1, 0)


def reconstruct_scaled_jumps(v_pad, L, ops: SpectralOps, recon: str):
    """Reconstructed jumps of scaled entropy variables at interior interfaces.

    Parameters
    ----------
    v_pad : ndarray, shape (9, ..., N + 3)
        Entropy variables along a line with one ghost value on each side
        (index 0 is the left neighbour's last node, index N + 2 the right
        neighbour's first node). Ghosts are only read by the neighbour
        boundary variant.
    L : ndarray, shape (..., N, 9, 9)
        Per-interface Cholesky factors.
    recon : ReconstructionKind

    Returns
    -------
    jump_r : ndarray, shape (9, ..., N)
        Reconstructed jumps ``[[w]]^R`` at interfaces ``(i, i+1)``.
    jump : ndarray, shape (9, ..., N)
        Unreconstructed jumps ``L^T (v_{i+1} - v_i)``.
    """
    recon = ReconstructionKind(recon)
    N = ops.N
    xi = ops.nodes
    xh = ops.subcell_interfaces  # xi_{i+1/2}, i = 0..N-1
    # stencil values w_s = L^T v_s for s = i-1, i, i+1, i+2 (padded indices i..i+3)
    w = [_lt_apply(L, v_pad[..., s:s + N]) for s in range(4)]
    jump = w[2] - w[1]
    if recon == ReconstructionKind.NONE:
        return jump.copy(), jump
    i = np.arange(N)
    dxc = xi[i + 1] - xi[i]  # spacing across the interface
    # left node i: slopes (w_i - w_{i-1}) / (xi_i - xi_{i-1}) need i >= 1
    xm = np.concatenate([[np.nan], xi[:-1]])  # xi_{i-1}
    with np.errstate(invalid="ignore", divide="ignore"):
        dl_left = (w[1] - w[0]) / (xi[i] - xm[i])
        xp2 = np.concatenate([xi, [np.nan]])[i + 2]
        dr_right = (w[3] - w[2]) / (xp2 - xi[i + 1])
    dc = jump / dxc
    theta_l = minmod(dc, dl_left)
    theta_r = minmod(dc, dr_right)
    # element boundary subcells
    if recon == ReconstructionKind.TVD_NO_BOUNDARY:
        theta_l[..., 0] = 0.0
        theta_r[..., -1] = 0.0
    elif recon == ReconstructionKind.TVD_CENTRAL_BOUNDARY:
        # one-sided slope from the element interior (w_N - w_{N-1} at the last node)
        theta_l[..., 0] = dc[..., 0]
        theta_r[..., -1] = dc[..., -1]
    else:
        # neighbour slope at node 0 uses (w_1 - w_N^left) / (xi_1 - xi_0) as printed
        g0 = (w[2][..., 0] - w[0][..., 0]) / (xi[1] - xi[0])
        theta_l[..., 0] = minmod(dc[..., 0], g0)
        gN = (w[3][..., -1] - w[1][..., -1]) / (xi[N] - xi[N - 1])
        theta_r[..., -1] = minmod(dc[..., -1], gN)
    jump_r = (w[2] + (xh - xi[i + 1]) * theta_r) - (w[1] + (xh - xi[i]) * theta_l)
    return jump_r, jump


def fv_interior_dir(aux_dl, v_pad, subnormals, w_other, params: PhysParams, ops: SpectralOps,
                    fv_kind: str = FluxKind.TVD_ES, recon: str = ReconstructionKind.TVD_NO_BOUNDARY):
    """Interior subcell flux differences for one direction.

    Parameters
    ----------
    aux_dl : ndarray, shape (NAUX, ..., n)
    v_pad : ndarray, shape (9, ..., n + 2)
        Entropy variables with ghost nodes (see :func:`reconstruct_scaled_jumps`).
    subnormals : ndarray, shape (dim, ..., N + 2)
        Subcell interface normals; entries ``1..N`` are interior.
    """
    fv_kind = FluxKind(fv_kind)
    aL = aux_dl[..., :-1]
    aR = aux_dl[..., 1:]
    nrm = [subnormals[d][..., 1:-1] for d in range(subnormals.shape[0])]
    v = v_pad[..., 1:-1]
    if fv_kind == FluxKind.EC:
        fhat = ec_flux_aux(aL, aR, nrm, params)
    elif fv_kind == FluxKind.ES_RUSANOV or (fv_kind == FluxKind.TVD_ES and recon == ReconstructionKind.NONE):
        fhat = es_rusanov_aux(aL, aR, v[..., :-1], v[..., 1:], nrm, params)
    else:
        fhat = ec_flux_aux(aL, aR, nrm, params)
        lam, nn = _interface_lambda(aL, aR, nrm, params)
        L = cholesky_context(aL, aR, params)
        jump_r, _ = reconstruct_scaled_jumps(v_pad, L, ops, recon)
        fhat -= 0.5 * lam * nn * _l_apply(L, jump_r)
    d_lr = diamond_aux(aL, aR, nrm, nrm, params)
    d_rl = diamond_aux(aR, aL, nrm, nrm, params)
    out = np.zeros((fhat.shape[0],) + aux_dl.shape[1:])
    out[..., :-1] -= fhat + d_lr
    out[..., 1:] += fhat + d_rl
    out *= w_other
    return out


def blend_rhs(F_dg, F_fv, F_visc, alpha):
    """``(1 - alpha) F_dg + alpha F_fv - F_visc`` with per-element ``alpha``."""
    a = np.asarray(alpha, dtype=float).reshape((1, -1) + (1,) * (F_dg.ndim - 2))
    return (1.0 - a) * F_dg + a * F_fv - F_visc
