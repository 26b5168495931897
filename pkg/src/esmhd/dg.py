"""Split-form DGSEM kernels: advective volume and surface terms, BR1 viscous terms.

The kernels work direction by direction on "direction-last" views of the
nodal arrays (see :func:`esmhd.mesh.to_dir_last`): a state has shape
``(9, K, [n_other,] n)`` with the active reference direction last. The
residual convention is ``J w u_t = F`` per node, where ``w`` is the tensor
quadrature weight.
"""
from __future__ import annotations

import numpy as np

from .fluxes import (
    FluxKind,
    diamond_aux,
    ec_flux_aux,
    es_rusanov_aux,
    volume_noncons_aux,
)
from .mesh import Mesh, from_dir_last, to_dir_last
from .physics import PhysParams, viscous_block_flux_entropy

__all__ = [
    "pair_metrics",
    "dg_volume_dir",
    "surface_flux_dir",
    "scatter_surface_dir",
    "br1_gradients",
    "dg_viscous_rhs",
]


def pair_metrics(metric_dl):
    """Arithmetic mean metric for every node pair along the last axis."""
    return [0.5 * (m[..., :, None] + m[..., None, :]) for m in metric_dl]


def dg_volume_dir(aux_dl, v_dl, metric_dl, mpair, Q, w_other, params: PhysParams,
                  volume_kind: str = FluxKind.EC):
    """Volume part of the split-form DG residual for one direction.

    ``-sum_m Q_im (2 f*_(i,m) + Phi*_(i,m)) + [(f + Phi).Ja]`` boundary
    corrections at the first and last node, times the quadrature weight
    of the other direction.

    Parameters
    ----------
    aux_dl : ndarray, shape (NAUX, K, [n,] n)
    v_dl : ndarray, shape (9, K, [n,] n)
        Entropy variables (only used for an ES volume flux).
    metric_dl : list of ndarray
        Node metric components ``Ja^a_d`` in direction-last layout.
    mpair : list of ndarray
        Pair-averaged metrics from :func:`pair_metrics`.
    """
    aL = aux_dl[..., :, None]
    aR = aux_dl[..., None, :]
    if volume_kind == FluxKind.EC:
        fstar = ec_flux_aux(aL, aR, mpair, params)
    elif volume_kind == FluxKind.ES_RUSANOV:
        fstar = es_rusanov_aux(aL, aR, v_dl[..., :, None], v_dl[..., None, :], mpair, params)
    else:
        raise ValueError(f"unsupported volume flux {volume_kind!r}")
    mj = [m[..., :, None] for m in metric_dl]
    phis = volume_noncons_aux(aL, aR, mj, mpair, params)
    fstar *= 2.0
    fstar += phis
    out = -np.einsum("im,...im->...i", Q, fstar)
    # consistency: the pair (i, i) gives f_i.Ja_i + Phi_i.Ja_i
    n = fstar.shape[-1]
    diag_first = 0.5 * (fstar[..., 0, 0] + phis[..., 0, 0])
    diag_last = 0.5 * (fstar[..., n - 1, n - 1] + phis[..., n - 1, n - 1])
    out[..., 0] -= diag_first
    out[..., -1] += diag_last
    out *= w_other
    return out


def surface_flux_dir(auxL, auxR, vL, vR, normal, params: PhysParams, surface_kind: str):
    """Face fluxes for one direction.

    Returns ``(G_left, G_right)`` where ``G_left = fhat + Phi<>(L,R)`` enters
    the left element's last node with a minus sign and
    ``G_right = fhat + Phi<>(R,L)`` enters the right element's first node
    with a plus sign.
    """
    if surface_kind == FluxKind.EC:
        fhat = ec_flux_aux(auxL, auxR, normal, params)
    elif surface_kind == FluxKind.ES_RUSANOV:
        fhat = es_rusanov_aux(auxL, auxR, vL, vR, normal, params)
    else:
        raise ValueError(f"unsupported surface flux {surface_kind!r}")
    dLR = diamond_aux(auxL, auxR, normal, normal, params)
    dRL = diamond_aux(auxR, auxL, normal, normal, params)
    return fhat + dLR, fhat + dRL


def scatter_surface_dir(G_left, G_right, mesh: Mesh, a: int, w_other, shape_dl):
    """Place face contributions on the first/last nodes of every element."""
    out = np.zeros(shape_dl)
    out[:, :, ..., -1] = -G_left[:, mesh.elem_plus_face[a]]
    out[:, :, ..., 0] = G_right[:, mesh.elem_minus_face[a]]
    out *= w_other
    return out


def _gather_faces(arr_dl, mesh: Mesh, a: int, ext=None):
    """Left/right face values of a direction-last nodal array.

    Boundary sides are filled from ``ext`` (same shape as a face array) or
    mirrored from the interior when ``ext`` is None.
    """
    fl, fr = mesh.face_left[a], mesh.face_right[a]
    left = np.take(arr_dl[..., -1], np.maximum(fl, 0), axis=1)
    right = np.take(arr_dl[..., 0], np.maximum(fr, 0), axis=1)
    if np.any(fl < 0) or np.any(fr < 0):
        bl = fl < 0
        br = fr < 0
        if ext is None:
            left[:, bl] = right[:, bl]
            right[:, br] = left[:, br]
        else:
            left[:, bl] = ext[:, bl]
            right[:, br] = ext[:, br]
    return left, right


def _nonzero(arr):
    return bool(np.any(arr != 0.0))


def br1_gradients(v, mesh: Mesh, v_ext=None):
    """BR1 gradients of the entropy variables.

    Parameters
    ----------
    v : ndarray, shape (9, K, n[, n])
    v_ext : list of ndarray or None
        Exterior entropy variables at boundary faces per direction.

    Returns
    -------
    g : ndarray, shape (dim, 9, K, n[, n])
        Physical-space gradients.
    """
    dim, ops = mesh.dim, mesh.ops
    D, w = ops.D, ops.weights
    J = mesh.J
    g = np.zeros((dim,) + v.shape)
    for a in range(dim):
        vd = to_dir_last(v, a, dim)
        ref = (vd @ D.T)
        vl, vr = _gather_faces(vd, mesh, a, None if v_ext is None else v_ext[a])
        vhat = 0.5 * (vl + vr)
        ref[..., -1] += (vhat[:, mesh.elem_plus_face[a]] - vd[..., -1]) / w[-1]
        ref[..., 0] -= (vhat[:, mesh.elem_minus_face[a]] - vd[..., 0]) / w[0]
        ref = from_dir_last(ref, a, dim)
        for d in range(dim):
            m = mesh.metrics[a][d]
            if _nonzero(m):  # Cartesian meshes have zero cross metrics
                g[d] += m * ref
    g /= J
    return g


def dg_viscous_rhs(u, v, mesh: Mesh, params: PhysParams, prim=None, ext=None):
    """Strong-form DG residual of the visco-resistive terms.

    Returns ``F_nu`` such that the node update receives ``-F_nu``.
    """
    dim, ops = mesh.dim, mesh.ops
    if not params.viscous:
        return np.zeros_like(u)
    v_ext = None if ext is None else ext.get("v")
    g = br1_gradients(v, mesh, v_ext)
    fv = viscous_block_flux_entropy(u, g, params, prim)  # (dim, 9, ...)
    Q, w = ops.Q, ops.weights
    out = np.zeros_like(u)
    for a in range(dim):
        active = [d for d in range(dim) if _nonzero(mesh.metrics[a][d])]
        ft = sum(mesh.metrics[a][d] * fv[d] for d in active)
        ftd = to_dir_last(ft, a, dim)
        # face value: average of the one-sided physical fluxes dotted with the face normal
        nf = mesh.face_normals(a)
        fhat = 0.0
        for d in range(dim):
            if not _nonzero(nf[d]):
                continue
            fdd = to_dir_last(fv[d], a, dim)
            fl, fr = _gather_faces(fdd, mesh, a, None if ext is None else ext["fv"][a][d])
            fhat = fhat + 0.5 * (fl + fr) * nf[d]
        res = -(ftd @ Q.T)
        res[..., -1] -= fhat[:, mesh.elem_plus_face[a]] - ftd[..., -1]
        res[..., 0] += fhat[:, mesh.elem_minus_face[a]] - ftd[..., 0]
        if dim == 2:
            res *= w[:, None]
        out += from_dir_last(res, a, dim)
    return out
