"""Structured 1D and 2D curvilinear meshes.

Nodal arrays use the layout ``(..., K, n)`` in 1D and ``(..., K, n, n)``
in 2D, where the last two axes are the reference directions xi and eta.
Elements of a 2D ``nx x ny`` grid are numbered ``k = ix * ny + iy``.

For direction ``a`` every face has a left element (whose +a side touches
the face) and a right element (whose -a side touches it); index ``-1``
marks a physical boundary. The face normal is the left element's
contravariant metric at its last node, so the two sides see identical
normals and the assembly is watertight by construction.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .numerics import SpectralOps, build_ops, lgl_nodes_weights

__all__ = [
    "Mesh",
    "build_interval",
    "build_cartesian",
    "build_mapped",
    "build_warped",
    "warped_mapping",
    "compute_subcell_normals",
    "metric_identity_residual",
    "integrate",
    "l2_norm",
    "to_dir_last",
    "from_dir_last",
]


def to_dir_last(arr, a: int, dim: int):
    """Move reference direction ``a`` of a nodal array to the last axis."""
    if dim == 1:
        return arr
    ax = arr.ndim - dim + a
    return np.moveaxis(arr, ax, -1)


def from_dir_last(arr, a: int, dim: int):
    """Inverse of :func:`to_dir_last`."""
    if dim == 1:
        return arr
    ax = arr.ndim - dim + a
    return np.moveaxis(arr, -1, ax)


@dataclass
class Mesh:
    """Geometry and connectivity of a structured mesh.

    Attributes
    ----------
    dim : int
    ops : SpectralOps
    shape : tuple
        Element counts per direction.
    x : ndarray, shape (dim, K, n[, n])
        Node coordinates.
    J : ndarray, shape (K, n[, n])
        Jacobian determinant.
    metrics : list of ndarray
        ``metrics[a]`` is the contravariant metric ``J a^a`` with shape
        ``(dim, K, n[, n])``.
    subcell : list of ndarray
        ``subcell[a]`` holds the subcell interface normals in
        direction-last layout, shape ``(dim, K, [n,] N + 2)``.
    face_left, face_right : list of ndarray
        Per direction, element indices on each side of every face.
    elem_plus_face, elem_minus_face : list of ndarray
        Per direction, the face index at each element's +/- side.
    periodic : tuple of bool
    extent : tuple
        Bounding box ``((x0, x1), ...)`` of the domain.
    """

    dim: int
    ops: SpectralOps
    shape: tuple
    x: np.ndarray
    J: np.ndarray
    metrics: list
    face_left: list
    face_right: list
    elem_plus_face: list
    elem_minus_face: list
    periodic: tuple
    extent: tuple
    n_geo: int
    subcell: list = field(default_factory=list)
    element_size: np.ndarray | None = None

    @property
    def K(self) -> int:
        return int(np.prod(self.shape))

    @property
    def N(self) -> int:
        return self.ops.N

    @property
    def measure(self) -> float:
        return integrate(np.ones(self.J.shape), self)

    def neighbors(self):
        """Face neighbours, shape (K, 2 * dim), ``-1`` at boundaries."""
        out = np.full((self.K, 2 * self.dim), -1, dtype=np.int64)
        for a in range(self.dim):
            out[:, 2 * a] = self.face_left[a][self.elem_minus_face[a]]
            out[:, 2 * a + 1] = self.face_right[a][self.elem_plus_face[a]]
        return out

    def face_coordinates(self, a: int):
        """Coordinates at the nodes of every face in direction ``a``.

        Shape ``(dim, nf[, n])``.
        """
        xd = to_dir_last(self.x, a, self.dim)
        left, right = self.face_left[a], self.face_right[a]
        k = np.where(left >= 0, left, right)
        node = np.where(left >= 0, -1, 0)
        return _face_gather(xd, k, node)

    def face_normals(self, a: int):
        """Scaled face normals (left element's metric), shape ``(dim, nf[, n])``."""
        md = to_dir_last(self.metrics[a], a, self.dim)
        left, right = self.face_left[a], self.face_right[a]
        k = np.where(left >= 0, left, right)
        node = np.where(left >= 0, -1, 0)
        return _face_gather(md, k, node)


def _face_gather(arr_dl, k, node):
    """Gather ``arr_dl[:, k[f], ..., node[f]]`` for every face ``f``."""
    first = np.take(arr_dl[..., 0], k, axis=1)
    last = np.take(arr_dl[..., -1], k, axis=1)
    sel = (node == -1).reshape((1, -1) + (1,) * (first.ndim - 2))
    return np.where(sel, last, first)


def _connectivity_1d(n: int, periodic: bool):
    """Face lists along one grid line of ``n`` elements."""
    if periodic:
        left = np.arange(n)
        right = (np.arange(n) + 1) % n
        plus = np.arange(n)
        minus = (np.arange(n) - 1) % n
    else:
        left = np.arange(-1, n)
        right = np.arange(0, n + 1)
        right[-1] = -1
        plus = np.arange(1, n + 1)
        minus = np.arange(0, n)
    return left, right, plus, minus


def _build_connectivity(shape, periodic):
    dim = len(shape)
    face_left, face_right, plus_face, minus_face = [], [], [], []
    if dim == 1:
        l, r, p, m = _connectivity_1d(shape[0], periodic[0])
        return [l], [r], [p], [m]
    nx, ny = shape
    ix, iy = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    for a in range(2):
        nline = shape[a]
        l, r, p, m = _connectivity_1d(nline, periodic[a])
        nf_line = len(l)
        other = shape[1 - a]
        # faces numbered line-major: f = o * nf_line + i
        def elem(i_along, o):
            if a == 0:
                return i_along * ny + o
            return o * ny + i_along
        fl = np.empty(other * nf_line, dtype=np.int64)
        fr = np.empty(other * nf_line, dtype=np.int64)
        for o in range(other):
            sl = slice(o * nf_line, (o + 1) * nf_line)
            fl[sl] = np.where(l >= 0, elem(l, o), -1)
            fr[sl] = np.where(r >= 0, elem(r, o), -1)
        along = ix if a == 0 else iy
        oth = iy if a == 0 else ix
        pf = (oth * nf_line + p[along]).ravel()
        mf = (oth * nf_line + m[along]).ravel()
        face_left.append(fl)
        face_right.append(fr)
        plus_face.append(pf.astype(np.int64))
        minus_face.append(mf.astype(np.int64))
    return face_left, face_right, plus_face, minus_face


def compute_subcell_normals(metrics, ops: SpectralOps, dim: int):
    """Subcell interface normals for each direction.

    ``n_(i,i+1) = Ja_0 + sum_{l<=i} sum_m Q_lm Ja_m`` for ``i = -1..N``,
    returned in direction-last layout with ``N + 2`` entries.
    """
    out = []
    for a in range(dim):
        m = to_dir_last(metrics[a], a, dim)
        qm = np.einsum("lm,...m->...l", ops.Q, m)
        csum = np.cumsum(qm, axis=-1)
        first = m[..., :1]
        sub = np.concatenate([first, first + csum], axis=-1)
        # the last entry equals the right-face metric up to round-off; make it exact
        sub[..., -1] = m[..., -1]
        out.append(sub)
    return out


def _element_size(x, ops, dim):
    """Minimum physical edge length per element by LGL line quadrature."""
    w = ops.weights
    if dim == 1:
        return x[0, :, -1] - x[0, :, 0]
    D = ops.D
    lengths = []
    # edges along xi at eta = -1, +1 and along eta at xi = -1, +1
    dxi = np.einsum("im,dkmj->dkij", D, x)
    deta = np.einsum("jm,dkim->dkij", D, x)
    for j in (0, -1):
        s = np.sqrt(np.sum(dxi[:, :, :, j] ** 2, axis=0))
        lengths.append(s @ w)
    for i in (0, -1):
        s = np.sqrt(np.sum(deta[:, :, i, :] ** 2, axis=0))
        lengths.append(s @ w)
    return np.min(np.stack(lengths), axis=0)


def build_interval(nx: int, domain=(0.0, 1.0), N: int = 3, periodic: bool = True) -> Mesh:
    """Uniform 1D mesh of ``nx`` elements."""
    if nx < 1:
        raise ValueError("nx must be >= 1")
    x0, x1 = map(float, domain)
    if not x1 > x0:
        raise ValueError(f"degenerate domain {domain}")
    ops = build_ops(N)
    xe = np.linspace(x0, x1, nx + 1)
    xi = ops.nodes
    x = (xe[:-1, None] * (1 - xi) / 2 + xe[1:, None] * (1 + xi) / 2)[None]
    h = np.diff(xe)
    J = np.repeat((h / 2)[:, None], N + 1, axis=1)
    metrics = [np.ones((1, nx, N + 1))]
    fl, fr, pf, mf = _build_connectivity((nx,), (periodic,))
    mesh = Mesh(1, ops, (nx,), x, J, metrics, fl, fr, pf, mf, (periodic,), ((x0, x1),), N)
    mesh.subcell = compute_subcell_normals(metrics, ops, 1)
    mesh.element_size = _element_size(x, ops, 1)
    return mesh


def build_mapped(nx: int, ny: int, mapping: Callable, logical_domain, N: int,
                 N_geo: int | None = None, periodic=(True, True), extent=None) -> Mesh:
    """2D mesh from a smooth mapping of a logical rectangle.

    The mapping is sampled at the LGL nodes of degree ``N_geo`` and its
    interpolant is evaluated at the solution nodes before metric terms
    are computed with the derivative matrix.

    Parameters
    ----------
    mapping : callable
        ``mapping(X, Y) -> (x, y)`` on logical coordinates.
    logical_domain : ((X0, X1), (Y0, Y1))
    """
    if nx < 1 or ny < 1:
        raise ValueError("element counts must be >= 1")
    (X0, X1), (Y0, Y1) = logical_domain
    if not (X1 > X0 and Y1 > Y0):
        raise ValueError(f"degenerate domain {logical_domain}")
    if N_geo is None:
        N_geo = N
    if N_geo > N or N_geo < 1:
        raise ValueError(f"need 1 <= N_geo <= N, got N_geo={N_geo}, N={N}")
    ops = build_ops(N)
    xg, _ = lgl_nodes_weights(N_geo)
    # interpolation matrix from geometry nodes to solution nodes
    Igeo = _interp_matrix(xg, ops.nodes)
    xe = np.linspace(X0, X1, nx + 1)
    ye = np.linspace(Y0, Y1, ny + 1)
    Xg = xe[:-1, None] * (1 - xg) / 2 + xe[1:, None] * (1 + xg) / 2   # (nx, ng)
    Yg = ye[:-1, None] * (1 - xg) / 2 + ye[1:, None] * (1 + xg) / 2   # (ny, ng)
    XX = np.broadcast_to(Xg[:, None, :, None], (nx, ny, len(xg), len(xg)))
    YY = np.broadcast_to(Yg[None, :, None, :], (nx, ny, len(xg), len(xg)))
    mx, my = mapping(XX, YY)
    geo = np.stack([np.broadcast_to(mx, XX.shape), np.broadcast_to(my, XX.shape)])
    geo = geo.reshape(2, nx * ny, len(xg), len(xg))
    x = np.einsum("ip,jq,dkpq->dkij", Igeo, Igeo, geo)
    D = ops.D
    dxi = np.einsum("im,dkmj->dkij", D, x)
    deta = np.einsum("jm,dkim->dkij", D, x)
    J = dxi[0] * deta[1] - deta[0] * dxi[1]
    if np.any(J <= 0):
        raise ValueError(f"mesh fold-over: min J = {J.min():.3e}")
    metrics = [np.stack([deta[1], -deta[0]]), np.stack([-dxi[1], dxi[0]])]
    fl, fr, pf, mf = _build_connectivity((nx, ny), periodic)
    if extent is None:
        extent = ((float(x[0].min()), float(x[0].max())), (float(x[1].min()), float(x[1].max())))
    mesh = Mesh(2, ops, (nx, ny), x, J, metrics, fl, fr, pf, mf, tuple(periodic), extent, N_geo)
    mesh.subcell = compute_subcell_normals(metrics, ops, 2)
    mesh.element_size = _element_size(x, ops, 2)
    return mesh


def _interp_matrix(src, dst):
    """Lagrange interpolation matrix from nodes ``src`` to points ``dst``."""
    src = np.asarray(src)
    dst = np.asarray(dst)
    n = len(src)
    M = np.ones((len(dst), n))
    for j in range(n):
        for m in range(n):
            if m != j:
                M[:, j] *= (dst - src[m]) / (src[j] - src[m])
    return M


def build_cartesian(nx: int, ny: int, domain=((0.0, 1.0), (0.0, 1.0)), periodic=(True, True),
                    N: int = 3, N_geo: int | None = None) -> Mesh:
    """Uniform Cartesian 2D mesh."""
    (x0, x1), (y0, y1) = domain
    return build_mapped(nx, ny, lambda X, Y: (X, Y), domain, N, N_geo if N_geo else 1,
                        periodic, extent=((float(x0), float(x1)), (float(y0), float(y1))))


def warped_mapping(L: float = 3.0, amplitude: float | None = None):
    """Two-stage cosine warping of ``[0, L]^2`` (boundaries map to themselves)."""
    A = L / 8.0 if amplitude is None else amplitude

    def mapping(X, Y):
        y = Y + A * np.cos(1.5 * np.pi * (2 * X - L) / L) * np.cos(0.5 * np.pi * (2 * Y - L) / L)
        x = X + A * np.cos(0.5 * np.pi * (2 * X - L) / L) * np.cos(2 * np.pi * (2 * y - L) / L)
        return x, y

    return mapping


def build_warped(n: int, L: float = 3.0, N: int = 4, N_geo: int | None = None,
                 amplitude: float | None = None) -> Mesh:
    """Periodic, heavily warped ``n x n`` mesh of ``[0, L]^2``."""
    if n < 2:
        raise ValueError("warped mesh needs n >= 2")
    if not L > 0:
        raise ValueError("L must be positive")
    return build_mapped(n, n, warped_mapping(L, amplitude), ((0.0, L), (0.0, L)), N,
                        N if N_geo is None else N_geo, (True, True),
                        extent=((0.0, float(L)), (0.0, float(L))))


def metric_identity_residual(mesh: Mesh) -> float:
    """Max over nodes of ``|sum_m D_im Ja1_mj + D_jm Ja2_im|`` (2D) or 0 (1D)."""
    if mesh.dim == 1:
        return 0.0
    D = mesh.ops.D
    r = (np.einsum("im,dkmj->dkij", D, mesh.metrics[0])
         + np.einsum("jm,dkim->dkij", D, mesh.metrics[1]))
    return float(np.abs(r).max())


def integrate(field, mesh: Mesh) -> float:
    """Quadrature ``sum_e sum_ij w_i w_j J_ij f_ij`` (trailing nodal axes)."""
    w = mesh.ops.weights
    field = np.asarray(field, dtype=float)
    wJ = mesh.J * (w if mesh.dim == 1 else np.outer(w, w))
    axes = tuple(range(field.ndim - mesh.dim - 1, field.ndim))
    return np.sum(field * wJ, axis=axes)


def l2_norm(field, mesh: Mesh):
    """Volume-normalised L2 norm ``sqrt(int f^2 / |Omega|)``."""
    return np.sqrt(integrate(np.asarray(field) ** 2, mesh) / mesh.measure)
