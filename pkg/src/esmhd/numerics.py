"""One-dimensional spectral building blocks.

Legendre-Gauss-Lobatto (LGL) quadrature, summation-by-parts (SBP)
derivative operators, an orthonormal Legendre modal transform, the
numerically stable logarithmic mean and the minmod limiter.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "SpectralOps",
    "build_ops",
    "lgl_nodes_weights",
    "legendre",
    "legendre_orthonormal",
    "log_mean",
    "minmod",
    "nodal_to_modal",
    "modal_to_nodal",
]

N_MAX = 15


def legendre(n: int, x):
    """Evaluate the Legendre polynomial P_n and its derivative at ``x``.

    Uses the three-term recurrence. Returns ``(P_n(x), P_n'(x))``.
    """
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev, np.zeros_like(x)
    p = x.copy()
    dp_prev = np.zeros_like(x)
    dp = np.ones_like(x)
    for k in range(1, n):
        p_next = ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
        dp_next = dp_prev + (2 * k + 1) * p
        p_prev, p = p, p_next
        dp_prev, dp = dp, dp_next
    return p, dp


def legendre_orthonormal(n: int, x):
    """Legendre polynomial normalised to unit L2 norm on [-1, 1]."""
    return np.sqrt((2 * n + 1) / 2.0) * legendre(n, x)[0]


def lgl_nodes_weights(N: int):
    """LGL nodes and weights for polynomial degree ``N``.

    Interior nodes are the roots of P_N', found by Newton iteration
    starting from the Chebyshev-Gauss-Lobatto points.
    """
    if N < 1:
        raise ValueError(f"LGL nodes need N >= 1, got {N}")
    x = -np.cos(np.pi * np.arange(N + 1) / N)
    x[0], x[-1] = -1.0, 1.0
    inner = x[1:-1].copy()
    for _ in range(100):
        # Newton on q = P_N'. q' from the Legendre ODE: (1-x^2)P'' = 2xP' - N(N+1)P
        p, dp = legendre(N, inner)
        ddp = (2 * inner * dp - N * (N + 1) * p) / (1 - inner**2)
        delta = dp / ddp
        inner -= delta
        if np.max(np.abs(delta), initial=0.0) < 1e-15:
            break
    x[1:-1] = inner
    # symmetrise to remove round-off asymmetry
    x = 0.5 * (x - x[::-1])
    w = 2.0 / (N * (N + 1) * legendre(N, x)[0] ** 2)
    w = 0.5 * (w + w[::-1])
    return x, w


def _derivative_matrix(x):
    """Lagrange differentiation matrix via barycentric weights."""
    n = len(x)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    bw = 1.0 / np.prod(diff, axis=1)
    D = (bw[None, :] / bw[:, None]) / diff
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


@dataclass(frozen=True)
class SpectralOps:
    """LGL collocation operators for degree ``N``.

    Attributes
    ----------
    N : int
        Polynomial degree.
    nodes, weights : ndarray, shape (N+1,)
        LGL nodes on [-1, 1] and quadrature weights.
    D : ndarray, shape (N+1, N+1)
        Nodal derivative matrix.
    Q : ndarray
        SBP matrix ``diag(weights) @ D``.
    B : ndarray
        Boundary matrix ``diag(-1, 0, ..., 0, 1)``.
    V : ndarray
        Vandermonde matrix of orthonormal Legendre polynomials,
        ``V[i, j] = L_j(nodes[i])`` (modal to nodal).
    Vinv : ndarray
        Its inverse (nodal to modal).
    """

    N: int
    nodes: np.ndarray
    weights: np.ndarray
    D: np.ndarray
    Q: np.ndarray
    B: np.ndarray
    V: np.ndarray
    Vinv: np.ndarray
    subcell_interfaces: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.N + 1


@lru_cache(maxsize=None)
def build_ops(N: int) -> SpectralOps:
    """Build the LGL/SBP operator set for degree ``N`` (1 <= N <= 15)."""
    if not isinstance(N, (int, np.integer)) or N < 1 or N > N_MAX:
        raise ValueError(f"unsupported polynomial degree N={N!r}; need 1 <= N <= {N_MAX}")
    N = int(N)
    x, w = lgl_nodes_weights(N)
    D = _derivative_matrix(x)
    Q = w[:, None] * D
    # enforce the SBP property to round-off: the exact Q satisfies it
    B = np.zeros((N + 1, N + 1))
    B[0, 0], B[-1, -1] = -1.0, 1.0
    V = np.stack([legendre_orthonormal(j, x) for j in range(N + 1)], axis=1)
    Vinv = np.linalg.inv(V)
    # subcell interfaces xi_{i+1/2} = -1 + sum_{l<=i} w_l, i = 0..N-1
    sub = -1.0 + np.cumsum(w)[:-1]
    arrs = (x, w, D, Q, B, V, Vinv, sub)
    for a in arrs:
        a.setflags(write=False)
    return SpectralOps(N, x, w, D, Q, B, V, Vinv, sub)


def nodal_to_modal(values, ops: SpectralOps, axis: int = -1):
    """Transform nodal values along ``axis`` to orthonormal Legendre modes."""
    values = np.asarray(values, dtype=float)
    return np.moveaxis(np.tensordot(ops.Vinv, np.moveaxis(values, axis, 0), axes=1), 0, axis)


def modal_to_nodal(modes, ops: SpectralOps, axis: int = -1):
    """Inverse of :func:`nodal_to_modal`."""
    modes = np.asarray(modes, dtype=float)
    return np.moveaxis(np.tensordot(ops.V, np.moveaxis(modes, axis, 0), axes=1), 0, axis)


_LOGMEAN_EPS = 1e-4


def log_mean(a, b, log_a=None, log_b=None):
    """Logarithmic mean ``(b - a) / (ln b - ln a)``.

    Near-equal arguments (zeta^2 < 1e-4 with zeta = (a - b)/(a + b)) use
    the truncated series of Ismail and Roe, which avoids the 0/0 limit.
    Precomputed logarithms may be passed to save work in flux kernels.

    Parameters
    ----------
    a, b : float or ndarray
        Positive arguments.
    log_a, log_b : ndarray, optional
        ``np.log(a)`` and ``np.log(b)`` if already available.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a <= 0) or np.any(b <= 0):
        raise ValueError("log_mean requires positive arguments")
    zeta = (a - b) / (a + b)
    u = zeta * zeta
    small = u < _LOGMEAN_EPS
    series = (a + b) / (2.0 * (1.0 + u / 3.0 + u * u / 5.0 + u * u * u / 7.0))
    if log_a is None:
        log_a = np.log(a)
    if log_b is None:
        log_b = np.log(b)
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = (b - a) / (log_b - log_a)
    out = np.where(small, series, direct)
    return out if out.ndim else float(out)


def minmod(a, b):
    """Two-argument minmod: the smaller magnitude if signs agree, else 0."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.where(a * b > 0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)
    return out if out.ndim else float(out)
