"""Modal shock indicator producing per-element blending coefficients."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import SpectralOps

__all__ = [
    "IndicatorConfig",
    "threshold",
    "modal_energy",
    "alpha_from_energy",
    "relax_and_propagate",
    "indicator_quantity",
    "Indicator",
]


@dataclass(frozen=True)
class IndicatorConfig:
    """Indicator constants.

    ``quantity`` is ``"p"`` or ``"rho_p"``.
    """

    quantity: str = "p"
    sharpness: float = 9.21024
    alpha_min: float = 0.01
    alpha_max: float = 1.0
    relax_factor: float = 0.7
    sweeps: int = 2
    relaxation: bool = True
    propagation: bool = True

    def __post_init__(self):
        if self.quantity not in ("p", "rho_p"):
            raise ValueError(f"unknown indicator quantity {self.quantity!r}")
        if not (0.0 <= self.alpha_min <= self.alpha_max <= 1.0):
            raise ValueError("need 0 <= alpha_min <= alpha_max <= 1")


def threshold(N: int) -> float:
    """Threshold ``0.5 * 10^(-1.8 (N+1)^0.25)``."""
    return 0.5 * 10.0 ** (-1.8 * (N + 1) ** 0.25)


def modal_energy(field, ops: SpectralOps, dim: int | None = None):
    """Fraction of the modal energy in the highest modes.

    Parameters
    ----------
    field : ndarray, shape (K, n) or (K, n, n)
        Nodal indicator quantity per element.

    Returns
    -------
    ndarray, shape (K,)
        ``max(e_N^2 / sum_{<=N} e^2, e_{N-1}^2 / sum_{<=N-1} e^2)`` where in
        2D mode "N" pools all coefficients with ``max(i, j) = N``.
    """
    field = np.asarray(field, dtype=float)
    if dim is None:
        dim = field.ndim - 1
    N = ops.N
    if dim == 1:
        modes = field @ ops.Vinv.T
        e2 = modes**2
        shell = e2  # shell j contains mode j
    else:
        modes = np.einsum("ip,jq,kpq->kij", ops.Vinv, ops.Vinv, field)
        e2 = modes**2
        idx = np.maximum.outer(np.arange(N + 1), np.arange(N + 1))
        shell = np.stack([np.sum(e2 * (idx == s), axis=(-2, -1)) for s in range(N + 1)], axis=-1)
    cum = np.cumsum(shell, axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        r1 = np.where(cum[..., N] > 0, shell[..., N] / cum[..., N], 0.0)
        if N >= 1:
            r2 = np.where(cum[..., N - 1] > 0, shell[..., N - 1] / cum[..., N - 1], 0.0)
        else:
            r2 = np.zeros_like(r1)
    return np.maximum(r1, r2)


def alpha_from_energy(E, N: int, config: IndicatorConfig = IndicatorConfig()):
    """Logistic map from modal energy to alpha with clipping."""
    T = threshold(N)
    E = np.asarray(E, dtype=float)
    a = 1.0 / (1.0 + np.exp(-config.sharpness / T * (E - T)))
    a = np.where(a < config.alpha_min, 0.0, a)
    a = np.where(a > config.alpha_max, config.alpha_max, a)
    return a if a.ndim else float(a)


def relax_and_propagate(alpha, neighbors, previous=None, config: IndicatorConfig = IndicatorConfig()):
    """Time relaxation then face-neighbour propagation sweeps.

    Parameters
    ----------
    alpha : ndarray, shape (K,)
    neighbors : ndarray, shape (K, nface)
        Neighbour indices, ``-1`` for none.
    previous : ndarray or None
        Alpha of the previous time step.
    """
    a = np.asarray(alpha, dtype=float).copy()
    if config.relaxation and previous is not None:
        a = np.maximum(a, config.relax_factor * np.asarray(previous, dtype=float))
    if config.propagation:
        nb = np.asarray(neighbors)
        valid = nb >= 0
        for _ in range(config.sweeps):
            vals = np.where(valid, a[np.maximum(nb, 0)], 0.0)
            a = np.maximum(a, config.relax_factor * vals.max(axis=1))
    a = np.clip(a, 0.0, config.alpha_max)
    # keep alpha in {0} U [alpha_min, alpha_max]
    a = np.where(a < config.alpha_min, 0.0, a)
    return a


def indicator_quantity(prim, quantity: str):
    """Nodal indicator quantity from primitive variables."""
    if quantity == "p":
        return prim[4]
    if quantity == "rho_p":
        return prim[0] * prim[4]
    raise ValueError(f"unknown indicator quantity {quantity!r}")


class Indicator:
    """Stateful indicator evaluated before every Runge-Kutta stage.

    Modes
    -----
    ``"indicator"``: modal indicator with relaxation/propagation.
    ``"random"``: uniform random alpha per element and stage (seeded).
    ``"fixed"``: constant alpha.
    """

    def __init__(self, config: IndicatorConfig, ops: SpectralOps, neighbors, mode: str = "indicator",
                 fixed_alpha: float = 0.0, seed: int = 0):
        if mode not in ("indicator", "random", "fixed"):
            raise ValueError(f"unknown alpha mode {mode!r}")
        self.config = config
        self.ops = ops
        self.neighbors = np.asarray(neighbors)
        self.mode = mode
        self.fixed_alpha = float(fixed_alpha)
        self.rng = np.random.default_rng(seed)
        self.previous = None
        self.current = None
        self.evaluations = 0

    def __call__(self, prim):
        K = self.neighbors.shape[0]
        self.evaluations += 1
        if self.mode == "fixed":
            a = np.full(K, self.fixed_alpha)
        elif self.mode == "random":
            a = self.rng.uniform(0.0, 1.0, K)
        else:
            q = indicator_quantity(prim, self.config.quantity)
            E = modal_energy(q, self.ops)
            a = alpha_from_energy(E, self.ops.N, self.config)
            a = relax_and_propagate(a, self.neighbors, self.previous, self.config)
        self.current = a
        return a

    def end_step(self):
        """Mark the end of a time step (the last stage alpha becomes 'previous')."""
        self.previous = None if self.current is None else self.current.copy()
