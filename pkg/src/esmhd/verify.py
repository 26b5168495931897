"""Named verification suites shared by the CLI and the acceptance tests.

Each suite returns a :class:`SuiteResult` holding the measured numbers,
the thresholds and a pass flag.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .config import RunConfig
from .fluxes import (
    _psi_dot,
    diamond_noncons,
    dissipation_context,
    ec_flux,
    entropy_production,
    es_rusanov_flux,
    tvd_es_flux,
)
from .fv import _lt_apply
from .mesh import build_warped, l2_norm, metric_identity_residual
from .numerics import build_ops
from .physics import PhysParams, entropy_vars, prim_to_cons
from .run import Simulation

__all__ = [
    "SuiteResult",
    "random_pairs",
    "suite_operators",
    "suite_tadmor",
    "suite_entropy_production",
    "suite_fsp",
    "suite_entropy_ec",
    "suite_entropy_es",
    "convergence_study",
    "observed_order",
    "SUITES",
    "FSP_VARIANTS",
]


@dataclass
class SuiteResult:
    name: str
    passed: bool
    lines: list = field(default_factory=list)
    metrics: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {"suite": self.name, "status": "PASS" if self.passed else "FAIL", **self.metrics}


def _check(lines, label, value, limit, passed_if="lt"):
    ok = value < limit if passed_if == "lt" else value <= limit
    lines.append(f"{'PASS' if ok else 'FAIL'} {label}: {value:.3e} (limit {limit:.0e})")
    return ok


# ----------------------------------------------------------------------
def suite_operators(N_max: int = 8, mesh_n: int = 8) -> SuiteResult:
    """SBP property for N = 1..N_max and metric identities on the warped mesh."""
    lines = []
    sbp = 0.0
    for N in range(1, N_max + 1):
        ops = build_ops(N)
        sbp = max(sbp, float(np.abs(ops.Q + ops.Q.T - ops.B).max()))
    ok1 = _check(lines, f"SBP |Q + Q^T - B| (N=1..{N_max})", sbp, 1e-13)
    mesh = build_warped(mesh_n, 3.0, 4)
    met = metric_identity_residual(mesh)
    ok2 = _check(lines, "metric identities (warped mesh, N=4)", met, 1e-12)
    return SuiteResult("operators", ok1 and ok2, lines, {"sbp_max": sbp, "metric_max": met})


# ----------------------------------------------------------------------
def random_pairs(n: int, rng, dim: int = 2, near_fraction: float = 0.25):
    """Random admissible state pairs spanning six decades in density and pressure.

    Returns ``(pL, pR, mL, mR)`` in primitive variables. The pairwise
    condition is an interface statement, so both sides share one random
    (non-unit) normal; distinct node metrics only cancel in the volume
    sum through the metric identities. A fraction of the pairs are small perturbations of each other, which
    exercises the series branch of the logarithmic mean.
    """
    def prims(size):
        p = np.empty((9, size))
        p[0] = 10.0 ** rng.uniform(-3, 3, size)
        p[1:4] = rng.uniform(-1, 1, (3, size))
        p[4] = 10.0 ** rng.uniform(-3, 3, size)
        p[5:8] = rng.uniform(-1, 1, (3, size))
        p[8] = rng.uniform(-0.5, 0.5, size)
        return p

    pL = prims(n)
    pR = prims(n)
    m = int(near_fraction * n)
    if m:
        eps = 10.0 ** rng.uniform(-8, -2, m)
        pR[:, :m] = pL[:, :m] * (1.0 + eps * rng.uniform(-1, 1, (9, m)))
    mL = rng.uniform(-1, 1, (dim, n)) + np.eye(dim)[:, :1]
    mL = mL * 10.0 ** rng.uniform(-1, 1, n)
    mR = mL.copy()
    return pL, pR, mL, mR


def _production_terms(pL, pR, mL, mR, params, flux_fn):
    uL, uR = prim_to_cons(pL, params), prim_to_cons(pR, params)
    mm = 0.5 * (mL + mR)
    f = flux_fn(uL, uR, mm)
    djk = diamond_noncons(uL, uR, params, mL, mm)
    dkj = diamond_noncons(uR, uL, params, mR, mm)
    r = entropy_production(uL, uR, f, djk, dkj, params, mm)
    vj, vk = entropy_vars(uL, params), entropy_vars(uR, params)
    mml = [mm[d] for d in range(mm.shape[0])]
    scale = (np.sum(np.abs((vk - vj) * f), axis=0) + np.sum(np.abs(vk * dkj), axis=0)
             + np.sum(np.abs(vj * djk), axis=0)
             + np.abs(_psi_dot(uL, params, mml)) + np.abs(_psi_dot(uR, params, mml)))
    return r, scale, uL, uR, mm


def suite_tadmor(n_pairs: int = 10_000, seed: int = 1234, tol: float = 1e-11) -> SuiteResult:
    """Generalized Tadmor condition of the EC flux with the diamond terms.

    The residual is normalised by the magnitude of the terms it cancels
    (the raw terms reach 1e6 for the extreme states).
    """
    rng = np.random.default_rng(seed)
    params = PhysParams(c_h=1.7)
    pL, pR, mL, mR = random_pairs(n_pairs, rng)
    r, scale, *_ = _production_terms(pL, pR, mL, mR, params,
                                     lambda uL, uR, m: ec_flux(uL, uR, params, m))
    rel = np.abs(r) / np.maximum(scale, 1e-300)
    lines = [f"pairs: {n_pairs}, rho/p range: [{pL[0].min():.1e}, {pL[0].max():.1e}]"]
    ok = _check(lines, "max relative Tadmor residual", float(rel.max()), tol)
    lines.append(f"     max absolute residual: {np.abs(r).max():.3e}")
    return SuiteResult("tadmor", ok, lines,
                       {"max_residual": float(rel.max()), "max_abs_residual": float(np.abs(r).max()),
                        "pairs": n_pairs})


def suite_entropy_production(n_pairs: int = 10_000, seed: int = 4321, tol: float = 1e-12) -> SuiteResult:
    """Sign of the interface production for ES Rusanov and TVD-ES, and their equivalence."""
    rng = np.random.default_rng(seed)
    params = PhysParams(c_h=1.7)
    pL, pR, mL, mR = random_pairs(n_pairs, rng)
    lines = []
    r_es, sc_es, uL, uR, mm = _production_terms(pL, pR, mL, mR, params,
                                                lambda a, b, m: es_rusanov_flux(a, b, params, m))
    es_max = float(np.max(r_es / sc_es))
    ok1 = _check(lines, "ES Rusanov max production / scale", es_max, tol, "le")
    # TVD-ES with sign-preserving reconstructed jumps c * [[w]], c in [0, 2]
    ctx = dissipation_context(uL, uR, params, mm)
    Lm = ctx[1]
    vj, vk = entropy_vars(uL, params), entropy_vars(uR, params)
    jw = _lt_apply(Lm, vk - vj)
    c = rng.uniform(0.0, 2.0, jw.shape)
    r_tvd, sc_tvd, *_ = _production_terms(pL, pR, mL, mR, params,
                                          lambda a, b, m: tvd_es_flux(a, b, c * jw, params, m, ctx))
    tvd_max = float(np.max(r_tvd / sc_tvd))
    ok2 = _check(lines, "TVD-ES max production / scale", tvd_max, tol, "le")
    f_id = tvd_es_flux(uL, uR, jw, params, mm, ctx)
    f_es = es_rusanov_flux(uL, uR, params, mm)
    # forward-error scale of the dissipation product: 1/2 lam |n| (|H| |[[v]]|)
    H, _, lam, nn = ctx
    dv = np.moveaxis(np.abs(vk - vj), 0, -1)
    dscale = 0.5 * lam * nn * np.moveaxis(np.einsum("...ij,...j->...i", np.abs(H), dv), -1, 0)
    eq = float(np.max(np.abs(f_id - f_es) / (np.abs(f_es) + dscale)))
    ok3 = _check(lines, "TVD-ES (identity limiter) vs ES Rusanov", eq, tol, "le")
    return SuiteResult("entropy-production", ok1 and ok2 and ok3, lines,
                       {"es_max": es_max, "tvd_max": tvd_max, "identity_diff": eq, "pairs": n_pairs})


# ----------------------------------------------------------------------
# scheme variants: surface flux / FV interior flux
FSP_VARIANTS = {
    "EC": dict(surface_flux="ec", fv_flux="ec"),
    "ES": dict(surface_flux="es_rusanov", fv_flux="es_rusanov"),
    "TVD-ES": dict(surface_flux="es_rusanov", fv_flux="tvd_es"),
}
VAR_NAMES = ("rho", "rho_v1", "rho_v2", "rho_v3", "E", "B1", "B2", "B3", "psi")


def suite_fsp(t_end: float = 1.0, nx: int | None = None, seed: int = 7, tol_rate: float = 1e-11,
              tol_state: float = 1e-10) -> SuiteResult:
    """Free-stream preservation on the warped mesh with random per-stage alpha."""
    lines = []
    metrics = {}
    ok = True
    for name, kw in FSP_VARIANTS.items():
        cfg = RunConfig(case="fsp", seed=seed, t_end=t_end, nx=nx, **kw)
        sim = Simulation(cfg)
        rate = sim.initial_rate()
        res = sim.run()
        r_rate = np.array([l2_norm(rate[c], sim.mesh) for c in range(9)])
        r_state = np.array([l2_norm(res.u[c] - sim.u0[c], sim.mesh) for c in range(9)])
        lines.append(f"{name} (steps={res.steps}, t={res.t:.3g})")
        lines.append("  var      |du/dt(0)|_L2   |u(t)-u(0)|_L2")
        for c in range(9):
            lines.append(f"  {VAR_NAMES[c]:<8} {r_rate[c]:.3e}       {r_state[c]:.3e}")
        ok_v = bool(np.all(r_rate < tol_rate) and np.all(r_state < tol_state))
        lines.append(f"{'PASS' if ok_v else 'FAIL'} {name}: max rate {r_rate.max():.3e} (limit {tol_rate:.0e}), "
                     f"max deviation {r_state.max():.3e} (limit {tol_state:.0e})")
        metrics[f"{name}_rate"] = float(r_rate.max())
        metrics[f"{name}_dev"] = float(r_state.max())
        ok = ok and ok_v
    return SuiteResult("fsp", ok, lines, metrics)


def _blast_sim(seed=3, **kw):
    cfg = RunConfig(case="blast", seed=seed, **kw)
    return Simulation(cfg)


def _entropy_scale(sim, u, alpha):
    """Magnitude of the nodal entropy contributions, for relative rate checks."""
    du = sim.solver.rhs(u, alpha)
    v = entropy_vars(u, sim.params)
    return float(np.sum(sim.solver.wJ * np.sum(np.abs(v * du), axis=0)))


def suite_entropy_ec(seed: int = 11, tol: float = 1e-10) -> SuiteResult:
    """Semi-discrete entropy conservation of the blended EC scheme.

    Uses a randomly perturbed blast state (non-zero psi) on the warped mesh.
    dS/dt must vanish for alpha in {0, 0.37, 1} and random alpha.
    """
    sim = _blast_sim(surface_flux="ec", fv_flux="ec", nx=8)
    rng = np.random.default_rng(seed)
    u = sim.u0.copy()
    u[8] = 0.05 * rng.standard_normal(u[8].shape)
    u[1:4] *= 1.0 + 0.05 * rng.standard_normal(u[1:4].shape)
    sim.solver.with_ch(1.3)
    K = sim.mesh.K
    lines = []
    rates = {}
    ok = True
    for label, alpha in (("0", np.zeros(K)), ("0.37", np.full(K, 0.37)), ("1", np.ones(K)),
                         ("random", rng.uniform(0, 1, K))):
        r = sim.solver.entropy_rate(u, alpha)
        scale = _entropy_scale(sim, u, alpha)
        rates[label] = r
        ok = _check(lines, f"|dS/dt| / scale, alpha={label}", abs(r) / scale, tol) and ok
    spread = max(rates.values()) - min(rates.values())
    ok = _check(lines, "spread of dS/dt over alpha", abs(spread), tol) and ok
    return SuiteResult("entropy-ec", ok, lines, {f"rate_{k}": v for k, v in rates.items()} | {"spread": spread})


def suite_entropy_es(seed: int = 12, steps: int = 20, tol: float = 1e-12) -> SuiteResult:
    """Entropy stability: semi-discrete dS/dt <= 0 and per-step S decrease for ES and TVD-ES."""
    lines = []
    metrics = {}
    ok = True
    rng = np.random.default_rng(seed)
    for name in ("ES", "TVD-ES"):
        kw = FSP_VARIANTS[name]
        sim = _blast_sim(nx=8, max_steps=steps, t_end=1.0, **kw)
        K = sim.mesh.K
        sim.solver.with_ch(1.3)
        worst = -np.inf
        for alpha in (np.zeros(K), np.ones(K), rng.uniform(0, 1, K)):
            r = sim.solver.entropy_rate(sim.u0, alpha)
            worst = max(worst, r / _entropy_scale(sim, sim.u0, alpha))
        ok = _check(lines, f"{name}: max dS/dt / scale", worst, tol, "le") and ok
        res = sim.run()
        ok = _check(lines, f"{name}: max per-step relative S increase ({res.steps} steps)",
                    res.max_entropy_increase, tol, "le") and ok
        metrics[f"{name}_rate"] = float(worst)
        metrics[f"{name}_step_increase"] = float(res.max_entropy_increase)
    return SuiteResult("entropy-es", ok, lines, metrics)


# ----------------------------------------------------------------------
def observed_order(x, y):
    """Least-squares slope of ``log y`` against ``log x``."""
    x, y = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    return float(np.polyfit(x, y, 1)[0])


def convergence_study(config: RunConfig, cfls=(0.2, 0.1, 0.05, 0.025), floor_rel: float = 1e-12,
                      band=(3.5, 4.5), progress=None) -> SuiteResult:
    """Entropy-conservation error ``|S(t_end) - S(0)|`` against CFL.

    Points below ``floor_rel * |S|`` are treated as round-off floor and
    excluded from the fitted slope.
    """
    errs = []
    S0 = None
    lines = ["cfl        steps   |S(T)-S(0)|"]
    for cfl in cfls:
        cfg = replace(config, cfl=cfl, diag_every=10**9, output_dir=None)
        res = Simulation(cfg).run()
        S = res.column("S_total")
        S0 = S[0]
        errs.append(abs(S[-1] - S[0]))
        lines.append(f"{cfl:<10g} {res.steps:<7d} {errs[-1]:.6e}")
        if progress:
            progress(cfl, res.steps, errs[-1])
    floor = floor_rel * abs(S0)
    use = [i for i, e in enumerate(errs) if e > floor]
    slope = observed_order([cfls[i] for i in use], [errs[i] for i in use]) if len(use) >= 2 else float("nan")
    decreasing = all(errs[i + 1] < errs[i] or errs[i + 1] <= floor for i in range(len(errs) - 1))
    ok = bool(np.isfinite(slope) and band[0] <= slope <= band[1] and decreasing)
    lines.append(f"{'PASS' if ok else 'FAIL'} observed order {slope:.3f} (band [{band[0]}, {band[1]}], "
                 f"{len(use)} points above floor {floor:.2e})")
    return SuiteResult("convergence", ok, lines,
                       {"order": slope, "errors": [float(e) for e in errs], "cfls": list(cfls),
                        "floor": floor})


def blast_ec_config(**kw) -> RunConfig:
    """The entropy-conservation convergence setup (EC fluxes everywhere)."""
    return RunConfig(case="blast", surface_flux="ec", fv_flux="ec", **kw)


SUITES = {
    "operators": suite_operators,
    "tadmor": suite_tadmor,
    "entropy-production": suite_entropy_production,
    "fsp": suite_fsp,
    "entropy-ec": suite_entropy_ec,
    "entropy-es": suite_entropy_es,
}
