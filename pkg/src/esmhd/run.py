"""Main run loop: builds a case from a :class:`RunConfig` and integrates it."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
import os

import numpy as np

from . import kernels
from .cases import get_case
from .config import RunConfig, emit_config
from .indicator import Indicator, IndicatorConfig
from .io import DiagnosticsWriter, ensure_dir, write_fields
from .mesh import l2_norm
from .physics import AdmissibilityError, PhysParams, cons_to_prim
from .solver import SchemeOptions, SemiDiscretization
from .timestepping import StepControl, compute_dt, select_ch, ssprk54_step

__all__ = ["RunAborted", "RunResult", "Simulation", "run", "THREADS_ENV"]

THREADS_ENV = "ESMHD_NUM_THREADS"


class RunAborted(RuntimeError):
    """Run stopped on an inadmissible state."""

    def __init__(self, message, t, step, element, rho_min, p_min):
        super().__init__(
            f"{message} (t={t:.17g}, step={step}, element={element}, rho_min={rho_min:.6g}, p_min={p_min:.6g})")
        self.t = t
        self.step = step
        self.element = element
        self.rho_min = rho_min
        self.p_min = p_min


@dataclass
class RunResult:
    u: np.ndarray
    t: float
    steps: int
    rows: list
    mesh: object
    solver: SemiDiscretization
    config: RunConfig
    alpha: np.ndarray
    dts: list = field(default_factory=list)
    max_entropy_increase: float = 0.0  # largest per-step relative increase of S
    entropy_ok: bool = True

    def column(self, name):
        return np.array([r[name] for r in self.rows])


def thread_hint(config: RunConfig | None = None) -> int:
    """Thread count hint from the config or the environment (default 1)."""
    if config is not None and config.threads:
        return int(config.threads)
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _build_mesh(cfg: RunConfig, case):
    return case.build_mesh({k: v for k, v in asdict(cfg).items() if v is not None})


class Simulation:
    """Assembled case ready to step.

    Parameters
    ----------
    config : RunConfig
        Resolved automatically when it still contains defaults.
    """

    def __init__(self, config: RunConfig):
        cfg = config.resolved()
        self.config = cfg
        self.case = get_case(cfg.case)
        self.threads = thread_hint(cfg)
        kernels.set_threads(self.threads)
        self.params = PhysParams(gamma=cfg.gamma, mu0=cfg.mu0, mu_ns=cfg.mu_ns, eta=cfg.eta,
                                 prandtl=cfg.prandtl, r_gas=cfg.r_gas)
        self.mesh = _build_mesh(cfg, self.case)
        bc = self.case.boundary(self.params) if self.case.boundary is not None else None
        opts = SchemeOptions(cfg.volume_flux, cfg.surface_flux, cfg.fv_flux, cfg.recon)
        self.solver = SemiDiscretization(self.mesh, self.params, opts, bc)
        icfg = IndicatorConfig(quantity=cfg.indicator_quantity, sharpness=cfg.sharpness,
                               alpha_min=cfg.alpha_min, alpha_max=cfg.alpha_max,
                               relaxation=cfg.relaxation, propagation=cfg.propagation)
        self.indicator = Indicator(icfg, self.mesh.ops, self.mesh.neighbors(), cfg.alpha_mode,
                                   cfg.alpha_fixed, cfg.seed)
        self.control = StepControl(cfl=cfg.cfl, cfl_visc=cfg.cfl_visc, beta_a=cfg.beta_a,
                                   beta_v=cfg.beta_v, t_end=cfg.t_end, dt_fixed=cfg.dt_fixed)
        case_cfg = {k: v for k, v in asdict(cfg).items() if v is not None}
        self.u0 = self.case.initial(self.mesh.x, self.params, case_cfg)
        cons_to_prim(self.u0, self.params)  # admissibility of the initial data

    def stage_rhs(self, u, t, stage=0):
        """RHS with the indicator evaluated on the stage state."""
        prim = cons_to_prim(u, self.params)
        alpha = self.indicator(prim)
        return self.solver.rhs(u, alpha, t)

    def initial_rate(self):
        """``du/dt`` at ``t = 0`` (indicator evaluated once)."""
        prim = cons_to_prim(self.u0, self.params)
        self.solver.with_ch(select_ch(self.u0, self.mesh, self.params, prim))
        return self.stage_rhs(self.u0, 0.0)

    def _row(self, step, t, dt, u, S, dSdt, alpha):
        prim = cons_to_prim(u, self.params, check=False)
        divb = l2_norm(self.solver.divergence_b(u), self.mesh)
        a = np.zeros(self.mesh.K) if alpha is None else alpha
        row = {
            "step": step, "t": t, "dt": dt, "S_total": S, "dSdt": dSdt,
            "divB_L2": float(divb),
            "min_rho": float(prim[0].min()), "min_p": float(prim[4].min()),
            "alpha_min": float(a.min()), "alpha_mean": float(a.mean()), "alpha_max": float(a.max()),
            "alpha_frac": float(np.mean(a > 0)),
        }
        row.update(self.case.scalar_values(u, self.mesh))
        return row

    def run(self, output_dir: str | None = None, progress=None) -> RunResult:
        """Integrate to ``t_end``; write diagnostics/fields when ``output_dir`` is set."""
        cfg = self.config
        out = output_dir if output_dir is not None else cfg.output_dir
        diag_path = None
        if out:
            ensure_dir(out)
            with open(os.path.join(out, "config_effective.cfg"), "w", encoding="utf-8") as fh:
                fh.write(emit_config(cfg))
            diag_path = os.path.join(out, "diagnostics.csv")
        writer = DiagnosticsWriter(diag_path, self.case.scalars)
        u = self.u0.copy()
        t, step = 0.0, 0
        t_end = cfg.t_end
        S = self.solver.total_entropy(u)
        last_diag = (t, S)
        dts = []
        max_inc = 0.0
        # guards the relative increase when S is near zero (e.g. a uniform p = rho^gamma state)
        S_floor = 1e-3 * self.solver.total_mass(u) / (self.params.gamma - 1.0)
        alpha = None
        writer.write(self._row(0, t, 0.0, u, S, float("nan"), alpha))
        try:
            while t < t_end * (1 - 1e-14) and (cfg.max_steps is None or step < cfg.max_steps):
                prim = cons_to_prim(u, self.params)
                self.solver.with_ch(select_ch(u, self.mesh, self.params, prim))
                dt = compute_dt(u, self.mesh, self.params, self.control, prim)
                if t + dt > t_end:
                    dt = t_end - t
                try:
                    u = ssprk54_step(u, self.stage_rhs, dt, t)
                except AdmissibilityError as err:
                    elem = err.index[0] if err.index else -1
                    raise RunAborted(str(err), t, step, elem, err.rho_min, err.p_min) from err
                if not np.all(np.isfinite(u)):
                    raise RunAborted("non-finite state", t, step, -1, np.nan, np.nan)
                self.indicator.end_step()
                alpha = self.indicator.current
                t += dt
                step += 1
                dts.append(dt)
                S_new = self.solver.total_entropy(u)
                max_inc = max(max_inc, (S_new - S) / max(abs(S), S_floor))
                S = S_new
                last = t >= t_end * (1 - 1e-14)
                if step % cfg.diag_every == 0 or last:
                    dSdt = (S - last_diag[1]) / (t - last_diag[0])
                    writer.write(self._row(step, t, dt, u, S, dSdt, alpha))
                    last_diag = (t, S)
                if out and cfg.fields_every and step % cfg.fields_every == 0:
                    write_fields(os.path.join(out, f"fields_{step:07d}.bin"), self.mesh, u, alpha, t)
                if progress is not None:
                    progress(step, t, dt)
        finally:
            writer.close()
        if out:
            write_fields(os.path.join(out, "fields_final.bin"), self.mesh, u, alpha, t)
        ok = True
        if cfg.assert_entropy == "stable":
            ok = max_inc <= 1e-12
        return RunResult(u=u, t=t, steps=step, rows=writer.rows, mesh=self.mesh, solver=self.solver,
                         config=cfg, alpha=np.zeros(self.mesh.K) if alpha is None else alpha,
                         dts=dts, max_entropy_increase=max_inc, entropy_ok=ok)


def run(config: RunConfig, output_dir: str | None = None, progress=None) -> RunResult:
    """Build and run a simulation."""
    return Simulation(config).run(output_dir, progress)
