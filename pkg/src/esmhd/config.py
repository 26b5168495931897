"""Run configuration: sectioned ``key = value`` text format.

Example::

    [case]
    case = orszag_tang
    [mesh]
    N = 3
    dofs = 128

Sections are optional (keys are unique across sections), but a key
placed under the wrong section is rejected. ``#`` and ``;`` start
comments. Every error message carries the offending line number.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields
import os

from .fluxes import FluxKind
from .fv import ReconstructionKind

__all__ = ["ConfigError", "RunConfig", "parse_config", "emit_config", "load_config", "SCHEMA"]


class ConfigError(ValueError):
    """Invalid configuration text; ``line`` is 1-based or None."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _choice(*values):
    def conv(s):
        s = s.strip().lower()
        if s not in values:
            raise ValueError(f"expected one of {', '.join(values)}, got {s!r}")
        return s
    conv.__name__ = "choice"
    return conv


def _bool(s):
    s = s.strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {s!r}")


def _opt(conv):
    def f(s):
        if s.strip().lower() in ("none", ""):
            return None
        return conv(s)
    f.__name__ = f"optional {conv.__name__}"
    return f


def _str(s):
    return s.strip()


_FLUX = _choice(*(k.value for k in FluxKind))
_RECON = _choice(*(k.value for k in ReconstructionKind))

# key -> (section, converter)
SCHEMA = {
    "case": ("case", _choice("fsp", "blast", "orszag_tang", "gem", "brio_wu", "smooth")),
    "seed": ("case", int),
    "lx": ("case", _opt(float)),
    "ly": ("case", _opt(float)),
    "N": ("mesh", _opt(int)),
    "mesh": ("mesh", _opt(_choice("warped", "cartesian", "interval"))),
    "nx": ("mesh", _opt(int)),
    "ny": ("mesh", _opt(int)),
    "dofs": ("mesh", _opt(int)),
    "n_geo": ("mesh", _opt(int)),
    "warp_amplitude": ("mesh", _opt(float)),
    "volume_flux": ("scheme", _FLUX),
    "surface_flux": ("scheme", _opt(_FLUX)),
    "fv_flux": ("scheme", _FLUX),
    "recon": ("scheme", _RECON),
    "assert_entropy": ("scheme", _choice("none", "conservative", "stable")),
    "alpha_mode": ("indicator", _opt(_choice("indicator", "random", "fixed"))),
    "alpha_fixed": ("indicator", float),
    "indicator_quantity": ("indicator", _opt(_choice("p", "rho_p"))),
    "alpha_min": ("indicator", float),
    "alpha_max": ("indicator", float),
    "sharpness": ("indicator", float),
    "relaxation": ("indicator", _opt(_bool)),
    "propagation": ("indicator", _opt(_bool)),
    "gamma": ("physics", _opt(float)),
    "mu0": ("physics", float),
    "mu_ns": ("physics", _opt(float)),
    "eta": ("physics", _opt(float)),
    "prandtl": ("physics", float),
    "r_gas": ("physics", float),
    "cfl": ("time", _opt(float)),
    "cfl_visc": ("time", float),
    "beta_a": ("time", float),
    "beta_v": ("time", float),
    "t_end": ("time", _opt(float)),
    "dt_fixed": ("time", _opt(float)),
    "max_steps": ("time", _opt(int)),
    "output_dir": ("output", _opt(_str)),
    "diag_every": ("output", int),
    "fields_every": ("output", int),
    "threads": ("output", _opt(int)),
}

SECTIONS = ("case", "mesh", "scheme", "indicator", "physics", "time", "output")


@dataclass
class RunConfig:
    """All run parameters. ``None`` means "case default" until resolved."""

    case: str = "blast"
    seed: int = 0
    lx: float | None = None
    ly: float | None = None
    N: int | None = None
    mesh: str | None = None
    nx: int | None = None
    ny: int | None = None
    dofs: int | None = None
    n_geo: int | None = None
    warp_amplitude: float | None = None
    volume_flux: str = "ec"
    surface_flux: str | None = None
    fv_flux: str = "tvd_es"
    recon: str = "tvd_no_boundary"
    assert_entropy: str = "none"
    alpha_mode: str | None = None
    alpha_fixed: float = 0.0
    indicator_quantity: str | None = None
    alpha_min: float = 0.01
    alpha_max: float = 1.0
    sharpness: float = 9.21024
    relaxation: bool | None = None
    propagation: bool | None = None
    gamma: float | None = None
    mu0: float = 1.0
    mu_ns: float | None = None
    eta: float | None = None
    prandtl: float = 0.72
    r_gas: float = 1.0
    cfl: float | None = None
    cfl_visc: float = 0.5
    beta_a: float = 1.0
    beta_v: float = 1.0
    t_end: float | None = None
    dt_fixed: float | None = None
    max_steps: int | None = None
    output_dir: str | None = None
    diag_every: int = 1
    fields_every: int = 0
    threads: int | None = None

    def validate(self, lines: dict | None = None):
        """Check value ranges and flux combinations."""
        lines = lines or {}

        def err(msg, key):
            raise ConfigError(msg, lines.get(key))

        if self.volume_flux == "tvd_es":
            err("volume_flux cannot be tvd_es (FV interior only)", "volume_flux")
        if self.surface_flux == "tvd_es":
            err("surface_flux cannot be tvd_es (FV interior only)", "surface_flux")
        if self.assert_entropy != "none" and self.volume_flux != "ec":
            err(f"assert_entropy={self.assert_entropy} requires volume_flux=ec", "assert_entropy")
        if self.assert_entropy == "conservative":
            if (self.surface_flux or "es_rusanov") != "ec" or self.fv_flux != "ec":
                err("assert_entropy=conservative requires EC surface and FV fluxes", "assert_entropy")
        if self.N is not None and not 1 <= self.N <= 15:
            err(f"N must be in 1..15, got {self.N}", "N")
        for key in ("nx", "ny", "dofs"):
            val = getattr(self, key)
            if val is not None and val < 1:
                err(f"{key} must be positive", key)
        if self.cfl is not None and not 0 < self.cfl <= 1:
            err(f"cfl must be in (0, 1], got {self.cfl}", "cfl")
        if not 0 < self.cfl_visc <= 1:
            err(f"cfl_visc must be in (0, 1], got {self.cfl_visc}", "cfl_visc")
        if not 0 <= self.alpha_min <= self.alpha_max <= 1:
            err("need 0 <= alpha_min <= alpha_max <= 1", "alpha_min")
        if not 0 <= self.alpha_fixed <= 1:
            err("alpha_fixed must be in [0, 1]", "alpha_fixed")
        if self.mu0 != 1.0:
            err("the discrete fluxes support mu0 = 1 only", "mu0")
        if self.t_end is not None and self.t_end < 0:
            err("t_end must be non-negative", "t_end")
        if self.diag_every < 1:
            err("diag_every must be >= 1", "diag_every")
        if self.fields_every < 0:
            err("fields_every must be >= 0", "fields_every")
        if self.output_dir:
            parent = os.path.dirname(os.path.abspath(self.output_dir)) or "."
            if os.path.exists(self.output_dir) and not os.path.isdir(self.output_dir):
                err(f"output_dir {self.output_dir!r} is not a directory", "output_dir")
            if not os.path.exists(self.output_dir) and not os.access(_existing_parent(parent), os.W_OK):
                err(f"output_dir {self.output_dir!r} is not writable", "output_dir")
        return self

    def resolved(self) -> "RunConfig":
        """Copy with every ``None`` replaced by the case default."""
        from .cases import get_case

        case = get_case(self.case)
        d = asdict(self)
        defaults = dict(
            N=3, mesh="cartesian", nx=8, ny=8, surface_flux="es_rusanov", alpha_mode="indicator",
            indicator_quantity=case.indicator_quantity, relaxation=True, propagation=True,
            gamma=5.0 / 3.0, mu_ns=0.0, eta=0.0, cfl=0.5, t_end=1.0,
        )
        defaults.update(case.defaults)
        if case.name == "gem":
            from .cases import GEM_DEFAULTS
            defaults.setdefault("lx", GEM_DEFAULTS["lx"])
            defaults.setdefault("ly", GEM_DEFAULTS["ly"])
        user_set = {k for k, v in d.items() if v is not None}
        for k, v in defaults.items():
            if k in d and d[k] is None:
                d[k] = v
        if d["dofs"] is not None:
            n = d["N"] + 1
            if d["dofs"] % n:
                raise ConfigError(f"dofs={d['dofs']} is not a multiple of N+1={n}")
            ratio = case.defaults.get("ny", 1) / case.defaults.get("nx", 1)
            d["nx"] = d["dofs"] // n
            if "ny" not in user_set:
                d["ny"] = max(1, int(round(d["nx"] * ratio))) if case.dim == 2 else 1
        if case.dim == 2 and d["mesh"] == "warped" and "ny" not in user_set:
            d["ny"] = d["nx"]
        out = RunConfig(**d)
        out.validate()
        return out


def _existing_parent(path):
    while path and not os.path.exists(path):
        new = os.path.dirname(path)
        if new == path:
            break
        path = new
    return path or "."


def parse_config(text: str) -> RunConfig:
    """Parse configuration text into a validated :class:`RunConfig`."""
    values = {}
    lines = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].split(";", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header {raw.strip()!r}", lineno)
            section = line[1:-1].strip().lower()
            if section not in SECTIONS:
                raise ConfigError(f"unknown section [{section}]", lineno)
            continue
        if "=" not in line:
            raise ConfigError(f"expected key = value, got {raw.strip()!r}", lineno)
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"unknown key {key!r}", lineno)
        sec, conv = SCHEMA[key]
        if section is not None and section != sec:
            raise ConfigError(f"key {key!r} belongs to section [{sec}], not [{section}]", lineno)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        try:
            values[key] = conv(val)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}", lineno) from None
        lines[key] = lineno
    cfg = RunConfig(**values)
    cfg.validate(lines)
    return cfg


def _fmt(v):
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_config(cfg: RunConfig) -> str:
    """Serialise a config; ``parse_config(emit_config(c)) == c``."""
    out = []
    by_section = {s: [] for s in SECTIONS}
    for f in fields(cfg):
        by_section[SCHEMA[f.name][0]].append(f.name)
    for sec in SECTIONS:
        out.append(f"[{sec}]")
        for key in by_section[sec]:
            out.append(f"{key} = {_fmt(getattr(cfg, key))}")
        out.append("")
    return "\n".join(out)


def load_config(path: str) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
