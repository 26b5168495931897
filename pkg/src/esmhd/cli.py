"""Command line interface.

::

    esmhd run <config> [--set key=value ...] [--output-dir DIR] [--threads N]
    esmhd verify <suite>
    esmhd convergence <config> [--cfls 0.2,0.1,0.05,0.025]

Every subcommand ends with one ``SUMMARY {json}`` line. Exit status is 0 on
success, 1 when a check fails or a run aborts, 2 on bad input.
"""
from __future__ import annotations

import argparse
from dataclasses import replace
import json
import math
import sys
import time

from .config import SCHEMA, ConfigError, load_config
from .run import RunAborted, Simulation

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def _summary(payload: dict, out=None):
    out = out or sys.stdout
    print("SUMMARY " + json.dumps(_json_safe(payload), sort_keys=True), file=out, flush=True)


def apply_overrides(cfg, pairs):
    """Apply ``key=value`` strings to a config and revalidate it."""
    changes = {}
    for item in pairs or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, val = (s.strip() for s in item.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"unknown key {key!r} in override")
        try:
            changes[key] = SCHEMA[key][1](val)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}") from None
    cfg = replace(cfg, **changes)
    cfg.validate()
    return cfg


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    extra = list(args.set or ())
    if args.output_dir:
        extra.append(f"output_dir={args.output_dir}")
    if args.threads:
        extra.append(f"threads={args.threads}")
    cfg = apply_overrides(cfg, extra)
    sim = Simulation(cfg)
    t0 = time.perf_counter()
    try:
        res = sim.run()
    except RunAborted as err:
        print(f"FAIL run aborted: {err}", flush=True)
        _summary({"command": "run", "case": cfg.case, "status": "FAIL", "reason": "aborted",
                  "t": err.t, "step": err.step, "element": err.element})
        return EXIT_FAIL
    wall = time.perf_counter() - t0
    last = res.rows[-1]
    status = "PASS" if res.entropy_ok else "FAIL"
    print(f"{status} {cfg.case}: t={res.t:.6g} steps={res.steps} wall={wall:.1f}s "
          f"S={last['S_total']:.12e} min_rho={last['min_rho']:.4e} min_p={last['min_p']:.4e}")
    if sim.config.assert_entropy == "stable":
        print(f"{status} max per-step relative entropy increase: {res.max_entropy_increase:.3e} "
              f"(limit 1e-12)")
    _summary({"command": "run", "case": cfg.case, "status": status, "t": res.t, "steps": res.steps,
              "wall_s": wall, "S_final": last["S_total"],
              "max_entropy_increase": res.max_entropy_increase,
              "output_dir": sim.config.output_dir})
    return EXIT_OK if res.entropy_ok else EXIT_FAIL


def _cmd_verify(args) -> int:
    from .verify import SUITES

    if args.suite not in SUITES:
        print(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}", file=sys.stderr)
        _summary({"command": "verify", "suite": args.suite, "status": "ERROR"})
        return EXIT_USAGE
    res = SUITES[args.suite]()
    for line in res.lines:
        print(line)
    _summary({"command": "verify", **res.summary()})
    return EXIT_OK if res.passed else EXIT_FAIL


def _cmd_convergence(args) -> int:
    from .verify import convergence_study

    cfg = apply_overrides(load_config(args.config), args.set)
    cfls = tuple(float(c) for c in args.cfls.split(","))
    res = convergence_study(cfg, cfls)
    for line in res.lines:
        print(line)
    _summary({"command": "convergence", **res.summary()})
    return EXIT_OK if res.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="esmhd", description="Entropy stable hybrid DG/FV GLM-MHD solver")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a case from a config file")
    r.add_argument("config")
    r.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
    r.add_argument("--output-dir")
    r.add_argument("--threads", type=int)
    r.set_defaults(func=_cmd_run)

    v = sub.add_parser("verify", help="run a named verification suite")
    v.add_argument("suite")
    v.set_defaults(func=_cmd_verify)

    c = sub.add_parser("convergence", help="entropy error against CFL")
    c.add_argument("config")
    c.add_argument("--cfls", default="0.2,0.1,0.05,0.025")
    c.add_argument("--set", action="append", metavar="KEY=VALUE")
    c.set_defaults(func=_cmd_convergence)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        _summary({"command": args.command, "status": "ERROR", "reason": str(err)})
        return EXIT_USAGE
    except OSError as err:
        print(f"I/O error: {err}", file=sys.stderr)
        _summary({"command": args.command, "status": "ERROR", "reason": str(err)})
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
