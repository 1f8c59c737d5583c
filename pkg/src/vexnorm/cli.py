"""Config-driven experiment runner.

Subcommands::

    vexnorm run <config.toml>                      # run the configured checks
    vexnorm sweep <config.toml> --param alpha --values 0.1,0.2,0.3
    vexnorm selftest                               # built-in check battery

The configuration is a TOML file with a ``version = 1`` field; see
``demos/experiment.toml`` for a complete example.  Each run writes one JSON
summary plus one CSV per requested check into the output directory; the exit
status is 0 iff every requested check passed.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

try:
    import tomllib  # Python >= 3.11
except ImportError:  # pragma: no cover
    import tomli as tomllib

from .checks import (CHECK_NAMES, CHECK_FUNCTIONS, CheckResult, RunConfig,
                     run_checks)
from .errors import ConfigError, VexnormError
from .exponents import Constant, ExponentFunction, GaussBump, LogDecay

SWEEP_PARAMS = ("alpha", "lambda", "beta", "m", "L", "k_max")


def exponent_from_config(spec, where: str) -> ExponentFunction:
    """Build an exponent from an inline table like
    ``{family="logdecay", qinf=2.0, a=1.0}``."""
    if not isinstance(spec, dict) or "family" not in spec:
        raise ConfigError(f"{where}: expected a table with a 'family' key")
    family = spec["family"]
    try:
        if family == "constant":
            return Constant(float(spec["q0"]))
        if family == "logdecay":
            return LogDecay(float(spec["qinf"]), float(spec["a"]))
        if family == "gaussbump":
            return GaussBump(float(spec["q0"]), float(spec["a"]),
                             float(spec["s"]))
    except KeyError as exc:
        raise ConfigError(f"{where}: missing key {exc} for family {family!r}")
    except (ValueError, VexnormError) as exc:
        raise ConfigError(f"{where}: {exc}")
    raise ConfigError(f"{where}: unknown exponent family {family!r}")


def load_config(path) -> tuple:
    """Parse and validate a config file; returns (RunConfig, check list, outdir)."""
    path = Path(path)
    try:
        raw = tomllib.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: parse error: {exc}")

    if raw.get("version") != 1:
        raise ConfigError("version: config must declare version = 1")

    grid = raw.get("grid", {})
    n = int(grid.get("n", 1))
    k_min = int(grid.get("k_min", -4))
    k_max = int(grid.get("k_max", 7))
    level = int(grid.get("level", 11))
    if n not in (1, 2):
        raise ConfigError(f"grid.n: must be 1 or 2, got {n}")
    if k_min >= k_max:
        raise ConfigError(f"grid.k_min: must be < grid.k_max ({k_min} >= {k_max})")
    if level < 1:
        raise ConfigError(f"grid.level: must be >= 1, got {level}")

    exponent = raw.get("exponent", {})
    q1 = exponent_from_config(exponent.get(
        "q1", {"family": "constant", "q0": 2.0}), "exponent.q1")

    op = raw.get("operator", {})
    beta = float(op.get("beta", 0.25))
    if not 0.0 < beta < n:
        raise ConfigError(f"operator.beta: must lie in (0, n) = (0, {n}), got {beta}")
    m = int(op.get("m", 1))
    if m < 0:
        raise ConfigError(f"operator.m: must be >= 0, got {m}")
    b_kind = op.get("b", "log")
    if b_kind != "log":
        raise ConfigError(f"operator.b: only the 'log' symbol is built in, got {b_kind!r}")
    engine = op.get("engine", "direct")
    if engine not in ("direct", "fft"):
        raise ConfigError(f"operator.engine: must be 'direct' or 'fft', got {engine!r}")

    space = raw.get("space", {})
    alpha = space.get("alpha")
    lam = float(space.get("lambda", 0.1))
    p1 = float(space.get("p1", 1.0))
    p2 = float(space.get("p2", p1))
    if lam < 0:
        raise ConfigError(f"space.lambda: must be >= 0, got {lam}")
    if not 0 < p1 <= p2:
        raise ConfigError(f"space.p1/p2: need 0 < p1 <= p2, got {p1}, {p2}")

    fam = raw.get("family", {})
    family_kind = fam.get("kind", "mixed")
    family_size = int(fam.get("size", 20))
    seed = int(fam.get("seed", 0))

    checks_tbl = raw.get("checks", {})
    names = checks_tbl.get("run", [])
    for name in names:
        if name not in CHECK_NAMES:
            raise ConfigError(f"checks.run: unknown check {name!r}; known: "
                              f"{', '.join(CHECK_NAMES)}")
    options = {k: v for k, v in checks_tbl.items() if k != "run"}

    out = raw.get("output", {})
    outdir = Path(out.get("dir", "vexnorm-out"))

    cfg = RunConfig(n=n, k_min=k_min, k_max=k_max, level=level, q1=q1,
                    beta=beta, m=m, b_kind=b_kind, engine=engine,
                    alpha=None if alpha is None else float(alpha), lam=lam,
                    p1=p1, p2=p2, family_kind=family_kind,
                    family_size=family_size, seed=seed, options=options)
    return cfg, list(names), outdir


def _write_rows(path: Path, rows) -> None:
    with open(path, "w", newline="") as fh:
        if not rows:
            fh.write("")
            return
        cols = list(rows[0].keys())
        writer = csv.DictWriter(fh, fieldnames=cols)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(v) for k, v in row.items()})


def _fmt(v):
    if isinstance(v, float):
        return "%.17g" % v
    return v


def _emit(results, outdir: Path, extra=None) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    summary = {
        "version": 1,
        "checks": [{"name": r.name, "passed": r.passed, "summary": r.summary}
                   for r in results],
        "all_passed": all(r.passed for r in results),
    }
    if extra:
        summary.update(extra)
    if not results:
        summary["note"] = "no checks requested"
    (outdir / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True, default=str) + "\n")
    for r in results:
        _write_rows(outdir / f"{r.name}.csv", r.rows)


def cmd_run(args) -> int:
    cfg, names, outdir = load_config(args.config)
    if args.output:
        outdir = Path(args.output)
    results = run_checks(cfg, names)
    _emit(results, outdir)
    failures = [r.name for r in results if not r.passed]
    for r in results:
        print(f"[{'PASS' if r.passed else 'FAIL'}] {r.name}")
    if not results:
        print("no checks requested")
    if failures:
        print(f"failed checks: {', '.join(failures)}", file=sys.stderr)
        return 1
    return 0


def cmd_sweep(args) -> int:
    cfg, _, outdir = load_config(args.config)
    if args.output:
        outdir = Path(args.output)
    if args.param not in SWEEP_PARAMS:
        raise ConfigError(f"--param: unknown parameter {args.param!r}; "
                          f"known: {', '.join(SWEEP_PARAMS)}")
    values = [v for v in args.values.split(",") if v.strip()]
    if not values:
        raise ConfigError("--values: empty value list")

    from dataclasses import replace
    from .verify import theorem_experiment

    rows = []
    for raw_val in values:
        val = int(raw_val) if args.param in ("m", "L", "k_max") else float(raw_val)
        over = {"alpha": "alpha", "lambda": "lam", "beta": "beta", "m": "m",
                "L": "level", "k_max": "k_max"}[args.param]
        swept = replace(cfg, **{over: val})
        params, report = theorem_experiment(
            swept.q1, swept.beta, swept.m, swept.p1, swept.p2, swept.lam,
            alpha=swept.alpha, n=swept.n, k_min=swept.k_min,
            k_max=swept.k_max, level=swept.level,
            family_kind=swept.family_kind, family_size=swept.family_size,
            seed=swept.seed, engine=swept.engine)
        rows.append({"value": val, "sup_ratio": report.sup_ratio,
                     "refinement_delta": report.refinement_delta,
                     "shell_delta": report.shell_delta,
                     "n": swept.n, "k_min": swept.k_min,
                     "k_max": swept.k_max, "level": swept.level})
    outdir.mkdir(parents=True, exist_ok=True)
    _write_rows(outdir / f"sweep_{args.param}.csv", rows)
    print(f"wrote {outdir / f'sweep_{args.param}.csv'} ({len(rows)} rows)")
    return 0


def cmd_selftest(args) -> int:
    cfg = RunConfig(options={"holder_trials": 200, "hls_family_size": 30,
                             "e123_family_size": 4},
                    family_size=12)
    results = run_checks(cfg, list(CHECK_NAMES))
    for r in results:
        print(f"[{'PASS' if r.passed else 'FAIL'}] {r.name}: "
              f"{json.dumps(r.summary, sort_keys=True, default=str)}")
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"failed checks: {', '.join(failed)}", file=sys.stderr)
        return 1
    print("selftest passed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vexnorm",
        description="Empirical verification of variable-exponent norm "
                    "inequalities and fractional-integral commutator bounds.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the checks listed in a config file")
    p_run.add_argument("config")
    p_run.add_argument("-o", "--output", help="override the output directory")
    p_run.set_defaults(fn=cmd_run)

    p_sweep = sub.add_parser("sweep", help="sweep one parameter of the "
                                           "commutator boundedness experiment")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--param", required=True,
                         help=f"one of {', '.join(SWEEP_PARAMS)}")
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated values")
    p_sweep.add_argument("-o", "--output", help="override the output directory")
    p_sweep.set_defaults(fn=cmd_sweep)

    p_self = sub.add_parser("selftest", help="run the built-in check battery")
    p_self.set_defaults(fn=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except VexnormError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
