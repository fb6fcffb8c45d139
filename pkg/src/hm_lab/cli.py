"""hm-lab: evaluate family members, sweep parameters and write check reports.

Exit status: 0 all checks pass, 1 some check failed, 2 usage error (bad flags,
bad config, point outside the chart, unsupported dimension), 3 numerical
non-convergence, 4 I/O error.
"""

from __future__ import annotations

import argparse
import math
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError, InversionError
from .geometry import SolitonParams
from .pipelines import COMMANDS, Tolerances, run_pipeline
from .reports import Report, emit

__all__ = ["main", "RunConfig", "Sweep", "UsageError", "parse_sweep", "read_config", "build_config", "run"]

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_CONVERGENCE, EXIT_IO = 0, 1, 2, 3, 4
SWEEP_PARAMS = ("a", "r0", "ell", "n")
FORMATS = ("table", "csv", "json")
DEFAULTS = {
    "n": 3,
    "ell": 1.0,
    "a": 0.0,
    "r0": 1.0,
    "lambda": None,
    "G": 1.0,
    "r": None,
    "sweep": None,
    "format": "table",
    "out": None,
    "figures": None,
    "tol_fd": Tolerances.tol_fd,
    "tol_extrap": Tolerances.tol_extrap,
    "root_tol": Tolerances.root_tol,
}
_FLOAT_KEYS = ("ell", "a", "r0", "G", "r", "tol_fd", "tol_extrap", "root_tol")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Sweep:
    name: str
    lo: float
    hi: float
    count: int

    def values(self) -> list:
        if self.count == 1:
            vals = [self.lo]
        else:
            vals = [float(v) for v in np.linspace(self.lo, self.hi, self.count)]
        if self.name == "n":
            ints = [round(v) for v in vals]
            if any(abs(v - i) > 1e-9 for v, i in zip(vals, ints)):
                raise UsageError("an n sweep must hit integers only, e.g. n=3..6:4")
            return ints
        return vals

    def __str__(self) -> str:
        return f"{self.name}={self.lo:.15g}..{self.hi:.15g}:{self.count}"


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: SolitonParams
    sweep: Sweep | None = None
    output: str = "table"
    tolerances: Tolerances = field(default_factory=Tolerances)
    out: str | None = None
    figures: str | None = None
    r: float | None = None
    lambda_text: str | None = None


_SWEEP_RE = re.compile(r"^\s*(\w+)\s*=\s*(\S+?)\.\.(\S+?):(\d+)\s*$")


def parse_sweep(text: str) -> Sweep:
    """``param=lo..hi:count`` with param in {a, r0, ell, n}."""
    m = _SWEEP_RE.match(text)
    if not m:
        raise UsageError(f"bad --sweep {text!r}; expected param=lo..hi:count")
    name, lo, hi, count = m.groups()
    if name not in SWEEP_PARAMS:
        raise UsageError(f"cannot sweep {name!r}; choose one of {', '.join(SWEEP_PARAMS)}")
    try:
        lo, hi = float(lo), float(hi)
    except ValueError:
        raise UsageError(f"bad sweep range in {text!r}") from None
    count = int(count)
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise UsageError("sweep range must be finite")
    if count < 1:
        raise UsageError("sweep count must be >= 1")
    return Sweep(name, lo, hi, count)


def read_config(path: str) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment, keys as the long flags."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{num}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise UsageError(f"{path}:{num}: unknown key {key!r}")
        out[key] = value
    return out


def _lambdas(text, n: int):
    if text is None:
        return None
    if isinstance(text, (list, tuple)):
        vals = [float(v) for v in text]
    else:
        try:
            vals = [float(v) for v in str(text).split(",") if v.strip()]
        except ValueError:
            raise UsageError(f"bad --lambda {text!r}") from None
    if len(vals) == 1:
        return tuple(vals * (n - 2))
    if len(vals) != n - 2:
        raise UsageError(f"--lambda needs 1 or n-2 = {n - 2} values, got {len(vals)}")
    return tuple(vals)


def build_config(args: argparse.Namespace) -> RunConfig:
    """Merge CLI flags over the config file over the defaults."""
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        merged.update(read_config(args.config))
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    try:
        n_float = float(merged["n"])
        for key in _FLOAT_KEYS:
            if merged[key] is not None:
                merged[key] = float(merged[key])
    except ValueError:
        raise UsageError("numeric option has a non-numeric value") from None
    if n_float != int(n_float):
        raise UsageError(f"n must be an integer, got {merged['n']}")
    n = int(n_float)
    if merged["format"] not in FORMATS:
        raise UsageError(f"--format must be one of {', '.join(FORMATS)}")
    sweep = merged["sweep"]
    if sweep is not None and not isinstance(sweep, Sweep):
        sweep = parse_sweep(sweep)
    tol = Tolerances(tol_fd=merged["tol_fd"], tol_extrap=merged["tol_extrap"], root_tol=merged["root_tol"])
    if min(tol.tol_fd, tol.tol_extrap, tol.root_tol) <= 0:
        raise UsageError("tolerances must be positive")
    params = SolitonParams(
        n=n,
        ell=merged["ell"],
        a=merged["a"],
        r0=merged["r0"],
        lambdas=_lambdas(merged["lambda"], n),
        G=merged["G"],
    )
    return RunConfig(
        command=args.command,
        params=params,
        sweep=sweep,
        output=merged["format"],
        tolerances=tol,
        out=merged["out"],
        figures=merged["figures"],
        r=merged["r"],
        lambda_text=None if merged["lambda"] is None else str(merged["lambda"]),
    )


def _params_dict(cfg: RunConfig) -> dict:
    p = cfg.params
    out = {
        "command": cfg.command,
        "n": p.n,
        "ell": p.ell,
        "a": p.a,
        "r0": p.r0,
        "lambda": list(p.lambdas),
        "lambda_volume": p.lam,
        "G": p.G,
        "tol_fd": cfg.tolerances.tol_fd,
        "tol_extrap": cfg.tolerances.tol_extrap,
        "root_tol": cfg.tolerances.root_tol,
    }
    if cfg.r is not None:
        out["r"] = cfg.r
    if cfg.sweep is not None:
        out["sweep"] = str(cfg.sweep)
    return out


def _thread_cap() -> int:
    raw = os.environ.get("HM_LAB_THREADS")
    if raw is None or raw.strip() == "":
        return os.cpu_count() or 1
    try:
        cap = int(raw)
    except ValueError:
        raise UsageError(f"HM_LAB_THREADS must be a positive integer, got {raw!r}") from None
    if cap < 1:
        raise UsageError(f"HM_LAB_THREADS must be a positive integer, got {raw!r}")
    return cap


def _sweep_member(cfg: RunConfig, value) -> SolitonParams:
    name = cfg.sweep.name
    if name == "n":
        return cfg.params.replace(n=value, lambdas=_lambdas(cfg.lambda_text, value))
    return cfg.params.replace(**{name: value})


def _point(job):
    command, params, tol, r = job
    return run_pipeline(command, params, tol, r)


def run(cfg: RunConfig):
    """Execute the configured pipeline(s); returns ``(report, figure_paths)``."""
    if cfg.sweep is None:
        res = run_pipeline(cfg.command, cfg.params, cfg.tolerances, cfg.r)
        report = Report(params=_params_dict(cfg), results=res.results, checks=res.checks)
        paths = []
        if cfg.figures:
            from .plotting import render

            paths = render(cfg.command, res.series, cfg.figures)
        return report, paths
    values = cfg.sweep.values()
    jobs = [(cfg.command, _sweep_member(cfg, v), cfg.tolerances, cfg.r) for v in values]
    workers = min(_thread_cap(), len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outs = list(pool.map(_point, jobs))  # map keeps sweep order
    else:
        outs = [_point(j) for j in jobs]
    rows, checks = [], []
    name = cfg.sweep.name
    for v, res in zip(values, outs):
        passed = sum(c.passed for c in res.checks)
        row = {name: v}
        row.update(res.results)
        row.update({"checks_passed": passed, "checks_total": len(res.checks), "pass": passed == len(res.checks)})
        rows.append(row)
        checks += [c.renamed(f"{name}={v:.15g}/") for c in res.checks]
    report = Report(params=_params_dict(cfg), results=rows, checks=checks)
    paths = []
    if cfg.figures:
        from .plotting import render_sweep

        paths = render_sweep(cfg.command, name, report.results, cfg.figures)
    return report, paths


# argument parsing -----------------------------------------------------------

_HELP = {
    "curvature": "Christoffels, Ricci and scalar curvature (closed form and finite differences)",
    "regularity": "r_plus, the period beta and the removable conical point",
    "static-check": "vacuum residuals of static extensions and the AdS-soliton verdict",
    "complex": "almost-complex structure J, integrability, d omega, extension across r_plus",
    "energy": "Hawking-Horowitz mass, Hamiltonian energy and fall-off audit",
    "compare": "energy ratio against the period-matched a = 0 metric",
    "verify-all": "every check above that applies to the member",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("member")
    g.add_argument("--n", type=int, help="fiber dimension, >= 3 (default 3)")
    g.add_argument("--ell", type=float, help="AdS radius (default 1)")
    g.add_argument("--a", type=float, help="deformation parameter (default 0)")
    g.add_argument("--r0", type=float, help="r0 >= 0 (default 1)")
    g.add_argument("--lambda", dest="lambda", metavar="CSV", help="theta periods: one value or n-2 values (default 2 pi each)")
    g.add_argument("--G", type=float, help="Newton constant (default 1)")
    g.add_argument("--r", type=float, help="probe radius (default 2 r_plus)")
    o = common.add_argument_group("run")
    o.add_argument("--sweep", metavar="PARAM=LO..HI:COUNT", help="sweep a, r0, ell or n")
    o.add_argument("--format", choices=FORMATS, help="report format (default table)")
    o.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    o.add_argument("--figures", metavar="DIR", help="also write PNG figures into DIR")
    o.add_argument("--config", metavar="PATH", help="flat key = value file; flags override it")
    o.add_argument("--tol-fd", dest="tol_fd", type=float, help="finite-difference tolerance (default 1e-6)")
    o.add_argument("--tol-extrap", dest="tol_extrap", type=float, help="extrapolation tolerance (default 1e-8)")
    o.add_argument("--root-tol", dest="root_tol", type=float, help="root residual tolerance (default 1e-12)")

    parser = _Parser(prog="hm-lab", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND", parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=_HELP[name], description=_HELP[name])
    return parser


def _write(data: bytes, path: str | None):
    if path is None:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
        return
    with open(path, "wb") as fh:
        fh.write(data)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = build_config(args)
        report, paths = run(cfg)
        _write(emit(report, cfg.output), cfg.out)
    except UsageError as exc:
        print(f"hm-lab: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"hm-lab: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, InversionError) as exc:
        print(f"hm-lab: not converged: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"hm-lab: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    for p in paths:
        print(f"hm-lab: wrote {p}", file=sys.stderr)
    return EXIT_OK if report.all_pass else EXIT_FAILED


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
