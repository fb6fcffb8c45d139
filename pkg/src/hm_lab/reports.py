"""Check records, reports and their table / CSV / JSON renderings.

Every float is rounded to 15 significant digits when it enters a report, so
the printed form, the stored form and the parsed-back form coincide.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

__all__ = [
    "Check",
    "Report",
    "SIG_DIGITS",
    "round_sig",
    "fmt",
    "check_close",
    "check_upper",
    "check_lower",
    "emit",
    "parse_json",
]

SIG_DIGITS = 15
_NONFINITE = {"inf": math.inf, "-inf": -math.inf, "nan": math.nan}


def round_sig(x):
    """Round floats (recursively through lists and dicts) to 15 significant digits."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, float) or hasattr(x, "__float__"):
        x = float(x)
        return float(f"{x:.{SIG_DIGITS}g}") + 0.0 if math.isfinite(x) else x  # + 0.0 drops -0
    if isinstance(x, dict):
        return {k: round_sig(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [round_sig(v) for v in x]
    raise TypeError(f"cannot store {type(x).__name__} in a report")


def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.{SIG_DIGITS}g}"
    return str(x)


@dataclass(frozen=True)
class Check:
    """One invariant.  ``passed`` iff |deviation| <= tolerance.

    For inequalities the deviation is the size of the violation, so it is
    zero when the inequality holds.
    """

    name: str
    value: float
    reference: float
    deviation: float
    tolerance: float = field(default=0.0, compare=False)
    passed: bool = False

    def __post_init__(self):
        for k in ("value", "reference", "deviation", "tolerance"):
            object.__setattr__(self, k, round_sig(getattr(self, k)))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "reference": self.reference,
            "deviation": self.deviation,
            "pass": self.passed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Check":
        return cls(
            name=d["name"],
            value=_decode(d["value"]),
            reference=_decode(d["reference"]),
            deviation=_decode(d["deviation"]),
            passed=bool(d["pass"]),
        )

    def renamed(self, prefix: str) -> "Check":
        return Check(
            name=f"{prefix}{self.name}",
            value=self.value,
            reference=self.reference,
            deviation=self.deviation,
            tolerance=self.tolerance,
            passed=self.passed,
        )


def _verdict(deviation: float, tolerance: float) -> bool:
    return bool(math.isfinite(deviation) and abs(deviation) <= tolerance)


def check_close(name: str, value, reference, tolerance: float, relative_to: float | None = None) -> Check:
    """|value - reference| <= tolerance, the deviation optionally divided by ``relative_to``."""
    value, reference = float(value), float(reference)
    dev = value - reference
    if relative_to is not None:
        dev = dev / relative_to
    return Check(name, value, reference, dev, tolerance, _verdict(dev, tolerance))


def check_upper(name: str, value, bound, strict: bool = False) -> Check:
    """value <= bound (or < bound); deviation is the overshoot."""
    value, bound = float(value), float(bound)
    if strict:
        bound = math.nextafter(bound, -math.inf)
    dev = max(0.0, value - bound) if not math.isnan(value) else math.nan
    return Check(name, value, bound, dev, 0.0, _verdict(dev, 0.0))


def check_lower(name: str, value, bound, strict: bool = False) -> Check:
    """value >= bound (or > bound); deviation is the shortfall."""
    value, bound = float(value), float(bound)
    if strict:
        bound = math.nextafter(bound, math.inf)
    dev = max(0.0, bound - value) if not math.isnan(value) else math.nan
    return Check(name, value, bound, dev, 0.0, _verdict(dev, 0.0))


@dataclass(frozen=True)
class Report:
    """``params``: inputs; ``results``: a dict, or a list of dicts for a sweep."""

    params: dict
    results: dict | list
    checks: tuple[Check, ...]

    def __post_init__(self):
        object.__setattr__(self, "params", round_sig(self.params))
        object.__setattr__(self, "results", round_sig(self.results))
        object.__setattr__(self, "checks", tuple(self.checks))

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def is_sweep(self) -> bool:
        return isinstance(self.results, list)

    def to_dict(self) -> dict:
        return {
            "params": self.params,
            "results": self.results,
            "checks": [c.to_dict() for c in self.checks],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        return cls(
            params=_decode(d["params"]),
            results=_decode(d["results"]),
            checks=tuple(Check.from_dict(c) for c in d["checks"]),
        )


def _encode(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(x, dict):
        return {k: _encode(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_encode(v) for v in x]
    return x


def _decode(x):
    if isinstance(x, str) and x in _NONFINITE:
        return _NONFINITE[x]
    if isinstance(x, dict):
        return {k: _decode(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_decode(v) for v in x]
    return x


# renderings -----------------------------------------------------------------


def _to_json(report: Report) -> str:
    return json.dumps(_encode(report.to_dict()), indent=2, allow_nan=False, ensure_ascii=False) + "\n"


def parse_json(text: str) -> Report:
    return Report.from_dict(json.loads(text))


def _check_row(c: Check) -> list[str]:
    return [c.name, fmt(c.value), fmt(c.reference), fmt(c.deviation), fmt(c.tolerance), fmt(c.passed)]


_CHECK_HEADER = ["name", "value", "reference", "deviation", "tolerance", "pass"]


def _sweep_columns(rows: list[dict]) -> list[str]:
    cols: list[str] = []
    for row in rows:
        for k in row:
            if k not in cols:
                cols.append(k)
    return cols


def _to_csv(report: Report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if report.is_sweep:
        cols = _sweep_columns(report.results)
        w.writerow(cols)
        for row in report.results:
            w.writerow([fmt(row.get(k, "")) for k in cols])
    else:
        w.writerow(["section"] + _CHECK_HEADER)
        for k, v in report.results.items():
            w.writerow(["result", k, fmt(v), "", "", "", ""])
        for c in report.checks:
            w.writerow(["check"] + _check_row(c))
    return buf.getvalue()


def _table(header: list[str], rows: list[list[str]]) -> list[str]:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    line = "  ".join(h.ljust(wd) for h, wd in zip(header, widths))
    out = [line.rstrip(), "  ".join("-" * wd for wd in widths)]
    out += ["  ".join(c.ljust(wd) for c, wd in zip(r, widths)).rstrip() for r in rows]
    return out


def _to_table(report: Report) -> str:
    lines = ["parameters"]
    width = max(len(k) for k in report.params) if report.params else 0
    lines += [f"  {k.ljust(width)} = {fmt(v)}" for k, v in report.params.items()]
    lines.append("")
    if report.is_sweep:
        cols = _sweep_columns(report.results)
        lines += _table(cols, [[fmt(row.get(k, "")) for k in cols] for row in report.results])
    else:
        lines.append("results")
        width = max((len(k) for k in report.results), default=0)
        lines += [f"  {k.ljust(width)} = {fmt(v)}" for k, v in report.results.items()]
    lines.append("")
    lines.append("checks")
    lines += _table(_CHECK_HEADER, [_check_row(c) for c in report.checks])
    failed = sum(not c.passed for c in report.checks)
    lines.append("")
    lines.append(f"{len(report.checks) - failed}/{len(report.checks)} checks passed")
    return "\n".join(lines) + "\n"


def emit(report: Report, format: str = "table") -> bytes:
    """UTF-8 bytes of the report in ``table``, ``csv`` or ``json`` form."""
    if format == "json":
        text = _to_json(report)
    elif format == "csv":
        text = _to_csv(report)
    elif format == "table":
        text = _to_table(report)
    else:
        raise ValueError(f"unknown format {format!r}")
    return text.encode("utf-8")
