"""Structured residual reports and their serialization."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict
from typing import List, Sequence

from .errors import IoError

_FIELDS = (
    "scenario",
    "stage",
    "sample_count",
    "max_residual",
    "mean_residual",
    "tolerance",
    "passed",
    "runtime_ms",
)

_NUMERIC = ("max_residual", "mean_residual", "tolerance", "runtime_ms")


@dataclass
class ResidualReport:
    scenario: str
    stage: str
    sample_count: int
    max_residual: float
    mean_residual: float
    tolerance: float
    passed: bool
    runtime_ms: float = 0.0

    def __post_init__(self):
        # keep the pass flag consistent with the residual/tolerance pair
        self.passed = bool(self.max_residual <= self.tolerance)


def _fmt(x: float) -> str:
    return "%.17g" % float(x)


def emit(
    reports: Sequence[ResidualReport],
    fmt: str = "table",
    path: str = None,
    include_runtime: bool = False,
) -> str:
    """Serialize reports as a TSV table or JSON-lines records.

    Numbers carry 17 significant digits and the field order is fixed.  The
    wall-clock runtime field is excluded by default so repeated runs of the
    same configuration produce bitwise-identical files.
    """
    fields = _FIELDS if include_runtime else _FIELDS[:-1]
    lines: List[str] = []
    if fmt == "table":
        lines.append("\t".join(fields))
        for r in reports:
            d = asdict(r)
            row = []
            for f in fields:
                v = d[f]
                row.append(_fmt(v) if f in _NUMERIC else str(v))
            lines.append("\t".join(row))
    elif fmt == "records":
        for r in reports:
            d = asdict(r)
            rec = {}
            for f in fields:
                rec[f] = float(_fmt(d[f])) if f in _NUMERIC else d[f]
            lines.append(json.dumps(rec, sort_keys=False))
    else:
        raise ValueError(f"unknown format {fmt!r} (use 'table' or 'records')")
    text = "\n".join(lines) + "\n"
    if path is not None:
        try:
            with open(path, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise IoError(str(exc)) from exc
    return text


def parse(text: str) -> List[ResidualReport]:
    """Parse the output of emit back into report objects (both formats)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        return []
    out: List[ResidualReport] = []
    if lines[0].startswith("scenario\t"):
        header = lines[0].split("\t")
        for ln in lines[1:]:
            parts = dict(zip(header, ln.split("\t")))
            out.append(_from_dict(parts))
    else:
        for ln in lines:
            out.append(_from_dict(json.loads(ln)))
    return out


def _from_dict(d) -> ResidualReport:
    def num(key, default=0.0):
        if key not in d:
            return default
        return float(d[key])

    passed = d.get("passed", "False")
    if isinstance(passed, str):
        passed = passed == "True"
    return ResidualReport(
        scenario=str(d["scenario"]),
        stage=str(d["stage"]),
        sample_count=int(d["sample_count"]),
        max_residual=num("max_residual"),
        mean_residual=num("mean_residual"),
        tolerance=num("tolerance"),
        passed=bool(passed),
        runtime_ms=num("runtime_ms"),
    )
