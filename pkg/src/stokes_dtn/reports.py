"""Run reports: gated check records, CSV tables and a JSON summary."""

from __future__ import annotations

import csv
import json
import math
import operator
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__

COMPARATORS = {"<=": operator.le, ">=": operator.ge, "<": operator.lt, ">": operator.gt}


@dataclass(frozen=True)
class CheckRecord:
    """A value gated by a tolerance; ``passed`` is re-derivable from the record."""

    name: str
    value: float
    comparator: str
    tolerance: float

    def __post_init__(self):
        if self.comparator not in COMPARATORS:
            raise ValueError(f"unknown comparator {self.comparator!r}")

    @property
    def passed(self) -> bool:
        v = float(self.value)
        return not math.isnan(v) and COMPARATORS[self.comparator](v, self.tolerance)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": _json_number(self.value),
            "comparator": self.comparator,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


@dataclass
class Table:
    header: list[str]
    rows: list[list] = field(default_factory=list)

    def add(self, *row):
        if len(row) != len(self.header):
            raise ValueError("row length does not match header")
        self.rows.append(list(row))


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if hasattr(v, "item"):
        return _cell(v.item())
    return str(v)


def _json_number(v):
    v = float(v)
    return v if math.isfinite(v) else str(v)


@dataclass
class RunReport:
    experiment: str
    config: dict
    checks: list[CheckRecord] = field(default_factory=list)
    tables: dict[str, Table] = field(default_factory=dict)
    wall_time: float = 0.0
    version: str = __version__
    files: list[str] = field(default_factory=list)

    def check(self, name: str, value: float, comparator: str, tolerance: float) -> CheckRecord:
        record = CheckRecord(name, float(value), comparator, float(tolerance))
        self.checks.append(record)
        return record

    def table(self, name: str, header: list[str]) -> Table:
        self.tables[name] = Table(header)
        return self.tables[name]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def summary(self) -> dict:
        return {
            "experiment": self.experiment,
            "version": self.version,
            "config": self.config,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "wall_time_s": self.wall_time,
            "files": self.files,
        }

    def write(self, out_dir: str | Path) -> list[Path]:
        """CSV per table (plus one for the checks) and ``<experiment>_summary.json``."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = []
        checks = Table(["name", "value", "comparator", "tolerance", "passed"])
        for c in self.checks:
            checks.add(c.name, c.value, c.comparator, c.tolerance, c.passed)
        for name, tab in [("checks", checks), *self.tables.items()]:
            path = out / f"{self.experiment}_{name}.csv"
            with path.open("w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(tab.header)
                writer.writerows([_cell(v) for v in row] for row in tab.rows)
            written.append(path)
        self.files = sorted({*self.files, *(p.name for p in written)})
        summary = out / f"{self.experiment}_summary.json"
        summary.write_text(json.dumps(self.summary(), indent=2) + "\n", encoding="utf-8")
        written.append(summary)
        return written

    def format_lines(self) -> list[str]:
        lines = []
        for c in self.checks:
            flag = "PASS" if c.passed else "FAIL"
            lines.append(f"{flag}  {c.name}: {c.value:.6g} {c.comparator} {c.tolerance:.3g}")
        return lines
