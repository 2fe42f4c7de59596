"""Experiment configuration: JSON documents validated into a typed record."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path

EXPERIMENTS = (
    "dtn-verify",
    "commutator-sweep",
    "identity-check",
    "square-report",
    "carleson-report",
    "kenig-stein-check",
    "kernel-check",
)

DEFAULT_TRIALS = {
    "dtn-verify": 20,
    "commutator-sweep": 100,
    "identity-check": 10,
    "square-report": 20,
    "carleson-report": 4,
    "kenig-stein-check": 3,
    "kernel-check": 3,
}


class ConfigError(ValueError):
    """Raised with every violation found in a configuration document."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    n: int = 256
    L: float = 2 * math.pi
    Y: float | None = None
    y_levels: int = 256
    aperture: float = 2.0
    seed: int = 42
    trials: int | None = None
    band_limit: int = 32
    p: float = 2.0
    c0_policy: str | float = "auto"
    k_max: int | None = None
    workers: int = 1
    paper_literal_symbol: bool = False

    @property
    def trial_count(self) -> int:
        return self.trials if self.trials is not None else DEFAULT_TRIALS[self.experiment]

    @property
    def scan_limit(self) -> int:
        return self.k_max if self.k_max is not None else min(64, self.n // 4)

    @property
    def top(self) -> float:
        return 2 * self.L if self.Y is None else self.Y

    def to_dict(self) -> dict:
        return asdict(self)


KEYS = {f.name for f in fields(ExperimentConfig)}


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _is_real(v) -> bool:
    return (isinstance(v, (int, float)) and not isinstance(v, bool)) and math.isfinite(v)


def validate_config(raw: dict, experiment: str | None = None) -> ExperimentConfig:
    """Typed config with defaults filled, or :class:`ConfigError` listing every problem."""
    if not isinstance(raw, dict):
        raise ConfigError(["config document must be a JSON object"])
    doc = dict(raw)
    if experiment is not None:
        if "experiment" in doc and doc["experiment"] != experiment:
            raise ConfigError([f"config names experiment {doc['experiment']!r}, command line {experiment!r}"])
        doc["experiment"] = experiment
    problems = []

    for key in sorted(set(doc) - KEYS):
        problems.append(f"unknown key {key!r}")
    name = doc.get("experiment")
    if name not in EXPERIMENTS:
        problems.append(f"unknown experiment {name!r}; choose one of {', '.join(EXPERIMENTS)}")

    def get(key):
        return doc.get(key, ExperimentConfig.__dataclass_fields__[key].default)

    n = get("n")
    if not _is_int(n) or n < 8 or n & (n - 1):
        problems.append("n must be a power of two (at least 8)")
        n = None
    L = get("L")
    if not _is_real(L) or L <= 0:
        problems.append("L must be a positive number")
        L = None
    Y = get("Y")
    if Y is not None and (not _is_real(Y) or Y <= 0 or (L is not None and Y > 4 * L)):
        problems.append("Y must satisfy 0 < Y <= 4L")
    m = get("y_levels")
    if not _is_int(m) or not 3 <= m <= 8192:
        problems.append("y_levels must be an integer in [3, 8192]")
    ap = get("aperture")
    if not _is_real(ap) or ap < 1:
        problems.append("aperture must be at least 1")
    seed = get("seed")
    if not _is_int(seed) or not 0 <= seed < 2**64:
        problems.append("seed must be an unsigned 64-bit integer")
    trials = get("trials")
    if trials is not None and (not _is_int(trials) or not 1 <= trials <= 100000):
        problems.append("trials must be an integer in [1, 100000]")
    bl = get("band_limit")
    if not _is_int(bl) or bl < 1:
        problems.append("band_limit must be a positive integer")
    elif n is not None and bl > n // 4:
        problems.append("band_limit must not exceed n/4")
    p = get("p")
    if not _is_real(p) or not 1 < p:
        problems.append("p must satisfy 1<p<∞")
    c0 = get("c0_policy")
    if not (c0 == "auto" or (_is_real(c0) and c0 > 0)):
        problems.append('c0_policy must be "auto" or a positive number')
    k_max = get("k_max")
    if k_max is not None and (not _is_int(k_max) or k_max < 2 or (n is not None and k_max > n // 4)):
        problems.append("k_max must be an integer in [2, n/4]")
    workers = get("workers")
    if not _is_int(workers) or workers < 1:
        problems.append("workers must be a positive integer")
    if not isinstance(get("paper_literal_symbol"), bool):
        problems.append("paper_literal_symbol must be true or false")

    if problems:
        raise ConfigError(problems)
    values = {k: doc[k] for k in doc if k in KEYS}
    for key in ("L", "aperture", "p") + (("Y",) if doc.get("Y") is not None else ()):
        if key in values:
            values[key] = float(values[key])
    return ExperimentConfig(**values)


def load_config(path: str | Path | None, experiment: str | None = None) -> ExperimentConfig:
    if path is None:
        return validate_config({}, experiment)
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError([f"cannot read config: {exc}"]) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError([f"config is not valid JSON: {exc}"]) from exc
    return validate_config(raw, experiment)
