"""Run configuration: an INI file with [run], [budgets] and [tolerances] sections."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path

from .budgets import DEFAULT_BUDGETS
from .errors import InputError
from .zmod import ABS_TOL, REL_TOL

OUTPUT_FORMATS = ("json", "csv", "plot")
RUN_KEYS = {"seed", "output", "cache_dir", "threads"}
TOLERANCE_KEYS = {"rel", "abs"}


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    budgets: dict = field(default_factory=lambda: dict(DEFAULT_BUDGETS))
    tolerances: dict = field(default_factory=lambda: {"rel": REL_TOL, "abs": ABS_TOL})
    cache_dir: str | None = None
    output: str = "json"
    threads: int = 1

    def __post_init__(self):
        if self.seed < 0:
            raise InputError("seed must be a non-negative integer")
        if self.output not in OUTPUT_FORMATS:
            raise InputError(f"output must be one of {OUTPUT_FORMATS}, got {self.output!r}")
        if self.threads < 1:
            raise InputError("threads must be >= 1")
        for k, v in self.budgets.items():
            if k not in DEFAULT_BUDGETS:
                raise InputError(f"unknown budget {k!r}")
            if not v > 0:
                raise InputError(f"budget {k!r} must be positive")
        for k, v in self.tolerances.items():
            if k not in TOLERANCE_KEYS:
                raise InputError(f"unknown tolerance {k!r}")
            if not v > 0:
                raise InputError(f"tolerance {k!r} must be positive")

    def with_overrides(self, **kw) -> "RunConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def provenance(self) -> dict:
        return {"seed": self.seed, "budgets": dict(sorted(self.budgets.items()))}


def _num(section: str, key: str, text: str, kind=float):
    try:
        return kind(float(text)) if kind is int else kind(text)
    except ValueError:
        raise InputError(f"[{section}] {key}: cannot parse {text!r}") from None


def load_config(path: str | Path | None = None, text: str | None = None) -> RunConfig:
    """Parse a config file strictly; unknown sections or keys are errors."""
    if path is None and text is None:
        return RunConfig()
    cp = configparser.ConfigParser(interpolation=None)
    try:
        if text is not None:
            cp.read_string(text)
        else:
            with open(path, encoding="utf-8") as fh:
                cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise InputError(f"cannot read config: {exc}") from exc

    unknown = set(cp.sections()) - {"run", "budgets", "tolerances"}
    if unknown:
        raise InputError(f"unknown config sections: {sorted(unknown)}")
    kw: dict = {}
    if cp.has_section("run"):
        run = cp["run"]
        bad = set(run) - RUN_KEYS
        if bad:
            raise InputError(f"unknown [run] keys: {sorted(bad)}")
        if "seed" in run:
            kw["seed"] = _num("run", "seed", run["seed"], int)
        if "threads" in run:
            kw["threads"] = _num("run", "threads", run["threads"], int)
        if "output" in run:
            kw["output"] = run["output"].strip()
        if "cache_dir" in run:
            kw["cache_dir"] = run["cache_dir"].strip()
    budgets = dict(DEFAULT_BUDGETS)
    if cp.has_section("budgets"):
        for k, v in cp["budgets"].items():
            if k not in DEFAULT_BUDGETS:
                raise InputError(f"unknown budget {k!r}")
            budgets[k] = _num("budgets", k, v, int)
    kw["budgets"] = budgets
    tol = {"rel": REL_TOL, "abs": ABS_TOL}
    if cp.has_section("tolerances"):
        for k, v in cp["tolerances"].items():
            if k not in TOLERANCE_KEYS:
                raise InputError(f"unknown tolerance {k!r}")
            tol[k] = _num("tolerances", k, v)
    kw["tolerances"] = tol
    return RunConfig(**kw)
