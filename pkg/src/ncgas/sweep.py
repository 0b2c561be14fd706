"""Cross-path comparison sweeps driven by a flat ``key = value`` config file.

Example config::

    dimension = 2
    nu = 0.2
    ell = 0
    M = 20, 40, 80
    b = 8000            # or: beta = 100, 200
    paths = exact, sommerfeld
    tolerance = 0.05
    output = report.csv

At each grid point the potentials come from the zero-temperature solve,
then q, N and S are evaluated on every requested path and the pairwise
relative deviations are tabulated.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

from . import __version__
from .errors import DomainError, NcgasError
from .qpot3d import observables_3d, solve_potentials_3d
from .spectrum import ThermoPoint, build_spectrum, exact_sums_3d, required_m_max
from .thermo2d import EXACT_M_LIMIT, PATHS, observables, solve_potentials

PATHS_3D = ("exact", "sommerfeld")
QUANTITIES = ("q", "N", "S")


class ConfigError(DomainError):
    """A malformed or inconsistent sweep config; ``line`` is 1-based when known.

    ``key`` names the setting at fault so the parser can attach its line.
    """

    def __init__(self, message: str, line: Optional[int] = None, key: Optional[str] = None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.message = message
        self.line = line
        self.key = key


@dataclass(frozen=True)
class SweepConfig:
    dimension: int
    nu: tuple
    ell: tuple
    M: tuple
    paths: tuple
    beta: tuple = ()
    b: tuple = ()
    G: tuple = (1.0,)
    tolerance: float = math.inf
    output: Optional[str] = None
    format: str = "csv"
    source: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.dimension not in (2, 3):
            raise ConfigError(f"dimension must be 2 or 3, got {self.dimension}", key="dimension")
        for name in ("nu", "ell", "M", "paths"):
            if not getattr(self, name):
                raise ConfigError(f"'{name}' must list at least one value", key=name)
        if bool(self.beta) == bool(self.b):
            raise ConfigError("give exactly one of 'beta' or 'b'")
        allowed = PATHS if self.dimension == 2 else PATHS_3D
        for p in self.paths:
            if p not in allowed:
                raise ConfigError(f"path {p!r} not available in {self.dimension}D; choose from {allowed}",
                                  key="paths")
        if "exact" in self.paths and max(self.M) > EXACT_M_LIMIT:
            raise ConfigError(f"exact path requires M <= {EXACT_M_LIMIT}, got M={max(self.M)}", key="M")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}", key="format")

    def grid(self):
        temps = [("beta", v) for v in self.beta] or [("b", v) for v in self.b]
        gs = self.G if self.dimension == 3 else (None,)
        return list(itertools.product(self.nu, self.ell, gs, self.M, temps))


_LIST_FLOAT = ("nu", "ell", "beta", "b", "G")
_KNOWN = set(_LIST_FLOAT) | {"dimension", "M", "paths", "tolerance", "output", "format"}


def parse_config(text: str) -> SweepConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment, lists are comma separated."""
    values: dict = {}
    lines: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not sep or not key:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        if key not in _KNOWN:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in values:
            raise ConfigError(f"duplicate key {key!r} (first on line {lines[key]})", lineno)
        items = [v.strip() for v in val.split(",") if v.strip()]
        try:
            if key in _LIST_FLOAT:
                parsed = tuple(float(v) for v in items)
            elif key == "M":
                parsed = tuple(int(v) for v in items)
                if any(m <= 0 for m in parsed):
                    raise ValueError("M must be positive")
            elif key == "dimension":
                parsed = int(val)
            elif key == "paths":
                parsed = tuple(items)
            elif key == "tolerance":
                parsed = float(val)
                if parsed < 0:
                    raise ValueError("tolerance must be non-negative")
            else:
                parsed = val
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}", lineno) from None
        values[key] = parsed
        lines[key] = lineno
    for key in ("dimension", "nu", "ell", "M", "paths"):
        if key not in values:
            raise ConfigError(f"missing required key {key!r}")
    try:
        return SweepConfig(source=lines, **values)
    except ConfigError as exc:
        if exc.key in lines:
            raise ConfigError(exc.message, lines[exc.key], exc.key) from None
        raise


@dataclass(frozen=True)
class CompareReport:
    columns: tuple
    rows: list
    meta: dict
    max_deviation: float
    breached: bool
    failed: int

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key in sorted(self.meta):
            buf.write(f"# {key}={self.meta[key]}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        rows = [[None if isinstance(v, float) and not math.isfinite(v) else v for v in row]
                for row in self.rows]
        return json.dumps({"meta": self.meta, "columns": list(self.columns), "rows": rows},
                          sort_keys=True, indent=1) + "\n"


def _evaluate_2d(M, beta, mu, om, path):
    obs = observables(M, beta, mu, om, path)
    return obs.q, obs.N, obs.S_over_k


def _evaluate_3d(M, beta, mu, om, G, path):
    if path == "sommerfeld":
        obs = observables_3d(M, beta, mu, om, G)
        return obs.q, obs.N, obs.S_over_k
    pt = ThermoPoint(M, beta, mu, om, G / M)
    spec = build_spectrum(M, required_m_max(M, beta, mu, om))
    sums = exact_sums_3d(spec, pt)
    return sums.q, sums.N, sums.S


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b)) if (a or b) else 0.0


def run_compare(cfg: SweepConfig) -> CompareReport:
    pairs = list(itertools.combinations(cfg.paths, 2))
    columns = ["nu", "ell", "G", "M", "beta", "b", "mu", "omega"]
    columns += [f"{qty}_{p}" for p in cfg.paths for qty in QUANTITIES]
    columns += [f"dev_{qty}_{a}_{b}" for a, b in pairs for qty in QUANTITIES]
    columns.append("status")
    rows = []
    worst = 0.0
    failed = 0
    for nu, ell, G, M, (kind, temp) in cfg.grid():
        beta = temp if kind == "beta" else temp / M
        row = [nu, ell, G if G is not None else math.nan, M, beta, beta * M]
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                if cfg.dimension == 2:
                    c, om = solve_potentials(nu, ell)
                    mu = c * M
                    vals = {p: _evaluate_2d(M, beta, mu, om, p) for p in cfg.paths}
                else:
                    mu, om = solve_potentials_3d(nu, ell, G, M, beta)
                    vals = {p: _evaluate_3d(M, beta, mu, om, G, p) for p in cfg.paths}
        except NcgasError as exc:
            pad = len(columns) - len(row) - 1
            rows.append(row + [math.nan] * pad + [f"error:{type(exc).__name__}:{exc}"])
            failed += 1
            continue
        row += [mu, om]
        for p in cfg.paths:
            row += list(vals[p])
        for a, b in pairs:
            devs = [_rel(x, y) for x, y in zip(vals[a], vals[b])]
            worst = max(worst, *devs)
            row += devs
        rows.append(row + ["ok"])
    # a zero tolerance always counts as breached once there is something to compare
    breached = bool(pairs) and (cfg.tolerance == 0 or worst > cfg.tolerance)
    meta = {"version": __version__, "dimension": cfg.dimension, "paths": " ".join(cfg.paths),
            "tolerance": cfg.tolerance, "max_deviation": worst,
            "potentials": "zero-temperature solve at (nu, ell)"}
    return CompareReport(tuple(columns), rows, meta, worst, breached, failed)
