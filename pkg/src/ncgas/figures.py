"""Tabulated data behind the entropy, pressure and phase-region plots.

Each figure is a :class:`FigureDataset`: fixed columns, one row per grid
point, and a metadata block holding every parameter needed to regenerate
it.  Rows are computed by module-level functions so they can be farmed out
to worker processes; a failing row keeps its place and reports the error in
its ``status`` column.
"""
from __future__ import annotations

import csv
import io
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Callable, Optional, Sequence

import numpy as np

from . import __version__
from .errors import NcgasError
from .qpot3d import (entropy_3d_asymptotic, observables_3d,
                     solve_potentials_3d)
from .thermo2d import (boundary_curves, classify_region, critical_density, t0_entropy_per_M,
                       t0_pressure_per_M2, solve_potentials)

FIGURE_IDS = ("f3a", "f3b", "f3c", "f3d", "f4a", "f4b", "f2-regions")

COLUMNS = {
    "f3a": ("nu", "region", "S_over_Mk", "S_commutative_over_Mk", "status"),
    "f3c": ("nu", "region", "S_over_Mk", "S_commutative_over_Mk", "status"),
    "f3b": ("M", "nu", "S_over_k", "S_commutative_over_k", "status"),
    "f3d": ("nu", "P_over_M2", "P_commutative_over_M2", "status"),
    "f2-regions": ("nu", "ell", "C1", "C2", "C3", "C4", "region"),
    "f4a": ("nu", "mu_over_M", "omega", "S_over_kM2", "S_low_over_kM2", "S_high_over_kM2", "status"),
    "f4b": ("nu", "mu_over_M", "omega", "S_over_kM2", "S_low_over_kM2", "S_high_over_kM2", "status"),
}

DEFAULTS = {
    "f3a": {"beta": 100.0, "points": 200, "ell": 0.0},
    "f3c": {"beta": 100.0, "points": 200, "ell": 1.2},
    "f3b": {"beta": 100.0, "points": 200, "n": 1_000_000, "ell": 0.0},
    "f3d": {"beta": 100.0, "points": 200, "ell": 0.0},
    "f2-regions": {"points": 41},
    "f4a": {"beta": 100.0, "points": 100, "G": 1.0, "M": 1000, "ell": 0.0},
    "f4b": {"beta": 100.0, "points": 81, "G": 1.0, "M": 1000, "ell": 0.0},
}


@dataclass(frozen=True)
class FigureDataset:
    figure_id: str
    columns: tuple
    rows: list
    meta: dict

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key in sorted(self.meta):
            buf.write(f"# {key}={self.meta[key]}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_fmt(v) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        rows = [[None if isinstance(v, float) and not math.isfinite(v) else v for v in row]
                for row in self.rows]
        return json.dumps({"meta": self.meta, "columns": list(self.columns), "rows": rows},
                          sort_keys=True, indent=1) + "\n"


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _status(exc: Exception) -> str:
    return f"error:{type(exc).__name__}:{exc}".replace(",", ";").replace("\n", " ")


def near_critical_grid(nu_c: float, points: int) -> list[float]:
    """nu in (0, nu_c), clustered quadratically toward nu_c."""
    return [nu_c * (1.0 - (1.0 - i / (points + 1)) ** 2) for i in range(1, points + 1)]


# --- row functions ------------------------------------------------------------

def _row_entropy_2d(nu: float, ell: float, beta: float) -> list:
    commutative = math.pi ** 2 / (3.0 * beta)
    try:
        c, w = solve_potentials(nu, ell)
        return [nu, classify_region(nu, ell).value, t0_entropy_per_M(c, w, beta), commutative, "ok"]
    except NcgasError as exc:
        return [nu, classify_region(nu, ell).value, math.nan, commutative, _status(exc)]


def _row_entropy_vs_M(M: float, N: float, beta: float, nu_c: float) -> list:
    nu = N / (2.0 * M * M)
    commutative = M * math.pi ** 2 / (3.0 * beta)
    if nu >= nu_c:
        # tight packing: a single microstate
        return [M, nu, 0.0, commutative, "ok"]
    try:
        c, w = solve_potentials(nu, 0.0)
        return [M, nu, M * t0_entropy_per_M(c, w, beta), commutative, "ok"]
    except NcgasError as exc:
        return [M, nu, math.nan, commutative, _status(exc)]


def _row_pressure(nu: float, ell: float) -> list:
    # commutative gas: w = 0, c = 2 nu, so P/M^2 = c^2/4
    commutative = nu * nu
    try:
        c, w = solve_potentials(nu, ell)
        return [nu, t0_pressure_per_M2(c, w), commutative, "ok"]
    except NcgasError as exc:
        return [nu, math.nan, commutative, _status(exc)]


def _row_regions(nu: float, ell: float) -> list:
    curves = boundary_curves(nu)
    return [nu, ell, curves.C1, curves.C2, curves.C3, curves.C4, classify_region(nu, ell).value]


def _row_entropy_3d(nu: float, ell: float, G: float, M: float, beta: float) -> list:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        low = entropy_3d_asymptotic(nu, G, M, beta, "low") / M ** 2
        high = entropy_3d_asymptotic(nu, G, M, beta, "high") / M ** 2
    try:
        mu, om = solve_potentials_3d(nu, ell, G, M, beta)
        S = observables_3d(M, beta, mu, om, G).S_over_k / M ** 2
        return [nu, mu / M, om, S, low, high, "ok"]
    except NcgasError as exc:
        return [nu, math.nan, math.nan, math.nan, low, high, _status(exc)]


def _map(fn: Callable, args: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(args) < 2:
        return [fn(a) for a in args]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, args, chunksize=max(1, len(args) // (4 * jobs))))


def _call(fn, kwargs):
    return fn(**kwargs)


def build_figure(figure_id: str, *, beta: Optional[float] = None, n: Optional[float] = None,
                 points: Optional[int] = None, G: Optional[float] = None, M: Optional[int] = None,
                 jobs: int = 1) -> FigureDataset:
    """Compute the dataset for one figure id; ``None`` arguments take the defaults."""
    if figure_id not in FIGURE_IDS:
        raise ValueError(f"unknown figure id {figure_id!r}; choose from {', '.join(FIGURE_IDS)}")
    params = dict(DEFAULTS[figure_id])
    for key, val in (("beta", beta), ("n", n), ("points", points), ("G", G), ("M", M)):
        if val is not None:
            if key not in params:
                raise ValueError(f"figure {figure_id} does not take --{key}")
            params[key] = val
    if params["points"] < 2:
        raise ValueError("points must be at least 2")
    K = int(params["points"])
    tasks: list[dict] = []
    fn: Callable
    path = "sommerfeld, zero-temperature limit of the potentials"
    if figure_id in ("f3a", "f3c"):
        ell = params["ell"]
        nu_c = critical_density(ell).nu_c
        params["nu_c"] = nu_c
        fn = partial(_row_entropy_2d, ell=ell, beta=params["beta"])
        tasks = [{"nu": nu} for nu in near_critical_grid(nu_c, K)]
    elif figure_id == "f3b":
        nu_c = critical_density(0.0).nu_c
        N = float(params["n"])
        M_c = math.sqrt(N / (2.0 * nu_c))
        params.update(nu_c=nu_c, M_c=M_c)
        fn = partial(_row_entropy_vs_M, N=N, beta=params["beta"], nu_c=nu_c)
        tasks = [{"M": M_c * (1.0 + 2.0 * i / (K - 1))} for i in range(K)]
    elif figure_id == "f3d":
        nu_c = critical_density(0.0).nu_c
        params["nu_c"] = nu_c
        fn = partial(_row_pressure, ell=params["ell"])
        tasks = [{"nu": nu} for nu in near_critical_grid(nu_c, K)]
    elif figure_id == "f2-regions":
        params.update(nu_range="[0.02, 1]", ell_range="[-0.2, 1]")
        fn = _row_regions
        nus = np.linspace(0.02, 1.0, K)
        ells = np.linspace(-0.2, 1.0, K)
        tasks = [{"nu": float(a), "ell": float(b)} for a in nus for b in ells]
        path = "closed-form boundary curves"
    else:
        fn = partial(_row_entropy_3d, ell=params["ell"], G=params["G"], M=params["M"],
                     beta=params["beta"])
        if figure_id == "f4a":
            params["nu_range"] = "[0.05, 5]"
            tasks = [{"nu": float(v)} for v in np.linspace(0.05, 5.0, K)]
        else:
            params["nu_range"] = "[1e-4, 1e4]"
            tasks = [{"nu": float(v)} for v in np.logspace(-4.0, 4.0, K)]
        path = "sommerfeld integral over longitudinal modes, b = M beta"
    rows = _map(partial(_call, fn), tasks, jobs)
    meta = {"figure": figure_id, "version": __version__, "path": path,
            **{k: v for k, v in sorted(params.items())}}
    return FigureDataset(figure_id, COLUMNS[figure_id], rows, meta)
