"""Exact single-particle spectrum of the non-commutative disc and direct-sum grand potentials.

Energies in units of E0 = hbar^2/(theta m0) are the zeros x_{r,m} of the
generalized Laguerre polynomial L_{M+1}^m (m >= 0) or L_{M+m+1}^{|m|}
(-M <= m < 0).  The grand potentials here are brute-force sums over that
spectrum and serve as the finite-size oracle for the asymptotic formulas.
"""
from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType
from typing import Mapping, NamedTuple, Optional

import numpy as np
from scipy import special
from scipy.linalg import LinAlgError, eigvalsh_tridiagonal
from scipy.optimize import brentq

from .errors import DomainError, SpectrumError, TruncationError

# exponent beyond which a log(1 + e^-z) term is below ~6e-16
TAIL_EXPONENT = 35.0
# largest admissible term at the truncation edge
TAIL_TERM = 1e-14


@dataclass(frozen=True)
class ThermoPoint:
    """Dimensionless control parameters (M, beta, mu, omega[, gamma])."""

    M: int
    beta_t: float
    mu_t: float
    omega_t: float
    gamma_t: Optional[float] = None

    def __post_init__(self):
        if self.M < 0 or int(self.M) != self.M:
            raise DomainError(f"M must be a non-negative integer, got {self.M}")
        if not self.beta_t > 0:
            raise DomainError(f"beta_t must be positive, got {self.beta_t}")
        if self.gamma_t is not None and self.gamma_t < 0:
            raise DomainError(f"gamma_t must be non-negative, got {self.gamma_t}")

    def shifted(self, dmu: float) -> "ThermoPoint":
        return ThermoPoint(self.M, self.beta_t, self.mu_t + dmu, self.omega_t, self.gamma_t)


def _laguerre_ratio(n: int, a: float, x: np.ndarray) -> np.ndarray:
    """Newton correction L_n^a(x) / (d/dx L_n^a(x)) from the three-term recurrence.

    Both recurrence terms are rescaled together so large n and a do not
    overflow; the ratio is scale free.
    """
    p_prev = np.ones_like(x)
    p = 1.0 + a - x
    for k in range(1, n):
        p_next = ((2 * k + 1 + a - x) * p - (k + a) * p_prev) / (k + 1)
        p_prev, p = p, p_next
        big = np.abs(p) > 1e150
        if big.any():
            scale = np.where(big, np.abs(p), 1.0)
            p = p / scale
            p_prev = p_prev / scale
    # x L_n' = n L_n - (n + a) L_{n-1}
    deriv_times_x = n * p - (n + a) * p_prev
    return x * p / deriv_times_x


def laguerre_zeros(n: int, a: float) -> np.ndarray:
    """All ``n`` zeros of the generalized Laguerre polynomial ``L_n^a``, ascending.

    The zeros are eigenvalues of the symmetric tridiagonal Jacobi matrix with
    diagonal 2k+a+1 and off-diagonal sqrt(k(k+a)); each is then polished by
    one Newton step on the three-term recurrence.
    """
    if n < 1 or int(n) != n:
        raise DomainError(f"n must be a positive integer, got {n}")
    if a <= -1:
        raise DomainError(f"Laguerre parameter must exceed -1, got {a}")
    n = int(n)
    k = np.arange(n, dtype=float)
    diag = 2.0 * k + a + 1.0
    kk = np.arange(1, n, dtype=float)
    off = np.sqrt(kk * (kk + a))
    try:
        x = eigvalsh_tridiagonal(diag, off, check_finite=True)
    except (LinAlgError, ValueError) as exc:
        raise SpectrumError(f"tridiagonal eigensolver failed for (n={n}, a={a}): {exc}") from exc
    if n > 1:
        with np.errstate(all="ignore"):
            step = _laguerre_ratio(n, a, x)
        gaps = np.diff(x)
        room = np.minimum(np.r_[np.inf, gaps], np.r_[gaps, np.inf])
        # a genuine polish is tiny; anything else is recurrence noise
        ok = np.isfinite(step) & (np.abs(step) < 1e-6 * room)
        x = np.where(ok, x - step, x)
    x.sort()
    if not (np.all(np.isfinite(x)) and x[0] > 0 and np.all(np.diff(x) > 0)):
        raise SpectrumError(f"Laguerre zeros for (n={n}, a={a}) are not positive and distinct")
    return x


def _smallest_zero(n: int, a: float) -> float:
    k = np.arange(n, dtype=float)
    kk = np.arange(1, n, dtype=float)
    if n == 1:
        return a + 1.0
    try:
        val = eigvalsh_tridiagonal(2.0 * k + a + 1.0, np.sqrt(kk * (kk + a)),
                                   select="i", select_range=(0, 0))
    except (LinAlgError, ValueError) as exc:
        raise SpectrumError(f"tridiagonal eigensolver failed for (n={n}, a={a}): {exc}") from exc
    return float(val[0])


def sector_size(M: int, m: int) -> int:
    """Number of levels in angular-momentum sector ``m`` (0 below -M)."""
    if m >= 0:
        return M + 1
    return max(M + m + 1, 0)


def sector_zeros(M: int, m: int) -> np.ndarray:
    n = sector_size(M, m)
    if n == 0:
        raise DomainError(f"sector m={m} is empty for M={M}")
    return laguerre_zeros(n, abs(m))


@dataclass(frozen=True)
class SpectrumTable:
    """Immutable table of exact levels, sectors m = -M .. m_max."""

    M: int
    sectors: Mapping[int, np.ndarray]

    def __post_init__(self):
        frozen = {}
        for m, xs in sorted(self.sectors.items()):
            arr = np.array(xs, dtype=float)
            arr.setflags(write=False)
            frozen[int(m)] = arr
        object.__setattr__(self, "sectors", MappingProxyType(frozen))

    @property
    def m_max(self) -> int:
        return max(self.sectors)

    @property
    def m_min(self) -> int:
        return min(self.sectors)

    @cached_property
    def levels(self) -> tuple[np.ndarray, np.ndarray]:
        """Flattened ``(x, m)`` arrays over all sectors."""
        xs = np.concatenate([self.sectors[m] for m in sorted(self.sectors)])
        ms = np.concatenate([np.full(len(self.sectors[m]), m, dtype=float)
                             for m in sorted(self.sectors)])
        xs.setflags(write=False)
        ms.setflags(write=False)
        return xs, ms

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(f"# M={self.M}\n# m_max={self.m_max}\n")
            writer = csv.writer(fh)
            writer.writerow(["m", "r", "x"])
            for m in sorted(self.sectors):
                for r, x in enumerate(self.sectors[m], start=1):
                    writer.writerow([m, r, repr(float(x))])

    @classmethod
    def from_csv(cls, path) -> "SpectrumTable":
        meta = {}
        rows: dict[int, list[tuple[int, float]]] = {}
        with open(path, newline="") as fh:
            lines = []
            for line in fh:
                if line.startswith("#"):
                    key, _, val = line[1:].strip().partition("=")
                    meta[key.strip()] = val.strip()
                else:
                    lines.append(line)
        reader = csv.DictReader(lines)
        for row in reader:
            rows.setdefault(int(row["m"]), []).append((int(row["r"]), float(row["x"])))
        if "M" not in meta:
            raise ValueError(f"{path}: missing '# M=' metadata line")
        M = int(meta["M"])
        sectors = {m: [x for _, x in sorted(v)] for m, v in rows.items()}
        for m, xs in sectors.items():
            if len(xs) != sector_size(M, m):
                raise ValueError(f"{path}: sector {m} has {len(xs)} zeros, expected {sector_size(M, m)}")
        return cls(M, sectors)


def build_spectrum(M: int, m_max: int) -> SpectrumTable:
    """Exact levels for sectors -M .. m_max of a disc of size M."""
    if M < 0 or int(M) != M:
        raise DomainError(f"M must be a non-negative integer, got {M}")
    if m_max < 0:
        raise DomainError(f"m_max must be non-negative, got {m_max}")
    return SpectrumTable(int(M), {m: sector_zeros(int(M), m) for m in range(-int(M), int(m_max) + 1)})


def load_or_build(M: int, m_max: int, cache_dir) -> SpectrumTable:
    """Spectrum cached as ``spectrum_M{M}_m{m_max}.csv`` under ``cache_dir``."""
    os.makedirs(cache_dir, exist_ok=True)
    path = os.path.join(cache_dir, f"spectrum_M{M}_m{m_max}.csv")
    if os.path.exists(path):
        return SpectrumTable.from_csv(path)
    table = build_spectrum(M, m_max)
    table.to_csv(path)
    return table


def required_m_max(M: int, beta_t: float, mu_t: float, omega_t: float) -> int:
    """Smallest sector cut beyond which every omitted term is below ~1e-15.

    Stops at the first m >= 1 where beta*(x_{1,m} - mu - omega*m) exceeds
    TAIL_EXPONENT and x_{1,m} - omega*m is increasing.  The smallest zero is
    convex in the Laguerre parameter, so the exponent keeps growing past
    that point.
    """
    if omega_t >= 1:
        raise DomainError(f"omega_t must be < 1 for a convergent sum, got {omega_t}")
    prev = _smallest_zero(M + 1, 0.0)
    m = 1
    while True:
        x1 = _smallest_zero(M + 1, float(m))
        rising = (x1 - prev) > omega_t
        if rising and beta_t * (x1 - mu_t - omega_t * m) > TAIL_EXPONENT:
            return m
        prev = x1
        m += 1
        if m > 10_000_000:
            raise SpectrumError("sector cut search did not terminate")


def _softplus_neg(z: np.ndarray) -> np.ndarray:
    """log(1 + e^-z) for either sign of z."""
    return np.logaddexp(0.0, -z)


def _check_tail(spec: SpectrumTable, pt: ThermoPoint) -> None:
    m = spec.m_max
    top = spec.sectors[m]
    z_edge = pt.beta_t * (top[0] - pt.mu_t - pt.omega_t * m)
    rising = True
    if m - 1 in spec.sectors and m - 1 >= 0:
        rising = (top[0] - spec.sectors[m - 1][0]) > pt.omega_t
    if not (z_edge > -math.log(TAIL_TERM) and rising):
        need = required_m_max(spec.M, pt.beta_t, pt.mu_t, pt.omega_t)
        raise TruncationError(
            f"spectrum truncated at m_max={m} leaves a tail term "
            f"exp(-{z_edge:.3g}); rebuild with m_max >= {need}")


def q_exact_2d(spec: SpectrumTable, pt: ThermoPoint) -> float:
    """sum_{m,r} log(1 + exp(-beta (x_{r,m} - mu - omega m))), compensated."""
    if pt.omega_t >= 1:
        raise DomainError(f"omega_t must be < 1, got {pt.omega_t}")
    if spec.M != pt.M:
        raise DomainError(f"spectrum built for M={spec.M}, point has M={pt.M}")
    _check_tail(spec, pt)
    xs, ms = spec.levels
    z = pt.beta_t * (xs - pt.mu_t - pt.omega_t * ms)
    return math.fsum(_softplus_neg(z))


class ExactSums(NamedTuple):
    """Direct spectral sums at one point.

    ``q`` is the q-potential, ``N`` and ``L`` the occupation and angular
    momentum sums, ``E`` the occupation-weighted single-particle energy, and
    ``S`` the entropy q + beta * sum n_F (e - mu - omega m).
    """

    q: float
    N: float
    L: float
    E: float
    S: float


def _sums(e: np.ndarray, ms: np.ndarray, pt: ThermoPoint) -> ExactSums:
    arg = e - pt.mu_t - pt.omega_t * ms
    z = pt.beta_t * arg
    occ = special.expit(-z)
    q = math.fsum(_softplus_neg(z))
    return ExactSums(
        q=q,
        N=math.fsum(occ),
        L=math.fsum(occ * ms),
        E=math.fsum(occ * e),
        S=q + pt.beta_t * math.fsum(occ * arg),
    )


def exact_sums_2d(spec: SpectrumTable, pt: ThermoPoint) -> ExactSums:
    if pt.omega_t >= 1:
        raise DomainError(f"omega_t must be < 1, got {pt.omega_t}")
    _check_tail(spec, pt)
    xs, ms = spec.levels
    return _sums(xs, ms, pt)


def required_n_max(spec: SpectrumTable, pt: ThermoPoint) -> int:
    """Smallest longitudinal cut whose last mode contributes below TAIL_TERM."""
    if not pt.gamma_t or pt.gamma_t <= 0:
        raise DomainError("gamma_t must be positive for a three-dimensional sum")
    xs, ms = spec.levels
    floor = float(np.min(xs - pt.omega_t * ms))
    # total weight of one mode is at most count * exp(-beta * gap)
    need = (-math.log(TAIL_TERM) + math.log(len(xs))) / pt.beta_t
    gap_needed = pt.mu_t - floor + need
    if gap_needed <= pt.gamma_t:
        return 1
    return max(1, math.ceil(math.sqrt(gap_needed / pt.gamma_t)))


def _mode_point(pt: ThermoPoint, n: int) -> ThermoPoint:
    return ThermoPoint(pt.M, pt.beta_t, pt.mu_t - pt.gamma_t * n * n, pt.omega_t, pt.gamma_t)


def q_exact_3d(spec: SpectrumTable, pt: ThermoPoint, n_max: int) -> float:
    """Sum over longitudinal modes n = 1..n_max of the shifted 2D sums."""
    if pt.gamma_t is None or pt.gamma_t <= 0:
        raise DomainError("gamma_t must be positive for a three-dimensional sum")
    if n_max < 1:
        raise DomainError(f"n_max must be positive, got {n_max}")
    terms = [q_exact_2d(spec, _mode_point(pt, n)) for n in range(1, n_max + 1)]
    if terms[-1] >= TAIL_TERM:
        raise TruncationError(
            f"mode n={n_max} still contributes {terms[-1]:.3g}; "
            f"use n_max >= {required_n_max(spec, pt)}")
    return math.fsum(terms)


def exact_sums_3d(spec: SpectrumTable, pt: ThermoPoint, n_max: Optional[int] = None) -> ExactSums:
    """Like :func:`exact_sums_2d` over all longitudinal modes; E includes gamma n^2."""
    if n_max is None:
        n_max = required_n_max(spec, pt)
    xs, ms = spec.levels
    parts = []
    for n in range(1, n_max + 1):
        shift = pt.gamma_t * n * n
        mode = _mode_point(pt, n)
        _check_tail(spec, mode)
        parts.append(_sums(xs + shift, ms, pt))
    if parts[-1].q >= TAIL_TERM:
        raise TruncationError(f"mode n={n_max} still contributes {parts[-1].q:.3g}")
    return ExactSums(*(math.fsum(col) for col in zip(*parts)))


def bessel_zeros(m: int, count: int) -> np.ndarray:
    """First ``count`` positive zeros of J_m by bracketing and Brent refinement."""
    if count < 1:
        raise DomainError(f"count must be positive, got {count}")
    if m < 0 or int(m) != m:
        raise DomainError(f"m must be a non-negative integer, got {m}")
    # consecutive zeros are more than 3 apart, so a step of pi/4 cannot skip one
    step = math.pi / 4
    # McMahon: j_{m,r} ~ (r + m/2 - 1/4) pi
    upper = (count + m / 2 + 2) * math.pi + 2 * m + 10
    grid = np.arange(float(m), upper + step, step)
    vals = special.jv(m, grid)
    idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    if len(idx) < count:
        raise SpectrumError(f"found only {len(idx)} of {count} zeros of J_{m} below {upper:.1f}")
    f = lambda x: special.jv(m, x)
    roots = [brentq(f, grid[i], grid[i + 1], xtol=1e-14, rtol=4 * np.finfo(float).eps)
             for i in idx[:count]]
    return np.array(roots)
