"""Macroscopic thermodynamics of the 2D gas: observables, phase regions, inversion.

Scaled densities are nu = N/(2 M^2) and ell = L/(M^3 hbar).  In the
thermodynamic limit the zero-temperature parts of the closed form give

    nu  = Q0_c(c, w) / 2,      ell = Q0_w(c, w),

and to linear order in temperature S/(M k) = 2 Q1 / beta and
P/M^2 = Q0 / 2, with Q0, Q1 from :func:`ncgas.qpot2d.sommerfeld_coefficients`.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import brentq

from .density import RescaledPoint
from .errors import DomainError, KinkError, RegimeWarning, SolverError
from .qpot2d import (q_partials, q_quadrature, q_sommerfeld,
                     sommerfeld_coefficients, threshold)
from .solvers import damped_newton
from .spectrum import SpectrumTable, ThermoPoint, build_spectrum, exact_sums_2d, required_m_max

PATHS = ("exact", "quadrature", "sommerfeld")
EXACT_M_LIMIT = 200


class Region(enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    FORBIDDEN = "Forbidden"


@dataclass(frozen=True)
class CriticalData:
    nu_c: float
    nu_0: float


@dataclass(frozen=True)
class Observables:
    q: float
    N: float
    L_over_hbar: float
    S_over_k: float
    P_tilde: float
    path: str
    M: float
    beta_t: float
    flags: tuple = field(default=())

    @property
    def nu(self) -> float:
        return self.N / (2.0 * self.M ** 2)

    @property
    def ell(self) -> float:
        return self.L_over_hbar / self.M ** 3

    @property
    def rho_tilde(self) -> float:
        return self.N / (2.0 * self.M + 1.0)


# --- zero-temperature forms -------------------------------------------------

def t0_density(c: float, w: float) -> float:
    """nu(c, w) at T = 0; continuous across c = 0 and the threshold."""
    return 0.5 * sommerfeld_coefficients(c, w, side="+").Q0_c


def t0_angular_momentum(c: float, w: float) -> float:
    """ell(c, w) at T = 0."""
    return sommerfeld_coefficients(c, w, side="+").Q0_w


def t0_entropy_per_M(c: float, w: float, beta_t: float) -> float:
    """S/(M k) to linear order in temperature."""
    return 2.0 * sommerfeld_coefficients(c, w, side="+").Q1 / beta_t


def t0_pressure_per_M2(c: float, w: float) -> float:
    """P/M^2 in the thermodynamic limit at T = 0."""
    return 0.5 * sommerfeld_coefficients(c, w, side="+").Q0


# --- observables -------------------------------------------------------------

def _richardson(fun, x, h):
    d1 = (fun(x + h) - fun(x - h)) / (2 * h)
    d2 = (fun(x + h / 2) - fun(x - h / 2)) / h
    return (4 * d2 - d1) / 3


def observables(M: int, beta_t: float, mu_t: float, omega_t: float, path: str = "sommerfeld",
                *, spectrum: Optional[SpectrumTable] = None, quad_rtol: float = 1e-11) -> Observables:
    """q, N, L, S and P at one point via the chosen evaluation path.

    ``sommerfeld`` differentiates the closed form analytically, ``exact``
    sums occupations over the spectrum (built on demand when ``spectrum``
    is omitted) and ``quadrature`` uses Richardson-extrapolated central
    differences of :func:`ncgas.qpot2d.q_quadrature`.
    """
    if omega_t >= 1:
        raise DomainError(f"omega_t must be < 1, got {omega_t}")
    if path not in PATHS:
        raise ValueError(f"unknown path {path!r}; choose from {PATHS}")
    flags = ()
    if path == "sommerfeld":
        rp = RescaledPoint(M * beta_t, mu_t / M, omega_t)
        q = q_sommerfeld(M, rp)
        side = None
        try:
            q_partials(M, rp)
        except KinkError:
            side = "+"
            flags = ("kink",)
        # assembled from the coefficients rather than q - b dq/db, which cancels at large b
        co = sommerfeld_coefficients(rp.c, rp.w, side)
        b = rp.b
        N = M * M * (co.Q0_c + co.Q1_c / (b * b))
        L = M ** 3 * (co.Q0_w + co.Q1_w / (b * b))
        S = 2.0 * M * M * co.Q1 / b
    elif path == "exact":
        pt = ThermoPoint(int(M), beta_t, mu_t, omega_t)
        if spectrum is None:
            if M > EXACT_M_LIMIT:
                raise DomainError(f"exact path limited to M <= {EXACT_M_LIMIT}, got M={M}")
            spectrum = build_spectrum(int(M), required_m_max(int(M), beta_t, mu_t, omega_t))
        sums = exact_sums_2d(spectrum, pt)
        q, N, L, S = sums.q, sums.N, sums.L, sums.S
    else:
        def qf(mu, om, bt):
            return q_quadrature(M, RescaledPoint(M * bt, mu / M, om), rtol=quad_rtol)

        q = qf(mu_t, omega_t, beta_t)
        dmu = _richardson(lambda v: qf(v, omega_t, beta_t), mu_t, 1e-5 * max(abs(mu_t), 1.0))
        dom = _richardson(lambda v: qf(mu_t, v, beta_t), omega_t, 1e-5 * max(abs(omega_t), 1.0))
        dbt = _richardson(lambda v: qf(mu_t, omega_t, v), beta_t, 1e-5 * beta_t)
        N = dmu / beta_t
        L = dom / beta_t
        S = q - beta_t * dbt
    return Observables(q=q, N=N, L_over_hbar=L, S_over_k=S,
                       P_tilde=q / (beta_t * (2 * M + 1)), path=path,
                       M=M, beta_t=beta_t, flags=flags)


# --- phase diagram ------------------------------------------------------------

def curve_c1(nu: float) -> float:
    return 8.0 * nu ** 1.5 / 3.0 - 2.0 * nu


def curve_c2(nu: float) -> float:
    return nu * (2.0 * nu - 1.0) - 1.0 / 24.0


def curve_c3(nu: float) -> float:
    return 8.0 * nu * nu - 16.0 * nu ** 1.5 / 3.0


def curve_c4(nu: float) -> float:
    return 16.0 * nu ** 1.5 / 3.0 + 8.0 * nu * nu


class BoundaryCurves(NamedTuple):
    """Region boundaries at one nu; NaN where a curve is not defined."""

    C1: float
    C2: float
    C3: float
    C4: float


def boundary_curves(nu: float) -> BoundaryCurves:
    if nu < 0:
        raise DomainError(f"nu must be non-negative, got {nu}")
    low = nu <= 0.25
    high = nu >= 0.25
    return BoundaryCurves(
        curve_c1(nu) if low else math.nan,
        curve_c2(nu) if high else math.nan,
        curve_c3(nu) if low else math.nan,
        curve_c4(nu),
    )


def classify_region(nu: float, ell: float) -> Region:
    """Sign region of (mu, omega) for a state (nu, ell).

    Points on C3 or C4 belong to I, points on C1 to III.
    """
    if not nu > 0:
        raise DomainError(f"nu must be positive, got {nu}")
    if nu <= 0.25:
        if ell < curve_c1(nu):
            return Region.FORBIDDEN
        if ell < curve_c3(nu):
            return Region.III
    elif ell < curve_c2(nu):
        return Region.FORBIDDEN
    if ell <= curve_c4(nu):
        return Region.I
    return Region.II


def critical_density(ell: float) -> CriticalData:
    """Maximum density nu_c at angular momentum ell, and its partner root nu_0."""
    if ell < -1.0 / 6.0:
        raise DomainError(f"ell must be >= -1/6, got {ell}")
    root = 2.0 * math.sqrt(max(18.0 * ell + 3.0, 0.0))
    return CriticalData((3.0 + root) / 12.0, (3.0 - root) / 12.0)


def _forbidden_message(nu: float, ell: float) -> str:
    if nu <= 0.25:
        return (f"(nu={nu}, ell={ell}) is forbidden: ell lies below C1(nu)={curve_c1(nu):.6g}, "
                f"the angular momentum floor")
    if ell >= -1.0 / 6.0:
        nu_c = critical_density(ell).nu_c
        return (f"(nu={nu}, ell={ell}) is forbidden: ell lies below C2(nu)={curve_c2(nu):.6g}; "
                f"density exceeds the maximum nu_c={nu_c:.6g}")
    return (f"(nu={nu}, ell={ell}) is forbidden: ell lies below C2(nu)={curve_c2(nu):.6g} "
            f"and below the floor -1/6")


def potentials_regions_II_III(nu: float, ell: float, sign: int) -> tuple[float, float]:
    """Closed-form (mu/M, omega); sign=+1 for region II, -1 for region III."""
    r = math.sqrt(nu)
    den = 3.0 * ell + sign * 8.0 * nu ** 1.5 + 6.0 * nu
    c = 2.0 + sign * 2.0 * r - (3.0 * ell + 4.0 * (3.0 + sign * 5.0 * r) * nu) / math.sqrt(6.0 * nu * den)
    w = 1.0 - math.sqrt(6.0 * nu / den)
    return c, w


def potentials_near_critical(nu: float, ell: float) -> tuple[float, float]:
    """Leading-order (mu/M, omega) in region I as nu approaches nu_c."""
    cd = critical_density(ell)
    prod = (nu - cd.nu_0) * (cd.nu_c - nu)
    c = 1.0 - (7.0 + 24.0 * ell - 24.0 * nu * (6.0 * nu - 1.0)) / (24.0 * math.sqrt((8.0 * nu + 2.0) * prod))
    w = 1.0 - 0.25 * math.sqrt((8.0 * nu + 2.0) / prod)
    return c, w


def _residual(nu: float, ell: float):
    ell_scale = max(abs(ell), nu ** 1.5)

    def fun(x):
        c, w = x
        if w >= 1:
            return np.array([np.inf, np.inf])
        return np.array([t0_density(c, w) / nu - 1.0,
                         (t0_angular_momentum(c, w) - ell) / ell_scale])
    return fun


def _region_one_bracket(nu: float, ell: float) -> tuple[float, float]:
    """Region I solve: for c >= 0, nu is linear in c, which leaves a 1D root in w."""
    def c_of(w):
        return (4.0 * nu * (1.0 - w) ** 2 - w * w) / (2.0 * (1.0 - w))

    def g(w):
        return t0_angular_momentum(max(c_of(w), 0.0), w) - ell

    r = 2.0 * math.sqrt(nu)
    hi = r / (1.0 + r)
    if r < 1.0:
        lo = -r / (1.0 - r)
    else:
        cd = critical_density(ell)
        if (cd.nu_c - nu) / cd.nu_c < 0.5:
            lo = potentials_near_critical(nu, ell)[1]
            lo = min(lo, -1.0) * 2.0
        else:
            lo = -1.0
        for _ in range(200):
            if g(lo) < 0:
                break
            lo *= 4.0
        else:
            raise SolverError(f"could not bracket omega for (nu={nu}, ell={ell})")
    g_lo, g_hi = g(lo), g(hi)
    slack = 1e-13 * max(abs(ell), nu ** 1.5)
    # on C3 or C4 the root sits on an endpoint, up to rounding
    if abs(g_hi) <= slack:
        return 0.0, hi
    if r < 1.0 and abs(g_lo) <= slack:
        return 0.0, lo
    if g_lo > 0 or g_hi < 0:
        raise SolverError(f"region I bracket [{lo}, {hi}] does not straddle ell={ell}")
    w = brentq(g, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    return max(c_of(w), 0.0), w


def solve_potentials(nu: float, ell: float) -> tuple[float, float]:
    """(mu/M, omega) reproducing (nu, ell) in the thermodynamic limit at T = 0."""
    region = classify_region(nu, ell)
    if region is Region.FORBIDDEN:
        raise DomainError(_forbidden_message(nu, ell))
    fun = _residual(nu, ell)
    if region is Region.I:
        cd = critical_density(ell)
        if nu >= cd.nu_c:
            raise DomainError(f"nu={nu} is at the tight-packing density nu_c={cd.nu_c}; "
                              f"mu and omega diverge there")
        guess = _region_one_bracket(nu, ell)

        def accept(x):
            return x[0] >= 0.0 and x[1] < 1.0
    else:
        sign = 1 if region is Region.II else -1
        guess = potentials_regions_II_III(nu, ell, sign)

        def accept(x):
            return x[0] < 0.0 and x[1] < 1.0 and x[0] >= threshold(x[1]) and sign * x[1] > 0

    try:
        res = damped_newton(fun, guess, tol=1e-14, maxiter=30, accept=accept)
        c, w = res.x
    except SolverError as exc:
        if np.linalg.norm(fun(guess)) < 1e-10:
            c, w = guess
        else:
            raise SolverError(f"no solution for (nu={nu}, ell={ell}) in region {region.value}",
                              best_x=exc.best_x, best_residual=exc.best_residual,
                              trace=exc.trace) from exc
    return float(c), float(w)


@dataclass(frozen=True)
class LimitState:
    """Thermodynamic-limit state at one (nu, ell): potentials and per-size observables."""

    nu: float
    ell: float
    region: Region
    mu_over_M: float
    omega_t: float
    S_over_Mk: float
    P_over_M2: float


def thermo_limit_state(nu: float, ell: float, beta_t: float) -> LimitState:
    c, w = solve_potentials(nu, ell)
    return LimitState(nu, ell, classify_region(nu, ell), c, w,
                      t0_entropy_per_M(c, w, beta_t), t0_pressure_per_M2(c, w))


# --- near the incompressible point -------------------------------------------

class NearCriticalSP(NamedTuple):
    S_over_Mk: float
    P_over_M2: float


def near_critical_SP(nu: float, ell: float, beta_t: float, M: Optional[float] = None) -> NearCriticalSP:
    """Leading singular behaviour of S/(M k) and P/M^2 just below nu_c.

    Both are per-size quantities, so ``M`` does not enter; it is accepted
    for call-site symmetry with the other observables.
    """
    cd = critical_density(ell)
    gap = cd.nu_c - nu
    if gap <= 0:
        raise DomainError(f"nu={nu} >= nu_c={cd.nu_c}: beyond tight packing")
    if nu <= cd.nu_0:
        raise DomainError(f"nu={nu} <= nu_0={cd.nu_0}")
    if gap > 0.1 * cd.nu_c:
        warnings.warn(f"nu_c - nu = {gap:.3g} is not small; near-critical forms are asymptotic",
                      RegimeWarning, stacklevel=2)
    ratio = (cd.nu_c - cd.nu_0) / (1.0 + 4.0 * cd.nu_c)
    S = math.sqrt(ratio) * 2.0 ** 1.5 * math.pi ** 2 / (3.0 * beta_t) * math.sqrt(gap)
    P = (1.0 + 48.0 * cd.nu_c ** 2) / (96.0 * math.sqrt(2.0)) / math.sqrt(ratio) / math.sqrt(gap)
    return NearCriticalSP(S, P)


class IncompressibleScaling(NamedTuple):
    M_c: float
    S_over_k: float
    S_asymptotic: float


def incompressible_scaling(N: int, delta_M: int, beta_t: float) -> IncompressibleScaling:
    """Entropy of N particles in a disc delta_M above its minimal size, at ell = 0.

    ``S_asymptotic`` is the circumference law K sqrt(2 nu_c delta_M) sqrt(M_c)/beta,
    with K the near-critical entropy prefactor.
    """
    if N <= 0:
        raise DomainError(f"N must be positive, got {N}")
    if delta_M < 0:
        raise DomainError(f"delta_M must be non-negative, got {delta_M}")
    cd = critical_density(0.0)
    M_c = math.sqrt(N / (2.0 * cd.nu_c))
    if delta_M >= M_c / 10.0:
        raise DomainError(f"delta_M={delta_M} is not small against M_c={M_c:.4g}")
    K = math.sqrt((cd.nu_c - cd.nu_0) / (1.0 + 4.0 * cd.nu_c)) * 2.0 ** 1.5 * math.pi ** 2 / 3.0
    S_asym = K / beta_t * math.sqrt(2.0 * cd.nu_c * delta_M) * math.sqrt(M_c)
    if delta_M == 0:
        return IncompressibleScaling(M_c, 0.0, 0.0)
    M = M_c + delta_M
    nu = cd.nu_c * M_c ** 2 / M ** 2
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        S = M * near_critical_SP(nu, 0.0, beta_t).S_over_Mk
    return IncompressibleScaling(M_c, S, S_asym)
