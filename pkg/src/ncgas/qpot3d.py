"""Three-dimensional gas: a cylinder of non-commutative discs stacked along z.

The q-potential is a sum over longitudinal modes n of 2D potentials with
the chemical potential lowered by gamma n^2, gamma = G/M.  Replacing the sum
by an integral over s = n/M gives

    q3d = M^3 (b R0(c, w, G) + R1(c, w, G) / b),
    R_k = integral over s of Q_k(c - G s^2, w),

and because Q0 and Q1 are polynomials in their first argument on each side
of c = 0, every R_k is an exact polynomial integral.  Scaled densities are
nu = N/M^3 and ell = L/(hbar M^4).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from math import comb
from typing import NamedTuple, Sequence

import numpy as np

from .density import RescaledPoint
from .errors import DomainError, RegimeWarning, SolverError
from .qpot2d import PI2, q_sommerfeld, threshold
from .solvers import damped_newton

# reference high-density constants, used as starting points and for comparison
MU_HIGH = 0.72703
OMEGA_HIGH = 0.82342
ENTROPY_HIGH = 4.2397
ETA = 6.4757e-4


@dataclass(frozen=True)
class Geometry3D:
    """Cylinder of radius R, R^2 = theta (2M + 1), and shape G = (pi/2)^2 (R/L)^2."""

    M: int
    G: float

    def __post_init__(self):
        if self.M <= 0:
            raise DomainError(f"M must be positive, got {self.M}")
        if not self.G > 0:
            raise DomainError(f"G must be positive, got {self.G}")

    @property
    def gamma_t(self) -> float:
        return self.G / self.M

    @property
    def V_tilde(self) -> float:
        """Volume in units of theta^{3/2}: pi R^2 L with L = (pi/2) R / sqrt(G)."""
        r2 = 2 * self.M + 1
        return math.pi ** 2 / 2 * r2 ** 1.5 / math.sqrt(self.G)

    def rho_tilde(self, N: float) -> float:
        return N / self.V_tilde


@dataclass(frozen=True)
class MacroState3D:
    nu: float
    ell: float


def longitudinal_cutoff(mu_t: float, omega_t: float, gamma_t: float, M: float) -> float:
    """Mode number n_+ where mu - gamma n^2 reaches the 2D threshold M w^2/(w - 1)."""
    if gamma_t <= 0:
        raise DomainError(f"gamma_t must be positive, got {gamma_t}")
    if omega_t >= 1:
        raise DomainError(f"omega_t must be < 1, got {omega_t}")
    excess = mu_t - M * threshold(omega_t)
    if excess <= 0:
        return 0.0
    return math.sqrt(excess / gamma_t)


class Potential3D(NamedTuple):
    """R0, R1 and their c and w partials."""

    R0: float
    R1: float
    R0_c: float
    R0_w: float
    R1_c: float
    R1_w: float


_ZERO = Potential3D(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


def _segment(k: int, c: float, G: float, s1: float, s2: float) -> float:
    """Integral of (c - G s^2)^k over [s1, s2]."""
    total = 0.0
    for j in range(k + 1):
        p = 2 * j + 1
        total += comb(k, j) * c ** (k - j) * (-G) ** j * (s2 ** p - s1 ** p) / p
    return total


def potential_coefficients(c: float, w: float, G: float) -> Potential3D:
    """Exact s-integrals of the 2D closed-form coefficients.

    With c' = c - G s^2 the 2D coefficients are
    Q0 = A0 + A1 c' + A2 c'^2 (+ A3 c'^3 for c' < 0) and
    Q1 = B0 (+ B1 c' for c' < 0).  Q0, Q0_c and Q1 vanish at the threshold and
    are continuous at c' = 0, so derivatives pass under the integral.
    """
    if w >= 1:
        raise DomainError(f"w must be < 1, got {w}")
    if not G > 0:
        raise DomainError(f"G must be positive, got {G}")
    thr = threshold(w)
    if c <= thr:
        return _ZERO
    s_top = math.sqrt((c - thr) / G)
    s_mid = math.sqrt(c / G) if c > 0 else 0.0
    wm1 = w - 1.0
    A = (-w ** 4 / (6 * wm1 ** 3), w * w / (2 * wm1 ** 2), -1.0 / (2 * wm1))
    dA = (-w ** 3 * (w - 4) / (6 * wm1 ** 4), -w / wm1 ** 3, 1.0 / (2 * wm1 ** 2))
    B0 = -PI2 / (6 * wm1)
    dB0 = PI2 / (6 * wm1 ** 2)
    J = [_segment(k, c, G, 0.0, s_top) for k in range(3)]
    R0 = sum(A[k] * J[k] for k in range(3))
    R0_c = A[1] * J[0] + 2 * A[2] * J[1]
    R0_w = sum(dA[k] * J[k] for k in range(3))
    R1 = B0 * s_top
    R1_c = 0.0
    R1_w = dB0 * s_top
    if s_top > s_mid:
        # c' < 0 part; w != 0 here because c > thr and the piece is non-empty
        A3 = 1.0 / (6 * w * w)
        dA3 = -1.0 / (3 * w ** 3)
        B1 = PI2 / (6 * w * w)
        dB1 = -PI2 / (3 * w ** 3)
        K2 = _segment(2, c, G, s_mid, s_top)
        K3 = _segment(3, c, G, s_mid, s_top)
        K1 = _segment(1, c, G, s_mid, s_top)
        R0 += A3 * K3
        R0_c += 3 * A3 * K2
        R0_w += dA3 * K3
        R1 += B1 * K1
        R1_c += B1 * (s_top - s_mid)
        R1_w += dB1 * K1
    return Potential3D(R0, R1, R0_c, R0_w, R1_c, R1_w)


def q3d(M: float, beta_t: float, mu_t: float, omega_t: float, G: float) -> float:
    """Integral over longitudinal modes of the shifted 2D closed form."""
    b = M * beta_t
    co = potential_coefficients(mu_t / M, omega_t, G)
    return M ** 3 * (b * co.R0 + co.R1 / b)


def q3d_sum(M: float, beta_t: float, mu_t: float, omega_t: float, G: float) -> float:
    """Mode sum n = 1, 2, ... of the shifted 2D closed form, stopped at the threshold."""
    if omega_t >= 1:
        raise DomainError(f"omega_t must be < 1, got {omega_t}")
    gamma_t = G / M
    b = M * beta_t
    thr = threshold(omega_t)
    terms = []
    n = 1
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        while True:
            c_n = (mu_t - gamma_t * n * n) / M
            if c_n <= thr:
                break
            terms.append(q_sommerfeld(M, RescaledPoint(b, c_n, omega_t)))
            n += 1
    return math.fsum(terms)


@dataclass(frozen=True)
class Observables3D:
    q: float
    N: float
    L_over_hbar: float
    S_over_k: float
    E: float
    PV: float
    M: float
    beta_t: float
    G: float

    @property
    def nu(self) -> float:
        return self.N / self.M ** 3

    @property
    def ell(self) -> float:
        return self.L_over_hbar / self.M ** 4

    @property
    def pressure_energy_ratio(self) -> float:
        return self.PV / self.E


def observables_3d(M: float, beta_t: float, mu_t: float, omega_t: float, G: float) -> Observables3D:
    """Observables from the integral form.

    E is the mean single-particle energy, -dq/dbeta at fixed mu and omega
    plus mu N + omega L, and PV = q/beta (all in units of E0).
    """
    b = M * beta_t
    c, w = mu_t / M, omega_t
    co = potential_coefficients(c, w, G)
    ib2 = 1.0 / (b * b)
    m3 = M ** 3
    nu = co.R0_c + co.R1_c * ib2
    ell = co.R0_w + co.R1_w * ib2
    q = m3 * (b * co.R0 + co.R1 / b)
    E = M ** 4 * (-co.R0 + co.R1 * ib2 + c * nu + w * ell)
    return Observables3D(q=q, N=m3 * nu, L_over_hbar=M ** 4 * ell,
                         S_over_k=2.0 * m3 * co.R1 / b, E=E, PV=M ** 4 * (co.R0 + co.R1 * ib2),
                         M=M, beta_t=beta_t, G=G)


def _initial_guess(nu: float, G: float) -> tuple[float, float]:
    if nu < 1.0:
        return (9 * G * nu * nu / 4) ** (1 / 3), -(18 * G * nu * nu) ** (1 / 3) / 5
    return MU_HIGH * G * nu * nu, -OMEGA_HIGH * G * nu * nu


def _solve_scaled(nu: float, ell: float, G: float, inv_b2: float, guess) -> np.ndarray:
    ell_scale = max(abs(ell), nu * min(1.0, nu ** (1 / 3)))

    def fun(x):
        c, w = x
        co = potential_coefficients(c, w, G)
        return np.array([(co.R0_c + co.R1_c * inv_b2) / nu - 1.0,
                         (co.R0_w + co.R1_w * inv_b2 - ell) / ell_scale])

    def accept(x):
        return x[1] < 1.0 and x[0] > threshold(x[1])

    return damped_newton(fun, guess, tol=1e-12, maxiter=200, accept=accept).x


def _continuation(nu, ell, G, inv_b2, guess, steps=20):
    """Ramp ell from 0 and the thermal term from zero temperature up to the target."""
    x = _solve_scaled(nu, 0.0, G, 0.0, guess)
    for frac in np.linspace(0.0, 1.0, steps + 1)[1:]:
        x = _solve_scaled(nu, frac * ell, G, frac * inv_b2, x)
    return x


def solve_potentials_3d(nu: float, ell: float, G: float, M: float, beta_t: float) -> tuple[float, float]:
    """(mu, omega) with N = nu M^3 and L = ell hbar M^4; beta_t may be ``inf`` for T = 0.

    Starts from the low- or high-density asymptotic potentials.  If that
    fails, the zero-temperature, ell = 0 solution is continued to the target.
    Angular momentum is bounded below by ell > -nu.
    At small nu b the thermal correction can dominate and no solution of the
    low-temperature equations may exist; :class:`SolverError` is raised then.
    """
    if not nu > 0:
        raise DomainError(f"nu must be positive, got {nu}")
    if not G > 0:
        raise DomainError(f"G must be positive, got {G}")
    if ell <= -nu:
        # sectors start at m = -M, so L > -M N
        raise DomainError(f"ell={ell} is unreachable: ell must exceed -nu = {-nu}")
    b = M * beta_t
    inv_b2 = 0.0 if math.isinf(b) else 1.0 / (b * b)
    guess = _initial_guess(nu, G)
    try:
        c, w = _solve_scaled(nu, ell, G, inv_b2, guess)
    except SolverError:
        c, w = _continuation(nu, ell, G, inv_b2, guess)
    return float(c * M), float(w)


def entropy_3d_asymptotic(nu: float, G: float, M: float, beta_t: float, regime: str) -> float:
    """S/k from the low- or high-density law (S/(k M^2) times M^2), at ell = 0."""
    if regime not in ("low", "high"):
        raise ValueError(f"regime must be 'low' or 'high', got {regime!r}")
    if regime == "low" and nu > 1e-2 or regime == "high" and nu < 1e2:
        warnings.warn(f"nu={nu} is outside the {regime}-density regime", RegimeWarning, stacklevel=2)
    if regime == "low":
        per_m2 = (math.pi ** 6 / (18 * G * beta_t ** 3)) ** (1 / 3) * nu ** (1 / 3)
    else:
        per_m2 = ENTROPY_HIGH / (G * beta_t * nu)
    return M * M * per_m2


def entropy_3d_volume_form(N: float, geom: Geometry3D, beta_t: float, regime: str) -> float:
    """Asymptotic S/k written through the dimensionless volume and density."""
    V = geom.V_tilde
    rho = geom.rho_tilde(N)
    if regime == "low":
        return (math.pi / 6) ** (2 / 3) * V * rho ** (1 / 3) / beta_t
    if regime == "high":
        return ETA * geom.G ** (2 / 3) * V ** (7 / 3) / (beta_t * rho)
    raise ValueError(f"regime must be 'low' or 'high', got {regime!r}")


def pressure_energy_ratio(nu: float, ell: float, G: float, M: float, beta_t: float) -> float:
    """PV/E at the solved state; 2/3 for a 3D ideal gas, 2 in one dimension."""
    mu_t, omega_t = solve_potentials_3d(nu, ell, G, M, beta_t)
    return observables_3d(M, beta_t, mu_t, omega_t, G).pressure_energy_ratio


class HighDensityConstants(NamedTuple):
    mu_coeff: float
    omega_coeff: float
    entropy_coeff: float


def high_density_constants(G: float = 1.0, nus: Sequence[float] = (250.0, 500.0, 1000.0, 2000.0, 4000.0),
                           degree: int = 2) -> HighDensityConstants:
    """Large-nu limits of mu/(M G nu^2), -omega/(G nu^2) and S G beta nu/(k M^2) at ell = 0.

    Solves the zero-temperature equations at each nu and extrapolates a
    polynomial in 1/nu to 1/nu = 0.
    """
    rows = []
    for nu in nus:
        c, w = _solve_scaled(nu, 0.0, G, 0.0, _initial_guess(nu, G))
        co = potential_coefficients(c, w, G)
        rows.append((c / (G * nu * nu), -w / (G * nu * nu), 2.0 * co.R1 * G * nu))
    x = 1.0 / np.asarray(nus)
    ys = np.asarray(rows)
    deg = min(degree, len(nus) - 1)
    limits = [np.polynomial.polynomial.polyfit(x, ys[:, j], deg)[0] for j in range(3)]
    return HighDensityConstants(*limits)
