"""Asymptotic level densities in the rescaled (epsilon, alpha) plane.

Rescaled variables: epsilon = x/M, alpha = m/M, b = M beta, c = mu/M, w = omega.
A sector alpha carries levels on the band [eps_-(alpha), eps_+(alpha)] with
density d(eps, alpha); f(alpha) = c + w alpha is the effective chemical
potential of that sector.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, NoIntersectionError
from .spectrum import ThermoPoint

EDGE_SLACK = 1e-14


@dataclass(frozen=True)
class RescaledPoint:
    b: float
    c: float
    w: float

    def __post_init__(self):
        if not self.b > 0:
            raise DomainError(f"b must be positive, got {self.b}")

    def f(self, alpha: float) -> float:
        """Fermi line c + w*alpha."""
        return self.c + self.w * alpha

    @classmethod
    def from_thermo(cls, pt: ThermoPoint) -> "RescaledPoint":
        return cls(b=pt.M * pt.beta_t, c=pt.mu_t / pt.M, w=pt.omega_t)

    def to_thermo(self, M: int) -> ThermoPoint:
        return ThermoPoint(M, self.b / M, self.c * M, self.w)


@dataclass(frozen=True)
class SupportBand:
    alpha: float
    eps_minus: float
    eps_plus: float

    @property
    def width(self) -> float:
        return self.eps_plus - self.eps_minus

    @property
    def center(self) -> float:
        return 0.5 * (self.eps_plus + self.eps_minus)

    def contains(self, eps: float, slack: float = EDGE_SLACK) -> bool:
        return self.eps_minus - slack <= eps <= self.eps_plus + slack


def eps_bounds(alpha: float) -> SupportBand:
    """Band edges alpha + 2 -+ 2 sqrt(alpha + 1)."""
    if alpha < -1:
        raise DomainError(f"alpha must be >= -1, got {alpha}")
    root = 2.0 * math.sqrt(alpha + 1.0)
    lo = alpha + 2.0 - root
    if alpha != 0 and lo <= 0:
        # (sqrt(alpha+1) - 1)^2 avoids cancellation near alpha = 0
        lo = (math.sqrt(alpha + 1.0) - 1.0) ** 2
    return SupportBand(alpha, max(lo, 0.0), alpha + 2.0 + root)


def band_radicand(eps: float, band: SupportBand) -> float:
    """(eps_+ - eps)(eps - eps_-), i.e. 4 eps - (alpha - eps)^2, or 0 at an edge."""
    if not band.contains(eps):
        raise DomainError(
            f"eps={eps} outside band [{band.eps_minus}, {band.eps_plus}] of alpha={band.alpha}")
    if abs(eps - band.eps_minus) <= EDGE_SLACK or abs(eps - band.eps_plus) <= EDGE_SLACK:
        return 0.0
    return max((band.eps_plus - eps) * (eps - band.eps_minus), 0.0)


def zero_density_scaled(eps: float, alpha: float) -> float:
    """d(eps, alpha) = sqrt(4 eps - (alpha - eps)^2) / (2 pi eps)."""
    band = eps_bounds(alpha)
    rad = band_radicand(eps, band)
    if rad == 0.0:
        return 0.0
    return math.sqrt(rad) / (2.0 * math.pi * eps)


def zero_density_unscaled(x: float, m: float, M: float) -> float:
    """Asymptotic density of Laguerre zeros D(x, m) = sqrt(4Mx - (m-x)^2) / (2 pi x)."""
    if M <= 0:
        raise DomainError(f"M must be positive, got {M}")
    rad = 4.0 * M * x - (m - x) ** 2
    scale = max(abs(4.0 * M * x), (m - x) ** 2, 1.0)
    if rad < 0:
        if rad < -EDGE_SLACK * scale:
            raise DomainError(f"x={x} lies outside the support of sector m={m} (M={M})")
        return 0.0
    if rad <= EDGE_SLACK * scale:
        return 0.0
    return math.sqrt(rad) / (2.0 * math.pi * x)


def fermi_intersections(pt: RescaledPoint) -> tuple[float, float]:
    """alpha values where the Fermi line meets the band boundary, sorted."""
    c, w = pt.c, pt.w
    if w == 1:
        raise NoIntersectionError("w = 1: the Fermi line is parallel to the band asymptote")
    disc = c - c * w + w * w
    if disc < 0:
        raise NoIntersectionError(
            f"c - c w + w^2 = {disc:.3g} < 0: the Fermi line misses the band")
    root = 2.0 * math.sqrt(disc)
    denom = (1.0 - w) ** 2
    a1 = (c - c * w + 2.0 * w - root) / denom
    a2 = (c - c * w + 2.0 * w + root) / denom
    return (min(a1, a2), max(a1, a2))


def bessel_zero_density(j: float, m: float) -> float:
    """Density sqrt(1 - m^2/j^2)/pi of the zeros of J_m near j."""
    if j < abs(m):
        raise DomainError(f"j={j} below |m|={abs(m)}")
    if j == 0:
        return 1.0 / math.pi
    return math.sqrt(max(1.0 - (m / j) ** 2, 0.0)) / math.pi


def bessel_zero_count(j: float, m: float) -> float:
    """Integral of :func:`bessel_zero_density` from |m| to j."""
    m = abs(m)
    if j < m:
        raise DomainError(f"j={j} below |m|={m}")
    if m == 0:
        return j / math.pi
    return (math.sqrt(j * j - m * m) - m * math.acos(m / j)) / math.pi
