"""Low-temperature (Sommerfeld) grand potential of the 2D gas and its cross-checks.

Three routes to q(M, b, c, w) are provided:

* :func:`q_sommerfeld` - the closed form, linear in temperature;
* :func:`sector_integral` - the per-sector approximation it is built from,
  whose alpha integral reproduces the closed form;
* :func:`q_quadrature` - direct adaptive quadrature of the continuum
  integral at finite b, with no expansion.

The closed form is written as q = M^2 (b Q0(c, w) + Q1(c, w) / b); Q0 and Q1
and their partial derivatives are exposed through :func:`sommerfeld_coefficients`.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional

from scipy.integrate import quad

from .density import (RescaledPoint, band_radicand, eps_bounds, fermi_intersections,
                      zero_density_scaled)
from .errors import (DomainError, KinkError, NoIntersectionError,
                     QuadratureError, SommerfeldAccuracyWarning)

PI2 = math.pi ** 2
TIE_SLACK = 1e-12
B_FLOOR = 50.0


def step(x: float) -> float:
    """Heaviside step with step(0) = 0."""
    return 1.0 if x > 0 else 0.0


def _band_angles(eps: float, band) -> tuple[float, float, float]:
    """sqrt of the band radicand and the two arccos terms of the level count.

    With R = (eps - eps_-)(eps_+ - eps) the arguments of both arccos terms
    have sines proportional to sqrt(R), so each angle is an atan2 of exact
    sine and cosine parts.  This keeps full precision at the band edges,
    where arccos of a rounded argument near +-1 loses half the digits.
    """
    root = math.sqrt(band_radicand(eps, band))
    alpha = band.alpha
    outer = math.atan2(2.0 * root, band.eps_minus + band.eps_plus - 2.0 * eps)
    inner = math.atan2(root, alpha + eps)
    return root, outer, inner


def level_count_I(eps: float, alpha: float) -> float:
    """Fraction of sector alpha's levels below eps: integral of d from eps_- to eps."""
    band = eps_bounds(alpha)
    if band.width == 0.0:
        return 0.0
    root, outer, inner = _band_angles(eps, band)
    total = root / (2.0 * math.pi) + alpha * step(-alpha) + outer / math.pi
    # (eps_- + eps_+ - 4) / 2 = alpha
    if alpha != 0.0:
        total -= alpha / math.pi * inner
    return total


def level_energy_D(eps: float, alpha: float) -> float:
    """Integral of eps' d(eps', alpha) from eps_- to eps."""
    band = eps_bounds(alpha)
    if band.width == 0.0:
        return 0.0
    em, ep = band.eps_minus, band.eps_plus
    root, outer, _ = _band_angles(eps, band)
    return (ep - em) ** 2 / (16.0 * math.pi) * outer - (em + ep - 2.0 * eps) / (8.0 * math.pi) * root


def grand_L(eps: float, alpha: float) -> float:
    """Integral of I(eps', alpha) from eps_- to eps, i.e. eps*I - D."""
    return eps * level_count_I(eps, alpha) - level_energy_D(eps, alpha)


class SectorCase(enum.Enum):
    ABOVE_BAND = "AboveBand"
    INSIDE_BAND = "InsideBand"
    BELOW_BAND = "BelowBand"


@dataclass(frozen=True)
class SectorIntegralCase:
    tag: SectorCase
    value: float


def _warn_small_b(b: float) -> None:
    if b < B_FLOOR:
        warnings.warn(f"Sommerfeld accuracy degraded at b={b:.3g} < {B_FLOOR:g}",
                      SommerfeldAccuracyWarning, stacklevel=3)


def sector_integral(alpha: float, pt: RescaledPoint) -> SectorIntegralCase:
    """Low-temperature value of the epsilon integral in sector alpha."""
    _warn_small_b(pt.b)
    band = eps_bounds(alpha)
    f = pt.f(alpha)
    b = pt.b
    if f > band.eps_plus + TIE_SLACK:
        val = b * f * (1.0 + alpha * step(-alpha)) - b * band.width ** 2 / 16.0
        return SectorIntegralCase(SectorCase.ABOVE_BAND, val)
    if f < band.eps_minus - TIE_SLACK:
        return SectorIntegralCase(SectorCase.BELOW_BAND, 0.0)
    f_in = min(max(f, band.eps_minus), band.eps_plus)
    val = b * grand_L(f_in, alpha) + PI2 / (6.0 * b) * zero_density_scaled(f_in, alpha)
    return SectorIntegralCase(SectorCase.INSIDE_BAND, val)


def threshold(w: float) -> float:
    """Smallest c for which the Fermi line touches the band, w^2/(w - 1)."""
    return w * w / (w - 1.0)


class SommerfeldCoefficients(NamedTuple):
    """q = M^2 (b*Q0 + Q1/b) together with the c and w partials of Q0 and Q1."""

    Q0: float
    Q1: float
    Q0_c: float
    Q0_w: float
    Q1_c: float
    Q1_w: float


_ZERO = SommerfeldCoefficients(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


def sommerfeld_coefficients(c: float, w: float, side: Optional[str] = None) -> SommerfeldCoefficients:
    """Coefficients of the closed form on the branch selected by (c, w).

    ``side`` breaks ties on the two kinks (c = 0 and c = w^2/(w-1)): ``'+'``
    takes the branch reached from larger c, ``'-'`` from smaller c.  Q0 and its
    first partials are continuous across both kinks; only Q1_c jumps.
    """
    if w >= 1:
        raise DomainError(f"w must be < 1, got {w}")
    thr = threshold(w)
    below = c < thr or (c == thr and side == "-")
    if below:
        return _ZERO
    negative = c < 0 or (c == 0 and side == "-")
    wm1 = w - 1.0
    if not negative:
        Q0 = -(3 * c * c * wm1 ** 2 - 3 * c * wm1 * w * w + w ** 4) / (6 * wm1 ** 3)
        Q0_c = (w * w - 2 * c * wm1) / (2 * wm1 ** 2)
        Q0_w = -(-3 * c * c * wm1 ** 2 + 6 * c * w * wm1 + w ** 3 * (w - 4)) / (6 * wm1 ** 4)
        Q1 = -PI2 / (6 * wm1)
        return SommerfeldCoefficients(Q0, Q1, Q0_c, Q0_w, 0.0, PI2 / (6 * wm1 ** 2))
    # c < 0 forces w != 0 on the valid side of the threshold
    g = c - c * w + w * w
    Q0 = -g ** 3 / (6 * w * w * wm1 ** 3)
    Q0_c = g * g / (2 * w * w * wm1 ** 2)
    Q0_w = -g * g * (2 * c * wm1 ** 2 + w * w * (w - 4)) / (6 * w ** 3 * wm1 ** 4)
    Q1 = -PI2 * g / (6 * w * w * wm1)
    Q1_c = PI2 / (6 * w * w)
    Q1_w = PI2 / 6 * (-2 * c / w ** 3 + 1 / wm1 ** 2)
    return SommerfeldCoefficients(Q0, Q1, Q0_c, Q0_w, Q1_c, Q1_w)


def q_sommerfeld(M: float, pt: RescaledPoint) -> float:
    """Closed-form q(M, b, c, w) to linear order in temperature (zero below threshold)."""
    if pt.w >= 1:
        raise DomainError(f"w must be < 1 (divergent ensemble), got {pt.w}")
    _warn_small_b(pt.b)
    co = sommerfeld_coefficients(pt.c, pt.w)
    return M * M * (pt.b * co.Q0 + co.Q1 / pt.b)


def _on_kink(c: float, w: float) -> bool:
    if c == 0.0:
        return True
    thr = threshold(w)
    return thr != 0.0 and abs(c - thr) <= 1e-14 * abs(thr)


def q_partials(M: float, pt: RescaledPoint, side: Optional[str] = None) -> tuple[float, float, float]:
    """(dq/dc, dq/dw, dq/db) of :func:`q_sommerfeld`.

    On c = 0 or on the threshold the c-derivative is one-sided; pass
    ``side='+'`` or ``side='-'`` to choose, otherwise :class:`KinkError`.
    """
    if pt.w >= 1:
        raise DomainError(f"w must be < 1, got {pt.w}")
    if side is None and _on_kink(pt.c, pt.w):
        raise KinkError(f"(c={pt.c}, w={pt.w}) lies on a kink; evaluate with side='+' or side='-'")
    if side is not None and _on_kink(pt.c, pt.w):
        c = 0.0 if pt.c == 0.0 else threshold(pt.w)
    else:
        c = pt.c
    co = sommerfeld_coefficients(c, pt.w, side)
    b = pt.b
    m2 = M * M
    return (m2 * (b * co.Q0_c + co.Q1_c / b),
            m2 * (b * co.Q0_w + co.Q1_w / b),
            m2 * (co.Q0 - co.Q1 / (b * b)))


def _softplus_neg(z: float) -> float:
    if z > 0:
        return math.log1p(math.exp(-z))
    return -z + math.log1p(math.exp(z))


def _check_quad(val, err, info, what, rtol):
    if len(info) > 3 and err > max(rtol * abs(val), 1e-300):
        raise QuadratureError(f"{what} did not converge: {val!r} +/- {err:.3g} ({info[-1]})",
                              estimate=val, error_bound=err)


def _sector_quadrature(alpha: float, pt: RescaledPoint, rtol: float) -> float:
    """Finite-b epsilon integral of d * log(1 + e^{-b(eps - f)}) in one sector.

    Uses eps = center - half_width * cos(phi), which removes the square-root
    edges of d; the Fermi point is passed as a breakpoint.
    """
    band = eps_bounds(alpha)
    h = 0.5 * band.width
    if h == 0.0:
        return 0.0
    mc = band.center
    f = pt.f(alpha)
    b = pt.b

    def integrand(phi):
        s = math.sin(phi)
        eps = mc - h * math.cos(phi)
        if eps <= 0.0:
            return 0.0
        return h * h * s * s / (2.0 * math.pi * eps) * _softplus_neg(b * (eps - f))

    points = None
    if band.eps_minus < f < band.eps_plus:
        points = [math.acos((mc - f) / h)]
    res = quad(integrand, 0.0, math.pi, points=points, limit=200,
               epsabs=0.0, epsrel=rtol, full_output=1)
    _check_quad(res[0], res[1], res, f"sector quadrature at alpha={alpha}", 1e3 * rtol)
    return res[0]


def _alpha_cutoff(pt: RescaledPoint, start: float) -> float:
    """alpha beyond which f sits at least 45/b below eps_- and keeps falling away."""
    w = pt.w
    a = max(start, 0.0)

    def gap(al):
        return eps_bounds(al).eps_minus - pt.f(al)

    def slope(al):
        return 1.0 - 1.0 / math.sqrt(al + 1.0) - w

    for _ in range(200):
        if pt.b * gap(a) >= 45.0 and pt.b * slope(a) >= 1.0:
            return a
        a = 2.0 * a + 1.0
    raise QuadratureError("could not bound the alpha tail", estimate=None, error_bound=None)


def q_quadrature(M: float, pt: RescaledPoint, rtol: float = 1e-9) -> float:
    """M^2 times the (alpha, eps) integral of d * log(1 + e^{-b(eps - f(alpha))})."""
    if pt.w >= 1:
        raise DomainError(f"w must be < 1, got {pt.w}")
    try:
        am, ap = fermi_intersections(pt)
        breaks = [a for a in (am, ap) if a > -1.0]
        start = ap
    except NoIntersectionError:
        breaks = []
        start = 0.0
    upper = _alpha_cutoff(pt, start)
    breaks = sorted({a for a in breaks if a < upper} | ({0.0} if upper > 0.0 else set()))
    inner_rtol = min(rtol * 1e-2, 1e-10)
    res = quad(lambda a: _sector_quadrature(a, pt, inner_rtol), -1.0, upper,
               points=breaks or None, limit=400, epsabs=0.0, epsrel=rtol, full_output=1)
    _check_quad(res[0], res[1], res, "alpha quadrature", 1e3 * rtol)
    return M * M * res[0]
