"""Damped Newton iteration for small nonlinear systems."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import SolverError


@dataclass
class NewtonResult:
    x: np.ndarray
    residual: float
    iterations: int
    trace: list = field(default_factory=list)


def fd_jacobian(fun: Callable, x: np.ndarray, fx: Optional[np.ndarray] = None,
                rel_step: float = 1e-7) -> np.ndarray:
    """Central-difference Jacobian with per-coordinate steps scaled to |x|."""
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(len(x)):
        h = rel_step * max(abs(x[i]), 1.0)
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        cols.append((np.asarray(fun(xp)) - np.asarray(fun(xm))) / (2 * h))
    return np.column_stack(cols)


def damped_newton(fun: Callable, x0, jac: Optional[Callable] = None, *,
                  tol: float = 1e-12, maxiter: int = 100,
                  accept: Optional[Callable] = None) -> NewtonResult:
    """Solve fun(x) = 0 by Newton steps with backtracking on ||fun||.

    ``accept(x)`` may veto trial points (for example ones that leave the
    branch the residual is defined on); vetoed points are treated like
    points that fail to reduce the residual.  Raises :class:`SolverError`
    carrying the best iterate and the residual trace.
    """
    x = np.array(x0, dtype=float)
    fx = np.asarray(fun(x), dtype=float)
    norm = float(np.linalg.norm(fx))
    trace = [(x.copy(), norm)]
    for it in range(1, maxiter + 1):
        if norm <= tol:
            return NewtonResult(x, norm, it - 1, trace)
        J = jac(x) if jac is not None else fd_jacobian(fun, x, fx)
        try:
            dx = np.linalg.solve(J, -fx)
        except np.linalg.LinAlgError:
            dx, *_ = np.linalg.lstsq(J, -fx, rcond=None)
        lam = 1.0
        while lam > 1e-10:
            xt = x + lam * dx
            if accept is None or accept(xt):
                ft = np.asarray(fun(xt), dtype=float)
                nt = float(np.linalg.norm(ft))
                if np.isfinite(nt) and nt < (1.0 - 1e-4 * lam) * norm:
                    break
            lam *= 0.5
        else:
            raise SolverError(f"line search stalled at residual {norm:.3g}",
                              best_x=x, best_residual=norm, trace=trace)
        x, fx, norm = xt, ft, nt
        trace.append((x.copy(), norm))
    if norm <= tol:
        return NewtonResult(x, norm, maxiter, trace)
    raise SolverError(f"no convergence in {maxiter} iterations (residual {norm:.3g})",
                      best_x=x, best_residual=norm, trace=trace)
