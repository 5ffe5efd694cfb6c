"""Two-term exponential least squares, a*exp(b*r) + c*exp(d*r).

Fitting is damped Gauss-Newton (Levenberg style) with the analytic
Jacobian

    d/da = exp(b r),  d/db = a r exp(b r),
    d/dc = exp(d r),  d/dd = c r exp(d r),

a multiplicative damping schedule (x10 on a rejected step, /10 on an
accepted one, starting at 1e-3), and a deterministic multistart around
the asymptote-plus-fast-rise shape typical of the allocation datasets.
The parameterization is symmetric under swapping (a,b) with (c,d), so
agreement between fits is judged in function space, not coefficient
space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

__all__ = ["ExpFitCoefficients", "FitReport", "eval_two_term_exp", "fit_two_term_exp"]

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 500
_DAMPING_INIT = 1e-3
_DAMPING_MIN = 1e-12
# multistart grid: amplitude scale x decay-rate start
_START_SCALES = (1.0, 0.5, 2.0, 1.5)
_START_DECAYS = (-20.0, -10.0, -40.0, -5.0)


@dataclass(frozen=True)
class ExpFitCoefficients:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.a, self.b, self.c, self.d)):
            raise ValueError(f"coefficients must be finite: {self}")

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)


@dataclass(frozen=True)
class FitReport:
    rmse: float
    iterations: int
    converged: bool


class RankDeficientFitError(RuntimeError):
    """No start produced a usable step (singular Jacobian everywhere)."""


def eval_two_term_exp(coeffs: ExpFitCoefficients, r):
    """Evaluate a*exp(b*r) + c*exp(d*r) for scalar or array r."""
    r = np.asarray(r, dtype=float)
    out = coeffs.a * np.exp(coeffs.b * r) + coeffs.c * np.exp(coeffs.d * r)
    return float(out) if out.ndim == 0 else out


def _residual(theta, r, y):
    a, b, c, d = theta
    return a * np.exp(b * r) + c * np.exp(d * r) - y


def _jacobian(theta, r):
    a, b, c, d = theta
    eb = np.exp(b * r)
    ed = np.exp(d * r)
    return np.column_stack([eb, a * r * eb, ed, c * r * ed])


def _lm_run(r, y, theta0, max_iter, tol):
    """One damped least-squares descent; returns (theta, sse, iters, converged)."""
    theta = np.asarray(theta0, dtype=float)
    res = _residual(theta, r, y)
    sse = float(res @ res)
    damping = _DAMPING_INIT
    for it in range(1, max_iter + 1):
        jac = _jacobian(theta, r)
        grad = jac.T @ res
        hess = jac.T @ jac
        diag = np.diag(np.diag(hess))
        accepted = False
        for _ in range(60):
            try:
                step = np.linalg.solve(hess + damping * diag, -grad)
            except np.linalg.LinAlgError:
                damping *= 10.0
                continue
            if not np.all(np.isfinite(step)):
                damping *= 10.0
                continue
            cand = theta + step
            with np.errstate(over="ignore", invalid="ignore"):
                res_c = _residual(cand, r, y)
                sse_c = float(res_c @ res_c) if np.all(np.isfinite(res_c)) else math.inf
            if sse_c < sse:
                gain = (sse - sse_c) / sse if sse > 0 else 0.0
                theta, res, sse = cand, res_c, sse_c
                damping = max(damping / 10.0, _DAMPING_MIN)
                accepted = True
                if gain < tol:
                    return theta, sse, it, True
                break
            damping *= 10.0
        if not accepted:
            # no downhill direction left at any damping: stationary
            return theta, sse, it, True
    return theta, sse, max_iter, False


def fit_two_term_exp(
    points: Sequence[Tuple[float, float]],
    init: Optional[ExpFitCoefficients] = None,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
    multistart: bool = True,
) -> Tuple[ExpFitCoefficients, FitReport]:
    """Least-squares fit of the two-term exponential to (r, value) points.

    Needs at least 4 points with distinct r values.  When ``init`` is
    omitted the default start is a = max(value), b = 0, c = -a, d = -20;
    with ``multistart`` a 16-point sign/scale perturbation grid of that
    start is tried and the lowest final SSE wins (ties: earliest start).
    Non-convergence is reported through the FitReport, not raised.
    """
    pts = [(float(r), float(y)) for r, y in points]
    if len(pts) < 4:
        raise ValueError(f"need at least 4 points to fit 4 parameters, got {len(pts)}")
    r = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if len(np.unique(r)) != len(r):
        raise ValueError("r values must be distinct")

    if init is not None:
        starts = [init.as_tuple()]
    else:
        amax = float(np.max(np.abs(y))) or 1.0
        starts = [
            (amax * s, 0.0, -amax * s, dec)
            for s in _START_SCALES
            for dec in _START_DECAYS
        ]
        if not multistart:
            starts = starts[:1]

    best = None
    for theta0 in starts:
        theta, sse, iters, converged = _lm_run(r, y, theta0, max_iter, tol)
        if not np.all(np.isfinite(theta)):
            continue
        if best is None or sse < best[1]:
            best = (theta, sse, iters, converged)
    if best is None:
        raise RankDeficientFitError("no start produced finite parameters")
    theta, sse, iters, converged = best
    coeffs = ExpFitCoefficients(*[float(v) for v in theta])
    report = FitReport(
        rmse=math.sqrt(sse / len(pts)), iterations=iters, converged=converged
    )
    return coeffs, report
