"""Finite-difference baseline and the step-size error curve.

These approximate derivatives from function values alone; they are here
as the comparison point for AD, not as a recommended method.
"""
import math
import sys
from dataclasses import dataclass

from ._state import counters
from .functions import logistic_dl_closed, logistic_product_form

EPS = sys.float_info.epsilon
FORWARD_STEP = math.sqrt(EPS)
CENTER_STEP = EPS ** (1.0 / 3.0)


@dataclass(frozen=True)
class DiffScheme:
    """``kind`` is ``"forward"`` or ``"center"``; ``step=None`` picks the
    scaled default ``sqrt(eps)*max(1,|x_i|)`` (forward) or
    ``cbrt(eps)*max(1,|x_i|)`` (center)."""

    kind: str = "center"
    step: float | None = None

    def __post_init__(self):
        if self.kind not in ("forward", "center"):
            raise ValueError(f"unknown difference scheme {self.kind!r}")
        if self.step is not None and not (math.isfinite(self.step) and self.step > 0):
            raise ValueError(f"step must be finite and positive, got {self.step!r}")

    def step_for(self, xi):
        if self.step is not None:
            return self.step
        base = FORWARD_STEP if self.kind == "forward" else CENTER_STEP
        return base * max(1.0, abs(xi))


def _eval(f, x):
    counters.f_evals += 1
    return f(x)


def _shifted(x, i, d):
    y = list(x)
    y[i] = x[i] + d
    return y


def forward_diff(f, x, i, h):
    """``(f(x + h e_i) - f(x)) / h``."""
    if not h > 0:
        raise ValueError("h must be positive")
    x = list(x)
    return (_eval(f, _shifted(x, i, h)) - _eval(f, x)) / h


def central_diff(f, x, i, h):
    """``(f(x + h e_i) - f(x - h e_i)) / 2h``."""
    if not h > 0:
        raise ValueError("h must be positive")
    x = list(x)
    return (_eval(f, _shifted(x, i, h)) - _eval(f, _shifted(x, i, -h))) / (2 * h)


def grad_numeric(f, x, scheme=DiffScheme()):
    """Gradient by coordinate-wise differences: ``n + 1`` evaluations of
    ``f`` for the forward scheme (``f(x)`` is shared), ``2n`` for center."""
    x = list(x)
    n = len(x)
    g = []
    if scheme.kind == "forward":
        f0 = _eval(f, x)
        for i in range(n):
            h = scheme.step_for(x[i])
            g.append((_eval(f, _shifted(x, i, h)) - f0) / h)
    else:
        for i in range(n):
            h = scheme.step_for(x[i])
            g.append((_eval(f, _shifted(x, i, h)) - _eval(f, _shifted(x, i, -h))) / (2 * h))
    return g


def evals_needed(n, scheme):
    return n + 1 if scheme.kind == "forward" else 2 * n


# -- error curve ---------------------------------------------------------------


@dataclass(frozen=True)
class ErrorCurveRow:
    h: float
    e_forward: float
    e_center: float


def log_grid(lo=1e-14, hi=1e-1, count=100):
    a, b = math.log10(lo), math.log10(hi)
    return [10.0 ** (a + (b - a) * k / (count - 1)) for k in range(count)]


def error_curve(x0=0.2, h_grid=None):
    """Absolute forward/center difference errors for the factored ``l_4``
    against its exact derivative from the expanded polynomial."""
    if h_grid is None:
        h_grid = log_grid()
    f = logistic_product_form
    exact = logistic_dl_closed(4, x0)
    f0 = f(x0)
    rows = []
    for h in h_grid:
        fp = f(x0 + h)
        ef = abs((fp - f0) / h - exact)
        ec = abs((fp - f(x0 - h)) / (2 * h) - exact)
        rows.append(ErrorCurveRow(h, ef, ec))
    return rows


def loglog_slope(hs, errs):
    """Least-squares slope of ``log10(err)`` against ``log10(h)``."""
    xs = [math.log10(h) for h in hs]
    ys = [math.log10(e) for e in errs]
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((a - mx) ** 2 for a in xs)
    sxy = sum((a - mx) * (b - my) for a, b in zip(xs, ys))
    return sxy / sxx
