"""Built-in test functions, written once and evaluated on any scalar type.

Every function accepts plain floats, dual numbers, tape variables or
counting scalars; the elementary functions come from
:mod:`adkit.elementary`.
"""
import math
from fractions import Fraction
from dataclasses import dataclass

from .elementary import base_value, ln, sin
from .errors import DomainError


def example_f(x1, x2):
    """``ln(x1) + x1*x2 - sin(x2)``, the two-input worked example."""
    return ln(x1) + x1 * x2 - sin(x2)


def example_vec(x):
    return example_f(x[0], x[1])


# -- logistic map ------------------------------------------------------------

_DL_CLOSED = {
    1: (1,),
    2: (4, -8),
    3: (16, -160, 384, -256),
    4: tuple(64 * c for c in (1, -42, 504, -2640, 7040, -9984, 7168, -2048)),
}


def logistic_l(n, x):
    """``l_n`` with ``l_1 = x`` and ``l_{k+1} = 4 l_k (1 - l_k)``."""
    if n not in (1, 2, 3, 4):
        raise ValueError(f"logistic_l supports n in 1..4, got {n}")
    v = x
    for _ in range(n - 1):
        v = 4 * v * (1 - v)
    return v


def logistic_dl_closed(n, x):
    """``d l_n / dx`` from the expanded (optimized) polynomials.

    The degree-7 polynomial has coefficients near 6e5 and cancels badly
    near its roots, so it is evaluated exactly in rationals (a float is
    an exact binary fraction) and rounded once.
    """
    try:
        coeffs = _DL_CLOSED[n]
    except KeyError:
        raise ValueError(f"logistic_dl_closed supports n in 1..4, got {n}") from None
    xq = Fraction(x)
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * xq + c
    return float(acc)


def logistic_product_form(x):
    """``64x(1-x)(1-2x)^2(1-8x+8x^2)^2``: ``l_4`` in factored form."""
    a = 1 - 2 * x
    b = 1 - 8 * x + 8 * x * x
    return 64 * x * (1 - x) * a * a * b * b


def logistic_vec(x):
    return logistic_l(4, x[0])


# -- Helmholtz free energy ---------------------------------------------------

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 generator (Steele, Lea & Flood); ``uniform`` returns the
    top 53 bits scaled to [0, 1)."""

    def __init__(self, seed):
        self.state = seed & _MASK64

    def next_u64(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self, lo=0.0, hi=1.0):
        return lo + (hi - lo) * ((self.next_u64() >> 11) * 2.0 ** -53)


@dataclass(frozen=True)
class HelmholtzSpec:
    n: int
    b: tuple
    A: tuple
    R: float = 1.0
    T: float = 1.0


def helmholtz_make(n, seed=42):
    """Deterministic instance: ``b_i ~ U[0.1, 0.2] / n`` then
    ``M_ij ~ U[-0.1, 0.1]`` row-major, ``A = (M + M^T) / 2``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = SplitMix64(seed)
    b = tuple(rng.uniform(0.1, 0.2) / n for _ in range(n))
    m = [[rng.uniform(-0.1, 0.1) for _ in range(n)] for _ in range(n)]
    a = tuple(tuple(0.5 * (m[i][j] + m[j][i]) for j in range(n)) for i in range(n))
    return HelmholtzSpec(n, b, a)


def helmholtz_point(n):
    """Standard interior evaluation point ``x_i = 1/(2n)``."""
    return [1.0 / (2 * n)] * n


_SQRT2 = math.sqrt(2.0)
_SQRT8 = math.sqrt(8.0)


def helmholtz_eval(spec, x):
    """``RT sum x_i ln(x_i/(1-b.x)) - x.Ax/(sqrt8 b.x) ln((1+(1+sqrt2)b.x)/(1+(1-sqrt2)b.x))``."""
    n = spec.n
    if len(x) != n:
        raise ValueError(f"expected {n} coordinates, got {len(x)}")
    b, A = spec.b, spec.A
    for xi in x:
        if base_value(xi) <= 0:
            raise DomainError("helmholtz", base_value(xi), "requires x_i > 0")
    bx = b[0] * x[0]
    for bi, xi in zip(b[1:], x[1:]):
        bx = bx + bi * xi
    rest = 1 - bx
    if base_value(rest) <= 0:
        raise DomainError("helmholtz", base_value(bx), "requires b.x < 1")
    s = x[0] * ln(x[0] / rest)
    for xi in x[1:]:
        s = s + xi * ln(xi / rest)
    x0, xt = x[0], x[1:]
    quad = None
    for row, xi in zip(A, x):
        acc = row[0] * x0
        for a, xj in zip(row[1:], xt):
            acc = acc + a * xj
        quad = acc * xi if quad is None else quad + acc * xi
    q = ln((1 + (1 + _SQRT2) * bx) / (1 + (1 - _SQRT2) * bx))
    return spec.R * spec.T * s - quad / (_SQRT8 * bx) * q


# -- optimisation test functions ---------------------------------------------


def rosenbrock(x):
    """``(1 - x)^2 + 100 (y - x^2)^2``."""
    a = 1 - x[0]
    c = x[1] - x[0] * x[0]
    return a * a + 100 * c * c


QUAD_A = ((4.0, 1.0, 0.5), (1.0, 3.0, 0.25), (0.5, 0.25, 2.0))
QUAD_B = (1.0, -2.0, 0.5)


def quadratic(x, A=QUAD_A, b=QUAD_B):
    """``x.Ax / 2 - b.x``; the default ``A`` is symmetric positive definite."""
    n = len(b)
    acc = 0.0
    for i in range(n):
        row = 0.0
        for j in range(n):
            row = row + A[i][j] * x[j]
        acc = acc + 0.5 * x[i] * row - b[i] * x[i]
    return acc


BUILTINS = {
    "example": (example_vec, 2),
    "logistic": (logistic_vec, 1),
    "rosenbrock": (rosenbrock, 2),
    "quadratic": (quadratic, 3),
}
