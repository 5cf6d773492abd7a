"""Elementary functions that accept plain numbers and every AD scalar type.

Plain numbers go straight to :mod:`math`; AD scalars implement the
corresponding ``_name`` method, which applies the derivative rule on top
of the primal evaluation. Derivatives are those of the exact functions,
evaluated with the libm primitives.
"""
import math

from ._state import tag_of
from .errors import DomainError

_plain = (float, int)


def ln(x):
    if isinstance(x, _plain):
        if x <= 0:
            raise DomainError("ln", x, "requires x > 0")
        return math.log(x)
    return x._ln()


log = ln


def exp(x):
    if isinstance(x, _plain):
        return math.exp(x)
    return x._exp()


def sin(x):
    if isinstance(x, _plain):
        return math.sin(x)
    return x._sin()


def cos(x):
    if isinstance(x, _plain):
        return math.cos(x)
    return x._cos()


def sqrt(x):
    if isinstance(x, _plain):
        if x < 0:
            raise DomainError("sqrt", x, "requires x >= 0")
        return math.sqrt(x)
    return x._sqrt()


def tanh(x):
    if isinstance(x, _plain):
        return math.tanh(x)
    return x._tanh()


def recip(x):
    if isinstance(x, _plain):
        if x == 0:
            raise DomainError("recip", x, "division by zero")
        return 1.0 / x
    return x._recip()


def neg(x):
    return -x


def sigmoid(x):
    return recip(1.0 + exp(-x))


def atan2(y, x):
    ty, tx = tag_of(y), tag_of(x)
    if ty == 0 and tx == 0:
        return math.atan2(y, x)
    hi = y if ty >= tx else x
    return hi._atan2(y, x)


def base_value(x):
    """Innermost plain float of an AD tower (the primal of all primals)."""
    while not isinstance(x, _plain):
        x = x.base
    return float(x)


UNARY = {
    "ln": ln,
    "exp": exp,
    "sin": sin,
    "cos": cos,
    "sqrt": sqrt,
    "tanh": tanh,
    "neg": neg,
    "recip": recip,
}
