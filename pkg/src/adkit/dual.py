"""Forward-mode AD with dual numbers.

A :class:`Dual` is the pair ``primal + tangent*eps`` with ``eps**2 == 0``.
Each dual carries the tag of the differentiation that created it, so
duals belonging to different (nested) differentiations never mix: an
operand with a lower tag is treated as a constant.

The primal and tangent may themselves be AD scalars of a lower tag, which
is how derivative towers and forward-over-reverse products are formed.
First-order, un-nested passes over plain floats use the compiled
:class:`FastDual` when the extension is available.
"""
from . import _backend
from ._state import counters, depth, differentiation, new_tag, tag_of
from .elementary import atan2 as _atan2, base_value, cos, exp, ln, recip, sin, sqrt, tanh
from .errors import DomainError, PerturbationConfusionError

_plain = (float, int)


def _nonzero(fn, v):
    if base_value(v) == 0:
        raise DomainError(fn, base_value(v), "division by zero")


class Dual:
    __slots__ = ("primal", "tangent", "tag")

    def __init__(self, primal, tangent=0.0, tag=None):
        self.primal = primal
        self.tangent = tangent
        self.tag = new_tag() if tag is None else tag

    @property
    def base(self):
        return self.primal

    def __repr__(self):
        return f"Dual({self.primal!r}, {self.tangent!r}, tag={self.tag})"

    # -- arithmetic -----------------------------------------------------
    def __add__(self, o):
        t = tag_of(o)
        if t == self.tag:
            return Dual(self.primal + o.primal, self.tangent + o.tangent, self.tag)
        if t < self.tag:
            return Dual(self.primal + o, self.tangent, self.tag)
        return o.__radd__(self)

    def __radd__(self, o):
        return Dual(o + self.primal, self.tangent, self.tag)

    def __sub__(self, o):
        t = tag_of(o)
        if t == self.tag:
            return Dual(self.primal - o.primal, self.tangent - o.tangent, self.tag)
        if t < self.tag:
            return Dual(self.primal - o, self.tangent, self.tag)
        return o.__rsub__(self)

    def __rsub__(self, o):
        return Dual(o - self.primal, -self.tangent, self.tag)

    def __mul__(self, o):
        t = tag_of(o)
        if t == self.tag:
            return Dual(
                self.primal * o.primal,
                self.primal * o.tangent + self.tangent * o.primal,
                self.tag,
            )
        if t < self.tag:
            return Dual(self.primal * o, self.tangent * o, self.tag)
        return o.__rmul__(self)

    def __rmul__(self, o):
        return Dual(o * self.primal, o * self.tangent, self.tag)

    def __truediv__(self, o):
        t = tag_of(o)
        if t == self.tag:
            _nonzero("div", o.primal)
            q = self.primal / o.primal
            return Dual(q, (self.tangent - q * o.tangent) / o.primal, self.tag)
        if t < self.tag:
            _nonzero("div", o)
            return Dual(self.primal / o, self.tangent / o, self.tag)
        return o.__rtruediv__(self)

    def __rtruediv__(self, o):
        _nonzero("div", self.primal)
        q = o / self.primal
        return Dual(q, -q * self.tangent / self.primal, self.tag)

    def __neg__(self):
        return Dual(-self.primal, -self.tangent, self.tag)

    def __pos__(self):
        return self

    def __pow__(self, k):
        t = tag_of(k)
        if t > self.tag:
            return k.__rpow__(self)
        if t > 0:
            return exp(k * ln(self))
        p = self.primal
        if k == 0:
            return Dual(p ** 0, 0.0, self.tag)
        _check_pow(p, k)
        return Dual(p ** k, k * p ** (k - 1) * self.tangent, self.tag)

    def __rpow__(self, c):
        if c <= 0:
            raise DomainError("pow", c, "constant base must be > 0")
        v = c ** self.primal
        return Dual(v, v * ln(c) * self.tangent, self.tag)

    # -- comparisons act on the innermost primal ------------------------
    def __lt__(self, o):
        return base_value(self) < base_value(o)

    def __le__(self, o):
        return base_value(self) <= base_value(o)

    def __gt__(self, o):
        return base_value(self) > base_value(o)

    def __ge__(self, o):
        return base_value(self) >= base_value(o)

    # -- elementary functions -------------------------------------------
    def _ln(self):
        return Dual(ln(self.primal), self.tangent / self.primal, self.tag)

    def _exp(self):
        e = exp(self.primal)
        return Dual(e, e * self.tangent, self.tag)

    def _sin(self):
        return Dual(sin(self.primal), cos(self.primal) * self.tangent, self.tag)

    def _cos(self):
        return Dual(cos(self.primal), -sin(self.primal) * self.tangent, self.tag)

    def _sqrt(self):
        if base_value(self.primal) == 0:
            raise DomainError("sqrt", 0.0, "not differentiable at 0")
        s = sqrt(self.primal)
        return Dual(s, self.tangent / (2.0 * s), self.tag)

    def _tanh(self):
        th = tanh(self.primal)
        return Dual(th, (1.0 - th * th) * self.tangent, self.tag)

    def _recip(self):
        _nonzero("recip", self.primal)
        r = recip(self.primal)
        return Dual(r, -(r * r) * self.tangent, self.tag)

    def _atan2(self, y, x):
        tag = self.tag
        yp, yt = (y.primal, y.tangent) if tag_of(y) == tag else (y, 0.0)
        xp, xt = (x.primal, x.tangent) if tag_of(x) == tag else (x, 0.0)
        r2 = xp * xp + yp * yp
        if base_value(r2) == 0:
            raise DomainError("atan2", (0.0, 0.0), "not differentiable at the origin")
        return Dual(_atan2(yp, xp), (xp * yt - yp * xt) / r2, tag)


def _check_pow(p, k):
    b = base_value(p)
    if float(k).is_integer():
        if k < 0 and b == 0:
            raise DomainError("pow", b, "negative power of zero")
        return
    if b < 0 or (b == 0 and k < 1):
        raise DomainError("pow", b, f"non-integer power {k}")


# ---------------------------------------------------------------------------
# primitive constructors and rules


def lift_const(c, tag=None):
    """Constant ``c + 0*eps``."""
    return Dual(c, 0.0, tag)


def seed_var(v, vdot, tag=None):
    """Independent variable ``v + vdot*eps``."""
    return Dual(v, vdot, tag)


_ARITH = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
}


def dual_arith(op, a, b):
    try:
        fn = _ARITH[op]
    except KeyError:
        raise ValueError(f"unknown arithmetic op {op!r}") from None
    return fn(a, b)


def dual_elem(fn, a):
    from .elementary import UNARY

    try:
        f = UNARY[fn]
    except KeyError:
        raise ValueError(f"unknown elementary function {fn!r}") from None
    return f(a)


# ---------------------------------------------------------------------------
# forward-mode drivers


def _seeds(tag, x, r):
    if _backend.FastDual is not None and depth() == 1 and all(
        isinstance(v, _plain) and isinstance(d, _plain) for v, d in zip(x, r)
    ):
        fd = _backend.FastDual
        return [fd(float(v), float(d), tag) for v, d in zip(x, r)]
    return [Dual(v, d, tag) for v, d in zip(x, r)]


def primal_at(y, tag):
    t = tag_of(y)
    if t == tag:
        return y.primal
    if t < tag:
        return y
    raise PerturbationConfusionError(
        f"result carries tag {t} from a differentiation that already finished (current {tag})"
    )


def tangent_at(y, tag):
    t = tag_of(y)
    if t == tag:
        return y.tangent
    if t < tag:
        return 0.0
    raise PerturbationConfusionError(
        f"result carries tag {t} from a differentiation that already finished (current {tag})"
    )


def _is_seq(y):
    return isinstance(y, (list, tuple))


def _forward_pass(f, x, r):
    with differentiation() as tag:
        counters.forward_passes += 1
        y = f(_seeds(tag, x, r))
        if _is_seq(y):
            return [primal_at(v, tag) for v in y], [tangent_at(v, tag) for v in y]
        return primal_at(y, tag), tangent_at(y, tag)


def jvp(f, x, r):
    """One forward pass seeded with direction ``r``; returns ``(f(x), J(x) r)``.

    ``f`` takes a list of scalars and returns a scalar or a sequence;
    the result mirrors that shape.
    """
    x = list(x)
    r = list(r)
    if len(r) != len(x):
        raise ValueError(f"seed length {len(r)} does not match input length {len(x)}")
    return _forward_pass(f, x, r)


def _unit(n, i):
    e = [0.0] * n
    e[i] = 1.0
    return e


def grad_forward(f, x):
    """Gradient of scalar ``f`` by ``len(x)`` forward passes."""
    x = list(x)
    n = len(x)
    g = []
    for i in range(n):
        _, d = _forward_pass(f, x, _unit(n, i))
        if _is_seq(d):
            raise ValueError("grad_forward needs a scalar-valued function")
        g.append(d)
    return g


def jacobian_forward(f, x):
    """``m x n`` Jacobian as a list of rows, one forward pass per column."""
    x = list(x)
    n = len(x)
    cols = []
    for i in range(n):
        _, d = _forward_pass(f, x, _unit(n, i))
        cols.append(d if _is_seq(d) else [d])
    m = len(cols[0]) if cols else len(_as_list(f(x)))
    return [[cols[i][j] for i in range(n)] for j in range(m)]


def _as_list(y):
    return list(y) if _is_seq(y) else [y]

