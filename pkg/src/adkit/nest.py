"""Nested and higher-order derivatives.

Each differentiation opens its own tag, so an inner derivative never
confuses its perturbation with an outer one: inside
``derivative(lambda y: x + y, 1.0)`` the outer ``x`` is a constant.
"""
from ._state import counters, differentiation, tag_of
from .dual import _seeds, jvp, tangent_at
from .tape import _tape_for, _value_at

_plain = (float, int)


def derivative(f, x):
    """``f'(x)`` for a scalar function, as the eps-coefficient of
    ``f(x + 1*eps)`` at a fresh tag. ``x`` may itself be an AD scalar."""
    with differentiation() as tag:
        counters.forward_passes += 1
        seed = _seeds(tag, [x], [1.0])[0]
        return tangent_at(f(seed), tag)


def nth_derivative(f, x, n):
    """``n``-th derivative by nesting :func:`derivative`."""
    g = f
    for _ in range(n):
        g = (lambda h: lambda y: derivative(h, y))(g)
    return g(x)


def hvp(f, x, v):
    """Hessian-vector product ``H_f(x) v`` without forming ``H``.

    The directional derivative ``grad f . v`` is computed by a forward
    pass whose primal values live on a tape; one reverse sweep of that
    result gives ``H v``.
    """
    x = list(x)
    v = list(v)
    if len(v) != len(x):
        raise ValueError(f"direction length {len(v)} does not match input length {len(x)}")
    with differentiation() as tag:
        t = _tape_for(tag, x)
        xs = [t.var(float(xi) if isinstance(xi, _plain) else xi) for xi in x]
        counters.recordings += 1
        _, d = jvp(f, xs, v)
        if isinstance(d, (list, tuple)):
            raise ValueError("hvp needs a scalar-valued function")
        _value_at(d, t)
        counters.sweeps += 1
        if tag_of(d) != tag:
            return [0.0] * len(x)
        return t.sweep([(d.index, 1.0)])


def hessian(f, x):
    """Dense Hessian assembled column by column from :func:`hvp`."""
    x = list(x)
    n = len(x)
    cols = []
    for i in range(n):
        e = [0.0] * n
        e[i] = 1.0
        cols.append(hvp(f, x, e))
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def asymmetry(h):
    """Largest ``|H_ij - H_ji|`` relative to ``max(1, max |H_ij|)``."""
    n = len(h)
    scale = max([1.0] + [abs(h[i][j]) for i in range(n) for j in range(n)])
    worst = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            worst = max(worst, abs(h[i][j] - h[j][i]))
    return worst / scale
