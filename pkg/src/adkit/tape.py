"""Reverse-mode AD on an append-only tape (Wengert list).

Recording happens by operator overloading on :class:`Var`: each
elementary operation appends one node holding its value, up to two
parent indices and the local partial derivatives with respect to those
parents, all evaluated at record time. A reverse sweep then walks the
nodes from the output back to index 0, accumulating
``adjoint[parent] += adjoint[node] * partial``.

Nodes only ever reference earlier nodes, so strict reverse index order is
a valid reverse topological order. Adjoints are reset at the start of
every sweep; one recorded tape therefore serves any number of sweeps.
"""
from dataclasses import dataclass

from . import _backend
from ._state import counters, depth, differentiation, new_tag, tag_of
from .elementary import atan2 as _atan2, base_value, cos, exp, ln, recip, sin, sqrt, tanh
from .errors import DomainError, PerturbationConfusionError, TapeError
from .opkind import OpKind

_plain = (float, int)
ADD, SUB, MUL, DIV, NEG = OpKind.ADD, OpKind.SUB, OpKind.MUL, OpKind.DIV, OpKind.NEG
RECIP, LN, EXP, SIN, COS = OpKind.RECIP, OpKind.LN, OpKind.EXP, OpKind.SIN, OpKind.COS
SQRT, TANH, ATAN2, POW = OpKind.SQRT, OpKind.TANH, OpKind.ATAN2, OpKind.POW


@dataclass(frozen=True)
class TapeNode:
    """Read-only view of one recorded operation."""

    op_kind: OpKind
    input_ids: tuple
    local_partials: tuple
    value: object
    adjoint: object


def _nonzero(fn, v):
    if base_value(v) == 0:
        raise DomainError(fn, base_value(v), "division by zero")


class Var:
    """Reference to a node on a :class:`Tape`, carrying the node's value."""

    __slots__ = ("tape", "index", "value")

    def __init__(self, tape, index, value):
        self.tape = tape
        self.index = index
        self.value = value

    @property
    def tag(self):
        return self.tape.tag

    @property
    def base(self):
        return self.value

    def __repr__(self):
        return f"Var(#{self.index}, {self.value!r}, tag={self.tape.tag})"

    def _check(self, o):
        if o.tape is not self.tape:
            raise TapeError("operands were recorded on different tapes")

    # -- arithmetic -----------------------------------------------------
    def __add__(self, o):
        t = tag_of(o)
        if t == self.tape.tag:
            self._check(o)
            return self.tape._rec2(ADD, self.index, o.index, self.value + o.value, 1.0, 1.0)
        if t < self.tape.tag:
            return self.tape._rec1(ADD, self.index, self.value + o, 1.0)
        return o.__radd__(self)

    def __radd__(self, o):
        return self.tape._rec1(ADD, self.index, o + self.value, 1.0)

    def __sub__(self, o):
        t = tag_of(o)
        if t == self.tape.tag:
            self._check(o)
            return self.tape._rec2(SUB, self.index, o.index, self.value - o.value, 1.0, -1.0)
        if t < self.tape.tag:
            return self.tape._rec1(SUB, self.index, self.value - o, 1.0)
        return o.__rsub__(self)

    def __rsub__(self, o):
        return self.tape._rec1(SUB, self.index, o - self.value, -1.0)

    def __mul__(self, o):
        t = tag_of(o)
        if t == self.tape.tag:
            self._check(o)
            return self.tape._rec2(MUL, self.index, o.index, self.value * o.value, o.value, self.value)
        if t < self.tape.tag:
            return self.tape._rec1(MUL, self.index, self.value * o, o)
        return o.__rmul__(self)

    def __rmul__(self, o):
        return self.tape._rec1(MUL, self.index, o * self.value, o)

    def __truediv__(self, o):
        t = tag_of(o)
        if t == self.tape.tag:
            self._check(o)
            _nonzero("div", o.value)
            q = self.value / o.value
            return self.tape._rec2(DIV, self.index, o.index, q, 1.0 / o.value, -q / o.value)
        if t < self.tape.tag:
            _nonzero("div", o)
            return self.tape._rec1(DIV, self.index, self.value / o, 1.0 / o)
        return o.__rtruediv__(self)

    def __rtruediv__(self, o):
        _nonzero("div", self.value)
        q = o / self.value
        return self.tape._rec1(DIV, self.index, q, -q / self.value)

    def __neg__(self):
        return self.tape._rec1(NEG, self.index, -self.value, -1.0)

    def __pos__(self):
        return self

    def __pow__(self, k):
        t = tag_of(k)
        if t > self.tape.tag:
            return k.__rpow__(self)
        if t > 0:
            return exp(k * ln(self))
        p = self.value
        if k == 0:
            return self.tape._rec1(POW, self.index, p ** 0, 0.0)
        _check_pow(p, k)
        return self.tape._rec1(POW, self.index, p ** k, k * p ** (k - 1))

    def __rpow__(self, c):
        if c <= 0:
            raise DomainError("pow", c, "constant base must be > 0")
        v = c ** self.value
        return self.tape._rec1(POW, self.index, v, v * ln(c))

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
        return self.tape._rec1(LN, self.index, ln(self.value), recip(self.value))

    def _exp(self):
        e = exp(self.value)
        return self.tape._rec1(EXP, self.index, e, e)

    def _sin(self):
        return self.tape._rec1(SIN, self.index, sin(self.value), cos(self.value))

    def _cos(self):
        return self.tape._rec1(COS, self.index, cos(self.value), -sin(self.value))

    def _sqrt(self):
        if base_value(self.value) == 0:
            raise DomainError("sqrt", 0.0, "not differentiable at 0")
        s = sqrt(self.value)
        return self.tape._rec1(SQRT, self.index, s, 0.5 / s)

    def _tanh(self):
        th = tanh(self.value)
        return self.tape._rec1(TANH, self.index, th, 1.0 - th * th)

    def _recip(self):
        _nonzero("recip", self.value)
        r = recip(self.value)
        return self.tape._rec1(RECIP, self.index, r, -(r * r))

    def _atan2(self, y, x):
        tape = self.tape
        ya = tag_of(y) == tape.tag
        xa = tag_of(x) == tape.tag
        yp = y.value if ya else y
        xp = x.value if xa else x
        r2 = xp * xp + yp * yp
        if base_value(r2) == 0:
            raise DomainError("atan2", (0.0, 0.0), "not differentiable at the origin")
        v = _atan2(yp, xp)
        if ya and xa:
            if y.tape is not x.tape:
                raise TapeError("operands were recorded on different tapes")
            return tape._rec2(ATAN2, y.index, x.index, v, xp / r2, -yp / r2)
        if ya:
            return tape._rec1(ATAN2, y.index, v, xp / r2)
        return tape._rec1(ATAN2, x.index, v, -yp / r2)


def _check_pow(p, k):
    b = base_value(p)
    if float(k).is_integer():
        if k < 0 and b == 0:
            raise DomainError("pow", b, "negative power of zero")
        return
    if b < 0 or (b == 0 and k < 1):
        raise DomainError("pow", b, f"non-integer power {k}")


class Tape:
    """Pure-Python tape; values and partials may be any scalar type,
    which is what nested differentiation needs."""

    def __init__(self, tag=None):
        self.tag = new_tag() if tag is None else tag
        self.kinds = []
        self.in0 = []
        self.in1 = []
        self.values = []
        self.p0 = []
        self.p1 = []
        self.adjoints = []
        self.input_ids = []

    def __len__(self):
        return len(self.values)

    def _rec1(self, kind, a, value, pa):
        i = len(self.values)
        self.kinds.append(kind)
        self.in0.append(a)
        self.in1.append(-1)
        self.values.append(value)
        self.p0.append(pa)
        self.p1.append(0.0)
        return Var(self, i, value)

    def _rec2(self, kind, a, b, value, pa, pb):
        i = len(self.values)
        self.kinds.append(kind)
        self.in0.append(a)
        self.in1.append(b)
        self.values.append(value)
        self.p0.append(pa)
        self.p1.append(pb)
        return Var(self, i, value)

    def var(self, v):
        i = len(self.values)
        self.kinds.append(OpKind.INPUT)
        self.in0.append(-1)
        self.in1.append(-1)
        self.values.append(v)
        self.p0.append(0.0)
        self.p1.append(0.0)
        self.input_ids.append(i)
        return Var(self, i, v)

    def sweep(self, seeds):
        """Reverse sweep from ``[(node_index, seed), ...]``; returns the
        adjoints of the registered inputs in registration order."""
        n = len(self.values)
        adj = [0.0] * n
        top = -1
        for idx, s in seeds:
            adj[idx] = adj[idx] + s
            if idx > top:
                top = idx
        in0, in1, p0, p1 = self.in0, self.in1, self.p0, self.p1
        for i in range(top, -1, -1):
            g = adj[i]
            a = in0[i]
            if a >= 0:
                adj[a] = adj[a] + g * p0[i]
                b = in1[i]
                if b >= 0:
                    adj[b] = adj[b] + g * p1[i]
        self.adjoints = adj
        return [adj[i] for i in self.input_ids]

    def node(self, i):
        ins, ps = [], []
        if self.in0[i] >= 0:
            ins.append(self.in0[i])
            ps.append(self.p0[i])
        if self.in1[i] >= 0:
            ins.append(self.in1[i])
            ps.append(self.p1[i])
        adj = self.adjoints[i] if i < len(self.adjoints) else 0.0
        return TapeNode(OpKind(self.kinds[i]), tuple(ins), tuple(ps), self.values[i], adj)

    def node_arrays(self):
        """``(kinds, in0, in1)`` as plain lists, for cost accounting."""
        return list(self.kinds), list(self.in0), list(self.in1)


# ---------------------------------------------------------------------------
# tape-level API shared by both backends


def _owned(t, v):
    return tag_of(v) == t.tag and getattr(v, "tape", None) is t


def _new_tape(tag=None, fast=None):
    if fast is None:
        fast = depth() == 0
    if fast and _backend.FastTape is not None:
        return _backend.FastTape(new_tag() if tag is None else tag)
    return Tape(tag)


def tape_new():
    """Empty tape (compiled when available and not nested)."""
    return _new_tape()


def tape_var(t, v):
    """Register an independent variable with value ``v``."""
    return t.var(v)


def tape_nodes(t):
    return [t.node(i) for i in range(len(t))]


def record(t, op_kind, inputs, value, partials):
    """Append a node by hand; ``inputs`` are Vars of ``t``."""
    inputs = list(inputs)
    partials = list(partials)
    if not 1 <= len(inputs) <= 2 or len(partials) != len(inputs):
        raise ValueError("a node takes one or two inputs with one partial each")
    for v in inputs:
        if not _owned(t, v):
            raise TapeError("input does not belong to this tape")
    kind = OpKind(op_kind)
    if len(inputs) == 1:
        return t._rec1(kind, inputs[0].index, value, partials[0])
    return t._rec2(kind, inputs[0].index, inputs[1].index, value, partials[0], partials[1])


def reverse_sweep(t, output, seed=1.0):
    """Adjoints of all inputs of ``t`` for ``seed * d output``."""
    if not _owned(t, output):
        raise TapeError("output does not belong to this tape")
    counters.sweeps += 1
    return t.sweep([(output.index, seed)])


def dump(t):
    """Text dump, one node per line: ``id opkind in0 in1 value p0 p1``.

    Missing inputs and their partials print as ``-``.
    """
    lines = []
    for i in range(len(t)):
        nd = t.node(i)
        ins = list(nd.input_ids) + ["-"] * (2 - len(nd.input_ids))
        ps = [_fmt(p) for p in nd.local_partials] + ["-"] * (2 - len(nd.local_partials))
        lines.append(f"{i} {nd.op_kind.label} {ins[0]} {ins[1]} {_fmt(nd.value)} {ps[0]} {ps[1]}")
    return "\n".join(lines) + ("\n" if lines else "")


def _fmt(v):
    return format(base_value(v), ".12g")


def _value_at(y, t):
    ty = tag_of(y)
    if ty == t.tag:
        return y.value
    if ty < t.tag:
        return y
    raise PerturbationConfusionError(
        f"result carries tag {ty} from a differentiation that already finished"
    )


def _tape_for(tag, x):
    fast = depth() == 1 and all(isinstance(v, _plain) for v in x)
    if fast and _backend.FastTape is not None:
        return _backend.FastTape(tag)
    return Tape(tag)


def _is_seq(y):
    return isinstance(y, (list, tuple))


def grad_reverse(f, x):
    """``(f(x), grad f(x))`` from one recording and one reverse sweep."""
    x = list(x)
    with differentiation() as tag:
        t = _tape_for(tag, x)
        xs = [t.var(float(v) if isinstance(v, _plain) else v) for v in x]
        counters.recordings += 1
        y = f(xs)
        if _is_seq(y):
            raise ValueError("grad_reverse needs a scalar-valued function")
        yv = _value_at(y, t)
        counters.sweeps += 1
        if tag_of(y) == tag:
            g = t.sweep([(y.index, 1.0)])
        else:
            g = [0.0] * len(x)
        return yv, g


def vjp(f, x, r):
    """``(f(x), J(x)^T r)``: one recording, one sweep seeded with ``r``."""
    x = list(x)
    r = list(r)
    with differentiation() as tag:
        t = _tape_for(tag, x)
        xs = [t.var(float(v) if isinstance(v, _plain) else v) for v in x]
        counters.recordings += 1
        y = f(xs)
        scalar = not _is_seq(y)
        ys = [y] if scalar else list(y)
        if len(r) != len(ys):
            raise ValueError(f"cotangent length {len(r)} does not match output length {len(ys)}")
        yv = [_value_at(v, t) for v in ys]
        seeds = [(v.index, s) for v, s in zip(ys, r) if tag_of(v) == tag]
        counters.sweeps += 1
        g = t.sweep(seeds) if seeds else [0.0] * len(x)
        return (yv[0] if scalar else yv), g


def jacobian_reverse(f, x):
    """``m x n`` Jacobian as rows: one recording, ``m`` sweeps."""
    x = list(x)
    with differentiation() as tag:
        t = _tape_for(tag, x)
        xs = [t.var(float(v) if isinstance(v, _plain) else v) for v in x]
        counters.recordings += 1
        y = f(xs)
        ys = list(y) if _is_seq(y) else [y]
        rows = []
        for v in ys:
            _value_at(v, t)
            counters.sweeps += 1
            if tag_of(v) == tag:
                rows.append(t.sweep([(v.index, 1.0)]))
            else:
                rows.append([0.0] * len(x))
        return rows


def trace(f, x):
    """Record ``f`` at ``x`` without sweeping; returns ``(tape, y)``.

    Intended for inspection (dumps, cost accounting). The differentiation
    level is closed on return, so ``y`` must not be fed into further AD.
    """
    x = list(x)
    with differentiation() as tag:
        t = _tape_for(tag, x)
        xs = [t.var(float(v) if isinstance(v, _plain) else v) for v in x]
        counters.recordings += 1
        y = f(xs)
        return t, y
