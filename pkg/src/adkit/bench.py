"""Operation counting and the Helmholtz gradient-cost benchmark."""
import gc
import statistics
import time
from collections import Counter
from dataclasses import dataclass, field, fields

from .dual import grad_forward
from .elementary import atan2 as _atan2, base_value, cos, exp, ln, recip, sin, sqrt, tanh
from .functions import helmholtz_eval, helmholtz_make, helmholtz_point
from .numdiff import DiffScheme, grad_numeric
from .opkind import OpKind
from .tape import grad_reverse, trace

DEFAULT_N_LIST = (1, 8, 15, 22, 29, 36, 43, 50)


@dataclass
class OpCounter:
    """Per-kind tallies of elementary operations on active values.

    ``const_counts`` is the subset of binary operations whose other
    operand was a plain constant (e.g. the ``4*`` in ``4*l*(1-l)``).
    """

    counts: Counter = field(default_factory=Counter)
    const_counts: Counter = field(default_factory=Counter)

    @property
    def total(self):
        return sum(self.counts.values())

    def as_dict(self):
        return dict(self.counts)


class Counted:
    """Float wrapper that tallies every operation it takes part in."""

    __slots__ = ("value", "counter")
    tag = 1

    def __init__(self, value, counter):
        self.value = value
        self.counter = counter

    @property
    def base(self):
        return self.value

    def _bin(self, kind, o, fn):
        if isinstance(o, Counted):
            self.counter.counts[kind] += 1
            return Counted(fn(self.value, o.value), self.counter)
        self.counter.counts[kind] += 1
        self.counter.const_counts[kind] += 1
        return Counted(fn(self.value, o), self.counter)

    def _rbin(self, kind, o, fn):
        self.counter.counts[kind] += 1
        self.counter.const_counts[kind] += 1
        return Counted(fn(o, self.value), self.counter)

    def __add__(self, o):
        return self._bin("add", o, lambda a, b: a + b)

    def __radd__(self, o):
        return self._rbin("add", o, lambda a, b: a + b)

    def __sub__(self, o):
        return self._bin("sub", o, lambda a, b: a - b)

    def __rsub__(self, o):
        return self._rbin("sub", o, lambda a, b: a - b)

    def __mul__(self, o):
        return self._bin("mul", o, lambda a, b: a * b)

    def __rmul__(self, o):
        return self._rbin("mul", o, lambda a, b: a * b)

    def __truediv__(self, o):
        return self._bin("div", o, lambda a, b: a / b)

    def __rtruediv__(self, o):
        return self._rbin("div", o, lambda a, b: a / b)

    def __pow__(self, o):
        return self._bin("pow", o, lambda a, b: a ** b)

    def __rpow__(self, o):
        return self._rbin("pow", o, lambda a, b: a ** b)

    def __neg__(self):
        return self._un("neg", lambda a: -a)

    def __lt__(self, o):
        return self.value < base_value(o)

    def __le__(self, o):
        return self.value <= base_value(o)

    def __gt__(self, o):
        return self.value > base_value(o)

    def __ge__(self, o):
        return self.value >= base_value(o)

    def _un(self, kind, fn):
        self.counter.counts[kind] += 1
        return Counted(fn(self.value), self.counter)

    def _ln(self):
        return self._un("ln", ln)

    def _exp(self):
        return self._un("exp", exp)

    def _sin(self):
        return self._un("sin", sin)

    def _cos(self):
        return self._un("cos", cos)

    def _sqrt(self):
        return self._un("sqrt", sqrt)

    def _tanh(self):
        return self._un("tanh", tanh)

    def _recip(self):
        return self._un("recip", recip)

    def _atan2(self, y, x):
        self.counter.counts["atan2"] += 1
        return Counted(_atan2(base_value(y), base_value(x)), self.counter)


def count_ops(f, x):
    """Evaluate ``f`` on counting scalars; ``f`` takes a list."""
    c = OpCounter()
    f([Counted(float(v), c) for v in x])
    return c


# Arithmetic needed to form each node's local partials at record time,
# beyond the value itself; add/sub/neg/mul reuse constants or operands.
PARTIAL_COST = {
    OpKind.ADD: 0, OpKind.SUB: 0, OpKind.NEG: 0, OpKind.MUL: 0,
    OpKind.DIV: 2, OpKind.RECIP: 2, OpKind.LN: 1, OpKind.EXP: 0,
    OpKind.SIN: 1, OpKind.COS: 2, OpKind.SQRT: 1, OpKind.TANH: 2,
    OpKind.ATAN2: 6, OpKind.POW: 2,
}


def reverse_cost(tape, output_index):
    """Scalar operations of one gradient evaluation in reverse mode:
    each recorded node costs its value plus its partials, and the sweep
    costs a multiply and an add per incoming edge."""
    kinds, in0, in1 = tape.node_arrays()
    ops = 0
    for i in range(output_index + 1):
        k = OpKind(kinds[i])
        if k is OpKind.INPUT:
            continue
        arity = (in0[i] >= 0) + (in1[i] >= 0)
        ops += 1 + PARTIAL_COST[k] + 2 * arity
    return ops


def op_ratio_reverse(f, x):
    """Reverse-mode gradient cost divided by the cost of ``f`` itself."""
    t, y = trace(f, x)
    return reverse_cost(t, y.index) / count_ops(f, x).total


@dataclass
class BenchmarkRecord:
    n: int
    t_f: float
    t_num: float
    t_fwd: float
    t_rev: float
    rel_n1_num: float
    rel_n1_fwd: float
    rel_n1_rev: float
    rel_col_num: float
    rel_col_fwd: float
    rel_col_rev: float
    op_ratio_rev: float

    TIMING = ("t_f", "t_num", "t_fwd", "t_rev", "rel_n1_num", "rel_n1_fwd",
              "rel_n1_rev", "rel_col_num", "rel_col_fwd", "rel_col_rev")

    @classmethod
    def columns(cls):
        return [f.name for f in fields(cls)]


def time_medians(fns, reps, warmup=None):
    """Median wall time in seconds of single calls of each of ``fns``.

    The callables are timed round-robin within every repetition, so slow
    drifts in machine load affect all of them alike. The collector is
    paused while timing.
    """
    if warmup is None:
        warmup = max(1, reps // 20)
    for _ in range(warmup):
        for fn in fns:
            fn()
    samples = [[] for _ in fns]
    clock = time.perf_counter
    enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(reps):
            for fn, out in zip(fns, samples):
                t0 = clock()
                fn()
                out.append(clock() - t0)
    finally:
        if enabled:
            gc.enable()
    return [statistics.median(s) for s in samples]


def _time_f1(seed, reps):
    spec = helmholtz_make(1, seed)
    x = helmholtz_point(1)
    return time_medians([lambda: helmholtz_eval(spec, x)], reps)[0]


def benchmark_helmholtz(n_list=DEFAULT_N_LIST, seed=42, reps=1000, progress=None):
    """Time ``f`` and its gradient by center differences, forward AD and
    reverse AD at ``x_i = 1/(2n)`` for each ``n``."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    scheme = DiffScheme("center")
    records = []
    t_f1 = None
    for n in n_list:
        spec = helmholtz_make(n, seed)
        x = helmholtz_point(n)

        def f(v, spec=spec):
            return helmholtz_eval(spec, v)

        t_f, t_num, t_fwd, t_rev = time_medians(
            [
                lambda: f(x),
                lambda: grad_numeric(f, x, scheme),
                lambda: grad_forward(f, x),
                lambda: grad_reverse(f, x),
            ],
            reps,
        )
        if t_f1 is None:
            t_f1 = t_f if n == 1 else _time_f1(seed, reps)
        rec = BenchmarkRecord(
            n, t_f, t_num, t_fwd, t_rev,
            t_num / t_f1, t_fwd / t_f1, t_rev / t_f1,
            t_num / t_f, t_fwd / t_f, t_rev / t_f,
            op_ratio_reverse(f, x),
        )
        records.append(rec)
        if progress is not None:
            progress(rec)
    return records
