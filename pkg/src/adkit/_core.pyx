# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled first-order kernels over C doubles.

FastDual and FastTape/FastVar mirror the pure-Python Dual and Tape/Var
for the common case of one un-nested differentiation over plain floats.
They are only created at the outermost differentiation level, so any
operand carrying a higher tag belongs to an inner differentiation and is
handed to its own reflected method; a lower-tagged operand can only be a
value that escaped an earlier differentiation.
"""
cimport cython
from libc.math cimport log, exp, sin, cos, sqrt, tanh, atan2, pow as cpow, floor
from libc.stdlib cimport malloc, realloc, free
from libc.string cimport memset

from .errors import DomainError, PerturbationConfusionError
from .elementary import base_value

# keep in sync with adkit.opkind.OpKind
cdef enum:
    K_INPUT = 0
    K_ADD = 1
    K_SUB = 2
    K_MUL = 3
    K_DIV = 4
    K_NEG = 5
    K_RECIP = 6
    K_LN = 7
    K_EXP = 8
    K_SIN = 9
    K_COS = 10
    K_SQRT = 11
    K_TANH = 12
    K_ATAN2 = 13
    K_POW = 14

OPKIND_CODES = dict(INPUT=K_INPUT, ADD=K_ADD, SUB=K_SUB, MUL=K_MUL, DIV=K_DIV,
                    NEG=K_NEG, RECIP=K_RECIP, LN=K_LN, EXP=K_EXP, SIN=K_SIN,
                    COS=K_COS, SQRT=K_SQRT, TANH=K_TANH, ATAN2=K_ATAN2, POW=K_POW)


cdef inline bint _plain(object o):
    return isinstance(o, float) or isinstance(o, int)


cdef inline long _tag(object o) except? -1:
    return getattr(o, "tag", 0)


cdef object _foreign(object o):
    return getattr(o, "tag", None) is None


cdef inline int _check_pow(double p, double k) except -1:
    if floor(k) == k:
        if k < 0 and p == 0:
            raise DomainError("pow", p, "negative power of zero")
        return 0
    if p < 0 or (p == 0 and k < 1):
        raise DomainError("pow", p, f"non-integer power {k}")
    return 0


# ---------------------------------------------------------------------------


cdef inline FastDual _mkd(double p, double t, long tag):
    cdef FastDual d = FastDual.__new__(FastDual)
    d.primal = p
    d.tangent = t
    d.tag = tag
    return d


@cython.freelist(512)
cdef class FastDual:
    cdef readonly double primal
    cdef readonly double tangent
    cdef readonly long tag

    def __init__(self, double primal, double tangent=0.0, long tag=0):
        self.primal = primal
        self.tangent = tangent
        self.tag = tag

    @property
    def base(self):
        return self.primal

    def __repr__(self):
        return f"FastDual({self.primal!r}, {self.tangent!r}, tag={self.tag})"

    cdef object _promote(self):
        from .dual import Dual
        return Dual(self.primal, self.tangent, self.tag)

    def __add__(self, o):
        cdef FastDual b
        if _plain(o):
            return _mkd(self.primal + <double>o, self.tangent, self.tag)
        if type(o) is FastDual and (<FastDual>o).tag == self.tag:
            b = <FastDual>o
            return _mkd(self.primal + b.primal, self.tangent + b.tangent, self.tag)
        if _foreign(o):
            return NotImplemented
        if _tag(o) > self.tag:
            return o.__radd__(self)
        return self._promote() + o

    def __radd__(self, o):
        if _plain(o):
            return _mkd(<double>o + self.primal, self.tangent, self.tag)
        if _foreign(o):
            return NotImplemented
        if _tag(o) > self.tag:
            return o.__add__(self)
        return o + self._promote()

    def __sub__(self, o):
        cdef FastDual b
        if _plain(o):
            return _mkd(self.primal - <double>o, self.tangent, self.tag)
        if type(o) is FastDual and (<FastDual>o).tag == self.tag:
            b = <FastDual>o
            return _mkd(self.primal - b.primal, self.tangent - b.tangent, self.tag)
        if _foreign(o):
            return NotImplemented
        if _tag(o) > self.tag:
            return o.__rsub__(self)
        return self._promote() - o

    def __rsub__(self, o):
        if _plain(o):
            return _mkd(<double>o - self.primal, -self.tangent, self.tag)
        if _foreign(o):
            return NotImplemented
        if _tag(o) > self.tag:
            return o.__sub__(self)
        return o - self._promote()

    def __mul__(self, o):
        cdef FastDual b
        cdef double c
        if _plain(o):
            c = <double>o
            return _mkd(self.primal * c, self.tangent * c, self.tag)
        if type(o) is FastDual and (<FastDual>o).tag == self.tag:
            b = <FastDual>o
            return _mkd(self.primal * b.primal,
                        self.primal * b.tangent + self.tangent * b.primal, self.tag)
        if _foreign(o):
            return NotImplemented
        if _tag(o) > self.tag:
            return o.__rmul__(self)
        return self._promote() * o

    def __rmul__(self, o):
        cdef double c
        if _plain(o):
            c = <double>o
            return _mkd(c * self.primal, c * self.tangent, self.tag)
        if _foreign(o):
            return NotImplemented
        if _tag(o) > self.tag:
            return o.__mul__(self)
        return o * self._promote()

    def __truediv__(self, o):
        cdef FastDual b
        cdef double c, q
        if _plain(o):
            c = <double>o
            if c == 0:
                raise DomainError("div", 0.0, "division by zero")
            return _mkd(self.primal / c, self.tangent / c, self.tag)
        if type(o) is FastDual and (<FastDual>o).tag == self.tag:
            b = <FastDual>o
            if b.primal == 0:
                raise DomainError("div", 0.0, "division by zero")
            q = self.primal / b.primal
            return _mkd(q, (self.tangent - q * b.tangent) / b.primal, self.tag)
        if _foreign(o):
            return NotImplemented
        if _tag(o) > self.tag:
            return o.__rtruediv__(self)
        return self._promote() / o

    def __rtruediv__(self, o):
        cdef double q
        if _plain(o):
            if self.primal == 0:
                raise DomainError("div", 0.0, "division by zero")
            q = <double>o / self.primal
            return _mkd(q, -q * self.tangent / self.primal, self.tag)
        if _foreign(o):
            return NotImplemented
        if _tag(o) > self.tag:
            return o.__truediv__(self)
        return o / self._promote()

    def __neg__(self):
        return _mkd(-self.primal, -self.tangent, self.tag)

    def __pos__(self):
        return self

    def __pow__(self, k, mod):
        cdef double kk, p = self.primal
        if _plain(k):
            kk = <double>k
            if kk == 0:
                return _mkd(1.0, 0.0, self.tag)
            _check_pow(p, kk)
            return _mkd(cpow(p, kk), kk * cpow(p, kk - 1.0) * self.tangent, self.tag)
        if _foreign(k):
            return NotImplemented
        if _tag(k) > self.tag:
            return k.__rpow__(self)
        if type(k) is FastDual and (<FastDual>k).tag == self.tag:
            return (k * self._ln())._exp()
        return self._promote() ** k

    def __rpow__(self, c, mod):
        cdef double v, cc
        if _plain(c):
            cc = <double>c
            if cc <= 0:
                raise DomainError("pow", cc, "constant base must be > 0")
            v = cpow(cc, self.primal)
            return _mkd(v, v * log(cc) * self.tangent, self.tag)
        return NotImplemented

    def __lt__(self, o):
        return self.primal < base_value(o)

    def __le__(self, o):
        return self.primal <= base_value(o)

    def __gt__(self, o):
        return self.primal > base_value(o)

    def __ge__(self, o):
        return self.primal >= base_value(o)

    def _ln(self):
        if self.primal <= 0:
            raise DomainError("ln", self.primal, "requires x > 0")
        return _mkd(log(self.primal), self.tangent / self.primal, self.tag)

    def _exp(self):
        cdef double e = exp(self.primal)
        return _mkd(e, e * self.tangent, self.tag)

    def _sin(self):
        return _mkd(sin(self.primal), cos(self.primal) * self.tangent, self.tag)

    def _cos(self):
        return _mkd(cos(self.primal), -sin(self.primal) * self.tangent, self.tag)

    def _sqrt(self):
        cdef double s
        if self.primal < 0:
            raise DomainError("sqrt", self.primal, "requires x >= 0")
        if self.primal == 0:
            raise DomainError("sqrt", 0.0, "not differentiable at 0")
        s = sqrt(self.primal)
        return _mkd(s, self.tangent / (2.0 * s), self.tag)

    def _tanh(self):
        cdef double th = tanh(self.primal)
        return _mkd(th, (1.0 - th * th) * self.tangent, self.tag)

    def _recip(self):
        cdef double r
        if self.primal == 0:
            raise DomainError("recip", 0.0, "division by zero")
        r = 1.0 / self.primal
        return _mkd(r, -(r * r) * self.tangent, self.tag)

    def _atan2(self, y, x):
        cdef double yp, yt, xp, xt, r2
        if type(y) is FastDual and (<FastDual>y).tag == self.tag:
            yp = (<FastDual>y).primal
            yt = (<FastDual>y).tangent
        elif _plain(y):
            yp = <double>y
            yt = 0.0
        else:
            return self._promote()._atan2(y, x)
        if type(x) is FastDual and (<FastDual>x).tag == self.tag:
            xp = (<FastDual>x).primal
            xt = (<FastDual>x).tangent
        elif _plain(x):
            xp = <double>x
            xt = 0.0
        else:
            return self._promote()._atan2(y, x)
        r2 = xp * xp + yp * yp
        if r2 == 0:
            raise DomainError("atan2", (0.0, 0.0), "not differentiable at the origin")
        return _mkd(atan2(yp, xp), (xp * yt - yp * xt) / r2, self.tag)


cdef class FastVar


# ---------------------------------------------------------------------------


cdef object _leak():
    return PerturbationConfusionError(
        "a compiled tape cannot record a value from another, already finished "
        "differentiation; set ADKIT_PURE_PYTHON=1 for mixed-level programs")


cdef class FastTape:
    cdef int* kinds
    cdef Py_ssize_t* in0
    cdef Py_ssize_t* in1
    cdef double* vals
    cdef double* p0
    cdef double* p1
    cdef double* adj
    cdef Py_ssize_t n
    cdef Py_ssize_t cap
    cdef bint swept
    cdef readonly long tag
    cdef public list input_ids

    def __cinit__(self, long tag=0):
        self.n = 0
        self.cap = 0
        self.tag = tag
        self.swept = False
        self.input_ids = []
        self._grow()

    def __dealloc__(self):
        free(self.kinds)
        free(self.in0)
        free(self.in1)
        free(self.vals)
        free(self.p0)
        free(self.p1)
        free(self.adj)

    cdef int _grow(self) except -1:
        cdef Py_ssize_t cap = 64 if self.cap == 0 else 2 * self.cap
        cdef void* t
        t = realloc(self.kinds, cap * sizeof(int))
        if t == NULL:
            raise MemoryError()
        self.kinds = <int*>t
        t = realloc(self.in0, cap * sizeof(Py_ssize_t))
        if t == NULL:
            raise MemoryError()
        self.in0 = <Py_ssize_t*>t
        t = realloc(self.in1, cap * sizeof(Py_ssize_t))
        if t == NULL:
            raise MemoryError()
        self.in1 = <Py_ssize_t*>t
        t = realloc(self.vals, cap * sizeof(double))
        if t == NULL:
            raise MemoryError()
        self.vals = <double*>t
        t = realloc(self.p0, cap * sizeof(double))
        if t == NULL:
            raise MemoryError()
        self.p0 = <double*>t
        t = realloc(self.p1, cap * sizeof(double))
        if t == NULL:
            raise MemoryError()
        self.p1 = <double*>t
        t = realloc(self.adj, cap * sizeof(double))
        if t == NULL:
            raise MemoryError()
        self.adj = <double*>t
        self.cap = cap
        return 0

    cdef FastVar _push(self, int k, Py_ssize_t a, Py_ssize_t b, double v, double pa, double pb):
        cdef Py_ssize_t i = self.n
        if i == self.cap:
            self._grow()
        self.kinds[i] = k
        self.in0[i] = a
        self.in1[i] = b
        self.vals[i] = v
        self.p0[i] = pa
        self.p1[i] = pb
        self.n = i + 1
        cdef FastVar r = FastVar.__new__(FastVar)
        r.tape = self
        r.index = i
        r.value = v
        return r

    def __len__(self):
        return self.n

    def var(self, double v):
        cdef FastVar r = self._push(K_INPUT, -1, -1, v, 0.0, 0.0)
        self.input_ids.append(r.index)
        return r

    def _rec1(self, int kind, Py_ssize_t a, double value, double pa):
        return self._push(kind, a, -1, value, pa, 0.0)

    def _rec2(self, int kind, Py_ssize_t a, Py_ssize_t b, double value, double pa, double pb):
        return self._push(kind, a, b, value, pa, pb)

    def sweep(self, seeds):
        """Reverse sweep from ``[(node_index, seed), ...]``; returns input adjoints."""
        cdef Py_ssize_t i, a, b, top = -1, idx
        cdef double g
        cdef double* adj = self.adj
        memset(adj, 0, self.n * sizeof(double))
        for idx, s in seeds:
            if idx < 0 or idx >= self.n:
                raise IndexError(idx)
            adj[idx] += <double>s
            if idx > top:
                top = idx
        i = top
        while i >= 0:
            g = adj[i]
            a = self.in0[i]
            if a >= 0:
                adj[a] += g * self.p0[i]
                b = self.in1[i]
                if b >= 0:
                    adj[b] += g * self.p1[i]
            i -= 1
        self.swept = True
        return [adj[j] for j in self.input_ids]

    @property
    def adjoints(self):
        if not self.swept:
            return [0.0] * self.n
        return [self.adj[i] for i in range(self.n)]

    @property
    def values(self):
        return [self.vals[i] for i in range(self.n)]

    def node_arrays(self):
        return ([self.kinds[i] for i in range(self.n)],
                [self.in0[i] for i in range(self.n)],
                [self.in1[i] for i in range(self.n)])

    def node(self, Py_ssize_t i):
        from .opkind import OpKind
        from .tape import TapeNode
        if i < 0 or i >= self.n:
            raise IndexError(i)
        ins = []
        ps = []
        if self.in0[i] >= 0:
            ins.append(self.in0[i])
            ps.append(self.p0[i])
        if self.in1[i] >= 0:
            ins.append(self.in1[i])
            ps.append(self.p1[i])
        adj = self.adj[i] if self.swept else 0.0
        return TapeNode(OpKind(self.kinds[i]), tuple(ins), tuple(ps), self.vals[i], adj)


@cython.freelist(512)
cdef class FastVar:
    cdef readonly FastTape tape
    cdef readonly Py_ssize_t index
    cdef readonly double value

    @property
    def tag(self):
        return self.tape.tag

    @property
    def base(self):
        return self.value

    def __repr__(self):
        return f"FastVar(#{self.index}, {self.value!r}, tag={self.tape.tag})"

    cdef inline bint _same(self, object o) except -1:
        if type(o) is FastVar:
            if (<FastVar>o).tape is self.tape:
                return True
            if (<FastVar>o).tape.tag == self.tape.tag:
                from .errors import TapeError
                raise TapeError("operands were recorded on different tapes")
        return False

    cdef object _other(self, object o, str name):
        if _foreign(o):
            return NotImplemented
        if _tag(o) > self.tape.tag:
            return getattr(o, name)(self)
        raise _leak()

    def __add__(self, o):
        cdef FastVar b
        if _plain(o):
            return self.tape._push(K_ADD, self.index, -1, self.value + <double>o, 1.0, 0.0)
        if self._same(o):
            b = <FastVar>o
            return self.tape._push(K_ADD, self.index, b.index, self.value + b.value, 1.0, 1.0)
        return self._other(o, "__radd__")

    def __radd__(self, o):
        if _plain(o):
            return self.tape._push(K_ADD, self.index, -1, <double>o + self.value, 1.0, 0.0)
        return self._other(o, "__add__")

    def __sub__(self, o):
        cdef FastVar b
        if _plain(o):
            return self.tape._push(K_SUB, self.index, -1, self.value - <double>o, 1.0, 0.0)
        if self._same(o):
            b = <FastVar>o
            return self.tape._push(K_SUB, self.index, b.index, self.value - b.value, 1.0, -1.0)
        return self._other(o, "__rsub__")

    def __rsub__(self, o):
        if _plain(o):
            return self.tape._push(K_SUB, self.index, -1, <double>o - self.value, -1.0, 0.0)
        return self._other(o, "__sub__")

    def __mul__(self, o):
        cdef FastVar b
        cdef double c
        if _plain(o):
            c = <double>o
            return self.tape._push(K_MUL, self.index, -1, self.value * c, c, 0.0)
        if self._same(o):
            b = <FastVar>o
            return self.tape._push(K_MUL, self.index, b.index, self.value * b.value, b.value, self.value)
        return self._other(o, "__rmul__")

    def __rmul__(self, o):
        cdef double c
        if _plain(o):
            c = <double>o
            return self.tape._push(K_MUL, self.index, -1, c * self.value, c, 0.0)
        return self._other(o, "__mul__")

    def __truediv__(self, o):
        cdef FastVar b
        cdef double c, q
        if _plain(o):
            c = <double>o
            if c == 0:
                raise DomainError("div", 0.0, "division by zero")
            return self.tape._push(K_DIV, self.index, -1, self.value / c, 1.0 / c, 0.0)
        if self._same(o):
            b = <FastVar>o
            if b.value == 0:
                raise DomainError("div", 0.0, "division by zero")
            q = self.value / b.value
            return self.tape._push(K_DIV, self.index, b.index, q, 1.0 / b.value, -q / b.value)
        return self._other(o, "__rtruediv__")

    def __rtruediv__(self, o):
        cdef double q
        if _plain(o):
            if self.value == 0:
                raise DomainError("div", 0.0, "division by zero")
            q = <double>o / self.value
            return self.tape._push(K_DIV, self.index, -1, q, -q / self.value, 0.0)
        return self._other(o, "__truediv__")

    def __neg__(self):
        return self.tape._push(K_NEG, self.index, -1, -self.value, -1.0, 0.0)

    def __pos__(self):
        return self

    def __pow__(self, k, mod):
        cdef double kk, p = self.value
        if _plain(k):
            kk = <double>k
            if kk == 0:
                return self.tape._push(K_POW, self.index, -1, 1.0, 0.0, 0.0)
            _check_pow(p, kk)
            return self.tape._push(K_POW, self.index, -1, cpow(p, kk), kk * cpow(p, kk - 1.0), 0.0)
        if self._same(k):
            return (k * self._ln())._exp()
        return self._other(k, "__rpow__")

    def __rpow__(self, c, mod):
        cdef double v, cc
        if _plain(c):
            cc = <double>c
            if cc <= 0:
                raise DomainError("pow", cc, "constant base must be > 0")
            v = cpow(cc, self.value)
            return self.tape._push(K_POW, self.index, -1, v, v * log(cc), 0.0)
        return NotImplemented

    def __lt__(self, o):
        return self.value < base_value(o)

    def __le__(self, o):
        return self.value <= base_value(o)

    def __gt__(self, o):
        return self.value > base_value(o)

    def __ge__(self, o):
        return self.value >= base_value(o)

    def _ln(self):
        if self.value <= 0:
            raise DomainError("ln", self.value, "requires x > 0")
        return self.tape._push(K_LN, self.index, -1, log(self.value), 1.0 / self.value, 0.0)

    def _exp(self):
        cdef double e = exp(self.value)
        return self.tape._push(K_EXP, self.index, -1, e, e, 0.0)

    def _sin(self):
        return self.tape._push(K_SIN, self.index, -1, sin(self.value), cos(self.value), 0.0)

    def _cos(self):
        return self.tape._push(K_COS, self.index, -1, cos(self.value), -sin(self.value), 0.0)

    def _sqrt(self):
        cdef double s
        if self.value < 0:
            raise DomainError("sqrt", self.value, "requires x >= 0")
        if self.value == 0:
            raise DomainError("sqrt", 0.0, "not differentiable at 0")
        s = sqrt(self.value)
        return self.tape._push(K_SQRT, self.index, -1, s, 0.5 / s, 0.0)

    def _tanh(self):
        cdef double th = tanh(self.value)
        return self.tape._push(K_TANH, self.index, -1, th, 1.0 - th * th, 0.0)

    def _recip(self):
        cdef double r
        if self.value == 0:
            raise DomainError("recip", 0.0, "division by zero")
        r = 1.0 / self.value
        return self.tape._push(K_RECIP, self.index, -1, r, -(r * r), 0.0)

    def _atan2(self, y, x):
        cdef double yp, xp, r2, v
        cdef bint ya = type(y) is FastVar and (<FastVar>y).tape is self.tape
        cdef bint xa = type(x) is FastVar and (<FastVar>x).tape is self.tape
        if not ya and not _plain(y) or not xa and not _plain(x):
            raise _leak()
        yp = (<FastVar>y).value if ya else <double>y
        xp = (<FastVar>x).value if xa else <double>x
        r2 = xp * xp + yp * yp
        if r2 == 0:
            raise DomainError("atan2", (0.0, 0.0), "not differentiable at the origin")
        v = atan2(yp, xp)
        if ya and xa:
            return self.tape._push(K_ATAN2, (<FastVar>y).index, (<FastVar>x).index, v, xp / r2, -yp / r2)
        if ya:
            return self.tape._push(K_ATAN2, (<FastVar>y).index, -1, v, xp / r2, 0.0)
        return self.tape._push(K_ATAN2, (<FastVar>x).index, -1, v, -yp / r2, 0.0)
